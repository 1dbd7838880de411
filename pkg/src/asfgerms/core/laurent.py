"""Truncated Laurent series over F_q.

A series is a finite map exponent -> nonzero coefficient code together with
a precision N: coefficients at exponents >= N are unknown.  ``precision=None``
marks an exact Laurent polynomial.  Ring operations propagate precision
pessimistically.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .fields import Field, FieldError


class PrecisionError(ArithmeticError):
    """A quantity is not determined at the available precision."""


@dataclass(frozen=True)
class AtLeast:
    """Valuation marker for a series whose known window is all zero."""

    bound: int

    def __repr__(self) -> str:
        return f">= {self.bound}"


def _min_prec(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


@dataclass(frozen=True)
class TruncatedLaurent:
    field: Field
    coeffs: tuple = ()  # sorted (exponent, code) pairs, codes nonzero
    precision: int | None = None

    def __post_init__(self):
        clean = {}
        for n, c in self.coeffs:
            c = int(c) % self.field.q if self.field.r == 1 else int(c)
            if c and (self.precision is None or n < self.precision):
                clean[int(n)] = c
        object.__setattr__(self, "coeffs", tuple(sorted(clean.items())))

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_dict(cls, F: Field, d: dict, precision: int | None = None) -> "TruncatedLaurent":
        return cls(F, tuple(d.items()), precision)

    @classmethod
    def monomial(cls, F: Field, c: int, n: int, precision: int | None = None) -> "TruncatedLaurent":
        return cls(F, ((n, c),), precision)

    @classmethod
    def zero(cls, F: Field, precision: int | None = None) -> "TruncatedLaurent":
        return cls(F, (), precision)

    # -- access -----------------------------------------------------------
    def as_dict(self) -> dict[int, int]:
        return dict(self.coeffs)

    def coefficient(self, n: int) -> int:
        if self.precision is not None and n >= self.precision:
            raise PrecisionError(f"coefficient t^{n} unknown at precision {self.precision}")
        return self.as_dict().get(n, 0)

    def is_zero(self) -> bool:
        """True when every known coefficient vanishes (exact zero if precision is None)."""
        return not self.coeffs

    def valuation(self):
        """Smallest exponent with a nonzero coefficient, or AtLeast(N)."""
        if self.coeffs:
            return self.coeffs[0][0]
        if self.precision is None:
            return float("inf")
        return AtLeast(self.precision)

    def leading(self) -> tuple[int, int]:
        if not self.coeffs:
            raise PrecisionError("no known nonzero coefficient")
        return self.coeffs[0]

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "TruncatedLaurent") -> None:
        if self.field != other.field:
            raise FieldError("mismatched coefficient fields")

    def __add__(self, other: "TruncatedLaurent") -> "TruncatedLaurent":
        self._check(other)
        F = self.field
        d = self.as_dict()
        for n, c in other.coeffs:
            d[n] = int(F.add(d.get(n, 0), c))
        return TruncatedLaurent(F, tuple(d.items()), _min_prec(self.precision, other.precision))

    def __neg__(self) -> "TruncatedLaurent":
        F = self.field
        return TruncatedLaurent(F, tuple((n, int(F.neg(c))) for n, c in self.coeffs), self.precision)

    def __sub__(self, other: "TruncatedLaurent") -> "TruncatedLaurent":
        return self + (-other)

    def __mul__(self, other: "TruncatedLaurent") -> "TruncatedLaurent":
        self._check(other)
        F = self.field
        prec = None
        if self.precision is not None or other.precision is not None:
            va = self._val_bound()
            vb = other._val_bound()
            cands = []
            if self.precision is not None:
                cands.append(self.precision + vb)
            if other.precision is not None:
                cands.append(other.precision + va)
            prec = min(cands)
        d: dict[int, int] = {}
        for n, a in self.coeffs:
            for k, b in other.coeffs:
                d[n + k] = int(F.add(d.get(n + k, 0), F.mul(a, b)))
        return TruncatedLaurent(F, tuple(d.items()), prec)

    def _val_bound(self) -> int:
        v = self.valuation()
        if isinstance(v, AtLeast):
            return v.bound
        if v == float("inf"):
            return 10**9
        return v

    def scale(self, c: int) -> "TruncatedLaurent":
        F = self.field
        return TruncatedLaurent(F, tuple((n, int(F.mul(c, a))) for n, a in self.coeffs), self.precision)

    def shift(self, k: int) -> "TruncatedLaurent":
        """Multiply by t^k."""
        prec = None if self.precision is None else self.precision + k
        return TruncatedLaurent(self.field, tuple((n + k, c) for n, c in self.coeffs), prec)

    def truncate(self, N: int) -> "TruncatedLaurent":
        return TruncatedLaurent(self.field, self.coeffs, _min_prec(self.precision, N))

    def inverse(self, precision: int) -> "TruncatedLaurent":
        """Multiplicative inverse known at exponents < precision."""
        v, c0 = self.leading()
        F = self.field
        avail = None if self.precision is None else self.precision - v
        # work with the unit u = self / (c0 t^v); 1/u = sum of a recursive series
        unit = {n - v: int(F.mul(F.inv(c0), c)) for n, c in self.coeffs}
        want = precision + v  # exponents of 1/u needed: < precision + v
        if avail is not None:
            want = min(want, avail)
        out: dict[int, int] = {0: 1}
        for k in range(1, max(want, 0)):
            s = 0
            for j in range(1, k + 1):
                if j in unit and (k - j) in out:
                    s = F.add(s, F.mul(unit[j], out[k - j]))
            out[k] = int(F.neg(s))
        res = TruncatedLaurent(F, tuple(out.items()), max(want, 0))
        return res.scale(int(F.inv(c0))).shift(-v)

    def sqrt_unit(self, precision: int) -> "TruncatedLaurent":
        """Square root of a series 1 + O(t) (binomial recursion, p odd)."""
        F = self.field
        d = self.as_dict()
        if not self.coeffs or self.coeffs[0] != (0, 1):
            raise FieldError("sqrt_unit expects a series with leading term 1")
        if self.precision is not None:
            precision = min(precision, self.precision)
        out: dict[int, int] = {0: 1}
        inv2 = F.inv(F.from_int(2))
        for k in range(1, precision):
            s = d.get(k, 0)
            for j in range(1, k):
                s = F.sub(s, F.mul(out.get(j, 0), out.get(k - j, 0)))
            out[k] = int(F.mul(s, inv2))
        return TruncatedLaurent(F, tuple(out.items()), precision)

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        from .fields import FieldElement

        out = {str(n): FieldElement(self.field, c).to_json() for n, c in self.coeffs}
        return {"coeffs": out, "precision": self.precision}

    @classmethod
    def from_json(cls, F: Field, data: dict) -> "TruncatedLaurent":
        from .fields import FieldElement

        if not isinstance(data, dict) or "coeffs" not in data:
            raise FieldError("Laurent series JSON needs a 'coeffs' map")
        coeffs = tuple((int(n), FieldElement.from_json(F, c).value) for n, c in data["coeffs"].items())
        prec = data.get("precision")
        return cls(F, coeffs, None if prec is None else int(prec))

    def __repr__(self) -> str:
        terms = " + ".join(f"{c}t^{n}" for n, c in self.coeffs) or "0"
        tail = "" if self.precision is None else f" + O(t^{self.precision})"
        return terms + tail


def laurent_valuation(f: TruncatedLaurent):
    if not isinstance(f, TruncatedLaurent):
        raise FieldError("laurent_valuation expects a TruncatedLaurent")
    return f.valuation()
