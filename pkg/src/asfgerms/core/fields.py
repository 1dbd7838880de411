"""Finite fields F_p and F_{p^r} with a canonical integer encoding.

An element of F_{p^r} = F_p[x]/(m(x)) is stored as the integer
sum c_i p^i of its coefficient vector, so every element of a field of
order q is an int in range(q).  Vectorized helpers operate on numpy int64
arrays of such codes; prime fields use plain modular arithmetic and
extension fields go through precomputed addition/multiplication tables.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np


class FieldError(ValueError):
    """Usage error: mismatched fields or a malformed descriptor."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@lru_cache(maxsize=None)
def _conway_table() -> dict:
    text = resources.files("asfgerms.data").joinpath("conway.json").read_text()
    return json.loads(text)


def conway_modulus(p: int, r: int) -> tuple[int, ...]:
    try:
        return tuple(_conway_table()[str(p)][str(r)])
    except KeyError:
        raise FieldError(f"no shipped modulus for F_{p}^{r}") from None


def _poly_mulmod(a: list[int], b: list[int], mod: tuple[int, ...], p: int) -> list[int]:
    r = len(mod) - 1
    prod = [0] * (2 * r - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    # reduce with monic modulus
    for deg in range(len(prod) - 1, r - 1, -1):
        c = prod[deg]
        if c:
            for k in range(r + 1):
                prod[deg - r + k] = (prod[deg - r + k] - c * mod[k]) % p
    return prod[:r]


class Field:
    """The field F_q, q = p**r, with elements encoded as ints in range(q)."""

    def __init__(self, p: int, r: int = 1, modulus: tuple[int, ...] | None = None):
        if not _is_prime(p):
            raise FieldError(f"characteristic {p} is not prime")
        if r < 1:
            raise FieldError("degree must be positive")
        self.p = p
        self.r = r
        self.q = p**r
        if r == 1:
            self.modulus = (0, 1)
        else:
            mod = tuple(int(c) % p for c in (modulus or conway_modulus(p, r)))
            if len(mod) != r + 1 or mod[-1] != 1:
                raise FieldError("modulus must be monic of degree r")
            self.modulus = mod
        self._build_tables()

    def _build_tables(self) -> None:
        p, r, q = self.p, self.r, self.q
        if r == 1:
            self._add = self._mul = None
            inv = np.zeros(q, dtype=np.int64)
            for a in range(1, q):
                inv[a] = pow(a, p - 2, p)
            self._inv = inv
            self._neg = (-np.arange(q)) % p
            return
        digits = np.array([[(a // p**i) % p for i in range(r)] for a in range(q)], dtype=np.int64)
        weights = p ** np.arange(r, dtype=np.int64)
        add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
        neg = ((-digits) % p) @ weights
        mul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(a, q):
                c = _poly_mulmod(list(digits[a]), list(digits[b]), self.modulus, p)
                code = sum(int(ci) * p**i for i, ci in enumerate(c))
                mul[a, b] = mul[b, a] = code
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            hits = np.nonzero(mul[a] == 1)[0]
            if len(hits) != 1:
                raise FieldError(f"modulus {self.modulus} is not irreducible over F_{p}")
            inv[a] = hits[0]
        self._add, self._mul, self._neg, self._inv = add, mul, neg, inv

    # -- descriptor -------------------------------------------------------
    @property
    def descriptor(self) -> tuple:
        return (self.p, self.r, self.modulus)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Field) and self.descriptor == other.descriptor

    def __hash__(self) -> int:
        return hash(self.descriptor)

    def __repr__(self) -> str:
        return f"Field(q={self.q})" if self.r == 1 else f"Field({self.p}^{self.r}, {self.modulus})"

    @property
    def is_prime(self) -> bool:
        return self.r == 1

    # -- scalar arithmetic on codes --------------------------------------
    def add(self, a, b):
        if self.r == 1:
            return (a + b) % self.p
        return self._add[a, b]

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def neg(self, a):
        if self.r == 1:
            return (-a) % self.p
        return self._neg[a]

    def mul(self, a, b):
        if self.r == 1:
            return (a * b) % self.p
        return self._mul[a, b]

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self._inv[a] if np.ndim(a) else int(self._inv[a])

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> F_q (lands in the prime field)."""
        return int(n) % self.p

    def elements(self) -> range:
        return range(self.q)

    def units(self) -> range:
        return range(1, self.q)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        out, base = 1, int(a)
        while e:
            if e & 1:
                out = int(self.mul(out, base))
            base = int(self.mul(base, base))
            e >>= 1
        return out

    def is_square(self, a: int) -> bool:
        if a == 0:
            return True
        return self.pow(a, (self.q - 1) // 2) == 1

    def nonsquare(self) -> int:
        for a in self.units():
            if not self.is_square(a):
                return a
        raise FieldError("F_q has no non-squares")  # only q even

    def lift(self, a: int) -> int:
        """Symmetric integer lift of a prime-field element into (-p/2, p/2]."""
        if self.r != 1 and a >= self.p:
            raise FieldError("only prime-field elements lift to integers")
        a = int(a)
        return a - self.p if a > self.p // 2 else a

    # -- vectorized matrix helpers ----------------------------------------
    def matmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        if self.r == 1:
            return (A @ B) % self.p
        A = np.asarray(A)
        B = np.asarray(B)
        out_shape = np.broadcast_shapes(A.shape[:-2], B.shape[:-2]) + (A.shape[-2], B.shape[-1])
        C = np.zeros(out_shape, dtype=np.int64)
        for k in range(A.shape[-1]):
            C = self._add[C, self._mul[A[..., :, k, None], B[..., None, k, :]]]
        return C

    def matvec(self, A: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.matmul(A, np.asarray(v)[..., None])[..., 0]

    def scale(self, c, A: np.ndarray) -> np.ndarray:
        return self.mul(np.asarray(c), np.asarray(A))


@dataclass(frozen=True)
class FieldElement:
    """An element of a finite field with operator overloads."""

    field: Field
    value: int

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement):
            raise FieldError(f"cannot combine FieldElement with {type(other).__name__}")
        if other.field != self.field:
            raise FieldError("mismatched field descriptors")

    def __add__(self, other):
        self._check(other)
        return FieldElement(self.field, int(self.field.add(self.value, other.value)))

    def __sub__(self, other):
        self._check(other)
        return FieldElement(self.field, int(self.field.sub(self.value, other.value)))

    def __mul__(self, other):
        self._check(other)
        return FieldElement(self.field, int(self.field.mul(self.value, other.value)))

    def __neg__(self):
        return FieldElement(self.field, int(self.field.neg(self.value)))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.value))

    def __truediv__(self, other):
        self._check(other)
        return self * other.inverse()

    def __bool__(self) -> bool:
        return self.value != 0

    def coefficients(self) -> list[int]:
        p = self.field.p
        return [(self.value // p**i) % p for i in range(self.field.r)]

    def to_json(self):
        if self.field.r == 1:
            return str(self.value)
        return [str(c) for c in self.coefficients()]

    @classmethod
    def from_json(cls, field: Field, data) -> "FieldElement":
        if isinstance(data, list):
            if len(data) != field.r:
                raise FieldError("coefficient list length does not match field degree")
            return cls(field, sum((int(c) % field.p) * field.p**i for i, c in enumerate(data)))
        return cls(field, int(data) % field.p)


def field_arith(a: FieldElement, b: FieldElement | None, op: str) -> FieldElement:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    raise FieldError(f"unknown field operation {op!r}")


def check_characteristic(p: int, period: int = 1, max_weight: int = 0, strict: bool = False) -> None:
    """Enforce the residue-characteristic floor used throughout the package.

    Always: p odd, p does not divide the grading period, and every integer
    weight that must survive reduction mod p satisfies |w| < p.  In strict
    mode additionally p >= 5 and 2*max_weight < p.
    """
    if p == 2:
        raise FieldError("characteristic 2 is not supported")
    if period % p == 0:
        raise FieldError(f"characteristic {p} divides the grading period {period}")
    if max_weight >= p:
        raise FieldError(f"weight {max_weight} is not below the characteristic {p}")
    if strict and (p < 5 or 2 * max_weight >= p):
        raise FieldError(f"characteristic {p} below the strict floor for weight {max_weight}")
