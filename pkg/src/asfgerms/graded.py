"""Graded Lie algebras attached to apartment points.

At a point x every basis line sits at a level n - alpha(x) (Cartan lines at
n).  Taking the representative exponent with level in [0, 1) gives the base
level of each line; the graded piece at level d consists of the lines whose
base level is d mod 1, realized at exponent d + alpha(x).  Because exponents
add under the bracket, the quotient bracket between pieces is the Chevalley
bracket itself, so the Z/m-graded algebra is g(F_q) with a degree label on
each line; no root of unity is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .core.fields import Field, check_characteristic
from .core.laurent import AtLeast, PrecisionError, TruncatedLaurent
from .rootdata import BuildingPoint, ChevalleyBasis, RootDataError, RootDatum, period, root_value


class StructuralError(RuntimeError):
    pass


@lru_cache(maxsize=None)
def chevalley_basis(rd: RootDatum) -> ChevalleyBasis:
    return ChevalleyBasis(rd)


def frac(a: Fraction) -> Fraction:
    return a - math.floor(a)


def line_label(lab) -> str:
    kind, val = lab
    if kind == "h":
        return f"h{val + 1}"
    return "e(" + ",".join(str(c) for c in val) + ")"


class GradedLieAlgebra:
    """g over F_q graded by the levels at x."""

    def __init__(self, rd: RootDatum, x: BuildingPoint, F: Field):
        self.rd, self.x, self.F = rd, x, F
        self.cb = chevalley_basis(rd)
        self.dim = self.cb.dim
        self.labels = self.cb.labels
        self.m = period(rd, x)
        check_characteristic(F.p, self.m)
        self.alpha_x = []
        base = []
        for kind, val in self.labels:
            ax = Fraction(0) if kind == "h" else root_value(rd, x, val)
            self.alpha_x.append(ax)
            base.append(frac(-ax))
        self.base_level = tuple(base)
        self.degree = tuple(int(b * self.m) for b in base)
        self.struct = np.asarray(self.cb.structure % F.p, dtype=np.int64)

    # -- pieces ------------------------------------------------------------
    def piece(self, d) -> list[int]:
        """Basis indices spanning the graded piece at level d."""
        r = frac(Fraction(d))
        return [i for i, b in enumerate(self.base_level) if b == r]

    def piece_by_degree(self, n: int) -> list[int]:
        return [i for i, k in enumerate(self.degree) if k == n % self.m]

    def exponent(self, i: int, d) -> int:
        """t-exponent of line i inside the piece at level d."""
        e = Fraction(d) + self.alpha_x[i]
        if e.denominator != 1:
            raise ValueError(f"line {i} does not occur at level {d}")
        return int(e)

    def level(self, i: int, n: int) -> Fraction:
        return Fraction(n) - self.alpha_x[i]

    # -- bracket -------------------------------------------------------------
    def ad(self, u) -> np.ndarray:
        """Matrix of ad(u) over F_q (column j is [u, b_j])."""
        u = np.asarray(u, dtype=np.int64)
        F = self.F
        if F.is_prime:
            return np.einsum("i,ijk->kj", u, self.struct) % F.p
        out = np.zeros((self.dim, self.dim), dtype=np.int64)
        for i in np.nonzero(u)[0]:
            out = F.add(out, F.mul(int(u[i]), self.struct[i].T))
        return out

    def bracket(self, u, v) -> np.ndarray:
        return self.F.matvec(self.ad(u), np.asarray(v, dtype=np.int64))

    def is_nilpotent(self, u) -> bool:
        A = self.ad(u)
        P = A.copy()
        for _ in range(self.dim - 1):
            if not P.any():
                return True
            P = self.F.matmul(P, A)
        return not P.any()

    def weights(self, lam) -> np.ndarray:
        """lam-weight of every basis line."""
        return np.array(
            [0 if k == "h" else int(self.rd.pair(v, lam)) for k, v in self.labels], dtype=np.int64
        )

    def basis_vector(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[i] = 1
        return v

    def root_vector(self, root, c: int = 1) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[self.cb.root_index(tuple(root))] = c
        return v

    def to_json(self) -> dict:
        pieces: dict[str, list[str]] = {}
        for i, n in enumerate(self.degree):
            pieces.setdefault(str(n), []).append(line_label(self.labels[i]))
        return {"m": self.m, "x": self.x.to_json(), "q": self.F.q, "pieces": pieces}


def grade_at_point(rd: RootDatum, x: BuildingPoint, q: int | Field) -> GradedLieAlgebra:
    if len(x.coords) != rd.rank:
        raise RootDataError(f"point has {len(x.coords)} coordinates, rank is {rd.rank}")
    F = q if isinstance(q, Field) else field_of_order(q)
    return GradedLieAlgebra(rd, x, F)


def field_of_order(q: int) -> Field:
    for p in range(2, q + 1):
        if q % p == 0:
            r = round(math.log(q, p))
            if p**r != q:
                raise ValueError(f"{q} is not a prime power")
            return Field(p, r)
    raise ValueError(f"{q} is not a prime power")


def check_grading(g: GradedLieAlgebra) -> None:
    """Exhaustive check that [g^(a), g^(b)] lies in g^(a+b)."""
    nz = np.argwhere(g.struct != 0)
    for i, j, k in nz:
        if (g.degree[i] + g.degree[j] - g.degree[k]) % g.m:
            raise StructuralError(f"bracket of lines {i},{j} leaves the grading")


# -- weights ---------------------------------------------------------------------

@dataclass(frozen=True)
class WeightDecomposition:
    lam: tuple
    level: Fraction
    parts: dict  # weight -> list of basis indices

    def indices(self, pred) -> list[int]:
        return sorted(i for w, idx in self.parts.items() if pred(w) for i in idx)


def weight_split(g: GradedLieAlgebra, d, lam) -> WeightDecomposition:
    w = g.weights(lam)
    parts: dict[int, list[int]] = {}
    for i in g.piece(d):
        parts.setdefault(int(w[i]), []).append(i)
    return WeightDecomposition(tuple(lam), Fraction(d), parts)


# -- depth -----------------------------------------------------------------------

class InfiniteDepth:
    """Marker for nilpotent elements."""

    def __repr__(self) -> str:
        return "+inf"

    def __eq__(self, other) -> bool:
        return isinstance(other, InfiniteDepth)

    def __hash__(self) -> int:
        return 0

    def to_json(self) -> str:
        return "inf"


INF = InfiniteDepth()


def _lp_max(constraints, rank: int, box: int):
    """max z s.t. z <= c - <beta, y> for (beta, c); |y_i| <= box.  Exact vertex enumeration."""
    from itertools import combinations

    from .core.linalg import SingularSystemError, solve_q

    rows = [(list(map(Fraction, b)), Fraction(c)) for b, c in constraints]
    # z + beta.y <= c ; box: +-y_i <= box
    ineq = [(b + [Fraction(1)], c) for b, c in rows]
    for i in range(rank):
        e = [Fraction(int(j == i)) for j in range(rank)]
        ineq.append((e + [Fraction(0)], Fraction(box)))
        ineq.append(([-a for a in e] + [Fraction(0)], Fraction(box)))
    best = None
    for sub in combinations(ineq, rank + 1):
        try:
            sol = solve_q([a for a, _ in sub], [c for _, c in sub])
        except SingularSystemError:
            continue
        if all(sum(a * s for a, s in zip(A, sol)) <= c for A, c in ineq):
            if best is None or sol[-1] > best[0]:
                best = (sol[-1], sol[:-1])
    return best


def depth_of(rd: RootDatum, gamma: dict):
    """Depth of an element given as {basis label: TruncatedLaurent}.

    Maximizes over the apartment the minimum level of the nonzero lines; an
    unbounded maximum means the element is nilpotent in apartment position.
    """
    known, unknown = [], []
    # y in simple-coroot coordinates: beta(y) = sum_i b_i sum_j y_j A[i][j]
    A = rd.cartan
    for (kind, val), f in gamma.items():
        v = f.valuation()
        if kind == "h":
            beta = [0] * rd.rank
        else:
            beta = [sum(val[i] * A[i][j] for i in range(rd.rank)) for j in range(rd.rank)]
        if isinstance(v, AtLeast):
            unknown.append((beta, v.bound))
        elif v != float("inf"):
            known.append((beta, v))
    if not known:
        if unknown:
            raise PrecisionError("depth undetermined: no known nonzero coefficient")
        return INF
    small = _lp_max(known, rd.rank, 10**4)
    large = _lp_max(known, rd.rank, 2 * 10**4)
    if small[0] != large[0]:
        if unknown:
            raise PrecisionError("depth undetermined at the given precision")
        return INF
    z, y = small
    if unknown:
        z2 = _lp_max(known + unknown, rd.rank, 10**4)[0]
        if z2 < z:
            raise PrecisionError("depth undetermined at the given precision")
    return z


# -- descent invariants --------------------------------------------------------------

def _lines(g: GradedLieAlgebra, lam):
    w = g.weights(lam)
    for i in range(g.dim):
        yield i, int(w[i]), g.alpha_x[i]


def _first_positive(r: Fraction) -> Fraction:
    """Smallest delta in (0, 1] with delta = r mod 1."""
    f = frac(r)
    return f if f else Fraction(1)


def s0_value(g: GradedLieAlgebra, d, lam) -> Fraction:
    """min{s > 0 : the piece at (x - s lam, d + 2s) has a line of weight < 2}."""
    d = Fraction(d)
    best = None
    for i, wt, ax in _lines(g, lam):
        if wt >= 2:
            continue
        # level L = n - alpha(x) with L > d; s = (L - d)/(2 - wt)
        s = _first_positive(-ax - d) / (2 - wt)
        best = s if best is None or s < best else best
    if best is None:
        raise StructuralError("no positive breakpoint")
    return best


def s1_value(g: GradedLieAlgebra, d, lam) -> Fraction:
    """min{s > 0 : a weight != 2 line at level d+2s, or a weight != 0 line at level 0}."""
    d = Fraction(d)
    cands = []
    for i, wt, ax in _lines(g, lam):
        if wt < 2:
            cands.append(_first_positive(-ax - d) / (2 - wt))
        elif wt > 2:
            cands.append(_first_positive(ax + d) / (wt - 2))
        if wt > 0:
            # L + wt*s = 0 with L < 0
            cands.append(_first_positive(ax) / wt)
        elif wt < 0:
            cands.append(_first_positive(-ax) / (-wt))
    if not cands:
        raise StructuralError("no positive breakpoint")
    return min(cands)


def s0_scan(g: GradedLieAlgebra, d, lam, step=Fraction(1, 24), upto=2) -> Fraction | None:
    """Dense-scan oracle for s0 over s in step*Z cap (0, upto]."""
    d = Fraction(d)
    w = g.weights(lam)
    lam_pt = g.rd.pairings_to_coroot_coords(lam)
    k = 1
    while k * step <= upto:
        s = k * step
        y = BuildingPoint(tuple(c - s * l for c, l in zip(g.x.coords, lam_pt)))
        target = d + 2 * s
        for i, (kind, val) in enumerate(g.labels):
            if w[i] >= 2:
                continue
            ay = Fraction(0) if kind == "h" else root_value(g.rd, y, val)
            if (target + ay).denominator == 1:
                return s
        k += 1
    return None


@dataclass(frozen=True)
class DescentResult:
    s0: Fraction
    s1: Fraction
    x_prime: BuildingPoint
    d_prime: Fraction

    def to_json(self) -> dict:
        return {
            "s0": str(self.s0),
            "s1": str(self.s1),
            "x_prime": self.x_prime.to_json(),
            "d_prime": str(self.d_prime),
        }


def descent_invariant(datum) -> DescentResult:
    """s0, s1, x' = x - s0 lam, d' = d + 2 s0 for a nilpotent datum."""
    g, d, lam = datum.g, Fraction(datum.d), datum.lam
    s0 = s0_value(g, d, lam)
    s1 = s1_value(g, d, lam)
    lam_pt = g.rd.pairings_to_coroot_coords(lam)
    xp = BuildingPoint(tuple(c - s0 * l for c, l in zip(g.x.coords, lam_pt)))
    return DescentResult(s0, s1, xp, d + 2 * s0)
