"""Root data, Chevalley bases and the apartment of a split torus.

Conventions
-----------
* Roots are integer tuples in the simple-root basis.
* ``cartan[i][j] = <alpha_i, alpha_j^vee>``.
* Cocharacters are stored by their pairings with the simple roots
  (coordinates in the fundamental-coweight basis).  For the simply connected
  isogeny only coroot-lattice vectors are cocharacters.
* Building points are rational vectors in the coroot basis; the affine level
  of the line g_alpha (x) t^n at x is ``n - alpha(x)`` and Cartan lines sit at
  level ``n``.  With this sign, moving x to x - s*lam raises the level of a
  line of lam-weight i by exactly i*s.
* Structure-constant signs: N_{a,b} = +(p+1) on extraspecial pairs, where the
  positive roots are ordered by height and then lexicographically; the
  remaining signs are the first choice (in that order) satisfying Jacobi.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm

import numpy as np

from .core.fields import Field

CARTAN = {
    "A1": ((2,),),
    "A2": ((2, -1), (-1, 2)),
    # alpha_1 short, alpha_2 long
    "C2": ((2, -1), (-2, 2)),
    "G2": ((2, -1), (-3, 2)),
}
ALIASES = {"B2": "C2", "SL2": "A1", "SL3": "A2", "PGL2": "A1", "PGL3": "A2", "SP4": "C2"}
VALIDATED = ("A1", "A2", "C2", "G2")


class RootDataError(ValueError):
    pass


Root = tuple


@dataclass(frozen=True)
class RootDatum:
    cartan_type: str
    isogeny: str = "SC"

    def __post_init__(self):
        label = ALIASES.get(self.cartan_type.upper(), self.cartan_type.upper())
        if label not in CARTAN:
            raise RootDataError(f"unknown Cartan type {self.cartan_type!r}")
        if self.isogeny not in ("SC", "AD"):
            raise RootDataError(f"unknown isogeny tag {self.isogeny!r}")
        object.__setattr__(self, "cartan_type", label)

    # -- basic data -------------------------------------------------------
    @property
    def cartan(self) -> tuple:
        return CARTAN[self.cartan_type]

    @property
    def rank(self) -> int:
        return len(self.cartan)

    @cached_property
    def half_lengths(self) -> tuple[int, ...]:
        """(alpha_i, alpha_i)/2 with short roots normalized to 1."""
        if self.cartan_type == "C2":
            return (1, 2)
        if self.cartan_type == "G2":
            return (1, 3)
        return (1,) * self.rank

    def inner(self, a: Root, b: Root) -> Fraction:
        A, d = self.cartan, self.half_lengths
        # (alpha_i, alpha_j) = <alpha_i, alpha_j^vee> (alpha_j, alpha_j) / 2
        return Fraction(sum(a[i] * b[j] * A[i][j] * d[j] for i in range(self.rank) for j in range(self.rank)))

    def pair_coroot(self, beta: Root, j: int) -> int:
        """<beta, alpha_j^vee>."""
        return sum(beta[i] * self.cartan[i][j] for i in range(self.rank))

    def reflect(self, j: int, beta: Root) -> Root:
        c = self.pair_coroot(beta, j)
        return tuple(b - c * int(i == j) for i, b in enumerate(beta))

    @cached_property
    def positive_roots(self) -> tuple[Root, ...]:
        simple = [tuple(int(i == j) for i in range(self.rank)) for j in range(self.rank)]
        found = set(simple)
        frontier = list(simple)
        while frontier:
            nxt = []
            for b in frontier:
                for j in range(self.rank):
                    r = self.reflect(j, b)
                    if all(c >= 0 for c in r) and r not in found:
                        found.add(r)
                        nxt.append(r)
            frontier = nxt
        return tuple(sorted(found, key=lambda r: (sum(r), r)))

    @cached_property
    def roots(self) -> tuple[Root, ...]:
        pos = self.positive_roots
        return pos + tuple(tuple(-c for c in r) for r in pos)

    def is_root(self, beta: Root) -> bool:
        return tuple(beta) in self._root_set

    @cached_property
    def _root_set(self) -> frozenset:
        return frozenset(self.roots)

    @cached_property
    def highest_root(self) -> Root:
        return self.positive_roots[-1]

    def coroot(self, beta: Root) -> tuple[int, ...]:
        """beta^vee in the simple-coroot basis."""
        bb = self.inner(beta, beta)
        out = []
        for i in range(self.rank):
            c = Fraction(beta[i] * 2 * self.half_lengths[i]) / bb
            if c.denominator != 1:
                raise RootDataError("non-integral coroot")
            out.append(int(c))
        return tuple(out)

    def pair(self, beta: Root, lam: tuple) -> int | Fraction:
        """<beta, lam> for lam given by its simple-root pairings."""
        return sum(b * l for b, l in zip(beta, lam))

    def coroot_pairings(self, coroot_coords) -> tuple:
        """Pairings with simple roots of a vector given in coroot coordinates."""
        return tuple(
            sum(coroot_coords[j] * self.cartan[i][j] for j in range(self.rank)) for i in range(self.rank)
        )

    def pairings_to_coroot_coords(self, lam) -> tuple[Fraction, ...]:
        from .core.linalg import solve_q

        A = [[self.cartan[i][j] for j in range(self.rank)] for i in range(self.rank)]
        return tuple(solve_q(A, [Fraction(x) for x in lam]))

    def is_cocharacter(self, lam) -> bool:
        if any(Fraction(x).denominator != 1 for x in lam):
            return False
        if self.isogeny == "AD":
            return True
        return all(c.denominator == 1 for c in self.pairings_to_coroot_coords(lam))

    @cached_property
    def weyl_group(self) -> tuple[tuple, ...]:
        """Weyl group as permutations-by-matrix on simple-root coordinates."""
        r = self.rank
        gens = []
        for j in range(r):
            M = tuple(tuple(self.reflect(j, tuple(int(i == k) for i in range(r)))[row] for k in range(r)) for row in range(r))
            gens.append(np.array(M, dtype=np.int64))
        ident = np.eye(r, dtype=np.int64)
        seen = {ident.tobytes(): ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for g in frontier:
                for s in gens:
                    h = s @ g
                    key = h.tobytes()
                    if key not in seen:
                        seen[key] = h
                        nxt.append(h)
            frontier = nxt
        return tuple(tuple(map(tuple, g)) for g in seen.values())

    @property
    def dim(self) -> int:
        return self.rank + len(self.roots)

    def to_json(self) -> dict:
        return {"type": self.cartan_type, "isogeny": self.isogeny}

    @classmethod
    def from_json(cls, data: dict) -> "RootDatum":
        try:
            return cls(data["type"], data.get("isogeny", "SC"))
        except KeyError:
            raise RootDataError("root datum JSON needs a 'type'") from None


def build_root_datum(cartan_type: str, isogeny: str = "SC") -> RootDatum:
    return RootDatum(cartan_type, isogeny)


# -- Chevalley basis ------------------------------------------------------------

class ChevalleyBasis:
    """Chevalley basis with integer structure constants.

    Basis order: negative roots (by decreasing height), Cartan h_1..h_r,
    positive roots (by increasing height).  ``labels[i]`` is either
    ``("h", j)`` or ``("e", root)``.
    """

    def __init__(self, rd: RootDatum):
        self.rd = rd
        neg = [tuple(-c for c in r) for r in reversed(rd.positive_roots)]
        self.labels = (
            [("e", r) for r in neg] + [("h", j) for j in range(rd.rank)] + [("e", r) for r in rd.positive_roots]
        )
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        self.dim = len(self.labels)
        self._positive_table = self._choose_signs()
        self.structure = self._tensor(self._positive_table)

    def root_index(self, beta: Root) -> int:
        return self.index[("e", tuple(beta))]

    def cartan_index(self, j: int) -> int:
        return self.index[("h", j)]

    def string_p(self, a: Root, b: Root) -> int:
        """Largest p with b - p*a a root."""
        p = 0
        while self.rd.is_root(tuple(bi - (p + 1) * ai for ai, bi in zip(a, b))):
            p += 1
        return p

    def _positive_pairs(self):
        pos = self.rd.positive_roots
        order = {r: i for i, r in enumerate(pos)}
        pairs = []
        for a, b in itertools.combinations(pos, 2):
            s = tuple(x + y for x, y in zip(a, b))
            if self.rd.is_root(s):
                pairs.append((a, b) if order[a] < order[b] else (b, a))
        return pairs, order

    def _choose_signs(self) -> dict:
        pairs, order = self._positive_pairs()
        extraspecial = {}
        for a, b in pairs:
            s = tuple(x + y for x, y in zip(a, b))
            if s not in extraspecial or order[a] < order[extraspecial[s][0]]:
                extraspecial[s] = (a, b)
        special = set(extraspecial.values())
        free = [pr for pr in pairs if pr not in special]
        for signs in itertools.product((1, -1), repeat=len(free)):
            table = {}
            for a, b in pairs:
                mag = self.string_p(a, b) + 1
                table[(a, b)] = mag
            for (a, b), sg in zip(free, signs):
                table[(a, b)] *= sg
            T = self._tensor(table)
            if jacobi_defect(T) is None:
                return table
        raise RootDataError("no consistent structure-constant signs found")

    def _P(self, table, u, v) -> int:
        if (u, v) in table:
            return table[(u, v)]
        return -table[(v, u)]

    def N(self, a: Root, b: Root, table=None) -> int:
        table = self._positive_table if table is None else table
        rd = self.rd
        s = tuple(x + y for x, y in zip(a, b))
        if not rd.is_root(s):
            return 0
        g = tuple(-x for x in s)
        trip = [a, b, g]
        for k in range(3):
            u, v, w = trip[k], trip[(k + 1) % 3], trip[(k + 2) % 3]
            upos = sum(u) > 0
            vpos = sum(v) > 0
            if upos and vpos:
                nuv = self._P(table, u, v)
            elif not upos and not vpos:
                nuv = -self._P(table, tuple(-x for x in u), tuple(-x for x in v))
            else:
                continue
            c = Fraction(nuv) / rd.inner(w, w)
            val = c * rd.inner(g, g)
            if val.denominator != 1:
                raise RootDataError("non-integral structure constant")
            return int(val)
        raise AssertionError("unreachable: a root triple always has two roots of equal sign")

    def _tensor(self, table) -> np.ndarray:
        rd = self.rd
        n = self.dim
        T = np.zeros((n, n, n), dtype=np.int64)
        for i, (ki, xi) in enumerate(self.labels):
            for j, (kj, xj) in enumerate(self.labels):
                if ki == "h" and kj == "e":
                    T[i, j, j] = rd.pair_coroot(xj, xi)
                elif ki == "e" and kj == "h":
                    T[i, j, i] = -rd.pair_coroot(xi, xj)
                elif ki == "e" and kj == "e":
                    s = tuple(x + y for x, y in zip(xi, xj))
                    if not any(s):
                        for k, c in enumerate(rd.coroot(xi)):
                            T[i, j, self.index[("h", k)]] = c
                    elif rd.is_root(s):
                        T[i, j, self.index[("e", s)]] = self.N(xi, xj, table)
        return T

    def bracket(self, u, v) -> np.ndarray:
        """Integer bracket of coefficient vectors."""
        return np.einsum("i,j,ijk->k", np.asarray(u), np.asarray(v), self.structure)

    def ad(self, u) -> np.ndarray:
        """Matrix of ad(u): column j is [u, b_j]."""
        return np.einsum("i,ijk->kj", np.asarray(u), self.structure)


def jacobi_defect(T: np.ndarray, p: int | None = None):
    """First basis triple violating Jacobi (mod p if given), else None."""
    # [a,[b,c]] + [b,[c,a]] + [c,[a,b]]
    inner = np.einsum("bcm,amk->abck", T, T)
    total = inner + np.transpose(inner, (1, 2, 0, 3)) + np.transpose(inner, (2, 0, 1, 3))
    if p is not None:
        total = total % p
    bad = np.argwhere(total != 0)
    return None if len(bad) == 0 else tuple(int(x) for x in bad[0][:3])


def chevalley_constants(rd: RootDatum) -> ChevalleyBasis:
    cb = ChevalleyBasis(rd)
    if jacobi_defect(cb.structure) is not None:
        raise RootDataError("Jacobi identity fails")
    return cb


# -- apartment ------------------------------------------------------------------

@dataclass(frozen=True)
class BuildingPoint:
    coords: tuple  # Fractions in the simple-coroot basis

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))

    @classmethod
    def origin(cls, rank: int) -> "BuildingPoint":
        return cls((0,) * rank)

    @classmethod
    def parse(cls, items) -> "BuildingPoint":
        if isinstance(items, str):
            items = [s for s in items.replace(",", " ").split() if s]
        return cls(tuple(Fraction(str(s)) for s in items))

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coords]

    def __sub__(self, other: "BuildingPoint") -> "BuildingPoint":
        return BuildingPoint(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __add__(self, other: "BuildingPoint") -> "BuildingPoint":
        return BuildingPoint(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def scaled(self, s) -> "BuildingPoint":
        return BuildingPoint(tuple(Fraction(s) * c for c in self.coords))


def root_value(rd: RootDatum, x: BuildingPoint, beta: Root) -> Fraction:
    simple_vals = rd.coroot_pairings(x.coords)
    return sum((b * v for b, v in zip(beta, simple_vals)), Fraction(0))


def cocharacter_point(rd: RootDatum, lam) -> BuildingPoint:
    """The apartment vector of a cocharacter given by pairings."""
    return BuildingPoint(rd.pairings_to_coroot_coords(lam))


def affine_level(rd: RootDatum, x: BuildingPoint, root: Root | None, n: int) -> Fraction:
    """Moy-Prasad level of g_root (x) t^n at x; root=None means a Cartan line."""
    if root is None:
        return Fraction(n)
    return Fraction(n) - root_value(rd, x, root)


def period(rd: RootDatum, x: BuildingPoint) -> int:
    """Smallest m with every affine level at x in (1/m)Z."""
    m = 1
    for r in rd.roots:
        m = lcm(m, root_value(rd, x, r).denominator)
    return m
