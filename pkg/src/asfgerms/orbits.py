"""Reductive-quotient groups over F_q, nilpotent orbits, sl2-triples.

The group G_x(F_q) is realized through its adjoint action on g(F_q): it is the
closure under multiplication of the root-group elements exp(ad c e_beta) for
degree-0 lines and of the torus points of the chosen isogeny.  Elements are
dim x dim matrices acting on coefficient column vectors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .core.fields import Field, check_characteristic
from .core.linalg import rank as rank_f
from .core.linalg import solve
from .graded import GradedLieAlgebra, StructuralError


class BudgetError(RuntimeError):
    """Enumeration would exceed the configured budget."""

    def __init__(self, msg: str, partial: int = 0):
        super().__init__(msg)
        self.partial = partial


DEFAULT_BUDGET = 60000


# -- generators ----------------------------------------------------------------------

def _integer_exp_terms(g: GradedLieAlgebra, root) -> list[np.ndarray]:
    """(ad e_root)^k / k! as exact integer matrices, k = 0.. until zero."""
    i = g.cb.root_index(root)
    A = np.einsum("jk->kj", g.cb.structure[i]).astype(object)
    terms = [np.eye(g.dim, dtype=object)]
    P = np.eye(g.dim, dtype=object)
    k = 1
    while True:
        P = P.dot(A)
        if not P.any():
            break
        T = P / math.factorial(k)
        # integrality of the divided powers in a Chevalley basis
        if any(x != int(x) for x in T.flat):
            raise StructuralError("divided power is not integral")
        terms.append(np.vectorize(int)(T).astype(object))
        k += 1
    return terms


def root_exp(g: GradedLieAlgebra, root, c: int) -> np.ndarray:
    """Adjoint matrix of the root-group element x_root(c)."""
    F = g.F
    out = np.zeros((g.dim, g.dim), dtype=np.int64)
    for k, T in enumerate(_integer_exp_terms(g, tuple(root))):
        Tm = np.array([[int(v) % F.p for v in row] for row in T], dtype=np.int64)
        out = F.add(out, F.mul(F.pow(c, k), Tm))
    return out


def torus_element(g: GradedLieAlgebra, cochar, u: int) -> np.ndarray:
    """Adjoint matrix of mu(u) for a cocharacter given by simple-root pairings."""
    F = g.F
    w = g.weights(cochar)
    diag = [F.pow(u, int(k)) for k in w]
    return np.diag(np.array(diag, dtype=np.int64))


def primitive_element(F: Field) -> int:
    for a in F.units():
        if all(F.pow(a, (F.q - 1) // r) != 1 for r in _prime_factors(F.q - 1)):
            return a
    raise AssertionError("no primitive element")


def _prime_factors(n: int) -> list[int]:
    out, k = [], 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def torus_generators(g: GradedLieAlgebra) -> list[np.ndarray]:
    rd = g.rd
    u = primitive_element(g.F)
    gens = []
    for i in range(rd.rank):
        if rd.isogeny == "SC":
            lam = tuple(rd.cartan[j][i] for j in range(rd.rank))  # pairings of alpha_i^vee
        else:
            lam = tuple(int(j == i) for j in range(rd.rank))  # fundamental coweight
        gens.append(torus_element(g, lam, u))
    return gens


def group_generators(g: GradedLieAlgebra) -> list[np.ndarray]:
    gens = list(torus_generators(g))
    p = g.F.p
    for i in g.piece(0):
        kind, val = g.labels[i]
        if kind == "e":
            for j in range(g.F.r):
                gens.append(root_exp(g, val, p**j))
    return gens


# -- group enumeration -----------------------------------------------------------------

@dataclass
class GroupPoints:
    mats: np.ndarray  # (N, dim, dim) int8 codes
    g: GradedLieAlgebra

    @property
    def order(self) -> int:
        return len(self.mats)

    def act(self, v) -> np.ndarray:
        """All translates M v, shape (N, dim)."""
        v = np.asarray(v, dtype=np.int64)
        return self.g.F.matvec(self.mats.astype(np.int64), v)

    def subset(self, mask) -> "GroupPoints":
        return GroupPoints(self.mats[mask], self.g)


def _keys(arr: np.ndarray) -> list[bytes]:
    flat = np.ascontiguousarray(arr.reshape(len(arr), -1).astype(np.int8))
    return [r.tobytes() for r in flat]


def closure(F: Field, gens: list[np.ndarray], dim: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """All products of the generators (finite group), by breadth-first search."""
    ident = np.eye(dim, dtype=np.int64)
    G = np.stack([np.asarray(x, dtype=np.int64) for x in gens]) if gens else np.zeros((0, dim, dim), np.int64)
    seen = {ident.astype(np.int8).tobytes()}
    found = [ident.astype(np.int8)]
    frontier = ident[None]
    while len(frontier):
        new = []
        for s in G:
            prod = F.matmul(s[None], frontier)
            for k, key in zip(range(len(prod)), _keys(prod)):
                if key not in seen:
                    seen.add(key)
                    new.append(prod[k].astype(np.int8))
            if len(seen) > budget:
                raise BudgetError(f"group closure exceeds budget {budget}", len(seen))
        frontier = np.stack(new).astype(np.int64) if new else np.zeros((0, dim, dim), np.int64)
        found.extend(new)
    return np.stack(found)


_GROUP_CACHE: dict = {}


def group_points(g: GradedLieAlgebra, budget: int = DEFAULT_BUDGET) -> GroupPoints:
    key = (g.rd, g.x, g.F.descriptor)
    if key not in _GROUP_CACHE:
        mats = closure(g.F, group_generators(g), g.dim, budget)
        # canonical order, independent of generator order
        order = sorted(range(len(mats)), key=lambda k: mats[k].tobytes())
        _GROUP_CACHE[key] = mats[order]
    return GroupPoints(_GROUP_CACHE[key], g)


def group_inverse(F: Field, M: np.ndarray) -> np.ndarray:
    from .core.linalg import rref

    n = len(M)
    R, piv = rref(F, np.concatenate([M, np.eye(n, dtype=np.int64)], axis=1))
    if piv[:n] != list(range(n)):
        raise ValueError("singular matrix")
    return R[:, n:]


# -- nilpotent orbits -----------------------------------------------------------------------

def piece_vectors(g: GradedLieAlgebra, d) -> np.ndarray:
    """All vectors of the piece at level d, in lexicographic order."""
    idx = g.piece(d)
    q = g.F.q
    out = np.zeros((q ** len(idx), g.dim), dtype=np.int64)
    if idx:
        grid = np.array(list(itertools.product(range(q), repeat=len(idx))), dtype=np.int64)
        out[:, idx] = grid
    return out


def batch_nilpotent(g: GradedLieAlgebra, vecs: np.ndarray) -> np.ndarray:
    F = g.F
    mats = np.stack([g.ad(v) for v in vecs]) if len(vecs) else np.zeros((0, g.dim, g.dim), np.int64)
    P = mats.copy()
    for _ in range(g.dim - 1):
        P = F.matmul(P, mats)
    return ~P.reshape(len(vecs), -1).any(axis=1)


def vec_key(g: GradedLieAlgebra, v) -> int:
    q = g.F.q
    k = 0
    for c in v:
        k = k * q + int(c)
    return k


@dataclass
class Orbit:
    rep: np.ndarray
    size: int
    stab: int
    members: set = field(repr=False, default_factory=set)

    def to_json(self) -> dict:
        return {"rep": [int(c) for c in self.rep], "size": self.size, "stab": self.stab}


def nilpotent_orbits(g: GradedLieAlgebra, d, G: GroupPoints | None = None, budget: int = DEFAULT_BUDGET) -> list[Orbit]:
    G = G or group_points(g, budget)
    vecs = piece_vectors(g, d)
    if len(vecs) > budget:
        raise BudgetError(f"piece has {len(vecs)} vectors, over budget", 0)
    nil = vecs[batch_nilpotent(g, vecs)]
    keys = [vec_key(g, v) for v in nil]
    order = sorted(range(len(nil)), key=lambda k: keys[k])
    done: set = set()
    orbits = []
    for k in order:
        if keys[k] in done:
            continue
        imgs = G.act(nil[k])
        members = {vec_key(g, v) for v in imgs}
        done |= members
        orbits.append(Orbit(nil[k], len(members), G.order // len(members), members))
    return orbits


def orbit_of(g: GradedLieAlgebra, v, G: GroupPoints | None = None) -> set:
    G = G or group_points(g)
    return {vec_key(g, w) for w in G.act(v)}


# -- sl2-triples -------------------------------------------------------------------------------

@dataclass(frozen=True)
class SL2Triple:
    e: tuple
    h: tuple
    f: tuple

    def to_json(self) -> dict:
        return {k: [int(c) for c in getattr(self, k)] for k in ("e", "h", "f")}


def _restrict(g: GradedLieAlgebra, A: np.ndarray, cols: list[int]) -> np.ndarray:
    return A[:, cols]


def complete_triple(g: GradedLieAlgebra, e, d=None) -> SL2Triple:
    """Complete e in the piece at level d to an sl2-triple (e, h, f)."""
    F = g.F
    e = np.asarray(e, dtype=np.int64)
    if not e.any():
        raise ValueError("cannot complete the zero element")
    if d is None:
        d = g.base_level[int(np.nonzero(e)[0][0])]
    neg = g.piece(-Fraction(d))
    ade = g.ad(e)
    two_e = F.mul(F.from_int(2), e)
    # -[e,[e,f']] = 2e
    A = F.neg(F.matmul(ade, ade))[:, neg]
    sol = solve(F, A, two_e)
    if sol is None:
        raise StructuralError("e cannot be completed to an sl2-triple (characteristic too small?)")
    fp = np.zeros(g.dim, dtype=np.int64)
    fp[neg] = sol
    h = F.matvec(ade, fp)
    f = _solve_f(g, e, h, neg)
    if f is None:
        raise StructuralError("no f completing (e, h)")
    return SL2Triple(tuple(int(c) for c in e), tuple(int(c) for c in h), tuple(int(c) for c in f))


def _solve_f(g: GradedLieAlgebra, e, h, neg) -> np.ndarray | None:
    F = g.F
    ade = g.ad(e)[:, neg]
    adh = g.ad(h)[:, neg]
    two = F.from_int(2)
    eye = np.eye(g.dim, dtype=np.int64)[:, neg]
    top = ade
    bot = F.add(adh, F.mul(two, eye))  # [h,f] + 2f = 0
    A = np.concatenate([top, bot], axis=0)
    b = np.concatenate([np.asarray(h, dtype=np.int64), np.zeros(g.dim, dtype=np.int64)])
    sol = solve(F, A, b)
    if sol is None:
        return None
    f = np.zeros(g.dim, dtype=np.int64)
    f[neg] = sol
    return f


def check_triple(g: GradedLieAlgebra, t: SL2Triple) -> bool:
    F = g.F
    e, h, f = (np.asarray(v, dtype=np.int64) for v in (t.e, t.h, t.f))
    two = F.from_int(2)
    return (
        np.array_equal(g.bracket(h, e), F.mul(two, e))
        and np.array_equal(g.bracket(h, f), F.neg(F.mul(two, f)))
        and np.array_equal(g.bracket(e, f), h)
    )


def cartan_element(g: GradedLieAlgebra, lam) -> np.ndarray:
    """d lam(1) as a vector (Cartan part only)."""
    F = g.F
    coords = g.rd.pairings_to_coroot_coords(lam)
    v = np.zeros(g.dim, dtype=np.int64)
    for j, c in enumerate(coords):
        if c.denominator % F.p == 0:
            raise StructuralError("cocharacter denominator divisible by p")
        v[g.cb.cartan_index(j)] = F.mul(F.from_int(c.numerator), F.inv(F.from_int(c.denominator)))
    return v


def triple_for_lambda(g: GradedLieAlgebra, e, lam, d) -> SL2Triple | None:
    """The triple (e, d lam(1), f) if it exists."""
    h = cartan_element(g, lam)
    F = g.F
    if not np.array_equal(g.bracket(h, e), F.mul(F.from_int(2), np.asarray(e) % F.q)):
        return None
    f = _solve_f(g, np.asarray(e, dtype=np.int64), h, g.piece(-Fraction(d)))
    if f is None:
        return None
    return SL2Triple(tuple(int(c) for c in e), tuple(int(c) for c in h), tuple(int(c) for c in f))


@dataclass
class NilpotentDatum:
    g: GradedLieAlgebra
    d: Fraction
    e: np.ndarray
    triple: SL2Triple | None
    lam: tuple

    @property
    def rd(self):
        return self.g.rd

    @property
    def x(self):
        return self.g.x

    def to_json(self) -> dict:
        return {
            "x": self.g.x.to_json(),
            "d": str(self.d),
            "e": [int(c) for c in self.e],
            "triple": None if self.triple is None else self.triple.to_json(),
            "lambda": [int(c) for c in self.lam],
        }


def _lambda_candidates(g: GradedLieAlgebra, h, e):
    """Integral cocharacters lam with d lam(1) = h (h in the Cartan) giving e weight 2."""
    rd, F = g.rd, g.F
    p = F.p
    # pairings <alpha_i, lam> mod p read off from ad(h) on simple root lines
    residues = []
    for i in range(rd.rank):
        simple = tuple(int(j == i) for j in range(rd.rank))
        col = g.bracket(h, g.root_vector(simple))
        c = int(col[g.cb.root_index(simple)])
        if c >= p:
            return []
        residues.append(c)
    support = [g.labels[i][1] for i in np.nonzero(e)[0]]
    bound = 2 * len(rd.positive_roots) + 2
    out = []
    ranges = [[r + k * p for k in range(-(bound // p) - 2, bound // p + 3) if abs(r + k * p) <= bound] for r in residues]
    for lam in itertools.product(*ranges):
        if any(k != "e" for k, _ in (g.labels[i] for i in np.nonzero(e)[0])):
            continue
        if all(rd.pair(b, lam) == 2 for b in support) and rd.is_cocharacter(lam):
            if np.array_equal(cartan_element(g, lam), np.asarray(h) % F.q):
                out.append(tuple(int(c) for c in lam))
    return out


def lambda_key(lam, g: GradedLieAlgebra | None = None) -> tuple:
    """Normalization: smallest weights on g (the lift from characteristic 0),
    then dominant, then lexicographically largest pairings."""
    spread = 0 if g is None else -int(np.abs(g.weights(lam)).max())
    return (spread, all(c >= 0 for c in lam), tuple(lam))


def associated_cocharacter(g: GradedLieAlgebra, e, d, G: GroupPoints | None = None) -> NilpotentDatum:
    """Conjugate e so that its h lies in the Cartan and attach the cocharacter."""
    d = Fraction(d)
    e = np.asarray(e, dtype=np.int64)
    if not e.any():
        return NilpotentDatum(g, d, e, None, (0,) * g.rd.rank)
    G = G or group_points(g)
    t = complete_triple(g, e, d)
    h = np.asarray(t.h)
    Hs = G.act(h)
    root_idx = [i for i, (k, _) in enumerate(g.labels) if k == "e"]
    ok = np.nonzero(~Hs[:, root_idx].any(axis=1))[0]
    if len(ok) == 0:
        raise BudgetError("h is not conjugate into the Cartan within the enumerated group")
    Es = G.act(e)
    best = None
    seen = set()
    for k in ok:
        key = (Hs[k].tobytes(), Es[k].tobytes())
        if key in seen:
            continue
        seen.add(key)
        for lam in _lambda_candidates(g, Hs[k], Es[k]):
            cand = (lambda_key(lam, g), tuple(-int(c) for c in Es[k]), k, lam)
            if best is None or cand[:2] > best[:2]:
                best = cand
    if best is None:
        raise StructuralError("no integral associated cocharacter (characteristic too small?)")
    _, _, k, lam = best
    w = np.abs(g.weights(lam)).max()
    check_characteristic(g.F.p, g.m, int(w))
    e2 = Es[k]
    t2 = triple_for_lambda(g, e2, lam, d)
    if t2 is None:
        raise StructuralError("conjugated triple failed to close")
    return NilpotentDatum(g, d, e2, t2, lam)


def datum_from_lambda(g: GradedLieAlgebra, e, d, lam) -> NilpotentDatum | None:
    """Attach lam directly when (e, d lam(1), f) is an sl2-triple."""
    t = triple_for_lambda(g, np.asarray(e, dtype=np.int64), lam, d)
    if t is None:
        return None
    return NilpotentDatum(g, Fraction(d), np.asarray(e, dtype=np.int64), t, tuple(lam))


# -- degeneration ------------------------------------------------------------------------------

def orbit_dimension(g: GradedLieAlgebra, e) -> int:
    """dim of the G_x-orbit of e: rank of g^(0) -> piece, v -> [v, e]."""
    cols = g.piece(0)
    A = g.ad(np.asarray(e, dtype=np.int64))[:, cols]
    return rank_f(g.F, A)


def _rank_sequence(g: GradedLieAlgebra, e) -> tuple[int, ...]:
    A = g.ad(np.asarray(e, dtype=np.int64))
    P = A
    out = []
    for _ in range(g.dim):
        r = rank_f(g.F, P)
        out.append(r)
        if r == 0:
            break
        P = g.F.matmul(P, A)
    return tuple(out + [0] * (g.dim - len(out)))


def _contracts_to(g: GradedLieAlgebra, src, target_orbit: set, G: GroupPoints, cochars) -> bool:
    """Is some t^{-k} mu(t) (M src) limit in the target orbit?"""
    imgs = np.unique(G.act(src), axis=0)
    for mu in cochars:
        w = g.weights(mu)
        for v in imgs:
            nz = np.nonzero(v)[0]
            if len(nz) == 0:
                continue
            k = int(w[nz].min())
            lim = np.where(w == k, v, 0)
            if vec_key(g, lim) in target_orbit:
                return True
    return False


def orbit_degeneration(g: GradedLieAlgebra, e1, e2, d, G: GroupPoints | None = None) -> str:
    G = G or group_points(g)
    e1 = np.asarray(e1, dtype=np.int64)
    e2 = np.asarray(e2, dtype=np.int64)
    o1 = orbit_of(g, e1, G)
    if vec_key(g, e2) in o1:
        return "equal"
    if not e2.any():
        return "above"
    if not e1.any():
        return "below"
    d1, d2 = orbit_dimension(g, e1), orbit_dimension(g, e2)
    r1, r2 = _rank_sequence(g, e1), _rank_sequence(g, e2)
    can_below = d2 < d1 and all(a <= b for a, b in zip(r2, r1))
    can_above = d1 < d2 and all(a <= b for a, b in zip(r1, r2))
    if not can_below and not can_above:
        return "incomparable" if d1 != d2 or r1 != r2 else "unknown"
    rank = g.rd.rank
    cochars = [c for c in itertools.product(range(-2, 3), repeat=rank) if any(c)]
    if can_below and _contracts_to(g, e1, orbit_of(g, e2, G), G, cochars):
        return "below"
    if can_above and _contracts_to(g, e2, o1, G, cochars):
        return "above"
    return "unknown"


# -- center bookkeeping ---------------------------------------------------------------------------
# Group points are adjoint images, so the center Z(F_q) is invisible.  For the
# simply connected isogeny T(F_q) = (F_q^x)^rank via coroots; writing u = z^b for
# a primitive z, a torus point is an exponent vector b mod q-1 and it is central
# iff sum_l b_l <alpha_i, alpha_l^vee> = 0 mod q-1 for every i.

def _is_central(rd, b, n: int) -> bool:
    return all(sum(b[l] * rd.cartan[i][l] for l in range(rd.rank)) % n == 0 for i in range(rd.rank))


def center_order(rd, q: int) -> int:
    if rd.isogeny == "AD":
        return 1
    n = q - 1
    return sum(1 for b in itertools.product(range(n), repeat=rd.rank) if _is_central(rd, b, n))


def central_points_in(rd, q: int, cochars) -> int:
    """|Z(F_q) cap <mu(F_q^x) : mu in cochars>| for coroot-coordinate cocharacters."""
    if rd.isogeny == "AD":
        return 1
    n = q - 1
    gens = [tuple(int(c) % n for c in mu) for mu in cochars]
    seen = {(0,) * rd.rank}
    frontier = list(seen)
    while frontier:
        nxt = []
        for b in frontier:
            for c in gens:
                s = tuple((x + y) % n for x, y in zip(b, c))
                if s not in seen:
                    seen.add(s)
                    nxt.append(s)
        frontier = nxt
    return sum(1 for b in seen if _is_central(rd, b, n))
