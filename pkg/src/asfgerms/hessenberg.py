"""Hessenberg-type template varieties and affine Springer fiber fibers.

Everything is counted by brute force over the enumerated group points.  A
set of group elements {g : ad(g^{-1}) gamma in S} is enumerated through
M = g^{-1}, which ranges over the same group.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core.linalg import integer_kernel, rank as rank_f
from .graded import GradedLieAlgebra
from .orbits import (
    DEFAULT_BUDGET,
    BudgetError,
    GroupPoints,
    NilpotentDatum,
    _keys,
    closure,
    group_points,
    center_order,
    central_points_in,
    primitive_element,
    root_exp,
    torus_element,
)


# -- parabolic data ----------------------------------------------------------------------

def _filtration_masks(g: GradedLieAlgebra, lam):
    w = g.weights(lam)
    raise_ = w[:, None] > w[None, :]  # entries moving weight up
    keep = w[:, None] >= w[None, :]
    return w, raise_, keep


def parabolic_from_lambda(G: GroupPoints, lam) -> tuple[GroupPoints, GroupPoints]:
    """(P, U): the non-positive parabolic of lam and its unipotent radical."""
    g = G.g
    w, raise_, keep = _filtration_masks(g, lam)
    M = G.mats.astype(np.int64)
    inP = ~(M[:, raise_] != 0).any(axis=1)
    D = M - np.eye(g.dim, dtype=np.int64)[None]
    inU = inP & ~(D[:, keep] != 0).any(axis=1)
    return G.subset(inP), G.subset(inU)


def levi_from_lambda(G: GroupPoints, lam) -> GroupPoints:
    w = G.g.weights(lam)
    off = w[:, None] != w[None, :]
    return G.subset(~(G.mats[:, off] != 0).any(axis=1))


def negative_radical(G: GroupPoints, lam) -> GroupPoints:
    """G_{<0}: unipotent radical of the non-positive parabolic."""
    return parabolic_from_lambda(G, lam)[1]


def positive_radical(G: GroupPoints, lam) -> GroupPoints:
    return negative_radical(G, tuple(-c for c in lam))


# -- template instance ---------------------------------------------------------------------

@dataclass
class TemplateInstance:
    datum: NilpotentDatum
    gamma: np.ndarray
    use: str = "germ"  # or "fiber"

    @property
    def g(self) -> GradedLieAlgebra:
        return self.datum.g

    def piece(self) -> list[int]:
        return self.g.piece(self.datum.d)

    def weights(self) -> np.ndarray:
        return self.g.weights(self.datum.lam)

    def le(self, k: int) -> list[int]:
        w = self.weights()
        return [i for i in self.piece() if w[i] <= k]

    def ge(self, k: int) -> list[int]:
        w = self.weights()
        return [i for i in self.piece() if w[i] >= k]


def in_coset(targets: np.ndarray, e: np.ndarray, fixed: list[int]) -> np.ndarray:
    """Rows v with v[i] = e[i] on the listed coordinates."""
    if not fixed:
        return np.ones(len(targets), dtype=bool)
    return (targets[:, fixed] == np.asarray(e)[fixed][None]).all(axis=1)


# -- stabilizers ------------------------------------------------------------------------------

@dataclass
class StabilizerPair:
    """E and E^o; orders are of the actual groups, not their adjoint images."""

    E: GroupPoints
    E0_image: int
    unipotent_count: int
    center: int = 1
    center_in_E0: int = 1

    @property
    def order(self) -> int:
        return self.E.order * self.center

    @property
    def E0_order(self) -> int:
        return self.E0_image * self.center_in_E0

    @property
    def pi0(self) -> int:
        return self.order // self.E0_order


def _is_unipotent(F, mats: np.ndarray) -> np.ndarray:
    n = mats.shape[-1]
    N = (mats - np.eye(n, dtype=np.int64)[None]) % F.q if F.is_prime else None
    if N is None:
        N = np.stack([F.sub(m, np.eye(n, dtype=np.int64)) for m in mats]) if len(mats) else mats
    P = N.copy()
    for _ in range(n - 1):
        P = F.matmul(P, N)
    return ~P.reshape(len(mats), -1).any(axis=1)


def stabilizer_E(inst: TemplateInstance, G: GroupPoints | None = None, budget: int = DEFAULT_BUDGET) -> StabilizerPair:
    g = inst.g
    e = np.asarray(inst.datum.e, dtype=np.int64)
    if not e.any():
        raise ValueError("stabilizer_E needs a nonzero e")
    G = G or group_points(g, budget)
    P, _ = parabolic_from_lambda(G, inst.datum.lam)
    imgs = P.act(e)
    fixed = inst.ge(2)
    E = P.subset(in_coset(imgs, e, fixed))
    Em = E.mats.astype(np.int64)
    uni = Em[_is_unipotent(g.F, Em)]
    gens = list(uni)
    # connected torus inside E: cocharacters killing the weight-2 support of e
    rd = g.rd
    support = [g.labels[i][1] for i in np.nonzero(e)[0] if g.labels[i][0] == "e"]
    if rd.isogeny == "SC":
        rows = [[rd.pair_coroot(b, j) for j in range(rd.rank)] for b in support]
    else:
        rows = [list(b) for b in support]
    u0 = primitive_element(g.F)
    cochars = []
    for c in integer_kernel(rows, rd.rank):
        lam = tuple(rd.coroot_pairings(c)) if rd.isogeny == "SC" else tuple(c)
        gens.append(torus_element(g, lam, u0))
        cochars.append(c)
    E0 = closure(g.F, gens, g.dim, budget) if gens else np.eye(g.dim, dtype=np.int64)[None]
    if E.order % len(E0):
        raise BudgetError("generated identity component does not divide |E|")
    # coroots of root SL2's inside E^o also carry central points
    keys = set(_keys(E0))
    for b in rd.positive_roots:
        if all(_keys(root_exp(g, s, 1)[None])[0] in keys for s in (b, tuple(-c for c in b))):
            cochars.append(rd.coroot(b))
    q = g.F.q
    return StabilizerPair(E, len(E0), len(uni), center_order(rd, q), central_points_in(rd, q, cochars))


# -- counts ----------------------------------------------------------------------------------------

def count_template(inst: TemplateInstance, G: GroupPoints | None = None, stab: StabilizerPair | None = None) -> dict:
    g = inst.g
    G = G or group_points(g)
    stab = stab or stabilizer_E(inst, G)
    imgs = G.act(inst.gamma)
    e = np.asarray(inst.datum.e, dtype=np.int64)
    hat_mask = in_coset(imgs, e, inst.ge(2))
    w = inst.weights()
    above2 = [i for i in inst.piece() if w[i] > 2]
    H_mask = ~(imgs[:, above2] != 0).any(axis=1) if above2 else np.ones(len(imgs), dtype=bool)
    P, _ = parabolic_from_lambda(G, inst.datum.lam)
    # lift from adjoint images: every image point has |Z| preimages
    n_hat, n_H = int(hat_mask.sum()) * stab.center, int(H_mask.sum())
    if n_hat % stab.E0_order or n_H % P.order:
        raise ArithmeticError("coset count is not integral")
    return {
        "count_hat": n_hat // stab.E0_order,
        "count_H": n_H // P.order,
        "pi0_E": stab.pi0,
        "E0_order": stab.E0_order,
        "E_order": stab.order,
        "P_order": P.order,
        "_points": imgs[hat_mask],
    }


def transversal(g: GradedLieAlgebra, v, piece: list[int], low: list[int]) -> bool:
    """[g^(0), v] + span(low) spans the piece."""
    cols0 = g.piece(0)
    A = g.ad(np.asarray(v, dtype=np.int64))[np.ix_(piece, cols0)]
    pos = {i: k for k, i in enumerate(piece)}
    B = np.zeros((len(piece), len(low)), dtype=np.int64)
    for k, i in enumerate(low):
        B[pos[i], k] = 1
    return rank_f(g.F, np.concatenate([A, B], axis=1)) == len(piece)


def smoothness_certificate(inst: TemplateInstance, points: np.ndarray | None = None, G: GroupPoints | None = None) -> dict:
    """Transversality at every F_q-point; points are the translates ad(g^{-1}) gamma."""
    g = inst.g
    if points is None:
        G = G or group_points(g)
        imgs = G.act(inst.gamma)
        points = imgs[in_coset(imgs, inst.datum.e, inst.ge(2))]
    piece, low = inst.piece(), inst.le(1)
    checked = 0
    for v in np.unique(points, axis=0) if len(points) else []:
        checked += 1
        if not transversal(g, v, piece, low):
            return {"smooth": False, "witness": [int(c) for c in v], "checked": checked}
    return {"smooth": True, "witness": None, "checked": checked}


# -- fibers of the stratification -------------------------------------------------------------

def kbar_order(G: GroupPoints, datum: NilpotentDatum) -> int:
    """|Z(f) . G_{<0}| inside the enumerated group."""
    f = np.asarray(datum.triple.f if datum.triple else np.zeros(G.g.dim, dtype=np.int64), dtype=np.int64)
    Zf = G.subset((G.act(f) == f[None]).all(axis=1))
    Un = negative_radical(G, datum.lam)
    inter = set(_keys(Zf.mats)) & set(_keys(Un.mats))
    return Zf.order * Un.order // len(inter)


def fiber_points(G: GroupPoints, datum: NilpotentDatum, target) -> np.ndarray:
    g = G.g
    imgs = G.act(np.asarray(target, dtype=np.int64))
    w = g.weights(datum.lam)
    fixed = [i for i in g.piece(datum.d) if w[i] >= 2]
    return imgs[in_coset(imgs, datum.e, fixed)]


def fiber_variety_count(G: GroupPoints, datum: NilpotentDatum, target, kbar: int | None = None) -> int:
    """#{g in G_x / Z(f) G_{<0} : ad(g^{-1}) target in e + piece_{<=1}}."""
    n = len(fiber_points(G, datum, target))
    kbar = kbar or kbar_order(G, datum)
    if n % kbar:
        raise ArithmeticError("fiber count is not integral")
    return n // kbar


def fiber_smoothness(G: GroupPoints, datum: NilpotentDatum, target) -> dict:
    inst = TemplateInstance(datum, np.asarray(target, dtype=np.int64), use="fiber")
    return smoothness_certificate(inst, fiber_points(G, datum, target))


def centralizer_dim_positive(g: GradedLieAlgebra, datum: NilpotentDatum) -> int:
    """dim Z_{G_{x,>0}}(e) = dim ker(ad e on the positive-weight part of g^(0))."""
    w = g.weights(datum.lam)
    cols = [i for i in g.piece(0) if w[i] > 0]
    if not cols:
        return 0
    A = g.ad(np.asarray(datum.e, dtype=np.int64))[:, cols]
    return len(cols) - rank_f(g.F, A)


def report(inst: TemplateInstance, G: GroupPoints | None = None) -> dict:
    G = G or group_points(inst.g)
    stab = stabilizer_E(inst, G)
    c = count_template(inst, G, stab)
    smooth = smoothness_certificate(inst, c.pop("_points"))
    return {
        **c,
        "smooth": smooth["smooth"],
        "smooth_witness": smooth["witness"],
        "q": inst.g.F.q,
        "E0_surrogate": "unipotent elements of E and S-cocharacters fixing e",
        "group_order": G.order,
        "d": str(Fraction(inst.datum.d)),
    }
