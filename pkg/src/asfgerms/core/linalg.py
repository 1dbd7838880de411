"""Exact dense linear algebra over finite fields and over Q."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .fields import Field


class SingularSystemError(ValueError):
    pass


def rref(F: Field, M) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F; returns (R, pivot columns)."""
    R = np.array(M, dtype=np.int64, copy=True)
    if R.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if len(nz) == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        R[r] = F.mul(F.inv(int(R[r, c])), R[r])
        for i in range(rows):
            if i != r and R[i, c]:
                R[i] = F.sub(R[i], F.mul(int(R[i, c]), R[r]))
        pivots.append(c)
        r += 1
    return R, pivots


def rank(F: Field, M) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(rref(F, M)[1])


def kernel(F: Field, M) -> list[np.ndarray]:
    """Basis of {v : M v = 0}, one vector per free column."""
    M = np.asarray(M, dtype=np.int64)
    cols = M.shape[1]
    if M.shape[0] == 0:
        return [np.eye(cols, dtype=np.int64)[i] for i in range(cols)]
    R, pivots = rref(F, M)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fcol in free:
        v = np.zeros(cols, dtype=np.int64)
        v[fcol] = 1
        for i, pc in enumerate(pivots):
            v[pc] = F.neg(int(R[i, fcol]))
        basis.append(v)
    return basis


def rank_kernel(F: Field, M) -> tuple[int, list[np.ndarray]]:
    M = np.asarray(M, dtype=np.int64)
    ker = kernel(F, M)
    return M.shape[1] - len(ker), ker


def solve(F: Field, A, b) -> np.ndarray | None:
    """One solution of A x = b (free variables set to 0), or None."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.zeros(n, dtype=np.int64)
    R, pivots = rref(F, np.concatenate([A, b], axis=1))
    if n in pivots:
        return None
    x = np.zeros(n, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = R[i, n]
    return x


def in_span(F: Field, vectors, v) -> bool:
    vectors = list(vectors)
    if not vectors:
        return not np.any(np.asarray(v))
    A = np.stack(vectors, axis=1)
    return solve(F, A, v) is not None


# -- rationals ----------------------------------------------------------------

def rref_q(M) -> tuple[list[list[Fraction]], list[int]]:
    R = [[Fraction(x) for x in row] for row in M]
    rows = len(R)
    cols = len(R[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if R[i][c] != 0), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        lead = R[r][c]
        R[r] = [x / lead for x in R[r]]
        for i in range(rows):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return R, pivots


def solve_q(A, b) -> list[Fraction]:
    """Unique solution of a square nonsingular rational system."""
    n = len(A)
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, pivots = rref_q(aug)
    if pivots != list(range(n)):
        raise SingularSystemError("rational system is singular")
    return [R[i][n] for i in range(n)]


def kernel_q(M, ncols: int | None = None) -> list[list[Fraction]]:
    if not M:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    R, pivots = rref_q(M)
    cols = len(M[0])
    out = []
    for fcol in (c for c in range(cols) if c not in pivots):
        v = [Fraction(0)] * cols
        v[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][fcol]
        out.append(v)
    return out


def integer_kernel(M, ncols: int) -> list[list[int]]:
    """Z-basis of the saturated lattice {v in Z^n : M v = 0}.

    Only kernels of rank 0, 1 or full rank occur for tori of rank <= 2.
    """
    from math import gcd, lcm

    ker = kernel_q([list(r) for r in M], ncols) if M else kernel_q([], ncols)
    if len(ker) == ncols:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    if not ker:
        return []
    if len(ker) > 1:
        raise NotImplementedError("intermediate-rank integer kernels are not needed at rank <= 2")
    v = ker[0]
    den = 1
    for x in v:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return [[x // g for x in ints]]
