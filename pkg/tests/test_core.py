import itertools
from fractions import Fraction

import numpy as np
import pytest

from asfgerms.core import AtLeast, Field, FieldError, PrecisionError, TruncatedLaurent, kernel, rank, solve
from asfgerms.core.fields import FieldElement, check_characteristic
from asfgerms.core.linalg import SingularSystemError, integer_kernel, kernel_q, solve_q


def gauss_rank_oracle(M, p):
    """Independent elimination over Z/p on python lists."""
    M = [[int(c) % p for c in row] for row in M]
    r = 0
    for c in range(len(M[0])):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = pow(M[r][c], p - 2, p)
        M[r] = [v * inv % p for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[r])]
        r += 1
    return r


def test_prime_field_arithmetic():
    assert Field(3).add(2, 2) == 1
    assert Field(5).inv(2) == 3
    with pytest.raises(ZeroDivisionError):
        Field(5).inv(0)
    with pytest.raises(FieldError):
        Field(4)


def test_extension_field_with_given_modulus():
    F = Field(3, 2, modulus=(1, 0, 1))  # x^2 + 1
    x = 3  # code of x: coefficients [0, 1]
    assert F.mul(x, x) == 2
    assert FieldElement(F, x).coefficients() == [0, 1]


@pytest.mark.parametrize("p,r", [(3, 2), (5, 2), (2, 3)])
def test_extension_field_axioms(p, r):
    F = Field(p, r)
    q = F.q
    els = range(q)
    for a in els:
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
    for a, b, c in itertools.product(range(q), repeat=3):
        if (a + b + c) % 3:
            continue
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    units = [a for a in range(1, q)]
    # the unit group is cyclic of order q - 1
    assert any(len({F.pow(g, k) for k in range(q - 1)}) == q - 1 for g in units)


def test_squares():
    F = Field(7)
    squares = {a * a % 7 for a in range(1, 7)}
    for a in range(1, 7):
        assert F.is_square(a) == (a in squares)
    assert not F.is_square(F.nonsquare())


def test_rank_examples():
    F = Field(5)
    assert rank(F, np.eye(3, dtype=np.int64)) == 3
    assert len(kernel(F, np.eye(3, dtype=np.int64))) == 0
    Z = np.zeros((2, 3), dtype=np.int64)
    assert rank(F, Z) == 0
    assert len(kernel(F, Z)) == 3


def test_rank_against_oracle():
    F = Field(3)
    rng = np.random.default_rng(1)
    for _ in range(50):
        M = rng.integers(0, 3, size=(4, 4))
        r = rank(F, M)
        assert r == gauss_rank_oracle(M.tolist(), 3)
        K = kernel(F, M)
        assert len(K) == 4 - r
        for v in K:
            assert not ((M @ v) % 3).any()


def test_solve_finite_field():
    F = Field(7)
    A = np.array([[1, 2], [3, 4]])
    x = solve(F, A, np.array([5, 6]))
    assert ((A @ x - [5, 6]) % 7 == 0).all()


def test_rational_solve_and_kernels():
    assert solve_q([[2, 1], [1, 3]], [3, 4]) == [Fraction(1), Fraction(1)]
    with pytest.raises(SingularSystemError):
        solve_q([[1, 2], [2, 4]], [1, 2])
    (v,) = kernel_q([[1, 2], [2, 4]])
    assert v[0] + 2 * v[1] == 0
    assert integer_kernel([[1, -1]], 2) == [[1, 1]]


def test_laurent_valuation_examples():
    F = Field(3)
    f = TruncatedLaurent.from_dict(F, {1: 1, 3: 1})
    assert f.valuation() == 1
    z = TruncatedLaurent.zero(F, precision=4)
    v = z.valuation()
    assert isinstance(v, AtLeast) and v.bound == 4
    g = TruncatedLaurent.from_dict(F, {-1: 1}) * TruncatedLaurent.from_dict(F, {0: 1, 1: 1})
    assert g.valuation() == -1


def test_laurent_precision_tracking():
    F = Field(5)
    f = TruncatedLaurent.from_dict(F, {0: 1, 1: 2}, precision=3)
    with pytest.raises(PrecisionError):
        f.coefficient(3)
    inv = f.inverse(6)
    prod = f * inv
    assert prod.coefficient(0) == 1
    assert all(prod.coefficient(n) == 0 for n in range(1, 3))


def test_sqrt_unit():
    F = Field(7)
    u = TruncatedLaurent.from_dict(F, {0: 1, 1: 3, 2: 1})
    s = u.sqrt_unit(6)
    sq = (s * s).truncate(6)
    assert sq.as_dict() == u.truncate(6).as_dict()


def test_characteristic_guard():
    check_characteristic(5, 4)
    with pytest.raises(FieldError):
        check_characteristic(3, 6)
