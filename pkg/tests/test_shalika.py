import itertools
import math
from fractions import Fraction

import pytest

from asfgerms.asf import SL2, GammaElement, depth
from asfgerms.core import Field, TruncatedLaurent
from asfgerms.core.linalg import SingularSystemError
from asfgerms.graded import grade_at_point
from asfgerms.rootdata import BuildingPoint
from asfgerms.shalika import (
    ConfigurationError,
    bound_report,
    class_of,
    datum_function,
    descent_orbital_integral,
    even_polynomial_fit,
    extract_germs,
    germ_report,
    held_out_functions,
    homogeneity,
    lattice_function,
    local_constancy,
    nilpotent_census,
    nilpotent_histogram,
    nilpotent_orbital_integral,
    orbital_integral,
    sample_census,
    separating_set,
    support_contains_shifted_lattice,
)


def gam(q, a, b, r):
    return GammaElement.from_polys(Field(q), a, b, r)


def grade(x, q):
    return grade_at_point(SL2, BuildingPoint.parse(x), q)


def lattice_mass_oracle(q, vu, alpha, d):
    """vol{(a, c) : u a^2, u a c, u c^2 in Lambda_{y,d}} summed over valuations."""
    ne, nh, nf = (math.ceil(d + alpha), math.ceil(d), math.ceil(d - alpha))
    A = -((vu - ne) // 2)
    C = -((vu - nf) // 2)
    H = nh - vu
    total = Fraction(q) ** -(A + C)
    cell = lambda v: (1 - Fraction(1, q)) * Fraction(q) ** -v
    # remove va >= A, vc >= C with va + vc < H
    for va in range(A, H):
        for vc in range(C, H - va):
            total -= cell(va) * cell(vc)
    return total


@pytest.mark.parametrize("q", [3, 5])
@pytest.mark.parametrize("x,alpha", [("0", 0), ("-1/4", Fraction(-1, 2)), ("1/2", Fraction(1))])
@pytest.mark.parametrize("d", [0, Fraction(1, 2), 1, 2])
def test_nilpotent_lattice_mass(q, x, alpha, d):
    g = grade(x, q)
    f = lattice_function(Field(q), x, d)
    for orb in nilpotent_census(Field(q))[1:]:
        got = sum(nilpotent_histogram(orb, g, d).get(v, 0) for v in f.support)
        assert got == lattice_mass_oracle(q, orb.vu, alpha, d)


def brute_histogram(orb, g, level, lo, width):
    """Enumerate a, c with digits in [lo, lo + width) by Laurent arithmetic."""
    F = g.F
    q = F.q
    out = {}
    polys = [
        TruncatedLaurent.from_dict(F, {lo + j: v for j, v in enumerate(ds) if v})
        for ds in itertools.product(range(q), repeat=width)
    ]
    u = TruncatedLaurent.monomial(F, orb.u0, orb.vu)
    w = Fraction(q) ** -(2 * (lo + width))
    for a in polys:
        for c in polys:
            A = -(u * a * c)
            B = u * a * a
            R = -(u * c * c)
            parts = (A, B, R)
            ok, img = True, [0, 0, 0]
            for idx, ser in ((0, R), (1, A), (2, B)):
                n = math.ceil(level + g.alpha_x[idx])
                if any(m < n for m, _ in ser.coeffs):
                    ok = False
                    break
                if (level + g.alpha_x[idx]).denominator == 1:
                    img[idx] = ser.as_dict().get(n, 0)
            if ok:
                out[tuple(img)] = out.get(tuple(img), 0) + w
    return out


@pytest.mark.parametrize("x,level,label", [("0", 0, "1"), ("0", 1, "eps*t"), ("-1/4", Fraction(1, 2), "t"), ("-1/4", Fraction(1, 2), "eps")])
def test_nilpotent_histogram_against_laurent_enumeration(x, level, label):
    F = Field(3)
    g = grade(x, 3)
    orb = next(o for o in nilpotent_census(F) if o.label == label)
    fast = nilpotent_histogram(orb, g, level)
    slow = brute_histogram(orb, g, level, -1, 4)
    assert {k: v for k, v in fast.items() if v} == slow


def test_orbit_route_matches_lattice_route():
    F = Field(5)
    for d in (0, Fraction(1, 2), 1):
        for f in separating_set(F, d) + held_out_functions(F, d):
            for orb in nilpotent_census(F):
                assert nilpotent_orbital_integral(orb, f, F, "lattice") == nilpotent_orbital_integral(orb, f, F, "orbits")


def test_census():
    F = Field(3)
    assert [o.label for o in nilpotent_census(F)] == ["0", "1", "eps", "t", "eps*t"]
    assert sample_census(F, 20)["pass"]
    T = lambda d: TruncatedLaurent.from_dict(F, d)
    assert class_of(F, (T({}), T({}), T({1: 2}))) == "t"  # -2 = 1 is a square
    with pytest.raises(ConfigurationError):
        nilpotent_census(Field(2))


def test_zero_orbit_is_point_mass():
    F = Field(3)
    zero = nilpotent_census(F)[0]
    f = lattice_function(F, "0", 0)
    assert nilpotent_orbital_integral(zero, f, F) == 1
    e_fn = datum_function(F, "0", 0, 2, 1)
    assert nilpotent_orbital_integral(zero, e_fn, F) == 0


@pytest.mark.parametrize("d", [0, Fraction(1, 2), 1])
@pytest.mark.parametrize("variant", ["A", "B"])
def test_separating_sets(d, variant):
    F = Field(3)
    fns = separating_set(F, d, variant)
    assert [f.orbit for f in fns] == ["0", "1", "eps", "t", "eps*t"]
    assert all(support_contains_shifted_lattice(F, f) for f in fns)


def test_separating_set_rejects_other_depths():
    with pytest.raises(ConfigurationError):
        separating_set(Field(3), Fraction(1, 3))


def test_germ_matrix_is_triangular_and_singular_sets_fail():
    F = Field(3)
    gamma = gam(3, {}, {0: 1}, {1: 1})
    table = extract_germs(gamma, separating_set(F, depth(gamma)), 3)
    assert table.triangular
    same = [lattice_function(F, "0", 0)] * 5
    with pytest.raises(SingularSystemError):
        extract_germs(gamma, same, 3)


GAMMAS = {
    "split": (lambda q: gam(q, {1: 1}, {}, {})),
    "unramified": (lambda q: gam(q, {}, {0: 1}, {0: Field(q).nonsquare()})),
    "ramified": (lambda q: gam(q, {}, {0: 1}, {1: 1})),
}


@pytest.mark.parametrize("q", [3, 5])
@pytest.mark.parametrize("kind", sorted(GAMMAS))
def test_expansion_on_held_out_functions(q, kind):
    r = germ_report(GAMMAS[kind](q), 3)
    assert r["tables_agree"] and r["triangular"] and r["support_containment"]
    assert r["held_out"]["pass"] and r["held_out"]["checked"] >= 3
    assert r["descent_vs_direct"]["pass"]


def test_split_zero_germ_vanishes():
    for q in (3, 5):
        r = germ_report(gam(q, {0: 1}, {}, {}), 3)
        assert r["table"]["germs"]["0"] == "0"


def test_descent_zero_when_orbit_misses_building():
    F = Field(3)
    gamma = gam(3, {}, {0: 1}, {1: 1})
    f = lattice_function(F, "0", Fraction(1, 2))
    assert descent_orbital_integral(gamma, f, 3).rational == 0
    assert orbital_integral(gamma, f, 3).rational == 0


def test_descent_matches_direct_on_regular_datum():
    F = Field(3)
    gamma = gam(3, {}, {0: 1}, {1: 1})
    fns = separating_set(F, Fraction(1, 2)) + held_out_functions(F, Fraction(1, 2))
    for f in [f for f in fns if f.level == Fraction(1, 2)]:
        assert orbital_integral(gamma, f, 3, "descent").rational == orbital_integral(gamma, f, 3).rational


def test_value_carries_discriminant_exponent():
    v = orbital_integral(gam(3, {1: 1}, {}, {}), lattice_function(Field(3), "0", 1), 3)
    assert v.half_exponent == -2


def test_local_constancy_and_homogeneity():
    q = 3
    assert local_constancy(gam(q, {}, {0: 1}, {1: 1}), [{1: 1}, {2: 2}], 3)["pass"]
    e = Field(q).nonsquare()
    g0 = gam(q, {}, {0: 1}, {0: e})
    assert homogeneity(g0, g0, N=3)["pass"]


def test_even_polynomial_fit():
    xs = [Fraction(1, 3), Fraction(1, 9), Fraction(1, 27)]
    assert even_polynomial_fit(xs, [1, 1, 1], 0)["pass"]
    assert not even_polynomial_fit(xs, [1, 2, 1], 0)["pass"]
    ys = [1 + 2 * x * x for x in xs]
    assert even_polynomial_fit(xs, ys, 2)["pass"]


def test_bound_report():
    rep = bound_report([g(3) for g in GAMMAS.values()], 3)
    assert rep["empirical_c"] <= 2
