from itertools import combinations, combinations_with_replacement

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import seeds
from hopfmoment.cohomfam import (FAMILY_TAGS, MU0_TABLE, IntPolynomial, NonGenericError, apply_structure,
                                 check_table, classify_intersection, family_contains, family_member,
                                 gaussian_binomial, klein_form, lift_plane, poincare_grassmannian,
                                 poincare_grassmannian_factored, poincare_mu0, poincare_mu0_gysin, poincare_nu0,
                                 quaternionic_structure, random_member, sample_plane, wedge)
from hopfmoment.moment import mu

P = IntPolynomial.parse
E = np.eye(4, dtype=complex)

GENERIC = {
    ("F", "F"): "point", ("F", "F'"): "empty", ("F", "F''"): "point", ("F", "F'''"): "point",
    ("F'", "F'"): "point", ("F'", "F''"): "point", ("F'", "F'''"): "point",
    ("F''", "F''"): "two-points", ("F''", "F'''"): "empty", ("F'''", "F'''"): "two-points",
}


# ---------------------------------------------------------------- polynomials

def test_polynomial_arithmetic_and_printing():
    a, b = P("1+t^2"), IntPolynomial((1, 0, -1))
    assert (a * b).coeffs == (1, 0, 0, 0, -1)
    assert str(P("1+t^4+2t^5+t")) == "1+t+t^4+2t^5"
    assert (a + a)[2] == 2 and (a - a).coeffs == ()
    assert a(1) == 2 and a.substitute_power(3) == P("1+t^6")
    assert str(IntPolynomial()) == "0"
    assert IntPolynomial.geometric(4, 8) == P("1+t^4+t^8")


def test_gaussian_binomial_values():
    assert gaussian_binomial(4, 2) == P("1+t+2t^2+t^3+t^4")
    assert gaussian_binomial(3, 0) == P("1") and gaussian_binomial(2, 3).coeffs == ()


def test_grassmannian_examples():
    assert poincare_grassmannian(3) == P("1+t^2+2t^4+t^6+t^8")
    assert poincare_grassmannian(4) == P("1+t^2+2t^4+2t^6+2t^8+t^10+t^12")
    assert poincare_grassmannian(1) == P("1")


@pytest.mark.parametrize("n", range(1, 31))
def test_grassmannian_product_formula(n):
    assert poincare_grassmannian_factored(n) == poincare_grassmannian(n)


def test_mu0_reference_table():
    assert check_table() == []
    for n, s in MU0_TABLE.items():
        assert str(poincare_mu0(n)) == s


@pytest.mark.parametrize("n", range(2, 31))
def test_mu0_routes_agree(n):
    p = poincare_mu0(n)
    assert poincare_mu0_gysin(n) == p
    assert poincare_mu0_gysin(n, poincare_grassmannian_factored(n)) == p
    assert p.is_palindromic(4 * n - 3) and p.nonnegative
    # total Betti number equals twice the number of classes below the middle
    assert p(1) == 2 * ((n - 1) // 2 + 1)


def test_nu0_examples():
    assert poincare_nu0(1) == P("1+t^7")
    assert poincare_nu0(2) == P("1+t^4+t^11+t^15")
    for k in range(1, 10):
        p = poincare_nu0(k)
        assert p.is_palindromic(8 * k - 1) and p(1) == 2 * k


def test_nu0_matches_enumeration():
    # independent count: exponents 4i and 8k-1-4i for i < k
    for k in range(1, 12):
        exps = sorted({4 * i for i in range(k)} | {8 * k - 1 - 4 * i for i in range(k)})
        assert [d for d, c in enumerate(poincare_nu0(k).coeffs) if c] == exps


def test_small_n_guards():
    for f in (poincare_mu0, poincare_mu0_gysin):
        with pytest.raises(ValueError):
            f(1)
    with pytest.raises(ValueError):
        poincare_nu0(0)
    with pytest.raises(ValueError):
        poincare_grassmannian(0)


# ---------------------------------------------------------------- families

def test_family_members_and_containment():
    F = family_member("F", E[:, :3])
    assert family_contains(F, E[:, :2]) and not family_contains(F, E[:, [0, 3]])
    Fp = family_member("F'", E[:, :1])
    assert family_contains(Fp, E[:, [0, 3]]) and not family_contains(Fp, E[:, 1:3])
    Fs = family_member("F''", quaternionic_structure())
    assert family_contains(Fs, E[:, :2]) and not family_contains(Fs, E[:, [0, 2]])
    Ft = family_member("F'''", E[:, :2], E[:, 2:])
    assert family_contains(Ft, E[:, [0, 2]]) and not family_contains(Ft, E[:, :2] + E[:, 2:])
    assert F.base == "CP2" and Ft.lift == "S3xS2"


def test_family_member_validation():
    with pytest.raises(ValueError):
        family_member("G", E)
    with pytest.raises(ValueError):
        family_member("F", E[:, :2])
    with pytest.raises(ValueError):
        family_member("F''", np.eye(4))
    with pytest.raises(ValueError):
        family_member("F'''", E[:, :2], E[:, 1:3])


@given(seeds)
@settings(max_examples=20)
def test_sampled_planes_belong_to_their_member(seed):
    rng = np.random.default_rng(seed)
    for tag in FAMILY_TAGS:
        m = random_member(tag, rng)
        assert family_contains(m, sample_plane(m, rng))


def test_structure_is_antilinear_with_square_minus_one(rng):
    M = quaternionic_structure(np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))[0])
    v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    assert np.allclose(apply_structure(M, apply_structure(M, v)), -v)
    assert np.allclose(apply_structure(M, 1j * v), -1j * apply_structure(M, v))


def test_klein_form_detects_meeting_planes():
    a, b, c, d = E.T
    assert klein_form(wedge(a, b), wedge(c, d)) != 0
    assert klein_form(wedge(a, b), wedge(a, c)) == 0
    assert klein_form(wedge(a, b), wedge(a, b)) == 0


@pytest.mark.parametrize("pair", list(combinations_with_replacement(FAMILY_TAGS, 2)))
def test_generic_classification(pair):
    for seed in range(5):
        rng = np.random.default_rng(seed)
        m1, m2 = random_member(pair[0], rng), random_member(pair[1], rng)
        got = classify_intersection(m1, m2)
        assert got.kind == GENERIC[pair]
        for plane in got.planes:
            assert family_contains(m1, plane, 1e-8) and family_contains(m2, plane, 1e-8)
        assert got.lifted == {"empty": "empty", "point": "circle", "two-points": "two circles"}[got.kind]


@given(seeds)
@settings(max_examples=15)
def test_classification_is_symmetric(seed):
    rng = np.random.default_rng(seed)
    for a, b in combinations(FAMILY_TAGS, 2):
        m1, m2 = random_member(a, rng), random_member(b, rng)
        assert classify_intersection(m1, m2).kind == classify_intersection(m2, m1).kind


def test_special_positions():
    F = family_member("F", E[:, :3])
    Fp = family_member("F'", E[:, :1])
    with pytest.raises(NonGenericError):
        classify_intersection(F, Fp)
    # the line inside the 3-space: a projective plane of planes meets a CP^2 in a CP^1
    assert classify_intersection(F, Fp, generic=False).kind == "curve"
    J = quaternionic_structure()
    Ft = family_member("F'''", E[:, [0, 2]], E[:, [1, 3]])
    with pytest.raises(NonGenericError):
        classify_intersection(family_member("F''", J), Ft)
    assert classify_intersection(family_member("F''", J), Ft, generic=False).kind == "curve"
    with pytest.raises(NonGenericError):
        classify_intersection(family_member("F''", J), family_member("F''", J))


@given(seeds)
@settings(max_examples=20)
def test_lifted_planes_lie_on_level_set(seed):
    rng = np.random.default_rng(seed)
    for tag in FAMILY_TAGS:
        plane = sample_plane(random_member(tag, rng), rng)
        for th in (0.0, 1.1):
            h = lift_plane(plane, th)
            assert np.max(np.abs(mu(h))) < 1e-10
            assert abs(np.sum(h * h) - 1) < 1e-12
