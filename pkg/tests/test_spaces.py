import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from conftest import quats, seeds, unit_quats
from hopfmoment import quat as Q
from hopfmoment.moment import Kind, LevelSet, mu, orbit_sample
from hopfmoment.spaces import (DomainError, PointAtInfinity, affine_coord, affine_mu, affine_mu_equations,
                               canonicalize, cpn_slice_membership, focal_equations, frame_change_matrix,
                               from_affine, hopf_project, inverse_stereographic, same_point, stereographic)


def hv(*units):
    return np.stack([Q.UNITS[u] if isinstance(u, str) else np.zeros(4) for u in units])


def test_canonical_examples():
    assert np.allclose(hopf_project(hv("1", 0, 0)).rep, hv("1", 0, 0))
    assert np.allclose(hopf_project(hv("j", 0, 0)).rep, hv("1", 0, 0))
    with pytest.raises(DomainError):
        hopf_project(np.zeros((3, 4)))


@given(seeds, unit_quats)
def test_fiber_invariance(seed, q):
    h = np.random.default_rng(seed).standard_normal((3, 4))
    h /= np.linalg.norm(h)
    assert hopf_project(h) == hopf_project(Q.right_mul(h, q))


@given(seeds)
def test_canonicalize_idempotent(seed):
    h = np.random.default_rng(seed).standard_normal((4, 4))
    c = canonicalize(h)
    assert np.allclose(canonicalize(c), c, atol=1e-14)
    assert c[0, 0] > 0 and np.allclose(c[0, 1:], 0, atol=1e-14)


def test_distinct_points_differ(rng):
    a, b = rng.standard_normal((2, 3, 4))
    assert not same_point(hopf_project(a), hopf_project(b))


def test_slice_membership_examples():
    assert cpn_slice_membership(hv("1", "i", 0), "i")
    assert not cpn_slice_membership(hv("1", "j", 0), "i")
    assert cpn_slice_membership(hv("1", "j", 0), "j")
    assert cpn_slice_membership(hv("1", "k", 0), "k")


@given(seeds, unit_quats)
def test_slice_membership_is_gauge_free(seed, q):
    z = np.random.default_rng(seed).standard_normal((3, 2))
    h = Q.from_split(z[:, 0] + 1j * z[:, 1], np.zeros(3))
    assert cpn_slice_membership(Q.right_mul(h, q), "i")


def test_affine_coord_examples():
    assert np.allclose(affine_coord(hv("j", "1")), Q.UNITS["j"])
    assert np.allclose(affine_coord(hv("1", "j")), -Q.UNITS["j"])
    with pytest.raises(PointAtInfinity):
        affine_coord(hv("1", 0))
    with pytest.raises(DomainError):
        affine_coord(hv("1", "1", "1"))


@given(quats, unit_quats)
def test_affine_coord_representative_free(h0, q):
    h = np.stack([h0, Q.UNITS["1"] + 0.5 * h0])
    assert np.allclose(affine_coord(Q.right_mul(h, q)), affine_coord(h), atol=1e-10)
    assert np.allclose(affine_coord(from_affine(h0)), h0, atol=1e-10)


def test_stereographic_examples():
    assert np.allclose(stereographic(np.zeros(4)), [0, 0, 0, 0, -1])
    assert np.allclose(stereographic(Q.UNITS["j"]), [0, 0, 1, 0, 0])
    assert np.allclose(stereographic(Q.UNITS["i"]), [0, 1, 0, 0, 0])
    with pytest.raises(PointAtInfinity):
        inverse_stereographic([0, 0, 0, 0, 1])


@given(quats)
def test_stereographic_unit_norm_and_inverse(h):
    x = stereographic(h)
    assert abs(np.linalg.norm(x) - 1) < 1e-14
    assert np.allclose(inverse_stereographic(x), h, atol=1e-12 * max(1, float(h @ h)))


def test_affine_moment_is_the_projective_moment(rng):
    # mu([h : 1]) = conj(h) i h + i
    for _ in range(20):
        h = rng.standard_normal(4)
        assert np.allclose(mu(np.stack([h, Q.UNITS["1"]])), affine_mu(h))


def test_affine_equations_derived_symbolically():
    a, b, c, d = sp.symbols("alpha beta gamma delta", real=True)
    h = np.array([a, b, c, d], dtype=object)
    m = [sp.expand(x) for x in affine_mu(h)]
    assert m[0] == 0
    assert sp.expand(m[1] - (a**2 + b**2 - c**2 - d**2 + 1)) == 0
    assert sp.expand(m[2] + 2 * (a * d - b * c)) == 0
    assert sp.expand(m[3] - 2 * (a * c + b * d)) == 0
    eqs = affine_mu_equations(h)
    sols = sp.solve([sp.expand(x) for x in eqs], [a, b, c, d], dict=True)
    # every real solution has alpha = beta = 0 and gamma^2 + delta^2 = 1
    for s in sols:
        sub = [sp.simplify(x.subs(s)) for x in focal_equations(h)]
        assert sub[0] == 0 and sub[1] == 0


@given(st.floats(0, 6.3))
def test_focal_circle_solves_affine_system(theta):
    h = np.array([0, 0, np.cos(theta), np.sin(theta)])
    assert np.max(np.abs(affine_mu(h))) < 1e-14
    assert np.max(np.abs(affine_mu_equations(h))) < 1e-14
    assert np.max(np.abs(focal_equations(h))) < 1e-15


def test_frame_change_standard_point():
    # the homogeneous representative [1 : j : 0 : 0] itself
    A = frame_change_matrix(hv("1", "j", 0, 0)).A
    assert np.array_equal(A[1, 0], np.zeros(4))
    expected_diag = [Q.UNITS["1"], Q.UNITS["1"], -Q.UNITS["1"], -Q.UNITS["1"]]
    assert np.allclose([A[a, a] for a in range(4)], expected_diag)


def test_frame_change_maps_base_to_q():
    L = LevelSet(Kind.MU0, 3)
    for seed in range(10):
        q = orbit_sample(L, seed=seed)
        F = frame_change_matrix(q)
        k0 = hv("1", "j", 0, 0)
        assert np.max(np.abs(F.apply(k0) - q)) < 1e-15
        h = np.random.default_rng(seed).standard_normal((4, 4))
        assert np.allclose(F.apply(F.solve(h)), h, atol=1e-12)


def test_frame_change_preconditions():
    with pytest.raises(DomainError):
        frame_change_matrix(hv(0, "1", "j"))
    with pytest.raises(DomainError):
        frame_change_matrix(hv("1", "1") / np.sqrt(2))
    with pytest.raises(DomainError):
        frame_change_matrix(hv("1", "i"))


@pytest.mark.xfail(strict=True, reason="mu(A k) = -mu_std(k) fails for generic k; see notes")
def test_frame_change_literal_identity():
    q = orbit_sample(LevelSet(Kind.MU0, 3), seed=0)
    F = frame_change_matrix(q)
    k = np.random.default_rng(0).standard_normal((4, 4))
    lhs = mu(F.apply(k))
    rhs = -mu(k)
    assert np.max(np.abs(lhs - rhs)) < 1e-10
