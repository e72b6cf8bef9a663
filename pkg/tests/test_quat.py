from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given

from conftest import quats, unit_quats
from hopfmoment import quat as Q


def test_unit_products():
    i, j, k = (Q.UNITS[u] for u in "ijk")
    assert np.array_equal(Q.qmul(i, j), k)
    assert np.array_equal(Q.qmul(j, k), i)
    assert np.array_equal(Q.qmul(k, i), j)
    assert np.array_equal(Q.qmul(j, i), -k)
    for u in (i, j, k):
        assert np.array_equal(Q.qmul(u, u), -Q.UNITS["1"])


def test_quat_class_matches_array_layer():
    p, q = Q.Quat(1, 2, -1, 3), Q.Quat(0.5, -2, 4, 1)
    assert np.allclose((p * q).to_array(), Q.qmul(p.to_array(), q.to_array()))
    assert (Q.I * Q.J) == Q.K
    assert p.conj().conj() == p
    assert np.isclose(p.norm(), np.linalg.norm(p.to_array()))
    assert np.allclose((p * p.inverse()).to_array(), [1, 0, 0, 0])
    with pytest.raises(ZeroDivisionError):
        Q.Quat().inverse()


def test_left_mul_example():
    h = np.stack([Q.UNITS["1"], Q.UNITS["j"]])
    out = Q.left_mul(Q.I, h)
    assert np.array_equal(out, np.stack([Q.UNITS["i"], Q.UNITS["k"]]))


@given(quats, quats, quats)
def test_associative_and_distributive(p, q, r):
    assert np.max(np.abs(Q.qmul(Q.qmul(p, q), r) - Q.qmul(p, Q.qmul(q, r)))) < 1e-13 * 30
    assert np.max(np.abs(Q.qmul(p, q + r) - Q.qmul(p, q) - Q.qmul(p, r))) < 1e-13 * 10


@given(quats, quats)
def test_norm_multiplicative_and_conj_antihom(p, q):
    assert np.isclose(Q.qnorm(Q.qmul(p, q)), Q.qnorm(p) * Q.qnorm(q), rtol=1e-12, atol=1e-12)
    assert np.allclose(Q.qconj(Q.qmul(p, q)), Q.qmul(Q.qconj(q), Q.qconj(p)), atol=1e-12)


@given(quats)
def test_moment_summand_is_imaginary(h):
    s = Q.qmul(Q.qconj(h), Q.qmul(Q.UNITS["i"], h))
    assert np.max(np.abs(Q.qconj(s) + s)) < 1e-14 * max(1.0, float(h @ h)) * 10


def test_moment_summand_is_imaginary_exact():
    a, b, c, d = sp.symbols("a b c d", real=True)
    h = np.array([a, b, c, d], dtype=object)
    s = Q.qmul(Q.qconj(h), Q.qmul(Q.Quat(0, 1, 0, 0), h))
    assert sp.expand(s[0]) == 0
    # and with rationals
    hq = Q.exact([Fraction(1, 3), Fraction(-2, 5), Fraction(7, 2), Fraction(1, 7)])
    sq = Q.qmul(Q.qconj(hq), Q.qmul(Q.Quat(0, 1, 0, 0), hq))
    assert sq[0] == 0 and all(isinstance(x, Fraction) for x in sq)


@given(quats, unit_quats)
def test_right_mul_preserves_norm(h, q):
    hv = np.stack([h, 2 * h + 1])
    assert np.isclose(np.linalg.norm(Q.right_mul(hv, q)), np.linalg.norm(hv), rtol=1e-12, atol=1e-12)


@given(quats, quats)
def test_multiplication_matrices(p, q):
    assert np.allclose(Q.left_matrix(p) @ q, Q.qmul(p, q), atol=1e-12)
    assert np.allclose(Q.right_matrix(q) @ p, Q.qmul(p, q), atol=1e-12)


def test_block_matrices_act_on_flat_vectors(rng):
    h = rng.standard_normal((3, 4))
    q = rng.standard_normal(4)
    assert np.allclose(Q.block_left(q, 3) @ Q.flat(h), Q.flat(Q.left_mul(q, h)))
    assert np.allclose(Q.block_right(q, 3) @ Q.flat(h), Q.flat(Q.right_mul(h, q)))


def test_complex_split_round_trip(rng):
    h = rng.standard_normal((4, 4))
    z, w = Q.complex_split(h)
    assert np.allclose(Q.from_split(z, w), h)
    # h = z + w j, so the j-component of h_0 is Re w_0
    assert np.isclose(h[0, 2], w[0].real) and np.isclose(h[0, 3], w[0].imag)


def test_hdot_is_quaternionic_hermitian(rng):
    x, y = rng.standard_normal((2, 3, 4))
    q = Q.random_quat(rng, unit=True)
    # <x, y q> = <x, y> q
    assert np.allclose(Q.hdot(x, Q.right_mul(y, q)), Q.qmul(Q.hdot(x, y), q))
    assert np.isclose(Q.hdot(x, x)[0], np.sum(x * x))


def test_inverse(rng):
    q = rng.standard_normal(4)
    assert np.allclose(Q.qmul(q, Q.qinv(q)), [1, 0, 0, 0])


def test_flat_unflat():
    h = np.arange(12.0).reshape(3, 4)
    assert np.array_equal(Q.unflat(Q.flat(h)), h)
