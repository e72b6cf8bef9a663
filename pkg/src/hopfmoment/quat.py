"""Quaternion and quaternionic-vector algebra.

Quaternions are stored as four real components ``(a, b, c, d)`` meaning
``a + b i + c j + d k``.  Array functions work on the trailing axis of
shape ``(..., 4)`` and only use ``+``, ``-`` and ``*``, so they run unchanged
on ``dtype=object`` arrays of :class:`fractions.Fraction` or sympy symbols.
That exact mode is what the expansion oracles in the test-suite use.

An :data:`HVector` is simply an array of shape ``(n + 1, 4)``; flattening it
gives the ambient real coordinates of ``R^{4n+4}`` in the order
``(alpha_0, beta_0, gamma_0, delta_0, alpha_1, ...)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

HVector = np.ndarray


@dataclass(frozen=True)
class Quat:
    """A single quaternion with generic scalar components."""

    a: Any = 0
    b: Any = 0
    c: Any = 0
    d: Any = 0

    @classmethod
    def from_array(cls, arr) -> "Quat":
        a, b, c, d = arr
        return cls(a, b, c, d)

    def to_array(self, dtype=float) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d], dtype=dtype)

    def __add__(self, other: "Quat") -> "Quat":
        other = _as_quat(other)
        return Quat(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    __radd__ = __add__

    def __sub__(self, other: "Quat") -> "Quat":
        other = _as_quat(other)
        return Quat(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d)

    def __rsub__(self, other) -> "Quat":
        return _as_quat(other) - self

    def __neg__(self) -> "Quat":
        return Quat(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, other) -> "Quat":
        if not isinstance(other, Quat):
            return Quat(self.a * other, self.b * other, self.c * other, self.d * other)
        p, q = self, other
        return Quat(
            p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
            p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
            p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
            p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a,
        )

    def __rmul__(self, other) -> "Quat":
        # scalars are central
        return Quat(other * self.a, other * self.b, other * self.c, other * self.d)

    def conj(self) -> "Quat":
        return Quat(self.a, -self.b, -self.c, -self.d)

    def norm2(self):
        return self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d

    def norm(self) -> float:
        return float(np.sqrt(float(self.norm2())))

    def inverse(self) -> "Quat":
        n2 = self.norm2()
        if n2 == 0:
            raise ZeroDivisionError("quaternion zero has no inverse")
        c = self.conj()
        return Quat(c.a / n2, c.b / n2, c.c / n2, c.d / n2)

    @property
    def real(self):
        return self.a

    @property
    def imag(self) -> tuple:
        return (self.b, self.c, self.d)

    def __repr__(self) -> str:
        return f"Quat({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"


def _as_quat(x) -> Quat:
    return x if isinstance(x, Quat) else Quat(x, 0, 0, 0)


ONE = Quat(1, 0, 0, 0)
I = Quat(0, 1, 0, 0)
J = Quat(0, 0, 1, 0)
K = Quat(0, 0, 0, 1)

UNITS = {"1": np.array([1.0, 0, 0, 0]), "i": np.array([0, 1.0, 0, 0]),
         "j": np.array([0, 0, 1.0, 0]), "k": np.array([0, 0, 0, 1.0])}


# ---------------------------------------------------------------------------
# array layer

def _asarr(x) -> np.ndarray:
    if isinstance(x, Quat):
        comps = [x.a, x.b, x.c, x.d]
        if all(isinstance(v, (int, np.integer)) for v in comps):
            return np.array(comps, dtype=np.int64)
        if all(isinstance(v, (int, float, np.integer, np.floating)) for v in comps):
            return np.array(comps, dtype=float)
        return np.array(comps, dtype=object)
    return np.asarray(x)


def qmul(p, q):
    """Hamilton product, broadcasting over leading axes.

    Accepts :class:`Quat` pairs (returns a :class:`Quat`) or arrays of shape
    ``(..., 4)``.
    """
    if isinstance(p, Quat) and isinstance(q, Quat):
        return p * q
    p = _asarr(p)
    q = _asarr(q)
    a1, b1, c1, d1 = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    a2, b2, c2, d2 = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack([
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ], axis=-1)


def qconj(q):
    if isinstance(q, Quat):
        return q.conj()
    q = _asarr(q)
    out = -q
    out[..., 0] = q[..., 0]
    return out


def qnorm2(q):
    q = _asarr(q)
    return (q * q).sum(axis=-1)


def qnorm(q):
    return np.sqrt(np.asarray(qnorm2(q), dtype=float))


def qinv(q):
    q = _asarr(q)
    return qconj(q) / qnorm2(q)[..., None]


def left_matrix(q) -> np.ndarray:
    """4x4 real matrix ``L`` with ``L @ x == qmul(q, x)``."""
    a, b, c, d = _asarr(q)
    return np.array([[a, -b, -c, -d],
                     [b, a, -d, c],
                     [c, d, a, -b],
                     [d, -c, b, a]])


def right_matrix(q) -> np.ndarray:
    """4x4 real matrix ``R`` with ``R @ x == qmul(x, q)``."""
    a, b, c, d = _asarr(q)
    return np.array([[a, -b, -c, -d],
                     [b, a, d, -c],
                     [c, -d, a, b],
                     [d, c, -b, a]])


def left_mul(q, h):
    """Componentwise ``q * h_a``."""
    return qmul(_asarr(q), _asarr(h))


def right_mul(h, q):
    """Componentwise ``h_a * q``."""
    return qmul(_asarr(h), _asarr(q))


def complex_split(h):
    """Return ``(z, w)`` with ``h_a = z_a + w_a j``.

    ``z_a = alpha_a + beta_a i`` and ``w_a = gamma_a + delta_a i``.
    """
    h = _asarr(h)
    if h.dtype == object:
        return h[..., 0:2].copy(), h[..., 2:4].copy()
    return h[..., 0] + 1j * h[..., 1], h[..., 2] + 1j * h[..., 3]


def from_split(z, w) -> np.ndarray:
    """Inverse of :func:`complex_split` for complex arrays."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return np.stack([z.real, z.imag, w.real, w.imag], axis=-1)


def hdot(x, y):
    """Quaternionic Hermitian product ``sum_a conj(x_a) y_a``."""
    return qmul(qconj(_asarr(x)), _asarr(y)).sum(axis=-2)


def flat(h) -> np.ndarray:
    return np.asarray(h).reshape(-1)


def unflat(x) -> np.ndarray:
    return np.asarray(x).reshape(-1, 4)


def block_left(q, n_plus_1: int) -> np.ndarray:
    """Ambient matrix of ``h -> q h`` on ``R^{4(n+1)}``."""
    return np.kron(np.eye(n_plus_1), left_matrix(q))


def block_right(q, n_plus_1: int) -> np.ndarray:
    """Ambient matrix of ``h -> h q`` on ``R^{4(n+1)}``."""
    return np.kron(np.eye(n_plus_1), right_matrix(q))


def random_quat(rng: np.random.Generator, size=None, unit: bool = False) -> np.ndarray:
    shape = (4,) if size is None else tuple(np.atleast_1d(size)) + (4,)
    q = rng.standard_normal(shape)
    if unit:
        q = q / np.linalg.norm(q, axis=-1, keepdims=True)
    return q


def exact(h) -> np.ndarray:
    """Object-dtype copy of ``h`` with :class:`fractions.Fraction` entries."""
    from fractions import Fraction

    arr = np.asarray(h)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = v if isinstance(v, Fraction) else Fraction(v)
    return out
