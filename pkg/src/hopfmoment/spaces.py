"""Points and charts of the sphere ``S^{4n+3}`` and of ``HP^n``.

``HP^n`` is the quotient of the unit sphere by right multiplication with
unit quaternions.  Points are kept as unit representatives in a canonical
gauge (first nonzero coordinate real and positive).

The affine chart of ``HP^1`` uses ``h = h_0 h_1^{-1}``; in it the moment map
reads ``mu = conj(h) i h + i`` and expands to::

    i (alpha^2 + beta^2 - gamma^2 - delta^2 + 1)
      - 2 j (alpha delta - beta gamma) + 2 k (alpha gamma + beta delta)

so its zero set is ``|z|^2 - |w|^2 + 1 = 0``, ``alpha delta - beta gamma = 0``,
``alpha gamma + beta delta = 0`` (see :func:`affine_mu_equations`).  This
system is equivalent to ``alpha = beta = 0, gamma^2 + delta^2 = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import quat as Q
from .moment import mu

PROJ_TOL = 1e-10


class DomainError(ValueError):
    pass


class PointAtInfinity(DomainError):
    pass


@dataclass(frozen=True)
class ProjPoint:
    """A point of ``HP^n`` stored as its canonical unit representative."""

    rep: np.ndarray
    n: int

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjPoint) or other.n != self.n:
            return NotImplemented
        return same_point(self, other)

    __hash__ = None


def canonicalize(h, tol: float = 1e-12) -> np.ndarray:
    """Right-multiply ``h`` so its first nonzero coordinate is real positive."""
    h = np.asarray(h, dtype=float)
    norms = Q.qnorm(h)
    nz = np.nonzero(norms > tol * max(1.0, norms.max()))[0]
    if len(nz) == 0:
        raise DomainError("zero vector has no projective class")
    f = nz[0]
    return Q.right_mul(h, Q.qconj(h[f]) / norms[f])


def hopf_project(h) -> ProjPoint:
    """Project a (nonzero) vector of ``H^{n+1}`` to ``HP^n``."""
    h = np.asarray(h, dtype=float)
    nrm = np.linalg.norm(h)
    if nrm == 0:
        raise DomainError("zero vector has no projective class")
    return ProjPoint(canonicalize(h / nrm), len(h) - 1)


def same_point(p: ProjPoint, q: ProjPoint, tol: float = PROJ_TOL) -> bool:
    return bool(np.max(np.abs(p.rep - q.rep)) < tol)


_SLICE_ZERO = {"i": (2, 3), "j": (1, 3), "k": (1, 2)}


def cpn_slice_membership(p: ProjPoint | np.ndarray, slice: str, tol: float = PROJ_TOL) -> bool:
    """Whether ``p`` lies on ``CP^n_i``, ``CP^n_j`` or ``CP^n_k``.

    ``CP^n_i`` has a representative with ``gamma_a = delta_a = 0`` for all
    ``a`` (``beta, delta`` for ``j`` and ``beta, gamma`` for ``k``).  Each
    slice is ``F^{n+1}`` for a subfield ``F = R + R u``; if ``h q`` lies there
    and the canonical first coordinate is real, then ``q`` is in ``F`` as well,
    so testing the canonical representative suffices.
    """
    rep = p.rep if isinstance(p, ProjPoint) else hopf_project(p).rep
    cols = _SLICE_ZERO[slice]
    return bool(np.max(np.abs(rep[:, cols])) < tol)


def affine_coord(p: ProjPoint | np.ndarray) -> np.ndarray:
    """``h_0 h_1^{-1}`` on ``HP^1``; independent of the representative."""
    h = p.rep if isinstance(p, ProjPoint) else np.asarray(p, dtype=float)
    if h.shape[0] != 2:
        raise DomainError("affine_coord is defined on HP^1")
    if Q.qnorm(h[1]) < 1e-14 * max(1.0, float(Q.qnorm(h[0]))):
        raise PointAtInfinity("h_1 = 0: point at infinity of the affine chart")
    return Q.qmul(h[0], Q.qinv(h[1]))


def from_affine(h) -> ProjPoint:
    """``[h : 1]`` as a point of ``HP^1``."""
    return hopf_project(np.stack([np.asarray(h, dtype=float), Q.UNITS["1"]]))


def stereographic(h) -> np.ndarray:
    """Inverse stereographic map ``R^4 = H -> S^4``."""
    h = np.asarray(h, dtype=float)
    r2 = float(h @ h)
    return np.concatenate([2 * h, [r2 - 1]]) / (r2 + 1)


def inverse_stereographic(x) -> np.ndarray:
    """``S^4 \\ {north pole} -> H``, inverse of :func:`stereographic`."""
    x = np.asarray(x, dtype=float)
    if abs(1 - x[4]) < 1e-14:
        raise PointAtInfinity("north pole has no affine coordinate")
    return x[:4] / (1 - x[4])


def affine_mu(h) -> np.ndarray:
    """``conj(h) i h + i``: the moment map in the chart ``[h : 1]``."""
    h = np.asarray(h)
    return Q.qmul(Q.qconj(h), Q.qmul(Q.I, h)) + Q._asarr(Q.I)


def affine_mu_equations(h) -> np.ndarray:
    """Real system cutting out ``mu = 0`` in the affine chart of ``HP^1``.

    Returns ``(|z|^2 - |w|^2 + 1, alpha delta - beta gamma, alpha gamma + beta delta)``.
    """
    a, b, c, d = np.asarray(h)
    return np.array([a * a + b * b - c * c - d * d + 1, a * d - b * c, a * c + b * d])


def focal_equations(h) -> np.ndarray:
    """``(alpha, beta, gamma^2 + delta^2 - 1)``: the focal circle of ``CP^1`` in ``HP^1``."""
    a, b, c, d = np.asarray(h)
    return np.array([a, b, c * c + d * d - 1])


@dataclass(frozen=True)
class FrameChange:
    """Lower-triangular quaternionic matrix ``A`` with ``h = A k`` (entries act on the left)."""

    A: np.ndarray  # shape (n+1, n+1, 4)

    @property
    def n(self) -> int:
        return self.A.shape[0] - 1

    def apply(self, k) -> np.ndarray:
        k = np.asarray(k)
        return Q.qmul(self.A, k[None, :, :]).sum(axis=1)

    def solve(self, h) -> np.ndarray:
        """Forward substitution for ``A k = h``."""
        h = np.asarray(h, dtype=float)
        k = np.zeros_like(h)
        for a in range(self.n + 1):
            rhs = h[a] - Q.qmul(self.A[a, :a], k[:a]).sum(axis=0)
            k[a] = Q.qmul(Q.qinv(self.A[a, a]), rhs)
        return k


def frame_change_matrix(q, tol: float = 1e-10) -> FrameChange:
    """Change of homogeneous coordinates sending ``[1 : j : 0 : ... : 0]`` to ``q``.

    ``A`` has diagonal ``(q_0, 1, -1, ..., -1)`` and first column
    ``(q_0, q_1 - j, q_2, ..., q_n)``.  Requires ``mu(q) = 0``, ``q_0 != 0``
    and ``q`` not real.
    """
    q = q.rep if isinstance(q, ProjPoint) else np.asarray(q, dtype=float)
    if len(q) < 2:
        raise DomainError("frame change needs n >= 1")
    if Q.qnorm(q[0]) < tol:
        raise DomainError("q_0 = 0")
    if np.max(np.abs(q[:, 1:])) < tol:
        raise DomainError("q is real")
    scale = np.linalg.norm(q)
    if np.max(np.abs(mu(q / scale))) > 1e-8:
        raise DomainError("q is not in mu^{-1}(0)")
    n1 = len(q)
    A = np.zeros((n1, n1, 4))
    A[:, 0] = q
    A[1, 0] = q[1] - Q.UNITS["j"]
    A[1, 1] = Q.UNITS["1"]
    for a in range(2, n1):
        A[a, a] = -Q.UNITS["1"]
    return FrameChange(A)
