"""Moment maps of the diagonal U(1) and Sp(1) actions and their zero sets.

``mu(h) = sum_a conj(h_a) i h_a`` and ``nu(h)`` is the triple obtained with
``i``, ``j``, ``k``.  Both are quadratic, so constraint Jacobians are written
out analytically.  Zero sets are handled at the sphere level: a
:class:`LevelSet` is the intersection of ``S^{4n+3}`` with ``mu = 0``
(the Stiefel manifold ``V_2(C^{n+1})``) or ``nu = 0``
(``V~_4(R^{n+1})``).
"""
from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import stats

from . import quat as Q

_IMAG = (Q.UNITS["i"], Q.UNITS["j"], Q.UNITS["k"])


class RetractionError(RuntimeError):
    """Newton retraction did not reach the requested residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


def mu(h) -> np.ndarray:
    """``sum_a conj(h_a) i h_a`` as a quaternion array of shape ``(4,)``."""
    h = np.asarray(h)
    return Q.qmul(Q.qconj(h), Q.left_mul(Q.I, h)).sum(axis=-2)


def nu(h) -> np.ndarray:
    """The triple of moment maps for ``i``, ``j``, ``k``, shape ``(3, 4)``."""
    h = np.asarray(h)
    hc = Q.qconj(h)
    return np.stack([Q.qmul(hc, Q.left_mul(u, h)).sum(axis=-2) for u in (Q.I, Q.J, Q.K)])


def mu_split(h) -> tuple[float, complex]:
    """``(sum |z|^2 - |w|^2, sum conj(z_a) w_a)`` for the complex split of ``h``.

    Under the split ``mu = i (|z|^2 - |w|^2) + 2 k conj(sum conj(z_a) w_a)``.
    """
    z, w = Q.complex_split(h)
    return float(np.vdot(z, z).real - np.vdot(w, w).real), complex(np.vdot(z, w))


# ---------------------------------------------------------------------------
# constraint manifolds

@dataclass
class ConstraintManifold:
    """Embedded submanifold ``{x : c(x) = 0}`` of ``R^N`` with full-rank Jacobian.

    ``fn`` returns the constraint vector and ``jac`` its Jacobian (rows are
    constraint gradients).  ``in_sphere`` marks manifolds lying in the unit
    sphere whose first constraint is ``|x|^2 - 1``.
    """

    ambient_dim: int
    n_constraints: int
    fn: Callable[[np.ndarray], np.ndarray]
    jac: Callable[[np.ndarray], np.ndarray]
    name: str = "manifold"
    in_sphere: bool = True

    @property
    def dim(self) -> int:
        return self.ambient_dim - self.n_constraints

    def residual(self, x) -> float:
        return float(np.max(np.abs(self.fn(np.ravel(x)))))

    def tangent_projector(self, x) -> np.ndarray:
        A = self.jac(np.ravel(x))
        # orthonormal basis of the normal space via QR of the gradients
        q, _ = np.linalg.qr(A.T)
        return np.eye(self.ambient_dim) - q @ q.T

    def normal_basis(self, x) -> np.ndarray:
        """Orthonormal basis (columns) of the normal space in ``R^N``."""
        q, _ = np.linalg.qr(self.jac(np.ravel(x)).T)
        return q

    def sphere_normal_basis(self, x) -> np.ndarray:
        """Orthonormal normal directions inside the unit sphere (radial removed)."""
        x = np.ravel(x)
        nb = self.normal_basis(x)
        if not self.in_sphere:
            return nb
        r = x / np.linalg.norm(x)
        nb = nb - np.outer(r, r @ nb)
        u, s, _ = np.linalg.svd(nb, full_matrices=False)
        return u[:, s > 1e-8]

    def tangent_basis(self, x) -> np.ndarray:
        """Orthonormal basis (columns) of the tangent space."""
        x = np.ravel(x)
        q, _ = np.linalg.qr(self.jac(x).T, mode="complete")
        return q[:, self.n_constraints:]

    def retract(self, x, tol: float = 1e-12, max_iter: int = 25) -> np.ndarray:
        return newton_retract(self, x, tol=tol, max_iter=max_iter)


def sphere_manifold(dim: int) -> ConstraintManifold:
    """Round unit sphere ``S^dim`` in ``R^{dim+1}``."""
    return ConstraintManifold(
        ambient_dim=dim + 1, n_constraints=1,
        fn=lambda x: np.array([x @ x - 1.0]),
        jac=lambda x: 2.0 * x[None, :],
        name=f"S{dim}",
    )


def linear_section(dim: int, normals: Sequence[np.ndarray], offsets: Sequence[float] | None = None,
                   name: str = "section") -> ConstraintManifold:
    """``S^dim`` intersected with affine hyperplanes ``<a_k, x> = b_k``."""
    A = np.atleast_2d(np.asarray(normals, dtype=float))
    b = np.zeros(len(A)) if offsets is None else np.asarray(offsets, dtype=float)

    def fn(x):
        return np.concatenate([[x @ x - 1.0], A @ x - b])

    def jac(x):
        return np.vstack([2.0 * x[None, :], A])

    return ConstraintManifold(dim + 1, 1 + len(A), fn, jac, name=name)


class Kind(str, enum.Enum):
    SPHERE = "sphere"
    MU0 = "mu0"
    NU0 = "nu0"


_N_CONSTRAINTS = {Kind.SPHERE: 1, Kind.MU0: 4, Kind.NU0: 10}


def _moment_block(h: np.ndarray, unit: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Imaginary part of ``sum conj(h_a) u h_a`` and its Jacobian (3 x 4(n+1))."""
    hc = Q.qconj(h)
    val = Q.qmul(hc, Q.left_mul(unit, h)).sum(axis=0)
    # d/dh of conj(h) u h is 2 Im(conj(h) u dh); conj(h_a) u acts on the left
    blocks = [2.0 * Q.left_matrix(Q.qmul(hc[a], unit))[1:4, :] for a in range(len(h))]
    return val[1:4], np.hstack(blocks)


@dataclass(frozen=True)
class LevelSet:
    """Level sets in ``R^{4n+4}``: the sphere and the lifts of ``mu^{-1}(0)``, ``nu^{-1}(0)``."""

    kind: Kind
    n: int

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.n < 0:
            raise ValueError("n must be non-negative")

    @property
    def ambient_dim(self) -> int:
        return 4 * (self.n + 1)

    @property
    def n_constraints(self) -> int:
        return _N_CONSTRAINTS[self.kind]

    @property
    def dim(self) -> int:
        return self.ambient_dim - self.n_constraints

    def constraints(self, x) -> np.ndarray:
        h = Q.unflat(x)
        out = [np.array([np.sum(h * h) - 1.0])]
        if self.kind is Kind.MU0:
            out.append(_moment_block(h, _IMAG[0])[0])
        elif self.kind is Kind.NU0:
            out.extend(_moment_block(h, u)[0] for u in _IMAG)
        return np.concatenate(out)

    def jacobian(self, x) -> np.ndarray:
        x = np.ravel(x)
        h = Q.unflat(x)
        rows = [2.0 * x[None, :]]
        if self.kind is Kind.MU0:
            rows.append(_moment_block(h, _IMAG[0])[1])
        elif self.kind is Kind.NU0:
            rows.extend(_moment_block(h, u)[1] for u in _IMAG)
        return np.vstack(rows)

    @property
    def manifold(self) -> ConstraintManifold:
        return ConstraintManifold(self.ambient_dim, self.n_constraints, self.constraints,
                                  self.jacobian, name=f"{self.kind.value}(n={self.n})")


@dataclass
class Membership:
    inside: bool
    residual: float
    split: tuple[float, complex] | None = None

    def __bool__(self) -> bool:
        return self.inside


def membership(L: LevelSet, h, tol: float = 1e-10) -> Membership:
    """Max-norm of the constraint vector of ``L`` at ``h`` against ``tol``.

    For ``mu^{-1}(0)`` the split conditions ``|z|^2 - |w|^2`` and
    ``conj(z).w`` are reported as well.
    """
    x = Q.flat(h)
    res = float(np.max(np.abs(L.constraints(x))))
    split = mu_split(h) if L.kind is Kind.MU0 else None
    return Membership(res < tol, res, split)


def newton_retract(M, x, tol: float = 1e-12, max_iter: int = 25) -> np.ndarray:
    """Gauss-Newton projection of ``x`` onto the constraint set.

    Each step is the minimum-norm correction ``-J^+ c(x)``.  Raises
    :class:`RetractionError` when the residual is still above ``tol`` after
    ``max_iter`` steps.
    """
    if isinstance(M, LevelSet):
        M = M.manifold
    shape = np.shape(x)
    y = np.array(x, dtype=float).ravel()
    c = M.fn(y)
    res = float(np.max(np.abs(c)))
    it = 0
    while res >= tol and it < max_iter:
        A = M.jac(y)
        step, *_ = np.linalg.lstsq(A, c, rcond=None)
        y = y - step
        c = M.fn(y)
        new = float(np.max(np.abs(c)))
        it += 1
        if not np.isfinite(new):
            break
        res = new
    if not res < tol:
        raise RetractionError(f"retraction onto {M.name} stalled at residual {res:.3e}", res)
    if it == 0:
        return y.reshape(shape)
    # one extra step pushes the residual down to rounding level
    A = M.jac(y)
    step, *_ = np.linalg.lstsq(A, c, rcond=None)
    y2 = y - step
    if np.max(np.abs(M.fn(y2))) <= res:
        y = y2
    return y.reshape(shape)


# ---------------------------------------------------------------------------
# sampling

def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def haar_sample(group: str, n: int = 1, seed=None) -> np.ndarray:
    """Haar-random element of ``SU(n+1)``, ``SO(n+1)`` or ``Sp(1)``.

    ``SU``/``SO`` are drawn with scipy's QR-based samplers and then corrected
    to determinant one; ``Sp(1)`` is a normalized Gaussian quaternion.
    """
    rng = _rng(seed)
    g = group.upper().replace("(N+1)", "")
    if g in ("SP1", "SP(1)"):
        return Q.random_quat(rng, unit=True)
    dim = n + 1
    if g == "SU":
        if dim == 1:
            return np.ones((1, 1), dtype=complex)
        u = stats.unitary_group.rvs(dim, random_state=rng)
        det = np.linalg.det(u)
        return u / det ** (1.0 / dim)
    if g == "SO":
        if dim == 1:
            return np.ones((1, 1))
        return stats.special_ortho_group.rvs(dim, random_state=rng)
    raise ValueError(f"unknown group {group!r}")


def base_point(L: LevelSet) -> np.ndarray:
    """``[1, j, 0, ...]/sqrt(2)`` on ``mu = 0``, ``[1, i, j, k, 0, ...]/2`` on ``nu = 0``."""
    h = np.zeros((L.n + 1, 4))
    if L.kind is Kind.MU0:
        if L.n < 1:
            raise ValueError("mu^{-1}(0) needs n >= 1")
        h[0, 0] = h[1, 2] = 1 / np.sqrt(2)
    elif L.kind is Kind.NU0:
        if L.n < 3:
            raise ValueError("nu^{-1}(0) needs n >= 3")
        for a in range(4):
            h[a, a] = 0.5
    else:
        h[0, 0] = 1.0
    return h


def act_su(g: np.ndarray, h) -> np.ndarray:
    """Diagonal action ``h_a -> sum_b g_ab h_b`` with complex entries on the left."""
    z, w = Q.complex_split(h)
    return Q.from_split(g @ z, g @ w)


def act_so(g: np.ndarray, h) -> np.ndarray:
    """Real matrices acting on the coordinate index."""
    return np.asarray(g) @ np.asarray(h)


def orbit_sample(L: LevelSet, seed=None) -> np.ndarray:
    """Point of ``L`` obtained by moving the base point with a Haar element."""
    h0 = base_point(L)
    rng = _rng(seed)
    if L.kind is Kind.MU0:
        return act_su(haar_sample("SU", L.n, rng), h0)
    if L.kind is Kind.NU0:
        return act_so(haar_sample("SO", L.n, rng), h0)
    x = rng.standard_normal(h0.shape)
    return x / np.linalg.norm(x)


def stiefel_point(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``(z + w j)/sqrt(2)`` after Hermitian Gram-Schmidt of the pair ``(z, w)``."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    z = z / np.linalg.norm(z)
    w = w - np.vdot(z, w) * z
    w = w / np.linalg.norm(w)
    return Q.from_split(z, w) / np.sqrt(2)


def random_ambient(n: int, rng) -> np.ndarray:
    h = _rng(rng).standard_normal((n + 1, 4))
    return h / np.linalg.norm(h)


# ---------------------------------------------------------------------------
# CSV dump

def sample_rows(L: LevelSet, samples: Iterable[np.ndarray]) -> list[dict]:
    rows = []
    for idx, h in enumerate(samples):
        row = {"index": idx}
        for a, qa in enumerate(np.asarray(h)):
            for comp, v in zip("1ijk", qa):
                row[f"h{a}_{comp}"] = repr(float(v))
        m = membership(L, h)
        row["residual"] = repr(m.residual)
        if L.kind is Kind.NU0:
            row["abs_nu"] = repr(float(np.linalg.norm(nu(h))))
        else:
            row["abs_mu"] = repr(float(np.linalg.norm(mu(h))))
        if m.split is not None:
            row["split_norm_gap"] = repr(abs(m.split[0]))
            row["split_zbar_w"] = repr(abs(m.split[1]))
        rows.append(row)
    return rows


def csv_header(L: LevelSet) -> list[str]:
    head = ["index"] + [f"h{a}_{c}" for a in range(L.n + 1) for c in "1ijk"] + ["residual"]
    head.append("abs_nu" if L.kind is Kind.NU0 else "abs_mu")
    if L.kind is Kind.MU0:
        head += ["split_norm_gap", "split_zbar_w"]
    return head


def write_samples_csv(path_or_file, L: LevelSet, samples: Iterable[np.ndarray]) -> int:
    """Write one row per sample: ``4(n+1)`` coordinates then residual columns."""
    rows = sample_rows(L, samples)
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        writer = csv.DictWriter(fh, fieldnames=csv_header(L))
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if own:
            fh.close()
    return len(rows)
