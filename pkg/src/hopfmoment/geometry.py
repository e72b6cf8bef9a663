"""Numerical Riemannian calculus on embedded level sets.

Everything intrinsic to ``mu^{-1}(0)`` or ``nu^{-1}(0)`` inside ``HP^n`` is
computed one level up, on the Stiefel manifold in ``S^{4n+3}``, restricted to
horizontal vectors (orthogonal to the right ``Sp(1)`` fibers).  The metric of
``HP^n`` is by definition the quotient metric of the unit round sphere.

Vector fields are plain callables ``p -> R^N`` evaluated at points of the
embedded manifold.  Directional derivatives are central differences along
Newton-retracted curves ``R(p +- eps u)``; the retraction correction is even
in ``eps`` so the scheme is second order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from . import quat as Q
from .moment import ConstraintManifold, Kind, LevelSet, linear_section, membership, mu, newton_retract
from .spaces import DomainError, inverse_stereographic, stereographic

Field = Callable[[np.ndarray], np.ndarray]

FRAME_TOL = 1e-11


class FrameDegeneracy(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# fibre fields and submersion models

def fiber_fields(p) -> np.ndarray:
    """Columns ``p i, p j, p k`` (right multiplication), shape ``(N, 3)``."""
    h = Q.unflat(p)
    return np.stack([Q.flat(Q.right_mul(h, Q.UNITS[u])) for u in "ijk"], axis=1)


def left_field(unit: str, sign: float = 1.0) -> Field:
    """The ambient-linear field ``p -> sign * unit * p``."""
    q = sign * Q.UNITS[unit]

    def f(p):
        return Q.flat(Q.left_mul(q, Q.unflat(p)))

    return f


def right_field(unit: str, sign: float = 1.0) -> Field:
    q = sign * Q.UNITS[unit]

    def f(p):
        return Q.flat(Q.right_mul(Q.unflat(p), q))

    return f


def xi_star(p) -> np.ndarray:
    """Left multiplication by ``i``: the lift of the Reeb field."""
    return Q.flat(Q.left_mul(Q.I, Q.unflat(p)))


@dataclass
class SubmersionModel:
    """An embedded manifold with an optional vertical distribution.

    With ``vertical`` set, tangent vectors orthogonal to it model tangent
    vectors of the quotient (a Riemannian submersion).
    """

    manifold: ConstraintManifold
    vertical: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = "model"

    @property
    def fiber_dim(self) -> int:
        return 0 if self.vertical is None else 3

    @property
    def base_dim(self) -> int:
        return self.manifold.dim - self.fiber_dim

    def tangent_projector(self, p) -> np.ndarray:
        return self.manifold.tangent_projector(p)

    def horizontal_projector(self, p) -> np.ndarray:
        P = self.manifold.tangent_projector(p)
        if self.vertical is None:
            return P
        V = self.vertical(np.ravel(p))
        V, _ = np.linalg.qr(V)
        return P - V @ V.T

    def horizontal_basis(self, p) -> np.ndarray:
        Hp = self.horizontal_projector(p)
        u, s, _ = np.linalg.svd(Hp)
        return u[:, : self.base_dim]

    def retract(self, x, tol: float = 1e-12) -> np.ndarray:
        return newton_retract(self.manifold, x, tol=tol)


def model_for(L: LevelSet | ConstraintManifold, quotient: bool | None = None) -> SubmersionModel:
    """Horizontal model for ``mu/nu`` level sets; plain manifold for spheres."""
    if isinstance(L, ConstraintManifold):
        return SubmersionModel(L, None, L.name)
    if quotient is None:
        quotient = L.kind is not Kind.SPHERE
    return SubmersionModel(L.manifold, fiber_fields if quotient else None,
                           f"{L.kind.value}(n={L.n}){'/Sp(1)' if quotient else ''}")


# ---------------------------------------------------------------------------
# tangent vectors and frames

@dataclass
class TangentVec:
    base: np.ndarray
    vec: np.ndarray
    manifold: ConstraintManifold | None = None

    def check(self, tol: float = FRAME_TOL) -> float:
        """Residual of the tangency conditions; raises if above ``tol``."""
        res = abs(float(self.base @ self.vec))
        if self.manifold is not None:
            res = max(res, float(np.max(np.abs(self.manifold.jac(self.base) @ self.vec))))
        if res > tol:
            raise ValueError(f"vector not tangent (residual {res:.2e})")
        return res


@dataclass
class SplitFrame:
    """``span{v1, v2, v3} + span{xi*} + H'`` at a point of a Stiefel level set."""

    base: np.ndarray
    v: np.ndarray        # (N, 3) fibre fields p i, p j, p k
    xi_star: np.ndarray  # (N,)
    hprime: np.ndarray   # (N, m)

    @property
    def basis(self) -> np.ndarray:
        return np.column_stack([self.v, self.xi_star, self.hprime])

    @property
    def dim(self) -> int:
        return 4 + self.hprime.shape[1]


def tangent_frame(L: LevelSet, h, tol: float = 1e-10) -> SplitFrame:
    """Split tangent frame of ``mu^{-1}(0)`` or ``nu^{-1}(0)`` lifted to the sphere."""
    if L.kind is Kind.SPHERE:
        raise DomainError("split frame needs mu0 or nu0")
    p = Q.flat(h)
    if L.manifold.residual(p) > tol:
        raise DomainError("point not on the level set")
    v = fiber_fields(p)
    xs = xi_star(p)
    four = np.column_stack([v, xs])
    gram = four.T @ four
    if np.linalg.det(gram) < 1e-8:
        raise FrameDegeneracy("fibre fields and xi* are degenerate")
    T = L.manifold.tangent_basis(p)
    rest = T - four @ np.linalg.solve(gram, four.T @ T)
    u, s, _ = np.linalg.svd(rest, full_matrices=False)
    m = L.dim - 4
    if m and s[m - 1] < 1e-6:
        raise FrameDegeneracy("H' has collapsed")
    return SplitFrame(p, v, xs, u[:, :m])


def extend_field(u: TangentVec, manifold: ConstraintManifold | None = None) -> Field:
    """Tangential projection of the constant ambient vector ``u.vec``."""
    M = manifold or u.manifold
    vec = np.array(u.vec, dtype=float)

    def f(p):
        return M.tangent_projector(p) @ vec

    return f


def project_field(model: SubmersionModel, vec) -> Field:
    """Horizontal projection of a constant vector (a horizontal extension)."""
    vec = np.array(vec, dtype=float)

    def f(p):
        return model.horizontal_projector(p) @ vec

    return f


def directional_derivative(F: Field, M: ConstraintManifold, p, u, eps: float) -> np.ndarray:
    """``D_u F (p)`` by central differences along the retracted curve ``R(p + t u)``."""
    p = np.ravel(p)
    fp = F(newton_retract(M, p + eps * u))
    fm = F(newton_retract(M, p - eps * u))
    return (fp - fm) / (2 * eps)


def lie_bracket(X: Field, Y: Field, M: ConstraintManifold, p, eps: float = 1e-4) -> np.ndarray:
    """``[X, Y](p) = D_X Y - D_Y X``, projected to ``T_p M``."""
    if not 1e-6 <= eps <= 1e-2:
        raise ValueError("eps must lie in [1e-6, 1e-2]")
    p = np.ravel(p)
    d = directional_derivative(Y, M, p, X(p), eps) - directional_derivative(X, M, p, Y(p), eps)
    return M.tangent_projector(p) @ d


def bracket_field(X: Field, Y: Field, M: ConstraintManifold, eps: float = 1e-4) -> Field:
    """``[X, Y]`` as a field (for nested brackets)."""
    return lambda p: lie_bracket(X, Y, M, p, eps)


# ---------------------------------------------------------------------------
# normal exponential map and focal points

def normal_exponential(x, v, t: float) -> np.ndarray:
    """Great circle ``cos t x + sin t v`` in the unit sphere."""
    return math.cos(t) * np.asarray(x, dtype=float) + math.sin(t) * np.asarray(v, dtype=float)


def _normal_space(N: ConstraintManifold, x) -> np.ndarray:
    return N.sphere_normal_basis(x)


@dataclass
class FocalScan:
    grid: list[tuple[float, float]]
    focal_times: list[float]
    focal_points: list[np.ndarray]
    min_singular: list[float] = field(default_factory=list)


def _exp_jacobian(N: ConstraintManifold, x, v, t: float, step: float) -> np.ndarray:
    """Differential of ``(x', v', t') -> exp`` at ``(x, v, t)`` in an adapted basis."""
    x = np.ravel(x)
    v = np.ravel(v)
    T = N.tangent_basis(x)
    T = T - np.outer(x, x @ T)
    T, _ = np.linalg.qr(T)
    T = T[:, : N.dim]
    nb = _normal_space(N, x)
    rot = nb - np.outer(v, v @ nb)
    u, s, _ = np.linalg.svd(rot, full_matrices=False)
    rot = u[:, s > 1e-8]

    def E(dx, dv):
        xs = newton_retract(N, x + dx)
        nbs = _normal_space(N, xs)
        vs = nbs @ (nbs.T @ (v + dv))
        vs /= np.linalg.norm(vs)
        return normal_exponential(xs, vs, t)

    cols = []
    zero = np.zeros_like(x)
    for k in range(T.shape[1]):
        cols.append((E(step * T[:, k], zero) - E(-step * T[:, k], zero)) / (2 * step))
    for k in range(rot.shape[1]):
        cols.append((E(zero, step * rot[:, k]) - E(zero, -step * rot[:, k])) / (2 * step))
    cols.append(-math.sin(t) * x + math.cos(t) * v)
    return np.column_stack(cols)


def focal_scan(N: ConstraintManifold, x, v, grid: int = 64, step: float = 1e-5,
               threshold: float = 1e-4, refine_tol: float = 1e-6) -> FocalScan:
    """Scan ``t in (0, pi)`` for critical values of the normal exponential map.

    The smallest singular value of the differential is sampled on a grid;
    interior local minima are refined by bounded Brent search to
    ``refine_tol`` and kept when the value falls below ``threshold`` times the
    median singular value.
    """
    ts = np.pi * np.arange(1, grid) / grid

    def smin(t):
        return float(np.linalg.svd(_exp_jacobian(N, x, v, t, step), compute_uv=False)[-1])

    vals = [smin(t) for t in ts]
    out = FocalScan(list(zip(ts.tolist(), vals)), [], [])
    for k in range(1, len(ts) - 1):
        if vals[k] <= vals[k - 1] and vals[k] < vals[k + 1]:
            res = minimize_scalar(smin, bounds=(ts[k - 1], ts[k + 1]), method="bounded",
                                  options={"xatol": refine_tol / 4})
            t = float(res.x)
            sv = np.linalg.svd(_exp_jacobian(N, x, v, t, step), compute_uv=False)
            if sv[-1] < threshold * np.median(sv):
                out.focal_times.append(t)
                out.focal_points.append(normal_exponential(x, v, t))
                out.min_singular.append(float(sv[-1]))
    return out


def cp1_in_s4() -> ConstraintManifold:
    """The totally geodesic ``S^2 = {x_3 = x_4 = 0}`` in ``S^4`` (image of ``CP^1``)."""
    e = np.eye(5)
    return linear_section(4, [e[2], e[3]], name="S2inS4")


@dataclass
class LineReduction:
    w: np.ndarray            # complex vector w = v (-j)
    line_basis: np.ndarray   # quaternionic orthonormal basis (w_hat, x) of the line, as HVectors
    s4_base: np.ndarray
    s4_normal: np.ndarray
    scan: FocalScan
    focal_points: list[np.ndarray]   # unit representatives in S^{4n+3}
    mu_residuals: list[float]


def normal_to_cpn(x, v, tol: float = 1e-10) -> bool:
    """Whether ``v`` is a horizontal normal of ``CP^n_i`` at ``x``."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    zx, _ = Q.complex_split(x)
    zv, wv = Q.complex_split(v)
    return bool(np.max(np.abs(zv)) < tol and abs(np.vdot(zx, wv)) < tol)


def random_cpn_normal(x, rng) -> np.ndarray:
    """Random unit normal of ``CP^n_i`` at the complex unit vector ``x``."""
    zx, _ = Q.complex_split(x)
    y = rng.standard_normal(len(zx)) + 1j * rng.standard_normal(len(zx))
    y -= np.vdot(zx, y) * zx
    y /= np.linalg.norm(y)
    return Q.from_split(np.zeros_like(y), y)


def line_reduce(x, v, grid: int = 64, step: float = 1e-5, refine_tol: float = 1e-6) -> LineReduction:
    """Focal points of ``CP^n`` along ``v`` through the quaternionic line it spans.

    ``x`` is a unit vector of ``C^{n+1}`` (as an HVector with zero ``w``-part)
    and ``v`` a unit normal.  With ``w = v (-j)`` the line ``span_H{x, w}``
    contains the whole normal geodesic; in the coordinates ``w a + x b`` the
    focal scan runs on ``S^2 in S^4`` and the results are mapped back.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    x = x / np.linalg.norm(x)
    _, wx = Q.complex_split(x)
    if np.max(np.abs(wx)) > 1e-10:
        raise DomainError("x is not on CP^n_i")
    if not normal_to_cpn(x, v):
        raise DomainError("v is not normal to CP^n_i at x")
    w = Q.right_mul(v, -Q.UNITS["j"])
    w_hat = w / np.linalg.norm(w)
    # direction of v in the a-coordinate
    q = Q.hdot(w_hat, v)
    s4_base = stereographic(np.zeros(4))
    s4_normal = np.concatenate([q / np.linalg.norm(q), [0.0]])
    N = cp1_in_s4()
    scan = focal_scan(N, s4_base, s4_normal, grid=grid, step=step, refine_tol=refine_tol)
    pts, res = [], []
    for X in scan.focal_points:
        a = inverse_stereographic(X)
        H = Q.right_mul(w_hat, a) + x
        H = H / np.linalg.norm(H)
        pts.append(H)
        res.append(float(np.max(np.abs(mu(H)))))
    zw, _ = Q.complex_split(w)
    return LineReduction(zw, np.stack([w_hat, x]), s4_base, s4_normal, scan, pts, res)


# ---------------------------------------------------------------------------
# second fundamental form

@dataclass
class MeanCurvature:
    vector: np.ndarray
    norm: float
    second_fundamental: np.ndarray  # (dim, N) II(e_k, e_k)


def second_fundamental(M: ConstraintManifold, p, eps: float = 1e-3, basis: np.ndarray | None = None) -> MeanCurvature:
    """Mean curvature of ``M`` in the round sphere at ``p``.

    ``II(e, e)`` is the sphere-normal part of the acceleration of the
    retracted curve ``R(p + t e)``, estimated by a second central difference.
    """
    p = np.ravel(p)
    T = M.tangent_basis(p) if basis is None else basis
    nb = M.sphere_normal_basis(p)
    II = []
    for k in range(T.shape[1]):
        e = T[:, k]
        acc = (newton_retract(M, p + eps * e) - 2 * p + newton_retract(M, p - eps * e)) / eps ** 2
        II.append(nb @ (nb.T @ acc))
    II = np.array(II)
    H = II.mean(axis=0)
    return MeanCurvature(H, float(np.linalg.norm(H)), II)


# ---------------------------------------------------------------------------
# Ricci curvature from a metric in coordinates

def ricci_from_metric(metric: Callable[[np.ndarray], np.ndarray], dim: int, eps: float = 5e-3):
    """Ricci tensor at ``x = 0`` of the coordinate metric ``metric(x)``.

    Christoffel symbols and their derivatives come from central differences of
    the metric with step ``eps``.  Returns ``(g, Ric)`` at the origin.
    """
    e = np.eye(dim)
    cache: dict[tuple, np.ndarray] = {}

    def g_at(*terms):
        key = tuple(sorted(terms))
        if key not in cache:
            x = np.zeros(dim)
            for s, k in terms:
                x += s * eps * e[k]
            cache[key] = np.asarray(metric(x), dtype=float)
        return cache[key]

    g0 = g_at()
    dg = np.zeros((dim, dim, dim))
    ddg = np.zeros((dim, dim, dim, dim))
    for k in range(dim):
        gp, gm = g_at((1, k)), g_at((-1, k))
        dg[k] = (gp - gm) / (2 * eps)
        ddg[k, k] = (gp - 2 * g0 + gm) / eps ** 2
    for k, l in combinations(range(dim), 2):
        val = (g_at((1, k), (1, l)) - g_at((1, k), (-1, l)) - g_at((-1, k), (1, l))
               + g_at((-1, k), (-1, l))) / (4 * eps ** 2)
        ddg[k, l] = ddg[l, k] = val
    return g0, ricci_from_jets(g0, dg, ddg)


def ricci_from_jets(g: np.ndarray, dg: np.ndarray, ddg: np.ndarray) -> np.ndarray:
    """Ricci tensor from the metric, its first (``dg[m,i,j]``) and second derivatives."""
    gi = np.linalg.inv(g)
    # S[i,j,l] = d_i g_jl + d_j g_il - d_l g_ij
    S = np.einsum("ijl->ijl", dg) + np.einsum("jil->ijl", dg) - np.einsum("lij->ijl", dg)
    Gam = 0.5 * np.einsum("kl,ijl->kij", gi, S)
    dS = (np.einsum("mijl->mijl", ddg) + np.einsum("mjil->mijl", ddg) - np.einsum("mlij->mijl", ddg))
    dgi = -np.einsum("ka,mab,bl->mkl", gi, dg, gi)
    dGam = 0.5 * (np.einsum("mkl,ijl->mkij", dgi, S) + np.einsum("kl,mijl->mkij", gi, dS))
    # Ric_bd = d_a G^a_db - d_d G^a_ab + G^a_ae G^e_db - G^a_de G^e_ab
    ric = (np.einsum("aadb->db", dGam) - np.einsum("daab->db", dGam)
           + np.einsum("aae,edb->db", Gam, Gam) - np.einsum("ade,eab->db", Gam, Gam))
    return 0.5 * (ric + ric.T)


@dataclass
class QuotientChart:
    """Chart ``x -> pi(R(h + E x))`` of the quotient, ``E`` an orthonormal horizontal basis."""

    model: SubmersionModel
    base: np.ndarray
    E: np.ndarray
    reeb: Field | None = None
    delta: float = 1e-5

    @property
    def dim(self) -> int:
        return self.E.shape[1]

    def point(self, x) -> np.ndarray:
        return self.model.retract(self.base + self.E @ np.asarray(x))

    def jets(self, x) -> tuple[np.ndarray, np.ndarray | None]:
        """Metric ``g_ij`` and (when a Reeb field is set) ``eta_i`` at chart point ``x``."""
        x = np.asarray(x, dtype=float)
        p = self.point(x)
        cols = []
        for k in range(self.dim):
            dx = np.zeros(self.dim)
            dx[k] = self.delta
            cols.append((self.point(x + dx) - self.point(x - dx)) / (2 * self.delta))
        D = np.column_stack(cols)
        Hd = self.model.horizontal_projector(p) @ D
        g = Hd.T @ Hd
        eta = None if self.reeb is None else D.T @ self.reeb(p)
        return g, eta

    def metric(self, x) -> np.ndarray:
        return self.jets(x)[0]


def quotient_chart(model: SubmersionModel, h, reeb: Field | None = None, delta: float = 1e-5) -> QuotientChart:
    p = np.ravel(h)
    return QuotientChart(model, p, model.horizontal_basis(p), reeb, delta)


@dataclass
class RicciEstimate:
    g: np.ndarray
    ric: np.ndarray
    eta: np.ndarray | None
    dim: int


MAX_RICCI_DIM = 9


def ricci_estimate(model: SubmersionModel, h, eps: float = 5e-3, reeb: Field | None = None,
                   deform: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
                   delta: float = 1e-5) -> RicciEstimate:
    """Ricci form of the (quotient) metric at ``h`` in a retraction chart.

    ``deform(g, eta)`` may replace the chart metric, e.g. by a Tanno
    deformation; it then needs ``reeb``.
    """
    if not 1e-3 <= eps <= 1e-2:
        raise ValueError("eps must lie in [1e-3, 1e-2]")
    chart = quotient_chart(model, h, reeb, delta)
    if chart.dim > MAX_RICCI_DIM:
        raise ValueError(f"dimension {chart.dim} exceeds the Ricci cost guard {MAX_RICCI_DIM}")

    def metric(x):
        g, eta = chart.jets(x)
        return g if deform is None else deform(g, eta)

    g0, ric = ricci_from_metric(metric, chart.dim, eps)
    eta0 = None if reeb is None else chart.jets(np.zeros(chart.dim))[1]
    return RicciEstimate(g0, ric, eta0, chart.dim)


# ---------------------------------------------------------------------------
# Pluecker embedding

def plucker_lift(h) -> np.ndarray:
    """Unit Pluecker vector ``(z_a w_b - z_b w_a)_{a<b}`` of the split of ``h``."""
    z, w = Q.complex_split(h)
    if membership(LevelSet(Kind.MU0, len(z) - 1), h).residual > 1e-10:
        raise DomainError("point not on mu^{-1}(0)")
    p = _wedge(z, w)
    nrm = np.linalg.norm(p)
    assert nrm > 0, "z and w are dependent"
    return p / nrm


def _wedge(z, w) -> np.ndarray:
    n1 = len(z)
    return np.array([z[a] * w[b] - z[b] * w[a] for a in range(n1) for b in range(a + 1, n1)])


def plucker_differential(h, u) -> np.ndarray:
    """Derivative of :func:`plucker_lift` at ``h`` along ambient ``u`` (exact: the wedge is bilinear)."""
    z, w = Q.complex_split(h)
    dz, dw = Q.complex_split(Q.unflat(u))
    p = _wedge(z, w)
    dp = _wedge(dz, w) + _wedge(z, dw)
    nrm = np.linalg.norm(p)
    return dp / nrm - p * np.real(np.vdot(p, dp)) / nrm ** 3


@dataclass
class MetricComparison:
    eigenvalues: np.ndarray
    ratio: float
    spread: float


def metric_compare(h) -> MetricComparison:
    """Compare the Pluecker (Fubini-Study) metric with the quotient metric on ``H'``.

    The Pluecker differential, projected orthogonally to the Hopf circle
    direction ``i p``, is evaluated on an orthonormal basis of ``H'`` (the
    horizontal space of the left ``U(1)`` and right ``Sp(1)`` gauges).  The
    eigenvalues of the resulting Gram matrix are the metric ratios.
    """
    h = np.asarray(h, dtype=float)
    n = len(h) - 1
    if n < 2:
        raise DomainError("metric comparison needs n >= 2 (H' is empty for n = 1)")
    fr = tangent_frame(LevelSet(Kind.MU0, n), h)
    p = plucker_lift(h)
    ip = 1j * p
    cols = []
    for k in range(fr.hprime.shape[1]):
        d = plucker_differential(h, fr.hprime[:, k])
        d = d - np.real(np.vdot(ip, d)) * ip
        cols.append(d)
    D = np.column_stack(cols)
    G = np.real(D.conj().T @ D)
    ev = np.linalg.eigvalsh(G)
    mean = float(ev.mean())
    return MetricComparison(ev, mean, float((ev.max() - ev.min()) / mean))
