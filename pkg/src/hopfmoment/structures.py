"""Sasakian, 3-Sasakian and almost complex structures, checked numerically.

``phi`` is defined operationally as horizontally projected left
multiplication by ``i``; the Sasakian axioms are then tested, not assumed.
On ``mu^{-1}(0)`` the projection is exact because ``i H' = H'``.

The almost complex structure ``J`` on the Stiefel lift acts blockwise on the
split frame ``(v1, v2, v3, xi*, H')``::

    v1 -> v2,  v2 -> -v1,  v3 -> xi*,  xi* -> -v3,  u -> P_H'(i u)

Residuals from finite differences are second order in ``eps``; every suite
reports them against ``5 eps`` (or ``C eps`` for the Nijenhuis cases).
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations
from typing import Callable

import numpy as np

from . import config
from . import quat as Q
from .geometry import (Field, SplitFrame, SubmersionModel, directional_derivative,
                       fiber_fields, left_field, lie_bracket, model_for, project_field, right_field,
                       tangent_frame, xi_star)
from .moment import ConstraintManifold, Kind, LevelSet, orbit_sample
from .report import Report

TangentMap = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _d_scalar(f: Callable[[np.ndarray], float], M: ConstraintManifold, p, u, eps: float) -> float:
    return float(directional_derivative(lambda q: np.array([f(q)]), M, p, u, eps)[0])


def _unit(v):
    return v / np.linalg.norm(v)


def _rng(seed):
    return np.random.default_rng(seed)


def sample_points(L: LevelSet, samples: int, seed: int) -> list[np.ndarray]:
    """Deterministic points of ``L`` (orbit samples; uniform on spheres)."""
    if L.kind is Kind.SPHERE:
        rng = _rng(seed)
        pts = rng.standard_normal((samples, L.ambient_dim))
        return list(pts / np.linalg.norm(pts, axis=1, keepdims=True))
    return [Q.flat(orbit_sample(L, seed=seed + k)) for k in range(samples)]


def _random_horizontal(model: SubmersionModel, p, rng, k: int) -> np.ndarray:
    B = model.horizontal_basis(p)
    return B @ np.linalg.qr(rng.standard_normal((B.shape[1], k)))[0]


# ---------------------------------------------------------------------------
# Sasakian structure of the left U(1) action

@dataclass
class SasakianData:
    model: SubmersionModel
    xi: Field
    eta: Callable[[np.ndarray, np.ndarray], float]
    phi: TangentMap


def sasakian_data(L: LevelSet, unit: str = "i", sign: float = 1.0) -> SasakianData:
    """Reeb field ``sign * unit * h`` with its dual form and ``phi``."""
    model = model_for(L)
    xi = left_field(unit, sign)
    q = sign * Q.UNITS[unit]

    def eta(p, u):
        return float(xi(p) @ u)

    def phi(p, u):
        return model.horizontal_projector(p) @ Q.flat(Q.left_mul(q, Q.unflat(u)))

    return SasakianData(model, xi, eta, phi)


def sasaki_phi(L: LevelSet, h, u, tol: float = 1e-10) -> np.ndarray:
    """Horizontally projected ``i u`` for a horizontal tangent vector ``u``."""
    model = model_for(L)
    p = Q.flat(h)
    u = np.asarray(u, dtype=float)
    if np.linalg.norm(model.horizontal_projector(p) @ u - u) > tol * max(1.0, np.linalg.norm(u)):
        raise ValueError("u is not horizontal")
    return sasakian_data(L).phi(p, u)


def metric_lie_derivative(model: SubmersionModel, Z: Field, X: Field, Y: Field, p, eps: float) -> float:
    """``(L_Z g_H)(X, Y)`` for the horizontal metric ``g_H(X, Y) = <HX, HY>``."""
    M = model.manifold

    def gH(A, B):
        return lambda q: float((model.horizontal_projector(q) @ A(q)) @ (model.horizontal_projector(q) @ B(q)))

    Hp = model.horizontal_projector(p)
    zx = lie_bracket(Z, X, M, p, eps)
    zy = lie_bracket(Z, Y, M, p, eps)
    return (_d_scalar(gH(X, Y), M, p, Z(p), eps)
            - (Hp @ zx) @ (Hp @ Y(p)) - (Hp @ X(p)) @ (Hp @ zy))


def d_oneform(form: Callable[[np.ndarray, np.ndarray], float], M: ConstraintManifold,
              X: Field, Y: Field, p, eps: float) -> float:
    """``d eta(X, Y) = X eta(Y) - Y eta(X) - eta([X, Y])``."""
    return (_d_scalar(lambda q: form(q, Y(q)), M, p, X(p), eps)
            - _d_scalar(lambda q: form(q, X(q)), M, p, Y(p), eps)
            - form(p, lie_bracket(X, Y, M, p, eps)))


def _fit_constant(lhs, rhs) -> tuple[float, float]:
    lhs, rhs = np.asarray(lhs), np.asarray(rhs)
    c = float(lhs @ rhs / (rhs @ rhs))
    return c, float(np.max(np.abs(lhs - c * rhs)))


def sasaki_verify(L: LevelSet, samples: int = 5, eps: float = 1e-4, seed: int = 0, pairs: int = 3) -> Report:
    """Sasakian axioms of the left-``i`` structure at ``samples`` random points.

    Cases: unit Reeb field, ``phi xi = 0``, ``phi^2 = -Id + eta (x) xi``, the
    Killing property, and ``d eta = c g(., phi .)`` with a fitted ``c``
    (Richardson-extrapolated from ``eps`` and ``eps/2``; its spread across
    points is reported).
    """
    t0 = time.perf_counter()
    S = sasakian_data(L)
    model, M = S.model, S.model.manifold
    rng = _rng(seed + 1)
    bound = 5 * eps
    worst = dict(unit=0.0, phi_xi=0.0, phi_squared=0.0, killing=0.0, contact=0.0)
    consts = []
    for p in sample_points(L, samples, seed):
        xi = S.xi(p)
        worst["unit"] = max(worst["unit"], abs(np.linalg.norm(xi) - 1))
        worst["phi_xi"] = max(worst["phi_xi"], float(np.linalg.norm(S.phi(p, xi))))
        B = model.horizontal_basis(p)
        for k in range(B.shape[1]):
            u = B[:, k]
            r = S.phi(p, S.phi(p, u)) + u - S.eta(p, u) * xi
            worst["phi_squared"] = max(worst["phi_squared"], float(np.max(np.abs(r))))
        U = _random_horizontal(model, p, rng, pairs + 1)
        fields = [project_field(model, U[:, k]) for k in range(U.shape[1])]
        lhs = {eps: [], eps / 2: []}
        rhs = []
        for a, b in combinations(range(len(fields)), 2):
            X, Y = fields[a], fields[b]
            worst["killing"] = max(worst["killing"], abs(metric_lie_derivative(model, S.xi, X, Y, p, eps)))
            for e in lhs:
                lhs[e].append(d_oneform(S.eta, M, X, Y, p, e))
            rhs.append(float(X(p) @ S.phi(p, Y(p))))
        c, res = _fit_constant(lhs[eps], rhs)
        worst["contact"] = max(worst["contact"], res)
        extrap = (4 * np.array(lhs[eps / 2]) - np.array(lhs[eps])) / 3
        consts.append(_fit_constant(extrap, rhs)[0])
    rep = Report("sasakian", L.kind.value, L.n, eps, dict(samples=samples, seed=seed))
    rep.add("unit_reeb", worst["unit"], 1e-10)
    rep.add("phi_of_reeb", worst["phi_xi"], 1e-10)
    rep.add("phi_squared", worst["phi_squared"], 1e-10)
    rep.add("killing", worst["killing"], bound)
    rep.add("d_eta_fit", worst["contact"], bound)
    spread = float(np.max(consts) - np.min(consts))
    rep.add("contact_constant_spread", spread, config.CONTACT_SPREAD_TOL)
    rep.values["contact_constant"] = float(np.mean(consts))
    rep.wall_time = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# 3-Sasakian structure of the left Sp(1) action

def three_sasaki_fields(sign: float = -1.0) -> list[Field]:
    """``xi_a = -a h`` for ``a = i, j, k``; this sign gives ``[xi_1, xi_2] = 2 xi_3``."""
    return [left_field(u, sign) for u in "ijk"]


def three_sasaki_verify(L: LevelSet, samples: int = 10, eps: float = 1e-4, seed: int = 0) -> Report:
    if L.kind is Kind.NU0 and L.n < 3:
        raise ValueError("nu0 needs n >= 3")
    if L.kind is Kind.MU0:
        raise ValueError("the left Sp(1) fields are not tangent to mu0")
    t0 = time.perf_counter()
    model = model_for(L)
    M = model.manifold
    xis = three_sasaki_fields()
    rng = _rng(seed + 1)
    bound = 5 * eps
    gram = brk = kill = 0.0
    for p in sample_points(L, samples, seed):
        F = np.column_stack([x(p) for x in xis])
        HF = model.horizontal_projector(p) @ F
        gram = max(gram, float(np.max(np.abs(HF.T @ HF - np.eye(3)))))
        for a in range(3):
            b, c = (a + 1) % 3, (a + 2) % 3
            r = lie_bracket(xis[a], xis[b], M, p, eps) - 2 * xis[c](p)
            brk = max(brk, float(np.max(np.abs(r))))
        U = _random_horizontal(model, p, rng, 2)
        X, Y = project_field(model, U[:, 0]), project_field(model, U[:, 1])
        for Z in xis:
            for A, B in ((X, X), (X, Y), (Y, Y)):
                kill = max(kill, abs(metric_lie_derivative(model, Z, A, B, p, eps)))
    rep = Report("three-sasakian", L.kind.value, L.n, eps, dict(samples=samples, seed=seed))
    rep.add("orthonormality", gram, 1e-10)
    rep.add("brackets", brk, bound)
    rep.add("killing", kill, bound)
    rep.wall_time = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# eta-Einstein fit and Tanno deformation

@dataclass
class EtaEinsteinFit:
    lam: float
    mu: float
    residual: float
    dim: int


def fit_eta_einstein(estimates) -> EtaEinsteinFit:
    """Least-squares ``Ric = lam g + mu eta (x) eta`` over several Ricci estimates."""
    A = np.concatenate([np.stack([r.g.ravel(), np.outer(r.eta, r.eta).ravel()], axis=1) for r in estimates])
    b = np.concatenate([r.ric.ravel() for r in estimates])
    (lam, mu), *_ = np.linalg.lstsq(A, b, rcond=None)
    return EtaEinsteinFit(float(lam), float(mu), float(np.linalg.norm(A @ [lam, mu] - b) / np.linalg.norm(b)),
                          estimates[0].dim)


def eta_einstein_fit(L: LevelSet, samples: int = 5, seed: int = 0, eps: float = 5e-3) -> EtaEinsteinFit:
    from .geometry import ricci_estimate

    model = model_for(L)
    reeb = xi_star if L.kind is not Kind.SPHERE else left_field("i")
    est = [ricci_estimate(model, p, eps=eps, reeb=reeb) for p in sample_points(L, samples, seed)]
    return fit_eta_einstein(est)


@dataclass
class TannoDeformation:
    A: float
    dim: int

    def metric(self, g, eta) -> np.ndarray:
        return self.A * np.asarray(g) + self.A * (self.A - 1) * np.outer(eta, eta)

    def reeb(self, xi) -> np.ndarray:
        return np.asarray(xi) / self.A

    def __call__(self, g, eta) -> np.ndarray:
        return self.metric(g, eta)


def tanno_deform(lam: float, dim: int) -> TannoDeformation:
    """``g' = A g + A(A-1) eta (x) eta``, ``xi' = xi / A`` with ``A = (lam+2)/(dim+1)``."""
    if lam <= -2:
        raise ValueError("lam must exceed -2")
    return TannoDeformation((lam + 2) / (dim + 1), dim)


def eta_einstein_report(L: LevelSet, samples: int = 5, seed: int = 0, eps: float = 5e-3) -> Report:
    from .geometry import ricci_estimate

    t0 = time.perf_counter()
    model = model_for(L)
    pts = sample_points(L, samples, seed)
    est = [ricci_estimate(model, p, eps=eps, reeb=xi_star) for p in pts]
    fit = fit_eta_einstein(est)
    tanno = tanno_deform(fit.lam, fit.dim)
    worst = 0.0
    for p in pts:
        r = ricci_estimate(model, p, eps=eps, reeb=xi_star, deform=tanno)
        worst = max(worst, float(np.linalg.norm(r.ric - (fit.dim - 1) * r.g) / np.linalg.norm(r.g)))
    rep = Report("eta-einstein", L.kind.value, L.n, eps, dict(samples=samples, seed=seed))
    rep.add("fit_residual", fit.residual, 1e-2)
    rep.add("trace_identity", abs(fit.lam + fit.mu - (fit.dim - 1)) / (fit.dim - 1), 1e-2)
    rep.add("tanno_einstein", worst, 1e-2)
    rep.values.update(lam=fit.lam, mu=fit.mu, A=tanno.A)
    rep.wall_time = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# almost complex structure J

def j_map(L: LevelSet) -> TangentMap:
    """``(p, u) -> J_p u`` for tangent ``u``, smooth in ``p`` (no frame choice)."""
    if L.kind is Kind.SPHERE:
        raise ValueError("J lives on mu0 or nu0")
    M = L.manifold

    def J(p, u):
        v = fiber_fields(p)
        xs = xi_star(p)
        four = np.column_stack([v, xs])
        c = four.T @ u
        rest = u - four @ c
        PH = M.tangent_projector(p) - four @ four.T
        iu = Q.flat(Q.left_mul(Q.I, Q.unflat(rest)))
        return c[0] * v[:, 1] - c[1] * v[:, 0] + c[2] * xs - c[3] * v[:, 2] + PH @ iu

    return J


@dataclass
class ComplexStructureData:
    level: LevelSet
    frame: SplitFrame
    matrix: np.ndarray  # J in the orthonormal frame basis

    def apply(self, u) -> np.ndarray:
        B = self.frame.basis
        return B @ (self.matrix @ (B.T @ u))

    @property
    def square_residual(self) -> float:
        return float(np.max(np.abs(self.matrix @ self.matrix + np.eye(len(self.matrix)))))

    @property
    def orthogonality_residual(self) -> float:
        return float(np.max(np.abs(self.matrix.T @ self.matrix - np.eye(len(self.matrix)))))


def build_J(L: LevelSet, h) -> ComplexStructureData:
    fr = tangent_frame(L, h)
    B = fr.basis
    m = fr.dim
    Mx = np.zeros((m, m))
    Mx[1, 0] = 1
    Mx[0, 1] = -1
    Mx[3, 2] = 1
    Mx[2, 3] = -1
    H = fr.hprime
    PH = H @ H.T
    iH = np.column_stack([Q.flat(Q.left_mul(Q.I, Q.unflat(H[:, k]))) for k in range(H.shape[1])]) if H.shape[1] else H
    Mx[4:, 4:] = B[:, 4:].T @ (PH @ iH)
    return ComplexStructureData(L, fr, Mx)


def j_field(J: TangentMap, X: Field) -> Field:
    return lambda p: J(p, X(p))


def nijenhuis(L: LevelSet, p, X: Field, Y: Field, eps: float = 1e-4, J: TangentMap | None = None) -> np.ndarray:
    """``[X,Y] + J[JX,Y] + J[X,JY] - [JX,JY]`` at ``p``."""
    if not 1e-5 <= eps <= 1e-2:
        raise ValueError("eps must lie in [1e-5, 1e-2]")
    J = J or j_map(L)
    M = L.manifold
    p = np.ravel(p)
    JX, JY = j_field(J, X), j_field(J, Y)
    return (lie_bracket(X, Y, M, p, eps) + J(p, lie_bracket(JX, Y, M, p, eps))
            + J(p, lie_bracket(X, JY, M, p, eps)) - lie_bracket(JX, JY, M, p, eps))


NIJENHUIS_CASES = ("horizontal-horizontal", "horizontal-xi_star", "horizontal-xi1",
                   "horizontal-xi3", "fiber-xi_star", "vertical-vertical")


def nijenhuis_case_vectors(fr: SplitFrame, rng) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Tangent pairs at the frame base point, one per case type."""
    H = fr.hprime
    m = H.shape[1]
    if m >= 2:
        c = np.linalg.qr(rng.standard_normal((m, 2)))[0]
        X, Y = H @ c[:, 0], H @ c[:, 1]
    else:
        X = Y = None
    v1, v2, v3 = fr.v.T
    out = {}
    if X is not None:
        out["horizontal-horizontal"] = (X, Y)
        out["horizontal-xi_star"] = (X, fr.xi_star)
        out["horizontal-xi1"] = (X, v1)
        out["horizontal-xi3"] = (X, v3)
    out["fiber-xi_star"] = ((v1, v2, v3)[rng.integers(3)], fr.xi_star)
    out["vertical-vertical"] = (v1, v3)
    return out


def richardson(f: Callable[[float], np.ndarray], eps: float, order: int = 2) -> np.ndarray:
    """Extrapolate ``f(eps)`` and ``f(eps/2)`` assuming error ``O(eps^order)``."""
    r = 2 ** order
    return (r * f(eps / 2) - f(eps)) / (r - 1)


def lie_derivative_J(L: LevelSet, Z: Field, X: Field, p, eps: float, J: TangentMap | None = None) -> np.ndarray:
    """``(L_Z J) X = [Z, JX] - J [Z, X]`` at ``p``."""
    J = J or j_map(L)
    M = L.manifold
    return lie_bracket(Z, j_field(J, X), M, p, eps) - J(p, lie_bracket(Z, X, M, p, eps))


def complex_structure_verify(L: LevelSet, samples: int = 20, eps_list=(1e-3, 1e-4), seed: int = 0,
                             C: float | None = None) -> Report:
    """Algebraic checks of ``J`` and the six-case Nijenhuis suite."""
    t0 = time.perf_counter()
    C = config.NIJENHUIS_C if C is None else C
    J = j_map(L)
    M = L.manifold
    rng = _rng(seed + 1)
    alg_sq = alg_orth = 0.0
    worst = {(c, e): 0.0 for c in NIJENHUIS_CASES for e in eps_list}
    extrap = {c: 0.0 for c in NIJENHUIS_CASES}
    lieJ = {"xi_star": 0.0, "v3": 0.0}
    ext_dep = 0.0
    seen: set[str] = set()
    for p in sample_points(L, samples, seed):
        data = build_J(L, p)
        alg_sq = max(alg_sq, data.square_residual)
        alg_orth = max(alg_orth, data.orthogonality_residual)
        cases = nijenhuis_case_vectors(data.frame, rng)
        seen.update(cases)
        for name, (a, b) in cases.items():
            X = extend_field_at(M, a)
            Y = extend_field_at(M, b)
            vals = {}
            for e in sorted(set(eps_list) | {min(eps_list) / 2}):
                vals[e] = nijenhuis(L, p, X, Y, e, J)
            for e in eps_list:
                worst[(name, e)] = max(worst[(name, e)], float(np.max(np.abs(vals[e]))))
            e0 = min(eps_list)
            ex = (4 * vals[e0 / 2] - vals[e0]) / 3
            extrap[name] = max(extrap[name], float(np.max(np.abs(ex))))
        # a second, curved extension of the horizontal pair
        a, b = next(iter(cases.values()))
        e0 = min(eps_list)
        n1 = richardson(lambda e: nijenhuis(L, p, extend_field_at(M, a), extend_field_at(M, b), e, J), e0)
        X2, Y2 = curved_extension(M, p, a, rng), curved_extension(M, p, b, rng)
        n2 = richardson(lambda e: nijenhuis(L, p, X2, Y2, e, J), e0)
        ext_dep = max(ext_dep, float(np.max(np.abs(n1 - n2))))
        u = data.frame.basis @ rng.standard_normal(data.frame.dim)
        X = extend_field_at(M, u)
        for key, Z in (("xi_star", xi_star), ("v3", right_field("k"))):
            lieJ[key] = max(lieJ[key], float(np.max(np.abs(lie_derivative_J(L, Z, X, p, max(eps_list), J)))))
    rep = Report("complex-structure", L.kind.value, L.n, max(eps_list),
                 dict(samples=samples, seed=seed, eps_list=list(eps_list), C=C))
    rep.add("J_squared", alg_sq, 1e-12)
    rep.add("J_orthogonal", alg_orth, 1e-12)
    for name in NIJENHUIS_CASES:
        if name not in seen:
            continue
        for e in eps_list:
            rep.add(f"nijenhuis[{name}, eps={e:g}]", worst[(name, e)], C * e)
        rep.add(f"nijenhuis_extrapolated[{name}]", extrap[name], 1e-6)
    rep.add("extension_independence", ext_dep, 1e-6)
    for key, r in lieJ.items():
        rep.add(f"lie_derivative_J[{key}]", r, 5 * max(eps_list))
    rep.wall_time = time.perf_counter() - t0
    return rep


def extend_field_at(M: ConstraintManifold, vec) -> Field:
    vec = np.array(vec, dtype=float)
    return lambda p: M.tangent_projector(p) @ vec


def curved_extension(M: ConstraintManifold, p0, vec, rng) -> Field:
    """Tangential projection of ``vec + A (p - p0)`` with a random matrix ``A``."""
    p0 = np.ravel(p0).copy()
    vec = np.array(vec, dtype=float)
    A = rng.standard_normal((len(p0), len(p0)))
    return lambda p: M.tangent_projector(p) @ (vec + A @ (p - p0))


# ---------------------------------------------------------------------------
# curvature conditions and the fundamental form

def fiber_form(a: int) -> Callable[[np.ndarray, np.ndarray], float]:
    """Metric dual of the fibre field ``p e_a`` (``a = 0, 1, 2`` for ``i, j, k``)."""
    return lambda p, u: float(fiber_fields(p)[:, a] @ u)


def curvature_conditions(L: LevelSet, samples: int = 5, eps: float = 1e-4, seed: int = 0) -> Report:
    """The two conditions on ``d eta_i`` that make ``J`` integrable.

    1. ``d eta_i(phi X, Y) + d eta_i(X, phi Y) = 0`` (and the symmetric form
       ``d eta_i(phi X, phi Y) = d eta_i(X, Y)``) for ``X, Y`` in ``H'``.
    2. ``d eta_i(X, xi*) = 0`` for ``X`` in ``H'``.
    """
    t0 = time.perf_counter()
    J = j_map(L)
    M = L.manifold
    rng = _rng(seed + 1)
    c1 = c1s = c2 = gap = 0.0
    for p in sample_points(L, samples, seed):
        fr = tangent_frame(L, p)
        H = fr.hprime
        cvec = np.linalg.qr(rng.standard_normal((H.shape[1], 2)))[0]
        x, y = H @ cvec[:, 0], H @ cvec[:, 1]
        X, Y = extend_field_at(M, x), extend_field_at(M, y)
        PX, PY = j_field(J, X), j_field(J, Y)
        for a in range(3):
            eta = fiber_form(a)
            anti = (d_oneform(eta, M, PX, Y, p, eps) + d_oneform(eta, M, X, PY, p, eps))
            sym = d_oneform(eta, M, PX, PY, p, eps) - d_oneform(eta, M, X, Y, p, eps)
            c1 = max(c1, abs(anti))
            c1s = max(c1s, abs(sym))
            gap = max(gap, abs(abs(anti) - abs(sym)))
            c2 = max(c2, abs(d_oneform(eta, M, X, xi_star, p, eps)))
    rep = Report("curvature-conditions", L.kind.value, L.n, eps, dict(samples=samples, seed=seed))
    bound = 5 * eps
    rep.add("type_11_antisymmetrized", c1, bound)
    rep.add("type_11_symmetric", c1s, bound)
    rep.add("forms_agree", gap, bound)
    rep.add("reeb_contraction", c2, bound)
    rep.wall_time = time.perf_counter() - t0
    return rep


@dataclass
class KahlerProbe:
    omega: np.ndarray
    antisymmetry: float
    det: float
    max_d_omega: float


def kahler_form_probe(L: LevelSet, h, eps: float = 1e-4, triples: int | None = 20, seed: int = 0) -> KahlerProbe:
    """``omega(X, Y) = g(JX, Y)`` and finite-difference ``d omega`` on frame triples."""
    J = j_map(L)
    M = L.manifold
    p = Q.flat(h)
    data = build_J(L, p)
    W = data.matrix.T  # omega_ab = <J e_a, e_b>
    B = data.frame.basis
    fields = [extend_field_at(M, B[:, k]) for k in range(B.shape[1])]

    def om(A, C):
        return lambda q: float(J(q, A(q)) @ C(q))

    def omv(q, A, C):
        return float(J(q, A) @ C)

    trip = list(combinations(range(len(fields)), 3))
    if triples is not None and triples < len(trip):
        idx = _rng(seed).choice(len(trip), triples, replace=False)
        trip = [trip[i] for i in sorted(idx)]
    worst = 0.0
    for a, b, c in trip:
        X, Y, Z = fields[a], fields[b], fields[c]
        d = (_d_scalar(om(Y, Z), M, p, X(p), eps) - _d_scalar(om(X, Z), M, p, Y(p), eps)
             + _d_scalar(om(X, Y), M, p, Z(p), eps)
             - omv(p, lie_bracket(X, Y, M, p, eps), Z(p)) + omv(p, lie_bracket(X, Z, M, p, eps), Y(p))
             - omv(p, lie_bracket(Y, Z, M, p, eps), X(p)))
        worst = max(worst, abs(d))
    return KahlerProbe(W, float(np.max(np.abs(W + W.T))), float(abs(np.linalg.det(W))), worst)


@dataclass
class HypercomplexProbe:
    residual: float
    coefficients: np.ndarray
    mixes_blocks: bool


def hypercomplex_probe(L: LevelSet, h) -> HypercomplexProbe:
    """Distance from ``J`` to the span of the projected right multiplications.

    Report only: the relative Frobenius residual of the best fit
    ``J ~ sum_a c_a P R_a P`` in the frame, with ``R_a`` right multiplication
    by ``i, j, k``.  Also records whether ``J v3`` leaves the vertical block.
    """
    if L.n < 2:
        raise ValueError("needs n >= 2")
    data = build_J(L, h)
    B = data.frame.basis
    n1 = L.n + 1
    cands = [B.T @ Q.block_right(Q.UNITS[u], n1) @ B for u in "ijk"]
    A = np.stack([c.ravel() for c in cands], axis=1)
    coef, *_ = np.linalg.lstsq(A, data.matrix.ravel(), rcond=None)
    res = float(np.linalg.norm(A @ coef - data.matrix.ravel()) / np.linalg.norm(data.matrix))
    jv3 = data.matrix[:, 2]
    mixes = bool(np.linalg.norm(jv3[:3]) < 1e-12 and abs(jv3[3]) > 0.5)
    return HypercomplexProbe(res, coef, mixes)


def sphere_level(n: int) -> LevelSet:
    return LevelSet(Kind.SPHERE, n)
