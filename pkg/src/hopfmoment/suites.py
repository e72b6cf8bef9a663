"""Verification suites that do not belong to a single structure.

Each function returns a :class:`Report`; the command line only parses flags
and dispatches here.
"""
from __future__ import annotations

import math
import time

import numpy as np

from . import config
from . import quat as Q
from .cohomfam import (MU0_TABLE, poincare_grassmannian, poincare_grassmannian_factored, poincare_mu0,
                       poincare_mu0_gysin, poincare_nu0)
from .geometry import (cp1_in_s4, line_reduce, metric_compare, random_cpn_normal, second_fundamental)
from .moment import (Kind, LevelSet, membership, mu, mu_split, newton_retract, nu, orbit_sample,
                     random_ambient, stiefel_point)
from .report import Report
from .spaces import affine_coord, affine_mu, focal_equations, inverse_stereographic


def moment_verify(n: int, samples: int = 1000, seed: int = 0, tol: float = config.ORBIT_TOL,
                  kinds: tuple[Kind, ...] | None = None) -> Report:
    """Orbit samples of the base points stay on ``mu = 0`` (and ``nu = 0`` when ``n >= 3``)."""
    t0 = time.perf_counter()
    kinds = kinds or ((Kind.MU0, Kind.NU0) if n >= 3 else (Kind.MU0,))
    rep = Report("moment", ",".join(k.value for k in kinds), n, None, dict(samples=samples, seed=seed, tol=tol))
    for kind in kinds:
        L = LevelSet(kind, n)
        f = mu if kind is Kind.MU0 else nu
        worst = max(float(np.max(np.abs(f(orbit_sample(L, seed=seed + k))))) for k in range(samples))
        rep.add(f"orbit_{kind.value}", worst, tol)
    rep.wall_time = time.perf_counter() - t0
    return rep


def split_verify(n: int, samples: int = 1000, seed: int = 0) -> Report:
    """Split characterization: Hermitian-orthonormal pairs lie on ``mu = 0`` and retracted points split."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    L = LevelSet(Kind.MU0, n)
    pair = retr = 0.0
    for _ in range(samples):
        z = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
        w = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
        pair = max(pair, membership(L, stiefel_point(z, w)).residual)
        y = newton_retract(L, Q.flat(random_ambient(n, rng))).reshape(-1, 4)
        gap, zw = mu_split(y)
        retr = max(retr, abs(gap), abs(zw))
    rep = Report("split", "mu0", n, None, dict(samples=samples, seed=seed))
    rep.add("orthonormal_pairs_membership", pair, 1e-12)
    rep.add("retracted_split_conditions", retr, 1e-8)
    rep.wall_time = time.perf_counter() - t0
    return rep


def minimality_verify(n: int, samples: int = 20, seed: int = 0, eps: float = 1e-3) -> Report:
    """Mean curvature of ``V_2(C^{n+1})`` in ``S^{4n+3}`` plus a totally geodesic baseline."""
    t0 = time.perf_counter()
    L = LevelSet(Kind.MU0, n)
    worst = max(second_fundamental(L.manifold, Q.flat(orbit_sample(L, seed=seed + k)), eps).norm
                for k in range(samples))
    base = second_fundamental(cp1_in_s4(), np.array([0, 0, 0, 0, -1.0]), eps).norm
    rep = Report("minimality", "mu0", n, eps, dict(samples=samples, seed=seed))
    rep.add("mean_curvature", worst, 1e-4)
    rep.add("totally_geodesic_baseline", base, 1e-6)
    rep.wall_time = time.perf_counter() - t0
    return rep


def metric_compare_verify(n: int, samples: int = 20, seed: int = 0) -> Report:
    """Pluecker pullback metric is a constant multiple of the quotient metric on ``H'``."""
    t0 = time.perf_counter()
    L = LevelSet(Kind.MU0, n)
    res = [metric_compare(orbit_sample(L, seed=seed + k)) for k in range(samples)]
    ratios = np.array([r.ratio for r in res])
    rep = Report("metric-compare", "mu0", n, None, dict(samples=samples, seed=seed))
    rep.add("eigenvalue_spread", max(r.spread for r in res), 1e-6)
    rep.add("constant_spread", float((ratios.max() - ratios.min()) / ratios.mean()), 1e-8)
    rep.values["constant"] = float(ratios.mean())
    rep.wall_time = time.perf_counter() - t0
    return rep


def focal_verify(n: int, grid: int = config.FOCAL_GRID, samples: int = 1, seed: int = 0,
                 refine: float = config.FOCAL_REFINE_TOL) -> tuple[Report, list[dict]]:
    """Focal points of ``CP^n_i`` along random normals, each tested for ``mu = 0``.

    For ``n = 1`` the focal points are also checked in the affine chart of
    ``HP^1`` against ``conj(h) i h + i = 0`` and ``alpha = beta = 0,
    gamma^2 + delta^2 = 1``, and in the ``S^4`` line coordinate.
    """
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    rows: list[dict] = []
    dt = memb = aff = eq43 = 0.0
    count_ok = True
    for s in range(samples):
        z = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
        x = Q.from_split(z / np.linalg.norm(z), np.zeros(n + 1))
        v = random_cpn_normal(x, rng)
        lr = line_reduce(x, v, grid=grid, refine_tol=refine)
        count_ok &= len(lr.scan.focal_times) == 1
        for t, H, X in zip(lr.scan.focal_times, lr.focal_points, lr.scan.focal_points):
            dt = max(dt, abs(t - math.pi / 2))
            memb = max(memb, float(np.max(np.abs(mu(H)))))
            eq43 = max(eq43, float(np.max(np.abs(focal_equations(inverse_stereographic(X))))))
            if n == 1:
                a = affine_coord(H)
                aff = max(aff, float(np.max(np.abs(affine_mu(a)))),
                          float(np.max(np.abs(focal_equations(a)))))
            row = {"sample": s, "t": repr(t)}
            for k, val in enumerate(Q.flat(H)):
                row[f"x{k}"] = repr(float(val))
            row["abs_mu"] = repr(float(np.linalg.norm(mu(H))))
            rows.append(row)
    rep = Report("focal", "cpn", n, None, dict(grid=grid, samples=samples, seed=seed, refine=refine))
    rep.add("single_focal_time", 0.0 if count_ok else 1.0, 0.0)
    rep.add("focal_time_offset", dt, 1e-3)
    rep.add("mu_membership", memb, 1e-8 if n == 1 else 1e-6)
    rep.add("line_coordinate_equations", eq43, 1e-8)
    if n == 1:
        rep.add("affine_equations", aff, 1e-8)
    rep.values["focal_points"] = len(rows)
    rep.wall_time = time.perf_counter() - t0
    return rep, rows


def poincare_report(ns: list[int], check_table: bool = False, cross_max: int = 30, nu_max: int = 10) -> Report:
    """Poincare polynomials, route agreement, and (optionally) the reference table."""
    t0 = time.perf_counter()
    rep = Report("poincare", "mu0", max(ns), None, dict(n=ns, check_table=check_table))
    for n in ns:
        if n >= 2:
            rep.values[f"mu0[{n}]"] = str(poincare_mu0(n))
        rep.values[f"gr2[{n}]"] = str(poincare_grassmannian(n))
    bad_routes = [n for n in range(2, max(cross_max, max(ns)) + 1)
                  if not (poincare_mu0(n) == poincare_mu0_gysin(n)
                          == poincare_mu0_gysin(n, poincare_grassmannian_factored(n)))]
    rep.add("routes_agree", float(len(bad_routes)), 0.0)
    bad_gr = [n for n in range(1, cross_max + 1) if poincare_grassmannian(n) != poincare_grassmannian_factored(n)]
    rep.add("grassmannian_factorization", float(len(bad_gr)), 0.0)
    bad_nu = [k for k in range(1, nu_max + 1)
              if not poincare_nu0(k).is_palindromic(8 * k - 1) or poincare_nu0(k).degree != 8 * k - 1]
    rep.add("nu0_palindromic", float(len(bad_nu)), 0.0)
    rep.add("nu0_sphere", 0.0 if str(poincare_nu0(1)) == "1+t^7" else 1.0, 0.0)
    if check_table:
        mism = [n for n, ref in MU0_TABLE.items() if str(poincare_mu0(n)) != ref]
        rep.add("table_match", float(len(mism)), 0.0)
        for n in mism:
            rep.values[f"table_diff[{n}]"] = f"expected {MU0_TABLE[n]} got {poincare_mu0(n)}"
    rep.wall_time = time.perf_counter() - t0
    return rep
