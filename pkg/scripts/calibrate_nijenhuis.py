"""Reproduce the frozen Nijenhuis constant ``config.NIJENHUIS_C``.

On the round sphere the bracket of two projected affine fields
``X = P(a + A q)``, ``Y = P(b + B q)`` has the closed form

    [X, Y] = P(B X - A Y) - <p, b + B p> X + <p, a + A p> Y

so the finite-difference bracket error is measurable exactly.  The constant is
the worst ``error / eps`` over spheres ``S^{4n+3}`` (n = 1, 2, 3) and
``eps in {1e-3, 1e-4}``, rounded up to two digits.

    python scripts/calibrate_nijenhuis.py [--points 20] [--seed 0]
"""
import argparse
import math

import numpy as np

from hopfmoment import config
from hopfmoment.geometry import lie_bracket
from hopfmoment.moment import sphere_manifold


def worst_ratio(n: int, points: int, rng, eps_list=(1e-3, 1e-4)) -> float:
    N = 4 * n + 4
    S = sphere_manifold(N - 1)
    worst = 0.0
    for _ in range(points):
        p = rng.standard_normal(N)
        p /= np.linalg.norm(p)
        a, b = rng.standard_normal(N), rng.standard_normal(N)
        A, B = rng.standard_normal((2, N, N)) / np.sqrt(N)
        X = lambda q: S.tangent_projector(q) @ (a + A @ q)  # noqa: E731
        Y = lambda q: S.tangent_projector(q) @ (b + B @ q)  # noqa: E731
        P = S.tangent_projector(p)
        exact = P @ (B @ X(p) - A @ Y(p)) - (p @ (b + B @ p)) * X(p) + (p @ (a + A @ p)) * Y(p)
        for e in eps_list:
            worst = max(worst, float(np.max(np.abs(lie_bracket(X, Y, S, p, e) - exact))) / e)
    return worst


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    ratios = {n: worst_ratio(n, args.points, rng) for n in (1, 2, 3)}
    for n, r in ratios.items():
        print(f"S^{4 * n + 3}: max error/eps = {r:.4f}")
    C = math.ceil(max(ratios.values()) * 100) / 100
    print(f"calibrated C = {C:.2f} (frozen: {config.NIJENHUIS_C})")


if __name__ == "__main__":
    main()
