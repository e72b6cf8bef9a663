"""Print Poincare polynomials of mu^{-1}(0) and nu^{-1}(0) with the route cross-check.

    python scripts/poincare_table.py [--max-n 8] [--max-k 4]
"""
import argparse

from hopfmoment.cohomfam import (MU0_TABLE, poincare_grassmannian, poincare_mu0, poincare_mu0_gysin,
                                 poincare_nu0)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=8)
    ap.add_argument("--max-k", type=int, default=4)
    args = ap.parse_args()
    print(f"{'n':>3}  {'Gr_2(C^(n+1))':<48} mu^-1(0)")
    for n in range(2, args.max_n + 1):
        p = poincare_mu0(n)
        flag = "" if p == poincare_mu0_gysin(n) else "  ROUTES DISAGREE"
        if n in MU0_TABLE and str(p) != MU0_TABLE[n]:
            flag += "  TABLE MISMATCH"
        print(f"{n:>3}  {str(poincare_grassmannian(n)):<48} {p}{flag}")
    print()
    for k in range(1, args.max_k + 1):
        print(f"nu^-1(0) in HP^{2 * k + 2}: {poincare_nu0(k)}")


if __name__ == "__main__":
    main()
