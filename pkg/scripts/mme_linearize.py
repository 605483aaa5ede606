"""CDF of the measure of maximal entropy and the linearized map for g_eps.

Prints the scaling residual, the derivative deviation after conjugation and
the Holder exponent of F for a few perturbation sizes; optionally writes F.
"""
import argparse

import numpy as np

from galab import margulis


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--degree", type=int, default=2)
    ap.add_argument("--depth", type=int, default=20)
    ap.add_argument("--eps", default="0,0.1,0.3,0.6")
    ap.add_argument("--csv", help="write the CDF of the last eps here (y,F on 2^12 cells)")
    args = ap.parse_args()
    print("eps,scaling_residual,max_derivative_deviation,idempotence,rn_residual,holder_exponent")
    F = None
    for eps in (float(e) for e in args.eps.split(",")):
        g = margulis.ExpandingMap(args.degree, eps)
        F = margulis.mme_cdf(g, args.depth)
        lin = margulis.linearize(g, F)
        y = np.linspace(0, 1, 4097)
        idem = float(np.abs(margulis.mme_cdf(lin.hat, args.depth)(y) - y).max())
        rn = margulis.holonomy_rn_check(g, F, seed=0)["max_residual"]
        reg = margulis.regularity_diagnostic(F)["exponent"]
        print(f"{eps},{margulis.scaling_residual(g, F):.2e},{lin.max_deviation:.2e},{idem:.2e},{rn:.2e},{reg:.4f}")
    if args.csv and F is not None:
        with open(args.csv, "w") as fh:
            fh.write(F.to_csv(12))


if __name__ == "__main__":
    main()
