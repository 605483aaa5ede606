"""Suspension entropy as a function of a roof shift, with the derived delta.

For roof 1 + 0.2 cos(2 pi x1) + a, prints h(a), delta = 1 - 1/h and the
rescaling check h(c r) c = h(r), as CSV on stdout.
"""
import argparse

import numpy as np

from galab.symbolic_flow import pressure, toral, trig


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--A", default="2,1,1,1")
    ap.add_argument("--amp", type=float, default=0.2)
    ap.add_argument("--shifts", default="-0.5:1.5:9")
    args = ap.parse_args()
    auto = toral.toral(args.A)
    lo, hi, n = args.shifts.split(":")
    print("a,entropy,delta,rescale_error")
    for a in np.linspace(float(lo), float(hi), int(n)):
        r = trig.roof(1.0 + a, (((1, 0), args.amp, 0.0),))
        h = pressure.entropy_suspension(trig.SuspensionFlow(auto, r)).value
        h2 = pressure.entropy_suspension(trig.SuspensionFlow(auto, r.scale(2.0))).value
        print(f"{a:.4f},{h:.10f},{1 - 1 / h:.10f},{abs(2 * h2 - h):.2e}")


if __name__ == "__main__":
    main()
