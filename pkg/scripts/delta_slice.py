"""Write S_N on a 2-D slice of cohomology classes to CSV (s,t,S_N,status).

Example: python3 scripts/delta_slice.py --maxlen 8 --half-grid 20 --out slice.csv
"""
import argparse

from galab import cohomology as coh
from galab import lattice


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--maxlen", type=int, default=8)
    ap.add_argument("--half-grid", type=int, default=20)
    ap.add_argument("--extent", type=float, default=5.0)
    ap.add_argument("--dir1", default="1,0,0,0")
    ap.add_argument("--dir2", default="0,1,0,0")
    ap.add_argument("--out", default="delta_slice.csv")
    args = ap.parse_args()
    lat = lattice.octagon_lattice()
    sl = coh.delta_slice(
        lat, coh.CohClass((0.0,) * 4), coh.parse_class(args.dir1, 4), coh.parse_class(args.dir2, 4),
        args.half_grid, args.extent, args.maxlen,
    )
    with open(args.out, "w") as fh:
        fh.write(sl.to_csv())
    inside = sl.values < 1.0
    print(f"{inside.sum()} of {inside.size} grid points have S_{args.maxlen} < 1; "
          f"midpoint violations: {coh.midpoint_violations(inside)}; wrote {args.out}")


if __name__ == "__main__":
    main()
