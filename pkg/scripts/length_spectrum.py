"""Length spectrum of the octagon lattice.

Writes the spectrum CSV and prints, for a few cutoffs x, the number of
enumerated classes and of distinct lengths with L <= x.  Classes are
necklaces merged when they give the same group element; necklaces that are
conjugate only through the relator stay separate, so the class column
over-counts conjugacy classes of the group.
"""
import argparse
import numpy as np

from galab import lattice


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--maxlen", type=int, default=6)
    ap.add_argument("--out", default="spectrum.csv")
    args = ap.parse_args()
    lat = lattice.octagon_lattice()
    spec = lattice.length_spectrum(lat, args.maxlen)
    with open(args.out, "w") as fh:
        fh.write(lattice.spectrum_csv(spec))
    tab = lattice.class_table(lat, args.maxlen)
    print(f"word length <= {args.maxlen}: {tab.stats}")
    lengths = np.array([c.length for c in spec])
    print(f"shortest class L = {lengths[0]:.10f} ({lattice.word_str(spec[0].rep)})")
    distinct = np.unique(np.round(lengths, 9))
    for x in np.arange(3.5, 7.6, 0.5):
        print(f"  L <= {x:.1f}: {int((lengths <= x).sum()):6d} classes, {int((distinct <= x).sum()):4d} distinct lengths")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
