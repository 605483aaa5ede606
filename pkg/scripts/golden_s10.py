"""Recompute the word-length-10 supremum for the class e_1 (about a minute).

This is the run that produced the golden value frozen in the tests.
"""
import time

from galab import cohomology as coh
from galab import lattice


def main():
    lat = lattice.octagon_lattice()
    t0 = time.perf_counter()
    est = coh.delta_sup(lat, coh.basis(1), 10)
    print(est.to_json())
    print(f"{time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
