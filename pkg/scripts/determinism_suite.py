"""Run every subcommand once and print the result fields as canonical JSON.

The worker count comes from GALAB_THREADS, so comparing the output of

    GALAB_THREADS=1 python3 scripts/determinism_suite.py
    GALAB_THREADS=8 python3 scripts/determinism_suite.py

checks that results do not depend on the thread count.  Pass ``--seed`` to
change the seed used by the sampling commands.
"""
from __future__ import annotations

import argparse
import hashlib
import io
import json
import sys

from galab import cli

SUITE = [
    ["length", "--trace", "4.8284271247"],
    ["classify", "--matrix", "2,1,1,1"],
    ["commutator-limit", "--n-max", "30"],
    ["spectrum", "--maxlen", "5"],
    ["audit-lattice", "--maxlen", "5"],
    ["delta-sup", "--class", "0.1,0.2,0,-0.1", "--maxlen", "8"],
    ["delta-slice", "--half-grid", "6", "--extent", "3", "--maxlen", "6"],
    ["gamma-a-audit", "--class", "0.1,0,0,0", "--maxlen", "4"],
    ["period-shift", "--class", "0.1,0,0,0", "--word", "2.-1.-4.-1"],
    ["fixed-points", "--n", "6"],
    ["pressure", "--f-terms", "1:0:0.2:0"],
    ["entropy", "--roof-terms", "1:1:0.1:0"],
    ["srb-check"],
    ["livschitz", "--n-max", "8"],
    ["smoother"],
    ["delta-bar", "--a-scalar", "0.2"],
    ["solvable-audit", "--omega", "0.5", "--grid", "32"],
    ["mme-cdf", "--depth", "16"],
    ["linearize", "--depth", "16"],
    ["rn-check", "--depth", "16"],
    ["regularity", "--depth", "16"],
]


def run_suite(seed: int) -> dict:
    out = {}
    for argv in SUITE:
        argv = [*argv, "--seed", str(seed)]
        code, env = cli.run(argv, io.StringIO())
        out[argv[0]] = {"exit_code": code, "result": env.get("result")}
    return out


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--digest", action="store_true", help="print only a SHA-256 of the output")
    args = ap.parse_args()
    text = json.dumps(run_suite(args.seed), sort_keys=True)
    print(hashlib.sha256(text.encode()).hexdigest() if args.digest else text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
