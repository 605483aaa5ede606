"""Batch command line front end.

Every run prints (or writes) a JSON envelope

    {command, params, seed, versions, result, diagnostics, wallclock_ms}

and writes CSV payloads to a separate file.  Exit codes: 0 success, 2 invalid
input, 3 non-convergence or exhausted budget (the result is still emitted),
4 internal failure.  Options can also come from a ``key=value`` config file;
command line flags win.  Worker threads are read from ``GALAB_THREADS``.
"""
from __future__ import annotations

import argparse
import json
import math
import platform
import sys
import time
from importlib import resources
from pathlib import Path
from typing import Callable

import jsonschema
import numpy as np

from . import __version__, cohomology, cover, lattice, margulis
from .errors import (
    DegenerateCommutatorError,
    GalabError,
    HypothesisViolatedError,
    InvalidInputError,
    NonConvergenceError,
    ResourceLimitError,
)
from .symbolic_flow import bookkeeping, livschitz, pressure, toral, trig

EXIT_OK, EXIT_INPUT, EXIT_CONVERGENCE, EXIT_INTERNAL = 0, 2, 3, 4

# commands whose output depends on random sampling
SAMPLING = {"commutator-limit", "gamma-a-audit", "smoother", "rn-check", "mme-cdf"}


class Outcome:
    """What a command handler hands back to the envelope writer."""

    def __init__(self, result, diagnostics=None, csv: str | None = None, flagged: bool = False, convention: str | None = None):
        self.result = result
        self.diagnostics = diagnostics or {}
        self.csv = csv
        self.flagged = flagged
        self.convention = convention


# --- argument parsing helpers --------------------------------------------------------


def _floats(text: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(x) for x in str(text).split(",")]
    except ValueError as exc:
        raise InvalidInputError(f"expected comma-separated numbers, got {text!r}") from exc
    if n is not None and len(vals) != n:
        raise InvalidInputError(f"expected {n} numbers, got {len(vals)}")
    return vals


def _range(text: str) -> tuple[int, ...]:
    lo, _, hi = str(text).partition(":")
    try:
        return tuple(range(int(lo), int(hi) + 1))
    except ValueError as exc:
        raise InvalidInputError(f"expected lo:hi, got {text!r}") from exc


def _terms(text: str | None) -> tuple:
    """``k1:k2:a:b;...`` into trig terms ``((k1, k2), a, b)``."""
    if not text:
        return ()
    out = []
    for part in str(text).split(";"):
        bits = part.split(":")
        if len(bits) != 4:
            raise InvalidInputError(f"trig term {part!r} must be k1:k2:cos:sin")
        try:
            out.append(((int(bits[0]), int(bits[1])), float(bits[2]), float(bits[3])))
        except ValueError as exc:
            raise InvalidInputError(f"bad trig term {part!r}") from exc
    return tuple(out)


def _element(text: str) -> cover.CoverElement:
    return cover.element(_floats(text, 4))


def _flow(args) -> trig.SuspensionFlow:
    return trig.SuspensionFlow(toral.toral(args.A), trig.roof(args.roof_const, _terms(args.roof_terms)))


# --- command handlers ------------------------------------------------------------------------


def cmd_length(args) -> Outcome:
    if args.trace is None and args.matrix is None:
        raise InvalidInputError("give --trace or --matrix")
    if args.matrix is not None:
        g = _element(args.matrix)
        return Outcome({"length": cover.translation_length(g), "trace": g.m[0] + g.m[3]})
    return Outcome({"length": float(cover.length_from_trace(args.trace)), "trace": args.trace})


def cmd_classify(args) -> Outcome:
    g = cover.element(_floats(args.matrix, 4), args.k)
    kind = cover.classify(g)
    return Outcome({"class": kind.value, "length": cover.translation_length(g), "trace": g.m[0] + g.m[3], "winding": g.k})


def cmd_commutator_limit(args) -> Outcome:
    if args.p and args.q:
        p, q = _element(args.p), _element(args.q)
    else:
        rng = np.random.default_rng(args.seed)
        p = cover.random_element(rng, hyperbolic=True)
        q = cover.random_element(rng)
    seq = cover.commutator_length_sequence(p, q, args.n_max)
    L = cover.translation_length(p)
    return Outcome(
        {"L_P": L, "sequence": [[n, r] for n, r in seq], "final_error": abs(seq[-1][1] - L)},
        {"P": list(p.m), "Q": list(q.m), "bound_5_over_n": all(abs(r - L) <= 5 / n for n, r in seq)},
    )


def _lattice(args):
    return lattice.octagon_lattice()


def cmd_spectrum(args) -> Outcome:
    lat = _lattice(args)
    classes = lattice.length_spectrum(lat, args.maxlen, args.max_words)
    tab = lattice.class_table(lat, args.maxlen, args.max_words)
    res = {
        "maxlen": args.maxlen,
        "hyperbolic_classes": len(classes),
        "shortest": classes[0].length if classes else None,
        "shortest_word": lattice.word_str(classes[0].rep) if classes else None,
    }
    return Outcome(res, dict(tab.stats), csv=lattice.spectrum_csv(classes), convention=lat.convention)


def cmd_audit_lattice(args) -> Outcome:
    lat = _lattice(args)
    rep = lattice.audit_lattice(lat, args.maxlen)
    checks = lattice.check_lattice(lat)
    return Outcome({**rep.as_dict(), "checks": checks}, flagged=not rep.passed, convention=lat.convention)


def cmd_delta_sup(args) -> Outcome:
    lat = _lattice(args)
    a = cohomology.parse_class(args.class_vector, lat.rank)
    est = cohomology.delta_sup(lat, a, args.maxlen)
    status = cohomology.classify_sup(est.sup_value, args.margin)
    return Outcome({**est.as_dict(), "status": status.value, "margin": args.margin}, convention=lat.convention)


def cmd_delta_slice(args) -> Outcome:
    lat = _lattice(args)
    r = lat.rank
    sl = cohomology.delta_slice(
        lat,
        cohomology.parse_class(args.origin, r),
        cohomology.parse_class(args.dir1, r),
        cohomology.parse_class(args.dir2, r),
        args.slice_grid,
        args.extent,
        args.maxlen,
        args.margin,
    )
    inside = sl.values < 1.0
    res = {
        "points": int(sl.values.size),
        "inside": int(inside.sum()),
        "max": float(sl.values.max()),
        "midpoint_violations": cohomology.midpoint_violations(inside),
    }
    return Outcome(res, csv=sl.to_csv(), convention=lat.convention)


def cmd_gamma_a_audit(args) -> Outcome:
    lat = _lattice(args)
    a = cohomology.parse_class(args.class_vector, lat.rank)
    rep = cohomology.gamma_a_audit(lat, a, args.maxlen, args.samples, args.seed)
    return Outcome(rep, convention=lat.convention)


def cmd_period_shift(args) -> Outcome:
    lat = _lattice(args)
    a = cohomology.parse_class(args.class_vector, lat.rank)
    w = lattice.parse_word(args.word)
    cls = cohomology.class_of_word(lat, w)
    tau_a = cohomology.period_shift(lat, a, cls)
    return Outcome({"word": args.word, "length": cls.length, "a_gamma": cohomology.evaluate(a, w), "tau_a": tau_a}, convention=lat.convention)


def cmd_fixed_points(args) -> Outcome:
    auto = toral.toral(args.A)
    count = toral.fix_count(auto, args.n)
    if count > args.max_orbits:
        raise ResourceLimitError(f"{count} periodic points exceed max_orbits={args.max_orbits}")
    fp = toral.fixed_points(auto, args.n)
    P = toral.mat_pow(auto.matrix, args.n)
    res = {
        "n": args.n,
        "count": len(fp),
        "trace_An": P[0][0] + P[1][1],
        "abs_trace_minus_2": count,
        "points": [[str(x), str(y)] for x, y in fp.fractions()[: args.list_limit]],
    }
    csv = None
    if args.orbits:
        flow = trig.SuspensionFlow(auto, trig.roof(args.roof_const, _terms(args.roof_terms)))
        csv = toral.orbits_csv(bookkeeping.orbit_rows(flow, args.n))
    return Outcome(res, csv=csv)


def cmd_pressure(args) -> Outcome:
    f = trig.TrigPoly(args.f_const, _terms(args.f_terms))
    r = pressure.pressure_base(args.A, f, _range(args.n_range))
    d = r.as_dict()
    return Outcome({"pressure": d["value"], "converged": r.converged}, d["diagnostics"], flagged=not r.converged)


def cmd_entropy(args) -> Outcome:
    r = pressure.entropy_suspension(_flow(args), _range(args.n_range))
    d = r.as_dict()
    return Outcome({"entropy": d["value"]}, d["diagnostics"])


def cmd_srb_check(args) -> Outcome:
    rep = pressure.srb_identity_check(args.A, args.n, n_range=_range(args.n_range))
    ok = rep["weighted_sum_ok"] and rep["pressure_unstable_ok"] and rep["constant_roof_ok"]
    return Outcome(rep, flagged=not ok)


def cmd_livschitz(args) -> Outcome:
    auto = toral.toral(args.A)
    b0 = trig.TrigPoly(0.0, _terms(args.beta0))
    f = trig.coboundary(b0, auto) + args.perturb
    r = livschitz.livschitz_solve(auto, f, args.n_max, planted=b0)
    return Outcome(r.as_dict())


def cmd_smoother(args) -> Outcome:
    flow = _flow(args)
    b0 = trig.TrigPoly(0.0, _terms(args.beta0))
    coc = livschitz.planted_rate(flow, args.rate, b0)
    lp = args.lambda_prime if args.lambda_prime is not None else 0.9 * args.rate
    r = livschitz.averaging_smoother(coc, lp, args.T, args.grid, args.samples, seed=args.seed)
    d = r.as_dict()
    ok = d["inequality_holds"] and d["identity_residual"] <= 1e-4
    return Outcome(d, flagged=not ok)


def cmd_delta_bar(args) -> Outcome:
    rep = bookkeeping.delta_bar_chain(_flow(args), args.a_scalar, n_range=_range(args.n_range))
    table = rep.pop("orbits")
    return Outcome(rep, {"orbit_table": table[: args.list_limit]})


def cmd_solvable_audit(args) -> Outcome:
    lo, hi = _floats(args.lambda_range, 2)
    rep = bookkeeping.solvable_volume_audit(_flow(args), args.omega, (lo, hi), grid=min(args.grid, 128))
    curves = {"lambda_grid": rep.pop("lambda_grid"), "volume": rep.pop("volume")}
    return Outcome(rep, curves)


def _cdf(args) -> tuple[margulis.ExpandingMap, margulis.LeafMeasureCDF]:
    g = margulis.ExpandingMap(args.degree, args.eps)
    return g, margulis.mme_cdf(g, args.depth)


def cmd_mme_cdf(args) -> Outcome:
    g, F = _cdf(args)
    res = {
        "depth": args.depth,
        "knots": F.resolution,
        "scaling_residual": margulis.scaling_residual(g, F, 100, args.seed),
        "F_half": float(F(0.5)),
    }
    csv = F.to_csv(min(args.csv_res, int(round(math.log2(F.resolution)))))
    return Outcome(res, csv=csv, flagged=res["scaling_residual"] > 1e-4)


def cmd_linearize(args) -> Outcome:
    g, F = _cdf(args)
    lin = margulis.linearize(g, F, args.res)
    F2 = margulis.mme_cdf(lin.hat, args.depth)
    y = np.linspace(0.0, 1.0, 4097)
    res = {**lin.as_dict(), "idempotence": float(np.abs(F2(y) - y).max())}
    return Outcome(res)


def cmd_rn_check(args) -> Outcome:
    g, F = _cdf(args)
    rep = margulis.holonomy_rn_check(g, F, args.roof_const, args.samples, args.seed)
    return Outcome(rep, flagged=not rep["passed"])


def cmd_regularity(args) -> Outcome:
    _, F = _cdf(args)
    rep = margulis.regularity_diagnostic(F)
    return Outcome({"exponent": rep["exponent"]}, {"h": rep["h"], "modulus": rep["modulus"], "grid": rep["grid"]})


# --- parser ------------------------------------------------------------------------------------

COMMANDS: dict[str, tuple[Callable, str]] = {}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value file; command line flags override it")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", help="write the JSON envelope here instead of stdout")
    p.add_argument("--csv", help="write the CSV payload here")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--max-words", type=int, default=lattice.DEFAULT_MAX_NODES)
    p.add_argument("--max-orbits", type=int, default=5_000_000)
    p.add_argument("--grid", type=int, default=128)
    p.add_argument("--time-limit", type=float, default=3600.0)
    p.add_argument("--list-limit", type=int, default=50)


def _toral_args(p, roof=True) -> None:
    p.add_argument("--A", default="2,1,1,1", help="toral automorphism a,b,c,d")
    p.add_argument("--n-range", default="4:12")
    if roof:
        p.add_argument("--roof-const", type=float, default=1.0)
        p.add_argument("--roof-terms", default="", help="k1:k2:cos:sin;...")


def _map_args(p) -> None:
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--eps", type=float, default=0.3)
    p.add_argument("--depth", type=int, default=20)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="galab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"galab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        _common(p)
        p.set_defaults(handler=fn)
        return p

    p = add("length", cmd_length, "translation length from a trace or matrix")
    p.add_argument("--trace", type=float)
    p.add_argument("--matrix")
    p = add("classify", cmd_classify, "classify a cover element")
    p.add_argument("--matrix", required=True)
    p.add_argument("--k", type=int, default=0)
    p = add("commutator-limit", cmd_commutator_limit, "L([P^n, Q]) / 2n against L(P)")
    p.add_argument("--p")
    p.add_argument("--q")
    p.add_argument("--n-max", type=int, default=40)
    for name, fn, h in (("spectrum", cmd_spectrum, "length spectrum of the octagon lattice"),
                        ("audit-lattice", cmd_audit_lattice, "lattice invariants audit")):
        p = add(name, fn, h)
        p.add_argument("--maxlen", type=int, default=6)
    p = add("delta-sup", cmd_delta_sup, "truncated Delta sup of a class")
    p.add_argument("--class", dest="class_vector", required=True)
    p.add_argument("--maxlen", type=int, default=8)
    p.add_argument("--margin", type=float, default=0.1)
    p = add("delta-slice", cmd_delta_slice, "S_N on a 2-D slice of classes")
    p.add_argument("--origin", default="0,0,0,0")
    p.add_argument("--dir1", default="1,0,0,0")
    p.add_argument("--dir2", default="0,1,0,0")
    p.add_argument("--half-grid", dest="slice_grid", type=int, default=20)
    p.add_argument("--extent", type=float, default=4.0)
    p.add_argument("--maxlen", type=int, default=8)
    p.add_argument("--margin", type=float, default=0.1)
    p = add("gamma-a-audit", cmd_gamma_a_audit, "freeness and properness evidence for the deformed action")
    p.add_argument("--class", dest="class_vector", required=True)
    p.add_argument("--maxlen", type=int, default=6)
    p.add_argument("--samples", type=int, default=16)
    p = add("period-shift", cmd_period_shift, "deformed period L + a(gamma)")
    p.add_argument("--class", dest="class_vector", required=True)
    p.add_argument("--word", required=True)
    p = add("fixed-points", cmd_fixed_points, "periodic points of a toral automorphism")
    p.add_argument("--A", default="2,1,1,1")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--orbits", action="store_true", help="emit the orbit CSV up to period n")
    p.add_argument("--roof-const", type=float, default=1.0)
    p.add_argument("--roof-terms", default="")
    p = add("pressure", cmd_pressure, "periodic-orbit pressure")
    _toral_args(p, roof=False)
    p.add_argument("--f-const", type=float, default=0.0)
    p.add_argument("--f-terms", default="")
    p = add("entropy", cmd_entropy, "Bowen-root entropy of a suspension")
    _toral_args(p)
    p = add("srb-check", cmd_srb_check, "unstable Jacobian identities")
    _toral_args(p, roof=False)
    p.add_argument("--n", type=int, default=12)
    p = add("livschitz", cmd_livschitz, "coboundary recovery from periodic data")
    p.add_argument("--A", default="2,1,1,1")
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--beta0", default="1:0:1:0")
    p.add_argument("--perturb", type=float, default=0.0)
    p = add("smoother", cmd_smoother, "averaging smoother for a rate-bounded cocycle")
    _toral_args(p)
    p.add_argument("--rate", type=float, default=0.7)
    p.add_argument("--beta0", default="0:1:0.1:0")
    p.add_argument("--lambda-prime", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--samples", type=int, default=1000)
    p = add("delta-bar", cmd_delta_bar, "entropy shift bookkeeping")
    _toral_args(p)
    p.add_argument("--a-scalar", type=float, default=0.0)
    p = add("solvable-audit", cmd_solvable_audit, "Jacobian rate and volume audit")
    _toral_args(p)
    p.add_argument("--omega", type=float, default=0.5)
    p.add_argument("--lambda-range", default="-1,1")
    p = add("mme-cdf", cmd_mme_cdf, "CDF of the measure of maximal entropy")
    _map_args(p)
    p.add_argument("--csv-res", type=int, default=12)
    p = add("linearize", cmd_linearize, "conjugate to constant expansion")
    _map_args(p)
    p.add_argument("--res", type=int)
    p = add("rn-check", cmd_rn_check, "holonomy Radon-Nikodym derivative")
    _map_args(p)
    p.add_argument("--roof-const", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=100)
    p = add("regularity", cmd_regularity, "Holder exponent of the CDF")
    _map_args(p)
    return parser


_META = {"config", "out", "csv", "format", "handler", "command"}
_BUDGETS = ("max_words", "max_orbits", "grid", "time_limit")


def read_config(path: str) -> dict[str, str]:
    out = {}
    for i, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise InvalidInputError(f"{path}:{i}: expected key=value")
        out[key.strip().replace("-", "_")] = val.strip()
    return out


def parse(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        sub = parser._subparsers._group_actions[0].choices[args.command]  # noqa: SLF001
        actions = {a.dest: a for a in sub._actions}  # noqa: SLF001
        cfg = read_config(args.config)
        unknown = sorted(set(cfg) - set(actions) - {"command"})
        if unknown:
            raise InvalidInputError(f"unknown config keys: {', '.join(unknown)}")
        explicit = {a.dest for a in sub._actions for s in a.option_strings if s in argv}  # noqa: SLF001
        for key, raw in cfg.items():
            if key in explicit or key == "command":
                continue
            act = actions[key]
            if act.nargs == 0:
                val = raw.lower() in ("1", "true", "yes", "on")
            else:
                try:
                    val = act.type(raw) if act.type else raw
                except (TypeError, ValueError) as exc:
                    raise InvalidInputError(f"bad value for {key}: {raw!r}") from exc
            setattr(args, key, val)
    for b in _BUDGETS:
        if getattr(args, b) <= 0:
            raise InvalidInputError(f"budget {b} must be positive")
    if args.command in SAMPLING and args.seed is None and not (args.command == "commutator-limit" and args.p and args.q):
        raise InvalidInputError(f"--seed is required for {args.command}")
    return args


# --- envelope ------------------------------------------------------------------------------------


def jsonable(x):
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (int, str)) or x is None:
        return x
    return str(x)


def load_schema() -> dict:
    return json.loads(resources.files("galab").joinpath("schema/envelope.schema.json").read_text())


def schema_errors(env: dict) -> list[str]:
    """Messages for every way ``env`` departs from the shipped schema."""
    validator = jsonschema.Draft202012Validator(load_schema())
    return sorted(e.message for e in validator.iter_errors(env))


def versions(convention: str | None = None) -> dict:
    v = {"galab": __version__, "numpy": np.__version__, "python": platform.python_version()}
    if convention:
        v["lattice_convention"] = convention
    return v


def run(argv: list[str] | None = None, stdout=None) -> tuple[int, dict]:
    """Execute one command; returns (exit code, envelope)."""
    stdout = stdout or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    t0 = time.perf_counter()
    command = next((a for a in argv if not a.startswith("-")), None)
    args = None
    params: dict = {}
    code = EXIT_OK
    outcome = Outcome(None)
    error = None
    try:
        try:
            args = parse(argv)
        except SystemExit as exc:  # argparse already printed its usage error
            return (EXIT_OK if exc.code == 0 else EXIT_INPUT), {}
        command = args.command
        params = {k: v for k, v in vars(args).items() if k not in _META}
        outcome = args.handler(args)
        if outcome.flagged:
            code = EXIT_CONVERGENCE
    except (InvalidInputError, HypothesisViolatedError, DegenerateCommutatorError) as exc:
        code, error = EXIT_INPUT, exc
    except (NonConvergenceError, ResourceLimitError) as exc:
        code, error = EXIT_CONVERGENCE, exc
    except (GalabError, AssertionError, ArithmeticError, ValueError) as exc:
        code, error = EXIT_INTERNAL, exc
    wall = (time.perf_counter() - t0) * 1000.0
    diagnostics = dict(outcome.diagnostics)
    if error is not None:
        diagnostics["error"] = {"type": type(error).__name__, "message": str(error)}
    if params.get("time_limit") and wall > 1000.0 * params["time_limit"]:
        diagnostics["time_limit_exceeded"] = True
        code = max(code, EXIT_CONVERGENCE)
    diagnostics["flagged"] = bool(outcome.flagged)
    env = jsonable({
        "command": command,
        "params": params,
        "seed": params.get("seed"),
        "versions": versions(outcome.convention),
        "result": outcome.result,
        "diagnostics": diagnostics,
        "wallclock_ms": wall,
        "exit_code": code,
    })
    problems = schema_errors(env)
    if problems:
        env["exit_code"] = EXIT_INTERNAL
        env["diagnostics"]["schema_errors"] = problems
        code = EXIT_INTERNAL
    text = json.dumps(env, indent=2, sort_keys=True) + "\n"
    fmt = getattr(args, "format", "json")
    csv_target = getattr(args, "csv", None)
    csv_to_stdout = outcome.csv is not None and fmt == "csv" and not csv_target
    if outcome.csv is not None:
        if csv_target:
            Path(csv_target).write_text(outcome.csv)
        elif csv_to_stdout:
            stdout.write(outcome.csv)
    out_path = getattr(args, "out", None)
    if out_path:
        Path(out_path).write_text(text)
    elif csv_to_stdout:
        sys.stderr.write(text)
    else:
        stdout.write(text)
    return code, env


def main(argv: list[str] | None = None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
