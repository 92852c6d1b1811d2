"""``bihv`` command line: identity checks, elimination, the P_k chain and simulation.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage/parse/schema error,
3 blow-up or size guard.  Reports are JSON with sorted keys and no timings, so
identical inputs give byte-identical files; elapsed time goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3
DEFAULT_OUT = "out"
CHAIN_KMAX_BOUND = 8
CHAIN_MAX_TERMS = 500_000


class UsageError(Exception):
    """Bad input detected after argument parsing; maps to exit code 2."""


class GuardError(Exception):
    """Blow-up or size guard; maps to exit code 3."""


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _pos_int(text: str) -> int:
    v = _nonneg_int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _float_list(text: str) -> list[float]:
    out = []
    for item in text.split(","):
        item = item.strip().lower()
        try:
            out.append(math.inf if item in ("inf", "+inf") else -math.inf if item == "-inf" else float(item))
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number list: {text!r}")
    return out


def _out_dir(args, command: str, label: str) -> Path:
    path = Path(args.out) / command / (args.label or label)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_report(directory: Path, report: dict) -> Path:
    path = directory / "report.json"
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _fmt(x: float) -> str:
    return f"{x:.3e}"


# -- check --------------------------------------------------------------------

def cmd_check(args) -> int:
    from .catalog.registry import Corpus, UnknownIdentityError, check_identity, identity_names

    corpus = Corpus(Path(args.corpus) if args.corpus else None)
    known = identity_names(corpus)
    if args.all:
        names = known
    elif args.names:
        names = args.names
    else:
        raise UsageError("name at least one identity or pass --all")
    unknown = [n for n in names if n not in known]
    if unknown:
        raise UsageError(f"unknown identity: {', '.join(unknown)}")
    verdicts = []
    for name in names:
        try:
            v = check_identity(name, corpus)
        except UnknownIdentityError as exc:
            raise UsageError(str(exc))
        print(v.summary())
        verdicts.append(v)
    passed = sum(v.passed for v in verdicts)
    print(f"{passed}/{len(verdicts)} identities pass")
    out = _out_dir(args, "check", "all" if args.all else "-".join(names))
    report = {"command": "check", "parameters": {"names": names},
              "verdicts": [v.to_json() for v in verdicts],
              "passed": passed == len(verdicts)}
    report["artifacts"] = ["report.json"]
    _write_report(out, report)
    return EXIT_OK if report["passed"] else EXIT_FAIL


# -- eliminate ------------------------------------------------------------------

def _read_poly(path: str, ring):
    from .catalog.parser import ParseError, parse_expr

    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    try:
        return parse_expr(text, ring)
    except ParseError as exc:
        raise UsageError(f"{path}:{exc}")


def cmd_eliminate(args) -> int:
    from .catalog.registry import Corpus
    from .elimination import EliminationError, eliminate_tau
    from .poly import to_text
    from .rings import lambda_ring

    ring = lambda_ring()
    corpus = Corpus(Path(args.corpus) if args.corpus else None)
    factors = []
    if args.builtin:
        hi_name, lo_name = args.builtin
        for n in (hi_name, lo_name):
            if n not in corpus:
                raise UsageError(f"unknown builtin polynomial {n!r}")
        f_hi, f_lo = corpus.expected(hi_name, ring), corpus.expected(lo_name, ring)
        label = f"{hi_name}-{lo_name}"
        if (hi_name, lo_name) == ("taup4", "taup3"):
            factors = [(n, corpus.expected(n, ring)) for n in ("taup0-a", "taup0-b", "taup0-c")]
    elif len(args.files) == 2:
        f_hi, f_lo = (_read_poly(p, ring) for p in args.files)
        label = "-".join(Path(p).stem for p in args.files)
    else:
        raise UsageError("give two polynomial files or --builtin HI LO")
    for path in args.factor or ():
        factors.append((Path(path).stem, _read_poly(path, ring)))
    if args.var not in ring.table:
        raise UsageError(f"unknown variable {args.var!r}")
    try:
        report = eliminate_tau(f_lo, f_hi, args.var, factors)
    except EliminationError as exc:
        raise UsageError(f"elimination: {exc}")

    out = _out_dir(args, "eliminate", label)
    artifacts = []
    for step_label, step in zip(("f2", "f1", "f0"), report.steps):
        path = out / f"{step_label}.poly"
        path.write_text(to_text(step.remainder) + "\n", encoding="utf-8")
        artifacts.append(path.name)
    for (step_label, deg), step in zip(report.degrees().items(), report.steps):
        print(f"{step_label}: deg_{args.var} = {deg}, {len(step.remainder)} terms, "
              f"content {step.extracted}")
    if report.stopped_early:
        zero = [lab for lab, s in zip(("f2", "f1", "f0"), report.steps) if s.remainder.is_zero()]
        print(f"{zero[0] if zero else 'sequence'} = 0; elimination stopped" if zero
              else "remainder sequence ended before f0")
    for c in report.factor_checks:
        print(f"factor {c.name}: {'divides' if c.divides else 'does NOT divide'} f0")
    if report.account is not None:
        acc = report.account
        print(f"cofactor constant {acc.constant}; pieces: "
              + ", ".join(f"({to_text(p)})^{e}" for p, e, _ in acc.pieces)
              + ("" if acc.complete else f"; unaccounted {len(acc.leftover)} terms"))
    doc = {"command": "eliminate",
           "parameters": {"inputs": list(args.builtin or args.files), "var": args.var,
                          "factors": [n for n, _ in factors]},
           "elimination": report.to_json(), "artifacts": artifacts + ["report.json"]}
    ok = all(c.divides for c in report.factor_checks)
    if factors:
        ok = ok and report.account is not None and report.account.complete
    doc["passed"] = ok
    _write_report(out, doc)
    return EXIT_OK if ok else EXIT_FAIL


# -- chain ----------------------------------------------------------------------

def cmd_chain(args) -> int:
    from .catalog.registry import Corpus
    from .derivation import SizeGuardError, pk_chain
    from .poly import proportionality, to_text
    from .rings import full_ring

    if args.kmax > CHAIN_KMAX_BOUND:
        raise UsageError(f"kmax {args.kmax} exceeds the bound {CHAIN_KMAX_BOUND}")
    try:
        chain = pk_chain(args.n1, args.kmax, args.k, max_terms=args.max_terms)
    except SizeGuardError as exc:
        raise GuardError(str(exc))
    label = f"n1-{args.n1}-kmax-{args.kmax}" + (f"-K-{args.k}".replace("/", "_") if args.k is not None else "")
    out = _out_dir(args, "chain", label)
    artifacts = []
    print(f"{'k':>3} {'degree':>7} {'terms':>8}")
    for k, (p, d, n) in enumerate(zip(chain.polys, chain.degrees, chain.term_counts)):
        path = out / f"P{k}.poly"
        path.write_text(to_text(p) + "\n", encoding="utf-8")
        artifacts.append(path.name)
        print(f"{k:>3} {d:>7} {n:>8}")

    corpus = Corpus(Path(args.corpus) if args.corpus else None)
    from .poly import substitute
    expected = corpus.expected("P0", full_ring(args.n1))
    if args.k is not None:
        expected = substitute(expected, {"K": args.k})
    ratio = proportionality(chain.polys[0], expected)
    ok = ratio is not None
    print(f"P0 vs corpus: {'proportional, ratio ' + str(ratio) if ok else 'NOT proportional'}")
    doc = {"command": "chain",
           "parameters": {"n1": args.n1, "kmax": args.kmax, "K": None if args.k is None else str(args.k)},
           "degrees": chain.degrees, "term_counts": chain.term_counts,
           "p0_matches_corpus": ok, "p0_ratio": None if ratio is None else str(ratio),
           "artifacts": artifacts + ["report.json"], "passed": ok}
    _write_report(out, doc)
    return EXIT_OK if ok else EXIT_FAIL


# -- simulate -------------------------------------------------------------------

def _setup_from_flags(args):
    """(spec, init, t_span, family) from command-line flags."""
    import numpy as np

    from . import odesim

    if args.n1 is None:
        raise UsageError("--n1 is required without --init")
    K = args.k if args.k is not None else Fraction(0)
    spec = odesim.SystemSpec(args.n1, K)
    t0 = args.t0 if args.t0 is not None else 0.0
    t1 = args.t1 if args.t1 is not None else t0 + 1.0
    family = None
    if args.const:
        sols = odesim.constant_solutions(args.n1, K)
        if not sols:
            raise UsageError(f"no constant solution with tau != 0 for n1={args.n1}, K={K}")
        init = sols[0].floats()
    elif args.family:
        fam_K = {"k0": 0, "km1": -1, "k1": 1, "random": None}[args.family]
        if fam_K is not None and Fraction(fam_K) != K:
            raise UsageError(f"--family {args.family} needs --k {fam_K}")
        try:
            if args.family == "random":
                if K not in (0, -1, 1):
                    raise UsageError("--family random needs --k in {0, -1, 1}")
                rng = np.random.default_rng(args.seed)
                family = odesim.random_family(int(K), args.n1, rng, (t0, t1))
            else:
                if args.a is None or args.c is None:
                    raise UsageError("--a and --c are required with --family")
                family = odesim.ClosedFormFamily(int(K), tuple(args.a), tuple(args.c))
        except odesim.ConstraintError as exc:
            raise UsageError(str(exc))
        if family.n1 != args.n1:
            raise UsageError(f"--a/--c have {family.n1} entries, --n1 is {args.n1}")
        init = odesim.family_state(family, t0)
    else:
        raise UsageError("choose one of --const, --family or --init")
    return spec, init, (t0, t1), family


def _setup_from_json(args):
    import jsonschema
    import numpy as np

    from . import odesim

    try:
        doc = odesim.load_init(args.init)
    except FileNotFoundError:
        raise UsageError(f"init file not found: {args.init}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.init}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}")
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise UsageError(f"{args.init}: schema violation at {where}: {exc.message}")
    spec = odesim.SystemSpec(doc["n1"], odesim.parse_rational(doc.get("K", 0)), doc.get("mode", "full"))
    t_span = (float(doc.get("t0", 0.0)), float(doc["t1"]))
    family = None
    if "family" in doc:
        c = [math.inf if v == "inf" else -math.inf if v == "-inf" else float(v) for v in doc["family"]["c"]]
        try:
            family = odesim.ClosedFormFamily(int(spec.K), tuple(doc["family"]["a"]), tuple(c))
        except (odesim.ConstraintError, ValueError) as exc:
            raise UsageError(str(exc))
        if spec.mode != "full" or family.n1 != spec.n1:
            raise UsageError("family initial data needs full mode and n1 entries")
        init = odesim.family_state(family, t_span[0])
    elif "lm" in doc:
        if spec.mode != "full" or len(doc["lm"]) != spec.n1 or len(doc["mu"]) != spec.n1:
            raise UsageError("lm/mu need full mode and n1 entries each")
        init = np.array(doc["lm"] + doc["mu"], dtype=float)
    else:
        init = np.array(doc["state"], dtype=float)
        if init.shape != (spec.dim,):
            raise UsageError(f"state needs {spec.dim} entries, got {len(init)}")
    if "tol" in doc:
        args.tol = float(doc["tol"])
    if "kmax" in doc:
        args.kmax = doc["kmax"]
    if doc.get("label"):
        args.label = args.label or doc["label"]
    return spec, init, t_span, family


def cmd_simulate(args) -> int:
    import numpy as np

    from . import odesim

    spec, init, t_span, family = _setup_from_json(args) if args.init else _setup_from_flags(args)
    if args.kmax > CHAIN_KMAX_BOUND:
        raise UsageError(f"kmax {args.kmax} exceeds the bound {CHAIN_KMAX_BOUND}")
    if not args.tol > 0:
        raise UsageError("--tol must be positive")
    int_tol = min(args.tol * 1e-2, 1e-8)
    try:
        traj = odesim.integrate(spec, init, t_span, int_tol)
    except odesim.NonFiniteStateError as exc:
        raise GuardError(str(exc))
    except (odesim.SimulationError, ValueError) as exc:
        raise UsageError(str(exc))

    label = args.label or (f"const-n1-{spec.n1}-K-{spec.K}" if args.const else
                           f"{args.family or 'init'}-n1-{spec.n1}-K-{spec.K}").replace("/", "_")
    out = _out_dir(args, "simulate", label)
    summary: dict = {}
    if spec.mode == "full":
        res = odesim.residuals(traj, args.kmax)
        for name, series in res.items():
            finite = series[np.isfinite(series)]
            summary[name] = float(np.max(np.abs(finite))) if finite.size else 0.0
    if family is not None and not traj.blowup:
        exact = np.array([odesim.family_state(family, t) for t in traj.times])
        summary["closed_form"] = float(np.max(np.abs(exact - traj.states)))
    csv_path = out / "trajectory.csv"
    odesim.write_csv(traj, csv_path)

    for name in sorted(summary):
        print(f"max |{name}| = {_fmt(summary[name])}")
    print(f"{len(traj.times)} grid points, h = {traj.h:.3e}, endpoint change {_fmt(traj.error_estimate)}")
    passed = not traj.blowup and all(v < args.tol for v in summary.values())
    doc = {"command": "simulate",
           "parameters": {"n1": spec.n1, "K": str(spec.K), "mode": spec.mode,
                          "t_span": list(t_span), "tol": args.tol, "kmax": args.kmax,
                          "seed": args.seed, "init": [float(x) for x in init]},
           "steps": len(traj.times) - 1, "h": traj.h, "blowup": traj.blowup,
           "residual_max": summary, "passed": passed,
           "artifacts": [csv_path.name, "report.json"]}
    _write_report(out, doc)
    if traj.blowup:
        print(f"blow-up: state norm exceeded {odesim.BLOWUP_NORM:.0e} at t = {traj.times[-1]:.6g}; "
              f"partial trajectory written", file=sys.stderr)
        return EXIT_GUARD
    print("PASS" if passed else "FAIL")
    return EXIT_OK if passed else EXIT_FAIL


# -- entry point ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bihv", description=__doc__.splitlines()[0])
    parser.add_argument("--out", default=DEFAULT_OUT, help="output root (default: %(default)s)")
    parser.add_argument("--label", help="output subdirectory name (default: derived from the inputs)")
    parser.add_argument("--corpus", help="identity corpus directory (default: $BIHV_CORPUS or the bundled one)")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized runs (default: %(default)s)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="verify catalog identities")
    p.add_argument("names", nargs="*")
    p.add_argument("--all", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("eliminate", help="pseudo-remainder elimination of a variable")
    p.add_argument("files", nargs="*", metavar="FILE", help="higher- and lower-degree polynomial files")
    p.add_argument("--builtin", nargs=2, metavar=("HI", "LO"), help="corpus polynomials, e.g. taup4 taup3")
    p.add_argument("--factor", action="append", metavar="FILE", help="trial divisor for f0 (repeatable)")
    p.add_argument("--var", default="tau")
    p.set_defaults(func=cmd_eliminate)

    p = sub.add_parser("chain", help="write P_0..P_kmax")
    p.add_argument("--n1", type=_pos_int, required=True)
    p.add_argument("--kmax", type=_nonneg_int, required=True)
    p.add_argument("--k", type=_rational, help="fix the curvature K (default: symbolic)")
    p.add_argument("--max-terms", type=_pos_int, default=CHAIN_MAX_TERMS)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("simulate", help="integrate the ODE system and check residuals")
    p.add_argument("--init", help="JSON initial-condition document")
    p.add_argument("--k", type=_rational)
    p.add_argument("--n1", type=_pos_int)
    p.add_argument("--const", action="store_true", help="start at the constant solution")
    p.add_argument("--family", choices=("k0", "km1", "k1", "random"))
    p.add_argument("--a", type=_float_list)
    p.add_argument("--c", type=_float_list, help="use inf / -inf for the singular branches")
    p.add_argument("--t0", type=float)
    p.add_argument("--t1", type=float)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--kmax", type=_nonneg_int, default=3)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:      # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        code = args.func(args)
    except UsageError as exc:
        print(f"bihv {args.command}: error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    except GuardError as exc:
        print(f"bihv {args.command}: guard: {exc}", file=sys.stderr)
        code = EXIT_GUARD
    print(f"elapsed {time.perf_counter() - start:.2f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
