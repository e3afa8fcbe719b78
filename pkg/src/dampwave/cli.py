"""Command-line entry point: ``dampwave <command> [flags]``.

Exit codes: 0 all checks pass, 1 a check failed (or a runtime error), 2 bad
usage or config.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from .data import parse_datum
from .errors import DampwaveError, InvalidParams
from .model import (
    DerivativeIndex,
    ModelParams,
    classify_regime,
    decay_exponents,
    expected_rate,
    rho_max,
)
from .suites import HEADER, SUITES, ExperimentConfig, Record, run_suite
from .symbols import solution_multipliers

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--sigma", type=float, help="fractional damping order in (0, 1]")
    parser.add_argument("--nu", type=float, help="damping strength > 0")
    parser.add_argument("--dim", "--n", dest="dim", type=int, help="space dimension")
    parser.add_argument("--k", type=float, help="spatial derivative order")
    parser.add_argument("--ell", type=int, choices=(0, 1), help="time derivative order")
    parser.add_argument("--t", type=float, help="time")
    parser.add_argument("--config", type=Path, help="JSON experiment config")
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--suite", action="append", choices=SUITES, help="suite to run (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dampwave", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("classify", "regime, decay exponents and low-band radius bound"),
        ("rates", "expected decay rates and fitted slopes"),
        ("evolve", "dump û(t, r) and ∂_t û(t, r) samples as CSV"),
        ("verify", "run verification suites and write CSV/JSON results"),
        ("oracle-check", "closed forms vs the RK4 mode oracle"),
        ("kernel-lp", "band-limited L^p kernel norm scaling"),
    ):
        p = sub.add_parser(name, help=help_)
        _common(p)
        if name == "evolve":
            p.add_argument("--datum", default="gaussian:1", help="datum id used as u1 (u0 = 0)")
            p.add_argument("--u0", help="datum id used as u0")
            p.add_argument("--r-max", type=float, default=5.0)
            p.add_argument("--points", type=int, default=51)
    return parser


def load_config(args) -> ExperimentConfig:
    raw = {}
    if args.config is not None:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidParams(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(raw, dict):
            raise InvalidParams("config must be a JSON object")
    cfg = ExperimentConfig.from_dict(raw)
    # flags win over the file
    if any(v is not None for v in (args.sigma, args.nu, args.dim)):
        base = cfg.cases[0] if cfg.cases else {"sigma": 0.5, "nu": 1.0, "n": 2}
        case = {
            "sigma": args.sigma if args.sigma is not None else base["sigma"],
            "nu": args.nu if args.nu is not None else base["nu"],
            "n": args.dim if args.dim is not None else base["n"],
        }
        cfg.cases = [case]
    if args.k is not None or args.ell is not None:
        k = args.k if args.k is not None else 0.0
        ells = [args.ell] if args.ell is not None else sorted({int(e) for _, e in cfg.idx})
        cfg.idx = [[k, e] for e in ells]
        cfg.rate_idx = [[k, e] for e in ells]
    if args.suite:
        cfg.suites = list(dict.fromkeys(args.suite))
    cfg.validate()
    return cfg


def _params_from_flags(args) -> ModelParams:
    if args.sigma is None or args.nu is None or args.dim is None:
        raise InvalidParams("--sigma, --nu and --dim are required")
    return ModelParams(args.dim, args.sigma, args.nu)


def write_records(records: list[Record], stem: Path) -> None:
    stem.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for rec in records:
        writer.writerow(rec.row())
    stem.with_suffix(".csv").write_text(buf.getvalue())
    stem.with_suffix(".json").write_text(json.dumps([r.as_dict() for r in records], indent=1) + "\n")


def print_records(records: list[Record], out=None) -> None:
    writer = csv.writer(out or sys.stdout, lineterminator="\n")
    writer.writerow(HEADER)
    for rec in records:
        writer.writerow(rec.row())


def cmd_classify(args) -> int:
    p = _params_from_flags(args)
    k = args.k or 0.0
    ex = decay_exponents(p, k)
    print("regime,gamma,gamma_tilde,rho_bound")
    print(f"{classify_regime(p).value},{ex.gamma:.10g},{ex.gamma_tilde:.10g},{rho_max(p):.10g}")
    return EXIT_OK


def cmd_rates(args) -> int:
    if args.config is None and args.suite is None and args.sigma is not None:
        # quick table for one parameter set, no quadrature
        p = _params_from_flags(args)
        print("problem,k,ell,rate")
        ells = [args.ell] if args.ell is not None else [0, 1]
        for problem in ("u1", "u0"):
            for ell in ells:
                idx = DerivativeIndex(args.k or 0.0, ell)
                print(f"{problem},{idx.k:g},{ell},{expected_rate(p, idx, problem):.10g}")
        if args.t is None:
            return EXIT_OK
    cfg = load_config(args)
    records = run_suite("rates", cfg)
    return _emit({"rates": records}, args.out)


def cmd_evolve(args) -> int:
    p = _params_from_flags(args)
    t = 1.0 if args.t is None else args.t
    u1 = parse_datum(args.datum)
    u0 = parse_datum(args.u0) if args.u0 else None
    r = np.linspace(0.0, args.r_max, args.points)
    r[0] = min(1e-6, args.r_max / 10)
    g1 = u1.fourier(p.n, r)
    g0 = u0.fourier(p.n, r) if u0 else np.zeros_like(r)
    a0, a1 = solution_multipliers(p, t, r, 0)
    b0, b1 = solution_multipliers(p, t, r, 1)
    u = a0 * g0 + a1 * g1
    ut = b0 * g0 + b1 * g1
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "r", "u_re", "u_im", "ut_re", "ut_im"])
    for i in range(len(r)):
        w.writerow([f"{t:.10g}", f"{r[i]:.10g}", f"{u[i].real:.10g}", f"{u[i].imag:.10g}", f"{ut[i].real:.10g}", f"{ut[i].imag:.10g}"])
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "evolve.csv").write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def _emit(results: dict[str, list[Record]], out: Path | None) -> int:
    failed = 0
    for name, records in results.items():
        if out is not None:
            write_records(records, out / name)
        else:
            print_records(records)
        failed += sum(r.failed for r in records)
        n_pass = sum(r.verdict == "PASS" for r in records)
        n_skip = sum(r.verdict.startswith("SKIPPED") for r in records)
        print(
            f"{name}: {n_pass} pass, {sum(r.failed for r in records)} fail, {n_skip} skipped",
            file=sys.stderr,
        )
    return EXIT_FAIL if failed else EXIT_OK


def cmd_verify(args) -> int:
    cfg = load_config(args)
    out = args.out if args.out is not None else Path("results")
    results = {}
    for name in cfg.suites:
        results[name] = run_suite(name, cfg)
    return _emit(results, out)


def cmd_oracle_check(args) -> int:
    cfg = load_config(args)
    from .suites import run_oracle

    only = None
    if args.sigma is not None:
        only = _params_from_flags(args)
    records = run_oracle(cfg, only)
    return _emit({"oracle": records}, args.out)


def cmd_kernel_lp(args) -> int:
    cfg = load_config(args)
    if args.sigma is not None:
        cfg.kernel_lp = {**cfg.kernel_lp, "sigma": args.sigma}
    if args.dim is not None:
        cfg.kernel_lp = {**cfg.kernel_lp, "n": args.dim}
    return _emit({"kernel-lp": run_suite("kernel-lp", cfg)}, args.out)


COMMANDS = {
    "classify": cmd_classify,
    "rates": cmd_rates,
    "evolve": cmd_evolve,
    "verify": cmd_verify,
    "oracle-check": cmd_oracle_check,
    "kernel-lp": cmd_kernel_lp,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InvalidParams, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DampwaveError, FloatingPointError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
