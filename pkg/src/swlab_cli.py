"""Console entry point.

Kept outside the package so that ``--threads`` can cap the BLAS/OpenMP pools
through the environment before the numeric stack is first imported.
"""

from __future__ import annotations

import argparse
import os
import sys

_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS")

EXIT_PASS = 0
EXIT_THRESHOLD_FAIL = 1
EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_ERROR = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swlab",
        description="Scenario runner for the sum-of-squares numerical lab")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario config")
    run_p.add_argument("config", help="path to the scenario config")
    run_p.add_argument("--out", default=None, help="output directory "
                       "(overrides output.dir from the config)")
    run_p.add_argument("--threads", type=int, default=None,
                       help="cap the numeric thread pools")

    sub.add_parser("presets", help="list the built-in vector field presets")

    val_p = sub.add_parser("validate", help="parse and validate a config")
    val_p.add_argument("config", help="path to the scenario config")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", None):
        for var in _THREAD_VARS:
            os.environ[var] = str(args.threads)
    return dispatch(args)


def dispatch(args) -> int:
    from swlab.config import ConfigError, load_config

    if args.command == "presets":
        _print_presets()
        return EXIT_PASS

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    if args.command == "validate":
        print(f"ok: {cfg.kind} scenario, preset {cfg.preset}")
        return EXIT_PASS

    from swlab.runner import run_scenario
    try:
        report = run_scenario(cfg, out_dir=args.out)
    except Exception as exc:  # surfaced with scenario context, nonzero exit
        print(f"runtime error in '{cfg.kind}' scenario: {exc}", file=sys.stderr)
        return EXIT_RUNTIME_ERROR

    for name, ok in sorted(report.checks.items()):
        print(f"[{'PASS' if ok else 'FAIL'}] {name}")
    print(f"report: {os.path.join(args.out or cfg.output_dir, 'report.json')}")
    return EXIT_PASS if report.passed else EXIT_THRESHOLD_FAIL


def _print_presets() -> None:
    from swlab.geometry import PRESETS, make_fields

    dims = {"euclidean": 2, "heisenberg": None, "grushin": None}
    for name in PRESETS:
        fields = make_fields(name, dims.get(name))
        parts = []
        for f in fields.fields:
            terms = []
            for a, comp in enumerate(f.components):
                if comp.is_zero:
                    continue
                terms.append(f"({_poly_str(comp)}) d_{a}")
            parts.append(f"{f.name} = " + " + ".join(terms))
        extra = " (any dimension)" if name == "euclidean" else ""
        print(f"{name}{extra}: " + "; ".join(parts))


def _poly_str(poly) -> str:
    terms = []
    for exps, coeff in sorted(poly.coeffs.items()):
        mono = "".join(f"x{a}^{e}" if e > 1 else f"x{a}"
                       for a, e in enumerate(exps) if e)
        terms.append(f"{coeff:g}{'*' + mono if mono else ''}")
    return " + ".join(terms) if terms else "0"


if __name__ == "__main__":
    raise SystemExit(main())
