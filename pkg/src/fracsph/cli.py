"""Command line entry point: ``fracsph run|sweep|oracle``."""

from __future__ import annotations

import argparse
import logging
import sys

from fracsph.analytic import dual_oracle_gate
from fracsph.errors import ConfigError, ConvergenceError, FracSPHError
from fracsph.experiment import (
    REFERENCE_PRESETS,
    load_config,
    reference_preset,
    run_experiment,
    sweep_convergence,
)
from fracsph.fracops import Operator
from fracsph.functions import PRESETS, preset

log = logging.getLogger("fracsph")


def _config(args):
    if args.config and args.preset:
        raise ConfigError("preset", "use either --config or --preset, not both")
    if args.preset:
        cfg = reference_preset(args.preset)
    elif args.config:
        cfg = load_config(args.config)
    else:
        raise ConfigError("config", "one of --config or --preset is required")
    return cfg


def _levels(text: str):
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError("levels", f"expected comma-separated integers, got {text!r}") from None


def _fmt_r2(r2):
    return "undefined" if r2 is None else f"{r2:.6f}"


def cmd_run(args) -> int:
    cfg = _config(args)
    res = run_experiment(cfg, out_dir=args.out)
    r = res.report
    print(f"l2={r.l2:.6f} r2={_fmt_r2(r.r2)} n_points={r.n_points} "
          f"excluded={r.excluded_points} reference={res.reference_used}")
    print(f"wrote {args.out or cfg.output_dir}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _config(args)
    res = sweep_convergence(cfg, _levels(args.levels), out_dir=args.out)
    for n, s, l2, r2 in res.rows:
        print(f"n_real={n} s={s:.6g} l2={l2:.6e} r2={_fmt_r2(r2)}")
    if res.slope is None:
        print("slope=undefined (single level)")
    else:
        print(f"slope={res.slope:.4f} (log l2 vs log s) slope_vs_n={res.slope_vs_n:.4f}")
    return 0


def cmd_oracle(args) -> int:
    cfg = _config(args)
    if args.all:
        functions = [preset(name) for name in PRESETS]
        operators = list(Operator)
    else:
        functions = [cfg.test_function()]
        operators = [Operator(cfg.operator)]
    records = dual_oracle_gate(functions, operators, [cfg.order_spec()], a=cfg.a, b=cfg.b, tol=args.tol)
    if not records:
        print("no closed form covers this configuration; nothing to compare")
        return 1
    failed = 0
    for rec in records:
        status = "PASS" if rec.passed else "FAIL"
        failed += not rec.passed
        print(f"{status} {rec.function} {rec.operator} {rec.order} max_abs_diff={rec.max_abs_diff:.3e}")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracsph", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="TOML experiment configuration")
        p.add_argument("--preset", choices=sorted(REFERENCE_PRESETS), help="built-in configuration")
        return p

    run = common(sub.add_parser("run", help="evaluate one operator and write points.csv, summary.json"))
    run.add_argument("--out", help="output directory (default: output.dir of the config)")
    run.set_defaults(func=cmd_run)

    sweep = common(sub.add_parser("sweep", help="convergence sweep over particle counts"))
    sweep.add_argument("--levels", default="101,201,401", help="comma-separated n_real values")
    sweep.add_argument("--out", help="output directory (default: output.dir of the config)")
    sweep.set_defaults(func=cmd_sweep)

    oracle = common(sub.add_parser("oracle", help="compare closed forms against quadrature"))
    oracle.add_argument("--tol", type=float, default=1e-7, help="absolute agreement tolerance")
    oracle.add_argument("--all", action="store_true", help="gate every preset function and operator")
    oracle.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"oracle failed to converge: {exc}", file=sys.stderr)
        return 3
    except (FracSPHError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
