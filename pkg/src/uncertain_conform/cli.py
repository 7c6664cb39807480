"""Command-line interface.

Subcommands: bounds, gen, exp-divergence, exp-performance, exp-realizations.
All output is CSV (stdout or --out). Exit codes: 0 success, 1 input error,
2 enumeration/resource cap.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from .align import STANDARD_COST, log_bounds
from .errors import CapExceeded, ValidationError
from .events import CAP_ENV_VAR, EnumerationCaps
from .experiments import (
    DEVIATION_PRESETS,
    UNCERTAINTY_KINDS,
    ExperimentSpec,
    run_divergence,
    run_performance,
    run_realizations,
)
from .log_io import load_log, load_net, save_log, save_net
from .synthesis import DeviationConfig, UncertaintyConfig, deviate, playout, random_block_net, uncertainize

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CAP = 2


def _write_csv(rows: list[dict], fieldnames: list[str], out: str | None) -> None:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    text = buffer.getvalue()
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _parse_fractions(text: str, n: int, flag: str) -> tuple[float, ...]:
    parts = text.split(",")
    if len(parts) != n:
        raise ValidationError(f"{flag} expects {n} comma-separated fractions, got {text!r}")
    try:
        values = tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ValidationError(f"{flag}: {exc}") from exc
    return values


def _parse_float_list(text: str, flag: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError as exc:
        raise ValidationError(f"{flag}: {exc}") from exc


def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise ValidationError(f"{flag}: {exc}") from exc


def _experiment_caps() -> EnumerationCaps | None:
    """Env-var caps when set, else the experiment defaults chosen by the runners."""
    return EnumerationCaps.from_env() if os.environ.get(CAP_ENV_VAR) else None


def cmd_bounds(args) -> int:
    caps = EnumerationCaps.from_env()
    log = load_log(args.log, format=args.format)
    model = load_net(args.net)
    result = log_bounds(log, model, STANDARD_COST, caps)
    capped = any(r.error is not None for r in result.reports)
    if args.json:
        doc = {
            "reports": [r.as_dict() for r in result.reports],
            "total_lower": result.total_lower,
            "total_upper": result.total_upper,
        }
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return EXIT_CAP if capped else EXIT_OK
    rows = []
    for report in result.reports:
        if report.error is None:
            rows.append(
                {
                    "case_id": report.case_id,
                    "lower_cost": report.lower_cost,
                    "upper_cost": report.upper_cost,
                    "realization_count": report.realization_count,
                }
            )
        else:
            rows.append(
                {
                    "case_id": report.case_id,
                    "lower_cost": report.lower_cost if report.lower_cost is not None else "capped",
                    "upper_cost": "capped",
                    "realization_count": "capped",
                }
            )
    rows.append(
        {
            "case_id": "total",
            "lower_cost": result.total_lower,
            "upper_cost": result.total_upper,
            "realization_count": "",
        }
    )
    _write_csv(rows, ["case_id", "lower_cost", "upper_cost", "realization_count"], args.out)
    return EXIT_CAP if capped else EXIT_OK


def cmd_gen(args) -> int:
    d_a, d_s, d_d = _parse_fractions(args.deviation, 3, "--deviation")
    u_a, u_t, u_i = _parse_fractions(args.uncertainty, 3, "--uncertainty")
    model = random_block_net(args.net_size, args.seed)
    universe = sorted(model.net.labels.values())
    log = playout(model, args.traces, args.seed)
    log = deviate(log, DeviationConfig(d_a, d_s, d_d), universe, args.seed)
    uncertain = uncertainize(log, UncertaintyConfig(u_a, u_t, u_i), universe, args.seed)
    Path(args.out_net).write_bytes(save_net(model))
    Path(args.out_log).write_bytes(save_log(uncertain, format="json"))
    return EXIT_OK


def cmd_exp_divergence(args) -> int:
    spec = ExperimentSpec(
        net_sizes=(args.net_size,),
        n_traces=args.traces,
        repetitions=args.reps,
        ps=_parse_float_list(args.ps, "--ps"),
        deviation_names=tuple(args.deviation_config),
        uncertainty_names=tuple(args.uncertainty_config),
        seed=str(args.seed),
    )
    rows = run_divergence(spec, _experiment_caps())
    _write_csv(rows, ["p", "deviation_config", "uncertainty_config", "mean_lower", "mean_upper"], args.out)
    return EXIT_OK


def cmd_exp_performance(args) -> int:
    spec = ExperimentSpec(
        net_sizes=_parse_int_list(args.sizes, "--sizes"),
        n_traces=args.traces,
        repetitions=args.reps,
        ps=(args.p,),
        seed=str(args.seed),
    )
    rows = run_performance(spec, p=args.p, uncertainty_name=args.uncertainty_config, caps=_experiment_caps())
    for row in rows:
        if row["mean_seconds"] != "timeout":
            row["mean_seconds"] = f"{row['mean_seconds']:.6f}"
    _write_csv(rows, ["n", "method", "mean_seconds"], args.out)
    return EXIT_OK


def cmd_exp_realizations(args) -> int:
    spec = ExperimentSpec(
        net_sizes=_parse_int_list(args.sizes, "--sizes"),
        n_traces=args.traces,
        repetitions=args.reps,
        ps=_parse_float_list(args.ps, "--ps"),
        seed=str(args.seed),
    )
    rows = run_realizations(
        spec, sweep=args.sweep, uncertainty_name=args.uncertainty_config, caps=_experiment_caps()
    )
    _write_csv(rows, ["x", "mean_realizations"], args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uncertain-conform",
        description="Conformance bounds for event logs with explicit uncertainty.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bounds = sub.add_parser("bounds", help="lower/upper conformance bounds per trace")
    p_bounds.add_argument("--log", required=True, help="uncertain log file")
    p_bounds.add_argument("--net", required=True, help="model net (JSON)")
    p_bounds.add_argument("--format", choices=["json", "xes"], default="json", help="log format")
    p_bounds.add_argument("--out", help="CSV output path (default: stdout)")
    p_bounds.add_argument("--json", action="store_true", help="emit full reports as JSON instead of CSV")
    p_bounds.set_defaults(func=cmd_bounds)

    p_gen = sub.add_parser("gen", help="generate a synthetic net and uncertain log")
    p_gen.add_argument("--net-size", type=int, default=10)
    p_gen.add_argument("--traces", type=int, default=50)
    p_gen.add_argument("--deviation", default="0,0,0", help="d_activity,d_swap,d_duplicate")
    p_gen.add_argument("--uncertainty", default="0,0,0", help="u_activity,u_timestamp,u_indeterminacy")
    p_gen.add_argument("--seed", default="0")
    p_gen.add_argument("--out-log", required=True)
    p_gen.add_argument("--out-net", required=True)
    p_gen.set_defaults(func=cmd_gen)

    p_div = sub.add_parser("exp-divergence", help="bound divergence as uncertainty grows")
    p_div.add_argument("--net-size", type=int, default=10)
    p_div.add_argument("--traces", type=int, default=50)
    p_div.add_argument("--reps", type=int, default=3)
    p_div.add_argument("--ps", default="0,0.04,0.08,0.12,0.16")
    p_div.add_argument(
        "--deviation-config", action="append", choices=sorted(DEVIATION_PRESETS),
        help="repeatable; default: extra",
    )
    p_div.add_argument(
        "--uncertainty-config", action="append", choices=list(UNCERTAINTY_KINDS),
        help="repeatable; default: indeterminate",
    )
    p_div.add_argument("--seed", default="0")
    p_div.add_argument("--out")
    p_div.set_defaults(func=cmd_exp_divergence)

    p_perf = sub.add_parser("exp-performance", help="behavior net vs brute force timing")
    p_perf.add_argument("--sizes", default="5,10,15,20")
    p_perf.add_argument("--traces", type=int, default=50)
    p_perf.add_argument("--reps", type=int, default=3)
    p_perf.add_argument("--p", type=float, default=0.05)
    p_perf.add_argument("--uncertainty-config", choices=list(UNCERTAINTY_KINDS), default="all")
    p_perf.add_argument("--seed", default="0")
    p_perf.add_argument("--out")
    p_perf.set_defaults(func=cmd_exp_performance)

    p_real = sub.add_parser("exp-realizations", help="realization counts vs p or net size")
    p_real.add_argument("--sweep", choices=["p", "size"], default="p")
    p_real.add_argument("--sizes", default="10")
    p_real.add_argument("--traces", type=int, default=50)
    p_real.add_argument("--reps", type=int, default=3)
    p_real.add_argument("--ps", default="0,0.04,0.08,0.12,0.16")
    p_real.add_argument("--uncertainty-config", choices=list(UNCERTAINTY_KINDS), default="all")
    p_real.add_argument("--seed", default="0")
    p_real.add_argument("--out")
    p_real.set_defaults(func=cmd_exp_realizations)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "deviation_config", None) is not None and not args.deviation_config:
        args.deviation_config = None
    if args.command == "exp-divergence":
        if not args.deviation_config:
            args.deviation_config = ["extra"]
        if not args.uncertainty_config:
            args.uncertainty_config = ["indeterminate"]
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapExceeded as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
