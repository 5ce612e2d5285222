"""
Command-line entry point.

    groupest run --channel tdl --out results/tdl.csv
    groupest plot --in results/tdl.csv --metric all
    groupest inspect-group --n 12 --d 3
    groupest inspect-channel --channel itu

Exit codes: 0 on success, 2 on flag or configuration errors, 1 on any
other failure.
"""

import argparse
import re
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from loguru import logger

from config.simulation_config import SimConfig
from src.core.exceptions import ErrorHandler, SimulationException
from src.core.group_core import bidual_holds, subgroup
from src.services.channel import ChannelModel, Fading, pdp_for, pdp_table
from src.services.harness import read_csv, summarize, sweep, write_csv
from src.services.plotting import METRIC_COLUMNS, emit_plots
from src.utils.logger import configure_logging

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

_FIELDS = SimConfig.model_fields
_NEGATIVE_VALUE = re.compile(r"^-\.?\d")


def _default(name: str) -> Any:
    return _FIELDS[name].default


def parse_snr_range(text: str) -> List[float]:
    """'start:stop:step' with an inclusive stop, e.g. '0:25:5'."""
    parts = text.split(":")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected start:stop:step, got '{text}'"
        ) from None
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(
            f"need step > 0 and stop >= start, got '{text}'"
        )
    count = int((stop - start) / step + 1e-9) + 1
    return [start + i * step for i in range(count)]


def parse_d_list(text: str) -> List[int]:
    """Comma-separated generators, e.g. '2,8,16'."""
    try:
        values = [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got '{text}'") from None
    if not values:
        raise argparse.ArgumentTypeError("empty d list")
    return values


def _format_snr_default() -> str:
    grid = _default("snr_grid_db")
    return f"{grid[0]:g}:{grid[-1]:g}:{grid[1] - grid[0]:g}"


def _add_grid_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--n",
        type=int,
        default=None,
        help=f"number of subcarriers (default: {_default('n')})",
    )
    parser.add_argument(
        "--cp",
        type=int,
        default=None,
        help="cyclic prefix length in samples (default: n/8)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groupest",
        description="OFDM channel estimation with subgroup-structured tap supports",
    )
    parser.add_argument(
        "--log-level",
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="console and file log level (default: from LOG_LEVEL, else INFO)",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    # run
    run = subparsers.add_parser("run", help="run a Monte Carlo sweep and write a CSV")
    _add_grid_flags(run)
    run.add_argument(
        "--mod",
        default=None,
        choices=["qpsk"],
        help=f"modulation (default: {_default('modulation')})",
    )
    run.add_argument(
        "--epsilon",
        type=float,
        default=None,
        help=f"energy threshold in (0, 1) (default: {_default('epsilon')})",
    )
    run.add_argument(
        "--snr",
        type=parse_snr_range,
        default=None,
        help="SNR grid in dB as start:stop:step, negative starts allowed "
        f"(default: {_format_snr_default()})",
    )
    run.add_argument(
        "--d",
        type=parse_d_list,
        default=None,
        help="comma list of generators, each dividing n (default: "
        f"{','.join(str(d) for d in _default('d_grid'))})",
    )
    run.add_argument(
        "--channel",
        default=None,
        choices=[m.value for m in ChannelModel],
        help=f"channel model (default: {_default('channel')})",
    )
    run.add_argument(
        "--trials",
        default=None,
        help=f"'auto' or a fixed trial count per cell (default: {_default('trials')})",
    )
    run.add_argument(
        "--seed",
        type=int,
        default=None,
        help=f"master seed (default: {_default('master_seed')})",
    )
    run.add_argument(
        "--deterministic-taps",
        action="store_true",
        help="use tap amplitudes sqrt(P) with no fading",
    )
    run.add_argument(
        "--fading",
        default=None,
        choices=[Fading.PER_TAP.value, Fading.PROFILE.value],
        help="independent per-tap fades or one fade for the whole profile "
        "(default: per_tap for tdl, profile for itu)",
    )
    run.add_argument(
        "--workers",
        type=int,
        default=None,
        help=f"parallel cell workers (default: {_default('workers')})",
    )
    run.add_argument(
        "--out",
        type=Path,
        default=None,
        help="output CSV (default: <results_dir>/sweep_<channel>.csv)",
    )

    # plot
    plot = subparsers.add_parser("plot", help="render charts from a results CSV")
    plot.add_argument("--in", dest="in_path", type=Path, required=True, help="results CSV")
    plot.add_argument(
        "--metric",
        default="all",
        choices=[*METRIC_COLUMNS, "all"],
        help="metric to chart (default: all)",
    )
    plot.add_argument(
        "--out-dir",
        type=Path,
        default=None,
        help="directory for SVG files (default: next to the CSV)",
    )
    plot.add_argument(
        "--facet-by-d",
        action="store_true",
        help="one panel per d instead of averaging over d",
    )

    # inspect-group
    group = subparsers.add_parser(
        "inspect-group", help="print a subgroup of Z_n and its annihilator"
    )
    group.add_argument("--n", type=int, required=True, help="group order")
    group.add_argument("--d", type=int, required=True, help="generator, must divide n")

    # inspect-channel
    channel = subparsers.add_parser(
        "inspect-channel", help="print a power delay profile on the sample grid"
    )
    channel.add_argument(
        "--channel",
        default=_default("channel"),
        choices=[m.value for m in ChannelModel],
        help=f"channel model (default: {_default('channel')})",
    )
    _add_grid_flags(channel)
    channel.add_argument(
        "--d",
        type=int,
        default=None,
        help="generator for the structured TDL (required for tdl)",
    )
    return parser


def _config_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    mapping = {
        "n": args.n,
        "n_cp": args.cp,
        "modulation": args.mod,
        "epsilon": args.epsilon,
        "snr_grid_db": args.snr,
        "d_grid": args.d,
        "channel": args.channel,
        "fading": args.fading,
        "trials": args.trials,
        "master_seed": args.seed,
        "workers": args.workers,
    }
    overrides = {key: value for key, value in mapping.items() if value is not None}
    if args.deterministic_taps:
        overrides["deterministic_taps"] = True
    return overrides


def cmd_run(args: argparse.Namespace) -> int:
    config = SimConfig.build(**_config_overrides(args))
    out = args.out or config.results_dir / f"sweep_{config.channel}.csv"
    rows = sweep(config)
    write_csv(rows, out)
    print(summarize(rows))
    print(f"\n{len(rows)} rows written to {out}")
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    if not args.in_path.is_file():
        logger.error(f"Results file not found: {args.in_path}")
        return EXIT_FAILURE

    rows = read_csv(args.in_path)
    out_dir = args.out_dir or args.in_path.parent
    metrics = list(METRIC_COLUMNS) if args.metric == "all" else [args.metric]
    suffix = "_by_d" if args.facet_by_d else ""
    for metric in metrics:
        path = out_dir / f"{args.in_path.stem}_{metric}{suffix}.svg"
        emit_plots(rows, metric, path, facet_by_d=args.facet_by_d)
        print(path)
    return EXIT_OK


def _fmt_set(elements: Sequence[int]) -> str:
    return "{" + ", ".join(str(e) for e in elements) + "}"


def cmd_inspect_group(args: argparse.Namespace) -> int:
    spec = subgroup(args.n, args.d)
    print(f"n = {spec.n}, d = {spec.d}")
    print(f"H      = <{spec.d}> = {_fmt_set(spec.elements_h)}")
    print(f"H_perp = <{spec.perp_step}> = {_fmt_set(spec.elements_h_perp)}")
    print(f"|H| = {spec.order}, |H_perp| = {spec.perp_order}")
    print(f"|H| * |H_perp| = {spec.order * spec.perp_order}")
    print(f"bidual (H_perp)_perp == H: {bidual_holds(spec)}")
    return EXIT_OK


def cmd_inspect_channel(args: argparse.Namespace) -> int:
    model = ChannelModel(args.channel)
    overrides = {"n": args.n, "n_cp": args.cp, "channel": model.value}
    config = SimConfig.build(
        **{key: value for key, value in overrides.items() if value is not None},
        d_grid=[],
    )
    if model is ChannelModel.TDL and args.d is None:
        raise argparse.ArgumentError(None, "--d is required for the tdl channel")

    d = args.d if args.d is not None else config.n
    pdp = pdp_for(
        model,
        config.n,
        d,
        config.cp_length,
        config.tdl_decay_rate,
        config.symbol_duration_us,
    )
    print(f"{pdp.label}: {pdp.num_taps} taps, n = {config.n}, CP = {config.cp_length}")
    print(f"{'delay_ns':>10}{'sample':>8}{'power_db':>10}{'linear':>10}")
    for row in pdp_table(pdp, config.symbol_duration_us, config.n):
        print(
            f"{row['delay_ns']:>10.1f}{row['sample_index']:>8d}"
            f"{row['power_db']:>10.2f}{row['linear_power']:>10.4f}"
        )
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "plot": cmd_plot,
    "inspect-group": cmd_inspect_group,
    "inspect-channel": cmd_inspect_channel,
}


def _join_negative_values(argv: Sequence[str]) -> List[str]:
    """Glue '--snr -5:25:5' into '--snr=-5:25:5' so argparse takes it as a value."""
    joined: List[str] = []
    for token in argv:
        if joined and joined[-1] == "--snr" and _NEGATIVE_VALUE.match(token):
            joined[-1] = f"--snr={token}"
        else:
            joined.append(token)
    return joined


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    tokens = _join_negative_values(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(tokens)
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(level=args.log_level)
    try:
        return COMMANDS[args.command](args)
    except argparse.ArgumentError as e:
        parser.print_usage(sys.stderr)
        print(f"groupest: error: {e.message}", file=sys.stderr)
        return EXIT_USAGE
    except SimulationException as e:
        ErrorHandler.log_error(e, args.command)
        code = ErrorHandler.to_exit_code(e)
        if code == EXIT_USAGE:
            parser.print_usage(sys.stderr)
            print(f"groupest: error: {e.message}", file=sys.stderr)
        return code
    except OSError as e:
        ErrorHandler.log_error(e, args.command)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
