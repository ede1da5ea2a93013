"""Command-line entry point.

Subcommands: ``run`` (one experiment from a config file), ``sweep-beta``
(repeat it across confidence values), ``bound-grid`` (loss-ratio constants
for centered Gaussian beliefs), ``bench-info`` (benchmark facts), and
``plot`` (aggregate CSVs to an SVG).  Exit codes: 0 success, 1 bad
configuration or arguments, 2 every repetition failed at runtime, 3 I/O
failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .benchmarks import get_benchmark
from .bounds import LOSS_RATIO_THRESHOLD, centered_gaussian_grid
from .config import load_config
from .errors import ConfigError, DomainError, RunError, TraceParseError
from .experiments import beta_sweep, read_aggregate_csv, run_experiment
from .plotting import PlotSeries, render_regret_curves

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    """Argument errors are config errors (exit 1), not argparse's exit 2."""

    def error(self, message: str):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="priorbo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="override a config value (repeatable)",
    )

    p_sweep = sub.add_parser("sweep-beta", help="rerun an experiment per beta")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--override", action="append", default=[])
    p_sweep.add_argument("--betas", required=True, nargs="+", type=float)

    p_grid = sub.add_parser("bound-grid", help="loss-ratio constants on a grid")
    p_grid.add_argument("--sigmas", nargs="+", type=float, default=None)
    p_grid.add_argument("--betas", nargs="+", type=float, default=None)
    p_grid.add_argument("--n", type=int, default=50)
    p_grid.add_argument("--out", required=True)

    p_info = sub.add_parser("bench-info", help="print benchmark facts")
    p_info.add_argument("name")

    p_plot = sub.add_parser("plot", help="render aggregate CSVs as SVG")
    p_plot.add_argument("csvs", nargs="+")
    p_plot.add_argument("--out", required=True)
    p_plot.add_argument("--title", default="simple regret")

    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config, args.override)
    result = run_experiment(config)
    agg = result.aggregate
    print(
        f"{config.stem}: {result.completed}/{config.repetitions} runs ok, "
        f"final mean log10 regret {agg.mean[-1]:.4f} "
        f"(stderr {agg.stderr[-1]:.4f})"
    )
    for outcome in result.outcomes:
        if not outcome.ok:
            print(f"  run {outcome.index} FAILED (seed {outcome.seed})", file=sys.stderr)
    if result.aggregate_path:
        print(f"aggregate: {result.aggregate_path}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = load_config(args.config, args.override)
    sweep = beta_sweep(config, args.betas)
    for beta, res in zip(sweep.betas, sweep.results):
        print(
            f"beta={beta:g}: {res.completed}/{config.repetitions} runs ok, "
            f"final mean log10 regret {res.aggregate.mean[-1]:.4f}"
        )
    if sweep.sweep_path:
        print(f"sweep: {sweep.sweep_path}")
    return EXIT_OK


def _cmd_grid(args) -> int:
    sigmas = np.asarray(args.sigmas, dtype=float) if args.sigmas else None
    betas = np.asarray(args.betas, dtype=float) if args.betas else None
    grid = centered_gaussian_grid(sigmas, betas, args.n)
    out = Path(args.out)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(grid.to_csv())
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc}") from exc
    frac = grid.fraction_below(LOSS_RATIO_THRESHOLD)
    frac_raw = grid.fraction_below(LOSS_RATIO_THRESHOLD, raw=True)
    print(
        f"{grid.sigmas.size}x{grid.betas.size} grid at n={grid.n}: "
        f"C <= {LOSS_RATIO_THRESHOLD:g} on {frac:.1%} of cells "
        f"({frac_raw:.1%} under the unnormalized ratio)"
    )
    print(f"grid: {out}")
    return EXIT_OK


def _cmd_info(args) -> int:
    bench = get_benchmark(args.name)
    print(f"name: {bench.name}")
    print(f"dimensions: {bench.space.d}")
    for dim in bench.space.dims:
        scale = " (log10 working scale)" if dim.scale == "log" else ""
        print(f"  {dim.name}: [{dim.lower:g}, {dim.upper:g}]{scale}")
    print(f"known minimum: {bench.known_minimum!r}")
    for row in np.atleast_2d(bench.known_minimizers):
        print(f"  minimizer: ({', '.join(f'{v:.6f}' for v in row)})")
    emax_x = bench.empirical_maximizer
    print(
        f"empirical maximum: {bench.empirical_maximum!r} at "
        f"({', '.join(f'{v:.6f}' for v in emax_x)})"
    )
    return EXIT_OK


def _cmd_plot(args) -> int:
    series = []
    for csv in args.csvs:
        path = Path(csv)
        if not path.is_file():
            raise TraceParseError(f"no such file: {path}")
        agg = read_aggregate_csv(path)
        label = path.stem.removesuffix("_aggregate")
        series.append(PlotSeries.from_aggregate(label, agg))
    out = Path(args.out)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(render_regret_curves(series, title=args.title))
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc}") from exc
    print(f"plot: {out}")
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "sweep-beta": _cmd_sweep,
    "bound-grid": _cmd_grid,
    "bench-info": _cmd_info,
    "plot": _cmd_plot,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RunError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (OSError, TraceParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
