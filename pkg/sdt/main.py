""" Main entry point for sdt.

    python3 -m sdt.main simulate --preset sim1
    python3 -m sdt.main estimate panel.csv
    python3 -m sdt.main density estimates.csv
    python3 -m sdt.main bench lemma24

Exit codes: 0 ok, 1 failed bench criterion, 2 usage, 3 I/O, 4 malformed data.
"""

import argparse
import dataclasses
import logging
import os
import pathlib
import sys
from typing import List, Optional

import numpy as np

from . import (
    config,
    constants,
    density_estimation,
    experiments,
    panel_io,
    shift_estimation,
    signal_model,
    suites,
    utils,
)
from .errors import (
    ConfigError,
    DegenerateInputError,
    InvalidArgumentError,
    PanelFormatError,
    SdtError,
)

logger = logging.getLogger(__name__)

GRIDPOINTS = "gridpoints"


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    def file_exists(parser, path):
        if not os.path.exists(path):
            raise parser.error(f"{path} does not exist!")
        return path

    arg_parser = argparse.ArgumentParser(prog="sdt")
    arg_parser.add_argument(
        "-c",
        "--config-path",
        help="path to configuration file (default: config.ini if present)",
        default=None,
        type=lambda x: file_exists(arg_parser, x),
        metavar="FILE_PATH",
    )
    arg_parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug"
    )
    arg_parser.add_argument("--workers", type=int, help="worker threads (default: config)")
    subparsers = arg_parser.add_subparsers(dest="command", required=True)

    simulate = subparsers.add_parser("simulate", help="simulate a panel of shifted curves")
    simulate.add_argument("--preset", choices=sorted(constants.PRESETS))
    simulate.add_argument(
        "--signal",
        choices=[constants.SINGLE_HARMONIC, constants.HALF_SINE, constants.LASER],
    )
    simulate.add_argument("--amplitude", type=float, help="laser amplitude")
    simulate.add_argument("--center", type=float, help="laser symmetry axis")
    simulate.add_argument(
        "--dist",
        help="uniform:<c>:<w>, bump:<c>:<w>, bimodal[:<c1>:<c2>:<w>], point:<v> or gridpoints",
    )
    simulate.add_argument("--n", type=int, help="samples per curve")
    simulate.add_argument("--J", type=int, help="number of curves")
    simulate.add_argument("--sigma", type=float, help="noise level")
    simulate.add_argument("--seed", type=int, help="master seed")
    simulate.add_argument("--panel", help="output panel CSV")
    simulate.add_argument("--shifts", help="output true shifts CSV")

    estimate = subparsers.add_parser("estimate", help="estimate the shift of every curve")
    estimate.add_argument("panel", type=lambda x: file_exists(arg_parser, x))
    estimate.add_argument("--output", help="output estimates CSV")
    estimate.add_argument("--refine", action="store_true", default=None)

    density = subparsers.add_parser("density", help="estimate the density of the shifts")
    density.add_argument("shifts", type=lambda x: file_exists(arg_parser, x))
    density.add_argument("--kernel", choices=sorted(density_estimation.KERNELS))
    density.add_argument("--bandwidth", help="bandwidth policy (default: config)")
    density.add_argument("--n", type=int, help="samples per curve, for theoretical bandwidths")
    density.add_argument("--axis", type=float, default=0.0, help="subtracted from every shift")
    density.add_argument("--output", help="output density CSV")

    bench = subparsers.add_parser("bench", help="run a benchmark suite")
    bench.add_argument("suite", help=f"one of {sorted(suites.SUITES)}")
    bench.add_argument("--seed", type=int, help="master seed")
    bench.add_argument("--replicates", type=int, help="override the replicate count")
    bench.add_argument("--progress", action="store_true")
    bench.add_argument("--output", help="output report CSV")

    return arg_parser.parse_args(argv)


def gridpoint_shifts(tau_grid: shift_estimation.TauGrid, n: int, J: int, seed: int) -> np.ndarray:
    """Draws J shifts among the grid points that are multiples of 1/n."""
    points = tau_grid.points
    aligned = points[np.abs(points * n - np.round(points * n)) < 1e-9]
    if len(aligned) == 0:
        raise InvalidArgumentError(f"no shift grid point is a multiple of 1/{n}")
    return utils.rng_for(seed, constants.SHIFT_STREAM).choice(aligned, size=J)


def cmd_simulate(args: argparse.Namespace, run_config: config.RunConfig) -> int:
    preset = dict(constants.PRESETS[args.preset or "sim1"])
    if args.signal is not None:
        preset["signal"] = args.signal
    signal = experiments.preset_signal(
        preset["signal"],
        args.amplitude if args.amplitude is not None else preset.get("amplitude", 1.0),
        args.center if args.center is not None else preset.get("center", 0.0),
    )
    n = args.n or run_config.n_samples or preset["n"]
    J = args.J or preset["J"]
    sigma = args.sigma if args.sigma is not None else preset.get("sigma", run_config.sigma)
    seed = args.seed if args.seed is not None else run_config.seed
    dist_text = args.dist or preset["dist"]

    if dist_text == GRIDPOINTS:
        shifts = gridpoint_shifts(run_config.tau_grid(), n, J, seed)
        panel = signal_model.panel_from_shifts(signal, shifts, sigma, n, seed, run_config.workers)
    else:
        dist = signal_model.parse_shift_distribution(dist_text)
        panel = signal_model.generate_panel(signal, dist, sigma, n, J, seed, run_config.workers)

    panel_io.write_panel(pathlib.Path(args.panel or run_config.panel_path), panel)
    panel_io.write_true_shifts(pathlib.Path(args.shifts or run_config.shifts_path), panel)
    return constants.EXIT_OK


def cmd_estimate(args: argparse.Namespace, run_config: config.RunConfig) -> int:
    panel = panel_io.read_panel(pathlib.Path(args.panel))
    if args.refine:
        run_config = dataclasses.replace(run_config, refine=True)
    estimation = run_config.estimation_config(panel.grid.n)
    estimates = shift_estimation.estimate_shifts_panel(panel, estimation, run_config.workers)
    output = pathlib.Path(args.output or run_config.estimates_path)
    panel_io.write_estimated_shifts(output, panel.curve_ids, estimates)
    return constants.EXIT_OK


def cmd_density(args: argparse.Namespace, run_config: config.RunConfig) -> int:
    _, shifts = panel_io.read_shifts(pathlib.Path(args.shifts))
    shifts = shifts - args.axis
    kernel = density_estimation.get_kernel(args.kernel or run_config.kernel)
    policy = density_estimation.parse_bandwidth_policy(args.bandwidth or run_config.bandwidth)
    n = args.n or run_config.n_samples
    h = density_estimation.select_bandwidth(policy, shifts, kernel, n)
    estimate = density_estimation.kde(shifts, kernel, h)
    panel_io.write_density(pathlib.Path(args.output or run_config.density_path), estimate)
    print(f"h={h!r} kernel={kernel.id} J={estimate.J}")
    return constants.EXIT_OK


def cmd_bench(args: argparse.Namespace, run_config: config.RunConfig) -> int:
    seed = args.seed if args.seed is not None else run_config.seed
    rows = suites.run_suite(args.suite, seed, run_config.workers, args.progress, args.replicates)
    panel_io.write_bench(pathlib.Path(args.output or run_config.bench_path), rows)
    for row in rows:
        if row.status != constants.INFO:
            print(f"{row.status} {row.suite} {row.metric}={row.value!r} ({row.threshold})")
    failed = any(row.failed for row in rows)
    return constants.EXIT_BENCH_FAILURE if failed else constants.EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "density": cmd_density,
    "bench": cmd_bench,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(
        level=[logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)],
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        config_path = args.config_path
        if config_path is None and os.path.exists("config.ini"):
            config_path = "config.ini"
        run_config = config.load_config(config_path)
        if args.workers is not None:
            if args.workers < 1:
                raise InvalidArgumentError("--workers must be >= 1")
            run_config = dataclasses.replace(run_config, workers=args.workers)
        logger.debug("running %s with %s", args.command, run_config)
        return COMMANDS[args.command](args, run_config)
    except (PanelFormatError, DegenerateInputError) as error:
        print(f"sdt: data error: {error}", file=sys.stderr)
        return constants.EXIT_DATA
    except (ConfigError, InvalidArgumentError) as error:
        print(f"sdt: {error}", file=sys.stderr)
        return constants.EXIT_USAGE
    except UnicodeDecodeError as error:
        print(f"sdt: data error: {error}", file=sys.stderr)
        return constants.EXIT_DATA
    except OSError as error:
        print(f"sdt: I/O error: {error}", file=sys.stderr)
        return constants.EXIT_IO
    except SdtError as error:
        print(f"sdt: {error}", file=sys.stderr)
        return constants.EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
