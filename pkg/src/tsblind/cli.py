"""Command-line runner for tsblind experiments."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from tsblind.blind_predictor import BlindPredictor
from tsblind.covariance_estimation import ObservedPath
from tsblind.exceptions import VerificationError
from tsblind.experiment_harness import (
    ExperimentConfig,
    concentration_check,
    rate_sweep,
    run_risk_experiment,
    schur_verify,
)
from tsblind.gaussian_simulator import simulate_replications
from tsblind.spectral_model import load_model
from tsblind.utils.serialization import read_column_csv, tool_version, write_frame

logger = logging.getLogger("tsblind")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION = 2

DEFAULT_MODEL = "model=ma1 theta=0.5"


class _ArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> List[int]:
    try:
        values = [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected a comma list of integers, got '{text}'") from err
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _k_rule(text: str) -> float:
    value = text.split("=", 1)[1] if text.startswith("s=") else text
    try:
        return float(value)
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected s=<float>, got '{text}'") from err


def _lower_bound(text: str):
    if text.lower() == "estimate":
        return "estimate"
    try:
        return float(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected a float or 'estimate', got '{text}'") from err


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must satisfy 0 <= seed < 2**64, got {text}")
    return value


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", default=DEFAULT_MODEL, help="Model file or description")
    parser.add_argument("--seed", type=_seed, default=0, help="64-bit master seed")
    parser.add_argument("--out", type=Path, default=None, help="Output CSV (stdout if omitted)")
    parser.add_argument("--n-jobs", type=int, default=1, help="joblib workers")
    parser.add_argument(
        "--method",
        choices=["auto", "circulant-embedding", "dense-cholesky"],
        default="auto",
        help="Path sampler",
    )


def _add_experiment(parser: argparse.ArgumentParser, grid_required: bool = False) -> None:
    _add_common(parser)
    lengths = parser.add_mutually_exclusive_group(required=grid_required)
    lengths.add_argument("--n", type=int, help="Single path length N")
    lengths.add_argument("--grid", type=_int_list, help="Comma list of path lengths N")
    window = parser.add_mutually_exclusive_group()
    window.add_argument("--k", type=int, help="Fixed window K")
    window.add_argument("--k-rule", type=_k_rule, metavar="s=S", help="Rate-optimal K with index s")
    parser.add_argument("--reps", type=int, default=100, help="Replications per N")
    parser.add_argument("--oracle-past", type=int, default=None, help="Oracle past length L")
    parser.add_argument(
        "--m", type=_lower_bound, default=None, help="Lower spectral bound m or 'estimate'"
    )
    parser.add_argument("--target", type=int, default=0, help="Index j in B_K of the pointwise risk")
    parser.add_argument("--solver", choices=["cholesky", "levinson"], default="cholesky")
    parser.add_argument(
        "--debug-oracle",
        action="store_true",
        help="Use the known-covariance K-window predictor instead of the blind one",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="tsblind", description="Blind linear prediction of stationary Gaussian series"
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v INFO, -vv DEBUG")
    parser.add_argument("--version", action="version", version=f"%(prog)s {tool_version()}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    simulate = sub.add_parser("simulate", help="Simulate Gaussian paths")
    _add_common(simulate)
    simulate.add_argument("--n", type=int, required=True, help="Path length N")
    simulate.add_argument("--reps", type=int, default=1, help="Number of paths")

    predict = sub.add_parser("predict", help="Fit the blind predictor and write its matrix")
    _add_common(predict)
    predict.add_argument("--input", type=Path, default=None, help="Single-column CSV path")
    predict.add_argument("--n", type=int, default=None, help="Simulated path length if no input")
    predict.add_argument("--k", type=int, required=True, help="Window K")
    predict.add_argument(
        "--m", type=_lower_bound, default=None, help="Lower spectral bound m or 'estimate'"
    )
    predict.add_argument("--solver", choices=["cholesky", "levinson"], default="cholesky")

    risk = sub.add_parser("risk", help="Monte Carlo risk and bias-variance split")
    _add_experiment(risk)

    sweep = sub.add_parser("rate-sweep", help="Global risk along a geometric grid of N")
    _add_experiment(sweep, grid_required=True)

    concentration = sub.add_parser("concentration", help="Sup deviation at N and 4N")
    _add_experiment(concentration)
    concentration.add_argument("--x", type=float, default=float(np.log(2.0)), help="Level x")

    verify = sub.add_parser("schur-verify", help="Check the Schur identities on random covariances")
    verify.add_argument("--sizes", type=_int_list, default=[2, 4, 8, 16], help="Matrix sizes")
    verify.add_argument("--trials", type=int, default=100)
    verify.add_argument("--seed", type=_seed, default=0)
    verify.add_argument("--tol", type=float, default=1e-8)
    verify.add_argument("--out", type=Path, default=None)
    return parser


def _config_from_args(args) -> ExperimentConfig:
    if args.grid is not None:
        grid = tuple(args.grid)
    elif args.n is not None:
        grid = (args.n,)
    else:
        grid = (4096,)
    return ExperimentConfig(
        model=args.model,
        n_grid=grid,
        window=args.k,
        sobolev_index=args.k_rule,
        n_replications=args.reps,
        seed=args.seed,
        oracle_past=args.oracle_past,
        lower_bound=args.m,
        target=args.target,
        concentration_x=getattr(args, "x", float(np.log(2.0))),
        n_jobs=args.n_jobs,
        debug_oracle=args.debug_oracle,
        output=args.out,
        method=args.method,
        solver=args.solver,
    )


def _run_simulate(args) -> int:
    parsed = load_model(args.model)
    paths = simulate_replications(
        parsed.covariance, args.n, args.reps, args.seed, args.method, n_jobs=args.n_jobs
    )
    columns = ["x"] if args.reps == 1 else [f"x_{i}" for i in range(args.reps)]
    metadata = {
        "tool": "tsblind",
        "version": tool_version(),
        "model": parsed.description,
        "n_samples": args.n,
        "n_replications": args.reps,
        "seed": args.seed,
        "method": args.method,
    }
    write_frame(pd.DataFrame(paths.T, columns=columns), args.out, metadata=metadata)
    return EXIT_OK


def _run_predict(args) -> int:
    metadata = {"tool": "tsblind", "version": tool_version()}
    if args.input is not None:
        path = ObservedPath(read_column_csv(args.input))
        metadata["input"] = str(args.input)
    else:
        if args.n is None:
            raise ValueError("predict needs --input or --n.")
        parsed = load_model(args.model)
        path = ObservedPath(
            simulate_replications(parsed.covariance, args.n, 1, args.seed, args.method)[0]
        )
        metadata.update({"model": parsed.description, "seed": args.seed})
    predictor = BlindPredictor(window=args.k, lower_bound=args.m, solver=args.solver)
    predictor.fit(path).to_csv(args.out, metadata=metadata)
    return EXIT_OK


def _run_risk(args) -> int:
    config = _config_from_args(args)
    report = run_risk_experiment(config)
    report.to_csv(config.output)
    report.raise_for_failure()
    return EXIT_OK


def _run_rate_sweep(args) -> int:
    config = _config_from_args(args)
    report = rate_sweep(config)
    report.to_csv(config.output)
    logger.info(
        f"slope {report.slope:.4f} +- {report.slope_mc_stderr:.4f}, "
        f"theory {report.theoretical_exponent:.4f}"
    )
    report.raise_for_failure()
    return EXIT_OK


def _run_concentration(args) -> int:
    config = _config_from_args(args)
    report = concentration_check(config)
    report.to_csv(config.output)
    report.raise_for_failure()
    return EXIT_OK


def _run_schur_verify(args) -> int:
    report = schur_verify(args.sizes, args.trials, args.seed, tol=args.tol)
    report.to_csv(args.out)
    report.raise_for_failure()
    return EXIT_OK


_COMMANDS = {
    "simulate": _run_simulate,
    "predict": _run_predict,
    "risk": _run_risk,
    "rate-sweep": _run_rate_sweep,
    "concentration": _run_concentration,
    "schur-verify": _run_schur_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        return _COMMANDS[args.command](args)
    except VerificationError as err:
        logger.error(str(err))
        return EXIT_VERIFICATION
    except (ValueError, TypeError, OSError) as err:
        logger.error(str(err))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
