#!/usr/bin/env python3
"""
mpspec - Main Application
Meixner-Pollaczek spectral toolkit

Commands:
- verify     orthogonality, strip identities, kernel transforms, Gamma_phi
             sandwiches, hyperbolic inequalities, disk geometry, main theorem
- rates      E_n tables for a named test function, two-sided and half-line
- tightness  Gaussian divergence experiment
- tensor     two-dimensional tensorization checks
- poincare   Poincare-constant estimates and the perturbation bound

Usage:
    python main.py verify --weight sech --N 64 --seed 7
    python main.py rates --f abs_clip --n 8,16,...,512
    python main.py poincare --format json --out poincare.json

Exit status:
    0 all checks passed, 1 a check failed, 2 usage error, 3 numeric failure
"""

import argparse
import json
import logging
import os
import signal
import sys
import threading
from dataclasses import asdict, dataclass, field, fields
from typing import Dict, Optional, Tuple

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from config.settings import (
    COMMANDS,
    DEFAULT_FORMAT,
    DEFAULT_FUNCTION,
    DEFAULT_SEED,
    EXIT_CHECK_FAILED,
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_USAGE,
    FORMATS,
    LAMBDA_GRID,
    LAMBDA_MAX,
    LOG_LEVEL,
    MAX_DEGREE_CAP,
    MESSAGES,
    ORTHO_RULE,
    OUTPUT_DIR,
    TOLERANCE_DEFAULTS,
    WEIGHT_NAMES,
    WORKERS,
)
from handlers.poincare_handler import get_poincare_handler
from handlers.rates_handler import get_rates_handler
from handlers.tensor_handler import get_tensor_handler
from handlers.tightness_handler import get_tightness_handler
from handlers.verify_handler import get_verify_handler
from mpspec import functions
from mpspec.errors import MPSpecError
from utils.helpers import parse_grid
from utils.report import Report, print_summary, write_report

logger = logging.getLogger(__name__)

U64_LIMIT = 1 << 64


class UsageError(ValueError):
    """Malformed command line or configuration file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# =============================================================================
# RUN CONFIGURATION
# =============================================================================

@dataclass
class RunConfig:
    command: str
    weight: str = "sech"
    N: Optional[int] = None
    rule: int = ORTHO_RULE
    lambdas: Tuple[float, ...] = LAMBDA_GRID
    n_grid: Optional[Tuple[int, ...]] = None
    function: str = DEFAULT_FUNCTION
    tolerances: Dict[str, float] = field(default_factory=dict)
    out: Optional[str] = None
    format: str = DEFAULT_FORMAT
    seed: int = DEFAULT_SEED
    workers: int = WORKERS

    def tol(self, name):
        return self.tolerances.get(name, TOLERANCE_DEFAULTS[name])

    @property
    def out_path(self):
        return self.out or os.path.join(OUTPUT_DIR, f"{self.command}_report.{self.format}")

    def validate(self):
        """Raise UsageError unless the configuration is consistent."""
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command '{self.command}'")
        if self.weight not in WEIGHT_NAMES:
            raise UsageError(f"unknown weight '{self.weight}'; choose from {', '.join(WEIGHT_NAMES)}")
        if self.N is not None and not 1 <= self.N <= MAX_DEGREE_CAP:
            raise UsageError(f"N must lie in [1, {MAX_DEGREE_CAP}], got {self.N}")
        if not 2 <= self.rule <= MAX_DEGREE_CAP:
            raise UsageError(f"rule size must lie in [2, {MAX_DEGREE_CAP}], got {self.rule}")
        for name, grid in (("lambda", self.lambdas), ("n", self.n_grid)):
            if grid is None:
                continue
            if len(grid) == 0:
                raise UsageError(f"{name} grid is empty")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise UsageError(f"{name} grid must be strictly increasing")
        if self.lambdas[0] < 1.0 or self.lambdas[-1] > LAMBDA_MAX:
            raise UsageError(f"lambda grid must lie within [1, {LAMBDA_MAX}]")
        if self.n_grid is not None and self.n_grid[0] < 1:
            raise UsageError("n grid must start at n >= 1")
        if self.function not in functions.FUNCTION_PAIRS:
            raise UsageError(f"unknown function '{self.function}'; choose from {', '.join(functions.FUNCTION_PAIRS)}")
        for name, value in self.tolerances.items():
            if name not in TOLERANCE_DEFAULTS:
                raise UsageError(f"unknown tolerance '{name}'")
            if not value > 0:
                raise UsageError(f"tolerance '{name}' must be positive, got {value}")
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {', '.join(FORMATS)}")
        if not 0 <= self.seed < U64_LIMIT:
            raise UsageError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.workers < 1:
            raise UsageError(f"workers must be >= 1, got {self.workers}")
        return self

    def to_dict(self):
        data = asdict(self)
        data["out"] = self.out_path
        return data


def _grid(text, kind, name):
    if isinstance(text, (list, tuple)):
        values = text
    else:
        try:
            values = parse_grid(str(text), kind)
        except ValueError as exc:
            raise UsageError(f"malformed {name} grid '{text}': {exc}") from None
    try:
        return tuple(kind(v) for v in values)
    except (TypeError, ValueError):
        raise UsageError(f"malformed {name} grid '{text}'") from None


def _tolerances(items):
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"tolerance override '{item}' must look like name=value")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise UsageError(f"tolerance '{name}' is not a number: '{value}'") from None
    return out


def build_parser():
    parser = _Parser(prog="mpspec", description=MESSAGES["banner"])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--weight", help="weight name")
    parser.add_argument("--N", type=int, help="degree cap")
    parser.add_argument("--rule", type=int, help="Gauss rule size")
    parser.add_argument("--lambda", dest="lambdas", help="lambda grid, e.g. 1,1.5,...,3")
    parser.add_argument("--n", dest="n_grid", help="n grid, e.g. 8,16,...,512")
    parser.add_argument("--f", dest="function", help="test function name")
    parser.add_argument("--tol", action="append", metavar="NAME=VALUE", help="tolerance override")
    parser.add_argument("--out", help="report path")
    parser.add_argument("--format", choices=FORMATS)
    parser.add_argument("--seed", type=int, help="seed for random polynomial suites")
    parser.add_argument("--workers", type=int, help="thread pool size")
    parser.add_argument("--config", help="JSON file with defaults; flags win")
    return parser


def load_config_file(path):
    """Read a JSON object of RunConfig fields."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file '{path}': {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file '{path}' is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"config file '{path}' must hold a JSON object")
    known = {f.name for f in fields(RunConfig)} - {"command"}
    unknown = set(data) - known
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


def parse_config(argv=None):
    """
    Merge settings defaults, the optional JSON file and explicit flags.

    Returns:
        RunConfig: Validated configuration
    """
    args = build_parser().parse_args(argv)
    merged = load_config_file(args.config) if args.config else {}

    flags = {
        "weight": args.weight,
        "N": args.N,
        "rule": args.rule,
        "lambdas": args.lambdas,
        "n_grid": args.n_grid,
        "function": args.function,
        "out": args.out,
        "format": args.format,
        "seed": args.seed,
        "workers": args.workers,
    }
    merged.update({k: v for k, v in flags.items() if v is not None})
    tolerances = dict(merged.pop("tolerances", None) or {})
    tolerances.update(_tolerances(args.tol))

    if "lambdas" in merged:
        merged["lambdas"] = _grid(merged["lambdas"], float, "lambda")
    if merged.get("n_grid") is not None:
        merged["n_grid"] = _grid(merged["n_grid"], int, "n")
    try:
        config = RunConfig(command=args.command, tolerances=tolerances, **merged)
    except TypeError as exc:
        raise UsageError(str(exc)) from None
    return config.validate()


# =============================================================================
# CONTROLLER
# =============================================================================

class SpectralToolkit:
    """Main application controller: runs one command and writes its report."""

    def __init__(self, config):
        print("=" * 50)
        print(MESSAGES["banner"])
        print("=" * 50)

        self.config = config
        self.interrupted = False
        self.handlers = {
            "verify": get_verify_handler,
            "rates": get_rates_handler,
            "tightness": get_tightness_handler,
            "tensor": get_tensor_handler,
            "poincare": get_poincare_handler,
        }

        # Signals can only be installed from the main thread
        self._previous = {}
        if threading.current_thread() is threading.main_thread():
            for signum in (signal.SIGINT, signal.SIGTERM):
                self._previous[signum] = signal.signal(signum, self._signal_handler)

    def _signal_handler(self, signum, frame):
        """Handle shutdown signals."""
        print("\nReceived shutdown signal...")
        self.interrupted = True
        raise KeyboardInterrupt

    def run(self):
        """
        Run the configured command.

        Returns:
            int: Process exit status
        """
        command = self.config.command
        print(f"\nRunning {command}...")
        try:
            suites, tables = self.handlers[command]().run(self.config)
        except KeyboardInterrupt:
            print(MESSAGES["interrupted"])
            return EXIT_CHECK_FAILED
        finally:
            self.shutdown()

        report = Report(config=self.config.to_dict(), suites=suites, tables=tables)
        path = self.config.out_path
        written = write_report(report, path, self.config.format)
        logger.info("wrote %s", ", ".join(written))
        print_summary(report, command, path)

        if report.passed:
            print(MESSAGES["all_passed"])
            return EXIT_OK
        suite_name, check = report.first_failure
        print(MESSAGES["failed"].format(name=f"{suite_name}/{check.name}"))
        return EXIT_CHECK_FAILED

    def shutdown(self):
        """Restore the signal handlers that were active before this run."""
        for signum, previous in self._previous.items():
            signal.signal(signum, previous)
        self._previous = {}


def main(argv=None):
    """Entry point for mpspec."""
    logging.basicConfig(level=LOG_LEVEL, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        config = parse_config(argv)
    except UsageError as exc:
        print(MESSAGES["usage"].format(detail=exc), file=sys.stderr)
        return EXIT_USAGE

    try:
        return SpectralToolkit(config).run()
    except MPSpecError as exc:
        print(MESSAGES["numeric"].format(detail=exc), file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
