"""
Command-line driver: one subcommand per experiment, exit status as verdict

    python -m src.cli molmer --seed 7 --preset smoke --out results/

Exit codes: 0 every verdict passed, 1 a verdict failed, 2 configuration
error, 3 capacity or truncation error, 4 report could not be written.
"""
from typing import Callable, Dict, List, Optional
import argparse
import json
import logging
import os
import sys

from config.settings import EXPERIMENT_DEFAULTS
from src.experiments.entanglement import SeparabilityCheck, DistillationExperiment
from src.experiments.identity import IdentityCheck
from src.experiments.molmer import MolmerExperiment
from src.experiments.phase_locking import PhaseLockingExperiment
from src.experiments.records import ExperimentReport
from src.experiments.teleportation import TeleportationExperiment
from src.utils.errors import ConfigError, CapacityError, TruncationError, LaserLabError
from src.utils.helpers import parse_complex
from .config import RunConfig, parse_config

logger = logging.getLogger(__name__)

EXIT_PASSED = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_CAPACITY = 3
EXIT_OUTPUT = 4


def _identity(p: Dict, seed: int) -> ExperimentReport:
    mags = [float(m) for m in p["mags"].split(",")]
    return IdentityCheck(mags, seed, p["dim"], p["grid_points"]).run()


def _molmer(p: Dict, seed: int) -> ExperimentReport:
    return MolmerExperiment(p["mag_a"], p["mag_b"], p["packets"], p["trials"], seed,
                            grid_points=p["grid_points"], phase_model=p["phase_model"],
                            fixed_delta=p["fixed_delta"]).run()


def _phase_lock(p: Dict, seed: int) -> ExperimentReport:
    return PhaseLockingExperiment(p["mag"], p["packets"], p["trials"], seed, grid_points=p["grid_points"],
                                  predictive_samples=p["predictive_samples"], lock=p["lock"]).run()


def _separability(p: Dict, seed: int) -> ExperimentReport:
    return SeparabilityCheck(p["squeeze"], p["dim"], p["grid_points"], seed).run()


def _distill(p: Dict, seed: int) -> ExperimentReport:
    return DistillationExperiment(p["squeeze"], p["lo_mag"], p["n_lo"], p["dim"], p["trials"], seed,
                                  p["grid_points"]).run()


def _teleport(p: Dict, seed: int) -> ExperimentReport:
    return TeleportationExperiment(p["squeeze"], parse_complex(p["input_disp"]), p["mode"], p["trials"],
                                   p["dim"], seed, offset=p["offset"], input_photons=p["input_photons"],
                                   grid_points=p["grid_points"], phase_model=p["phase_model"],
                                   gain=p["gain"]).run()


RUNNERS: Dict[str, Callable[[Dict, int], ExperimentReport]] = {
    "identity-check": _identity,
    "molmer": _molmer,
    "phase-lock": _phase_lock,
    "separability": _separability,
    "distill": _distill,
    "teleport": _teleport,
}


def emit_report(report: ExperimentReport, out_dir: str) -> List[str]:
    """
    Write <experiment>_report.json and one <experiment>_<trace>.csv per trace

    Output depends only on the report, so equal reports give byte-identical files.

    Returns:
        Written paths, JSON report first
    """
    os.makedirs(out_dir, exist_ok=True)
    report_path = os.path.join(out_dir, f"{report.experiment}_report.json")
    with open(report_path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(json.dumps(report.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n")
    paths = [report_path]
    for name in sorted(report.traces):
        path = os.path.join(out_dir, f"{report.experiment}_{name}.csv")
        report.traces[name].to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
        paths.append(path)
    logger.info(f"Wrote {len(paths)} file(s) to {out_dir}")
    return paths


def _open_ledger(url: Optional[str]):
    if not url:
        return None
    try:
        from src.database.database import DatabaseManager
        ledger = DatabaseManager(url)
        ledger.init_db()
        return ledger
    except Exception as e:
        logger.warning(f"Run ledger unavailable ({e}); continuing without it")
        return None


def _ledger_call(ledger, method: str, *args, **kwargs):
    if ledger is None:
        return None
    try:
        return getattr(ledger, method)(*args, **kwargs)
    except Exception as e:
        logger.warning(f"Run ledger {method} failed: {e}")
        return None


def run_command(config: RunConfig) -> int:
    """
    Run one experiment, write its artifacts and return the exit status

    Args:
        config: Validated RunConfig

    Returns:
        Exit code (see module docstring)
    """
    ledger = _open_ledger(config.ledger_url)
    run_id = _ledger_call(ledger, "log_run_start", config.experiment, config.seed, config.parameters)
    try:
        report = RUNNERS[config.experiment](config.parameters, config.seed)
    except (CapacityError, TruncationError) as e:
        logger.error(f"❌ {config.experiment}: {e}")
        _ledger_call(ledger, "log_run_end", run_id, error=str(e))
        return EXIT_CAPACITY
    except (ConfigError, LaserLabError) as e:
        logger.error(f"❌ {config.experiment}: invalid configuration: {e}")
        _ledger_call(ledger, "log_run_end", run_id, error=str(e))
        return EXIT_CONFIG

    try:
        paths = emit_report(report, config.out_dir)
    except OSError as e:
        logger.error(f"❌ Cannot write report to {config.out_dir}: {e}")
        _ledger_call(ledger, "log_run_end", run_id, passed=report.passed, error=str(e))
        return EXIT_OUTPUT
    _ledger_call(ledger, "log_run_end", run_id, passed=report.passed, report_path=paths[0])

    for name, verdict in sorted(report.verdicts.items()):
        logger.info(f"{'✅' if verdict else '❌'} {name}")
    return EXIT_PASSED if report.passed else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="laserlab",
                                     description="Laser phase laboratory: seeded quantum-optics experiments")
    subparsers = parser.add_subparsers(dest="experiment", required=True)
    for experiment, defaults in EXPERIMENT_DEFAULTS.items():
        sub = subparsers.add_parser(experiment, help=f"run the {experiment} experiment")
        sub.add_argument("--seed", help="master seed, unsigned 64-bit (required here or in --config)")
        sub.add_argument("--config", help="flat key=value file")
        sub.add_argument("--out", help="output directory (default: current directory)")
        sub.add_argument("--preset", choices=["smoke"], help="fast parameter preset")
        sub.add_argument("--ledger", help="SQLAlchemy URL of the run ledger")
        sub.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
        for key in defaults:
            sub.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None,
                             help=f"default {defaults[key]!r}")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level),
                        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', force=True)
    overrides = {key: getattr(args, key) for key in EXPERIMENT_DEFAULTS[args.experiment]}
    overrides.update(seed=args.seed, out=args.out, ledger=args.ledger)
    try:
        config = parse_config(args.experiment, args.config, overrides, args.preset)
    except ConfigError as e:
        logger.error(f"❌ {e}")
        return EXIT_CONFIG
    return run_command(config)


if __name__ == "__main__":
    sys.exit(main())
