from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional
import logging

import numpy as np

from config.settings import MAX_TRUNCATION_LOSS
from src.utils.errors import TruncationError
from .records import ExperimentReport

# Setup logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


class BaseExperiment(ABC):
    """Base class for all seeded experiments"""

    def __init__(self, name: str, seed: int, trials: int = 1):
        """
        Initialize experiment

        Args:
            name: Experiment name used in reports (e.g., "molmer")
            seed: Master seed; every trial derives its own sub-seed from it
            trials: Number of independent trials
        """
        self.name = name
        self.seed = int(seed)
        self.trials = int(trials)
        self.warnings: List[str] = []
        logger.info(f"Initialized {name} experiment (seed={self.seed}, trials={self.trials})")

    def _trial_seeds(self, count: Optional[int] = None, stream: int = 0) -> List[np.random.SeedSequence]:
        """
        Independent per-trial seed sequences derived from the master seed

        Trials may run in any order; each one only sees its own sequence.
        `stream` separates sets of trials inside one experiment.
        """
        count = self.trials if count is None else count
        return np.random.SeedSequence([self.seed, stream]).spawn(count)

    def _warn(self, message: str):
        logger.warning(message)
        if message not in self.warnings:
            self.warnings.append(message)

    def _check_truncation(self, label: str, loss: float, limit: float = MAX_TRUNCATION_LOSS):
        """Raise when a state lost more norm than the experiment tolerates"""
        if loss > limit:
            message = f"{label}: truncation loss {loss:.3e} exceeds limit {limit:.1e}; increase the dimension"
            logger.error(message)
            raise TruncationError(message)

    def _create_report(self,
                       parameters: Dict[str, Any],
                       summary: Dict[str, Any],
                       verdicts: Dict[str, bool],
                       traces: Optional[Dict[str, Any]] = None) -> ExperimentReport:
        """
        Create standardized report

        Args:
            parameters: Effective parameters of the run
            summary: Summary statistics
            verdicts: Named pass/fail checks
            traces: Optional tables exported as CSV

        Returns:
            ExperimentReport
        """
        report = ExperimentReport(
            experiment=self.name,
            parameters=parameters,
            seed=self.seed,
            summary=summary,
            verdicts={k: bool(v) for k, v in verdicts.items()},
            warnings=list(self.warnings),
            traces=traces or {},
        )
        status = "passed" if report.passed else "FAILED"
        logger.info(f"{self.name}: {status} ({sum(report.verdicts.values())}/{len(report.verdicts)} verdicts)")
        return report

    @abstractmethod
    def run(self) -> ExperimentReport:
        """
        Run every trial and summarize

        Returns:
            ExperimentReport
        """
        pass
