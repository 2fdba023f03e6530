from typing import Sequence
import logging
import math

import pandas as pd

from config.settings import IDENTITY_DISTANCE, BEAM_CORRELATION_DISTANCE
from src.beam.packets import make_beam, reduced_state
from src.fock.metrics import trace_distance
from src.fock.states import phase_average, poisson_number_mixture, tensor
from .base import BaseExperiment
from .records import ExperimentReport

logger = logging.getLogger(__name__)


def identity_dimension(mag: float) -> int:
    """Smallest safe truncation ceil(|a|^2 + 6|a| + 10)"""
    return int(math.ceil(mag ** 2 + 6 * mag + 10))


class IdentityCheck(BaseExperiment):
    """Phase average of coherent states versus the Poissonian number mixture"""

    def __init__(self, mags: Sequence[float], seed: int, dim: int = 0, grid_points: int = 0,
                 correlation_mag: float = 1.0, correlation_dim: int = 16):
        super().__init__("identity-check", seed)
        self.mags = [float(m) for m in mags]
        self.dim = int(dim)
        self.grid_points = int(grid_points)
        self.correlation_mag = correlation_mag
        self.correlation_dim = correlation_dim

    def run(self) -> ExperimentReport:
        rows = []
        for mag in self.mags:
            dim = self.dim or identity_dimension(mag)
            points = self.grid_points or 2 * dim
            averaged = phase_average(mag, dim, points)
            diagonal = poisson_number_mixture(mag, dim)
            distance = trace_distance(averaged, diagonal)
            rows.append({"mag": mag, "dim": dim, "points": points, "trace_distance": distance,
                         "truncation_loss": diagonal.truncation_loss})
            logger.info(f"|alpha|={mag}: D={dim}, M={points}, trace distance {distance:.2e}")
            if points < 2 * dim - 1:
                self._warn(f"M={points} < 2D-1={2 * dim - 1}: grid is not exact for |alpha|={mag}")

        # two packets of a shared-phase beam are correlated, unlike a product of mixtures
        beam = make_beam(self.correlation_mag, 2)
        pair = reduced_state(beam, 2, self.correlation_dim)
        single = reduced_state(beam, 1, self.correlation_dim)
        correlation = trace_distance(pair, tensor(single, single))

        summary = {
            "max_trace_distance": max(r["trace_distance"] for r in rows),
            "checks": rows,
            "beam_correlation_distance": correlation,
        }
        verdicts = {
            "identity_holds": all(r["trace_distance"] < IDENTITY_DISTANCE for r in rows),
            "beam_not_product": correlation > BEAM_CORRELATION_DISTANCE,
        }
        parameters = {"mags": self.mags, "dim": self.dim, "grid_points": self.grid_points,
                      "correlation_mag": self.correlation_mag, "correlation_dim": self.correlation_dim}
        return self._create_report(parameters, summary, verdicts, {"identity": pd.DataFrame(rows)})


def run_identity_check(mags: Sequence[float], seed: int = 0, dim: int = 0, grid_points: int = 0) -> ExperimentReport:
    return IdentityCheck(mags, seed, dim, grid_points).run()
