from typing import Sequence
import logging
import math

import numpy as np
import pandas as pd
from scipy.stats import chi2

from config.settings import (MOLMER_SETTING_OFFSETS, PHASE_GRID_POINTS, PREDICTIVE_SAMPLES,
                             PHASE_LOCK_PASS_RATE, TEST_LEVEL)
from src.beam.packets import make_beam, make_product_beam, sample_realization
from src.inference.likelihoods import fringe_visibility, interference_counts_log_likelihood, plus_probability
from src.inference.posterior import (PhasePosterior, uniform_posterior, delta_posterior, bayes_update_log,
                                     posterior_mode)
from src.utils.errors import InvalidArgumentError
from .base import BaseExperiment
from .molmer import detect_packet
from .records import ExperimentReport

logger = logging.getLogger(__name__)

LOCK_MODES = ("sharp", "counting")
BEAM_MODELS = ("exchangeable", "control")

# keeps Pearson terms finite when a predicted probability is 0 or 1
_PROBABILITY_FLOOR = 1e-9


def pearson_statistic(plus: np.ndarray, totals: np.ndarray, probabilities: np.ndarray) -> np.ndarray:
    """
    Pearson chi-square of binomial plus counts against predicted probabilities

    Broadcasts over leading axes; arms with no detections contribute zero.
    """
    p = np.clip(probabilities, _PROBABILITY_FLOOR, 1 - _PROBABILITY_FLOOR)
    expected = totals * p
    terms = (plus - expected) ** 2 / np.where(totals > 0, totals * p * (1 - p), 1.0)
    return np.sum(np.where(totals > 0, terms, 0.0), axis=-1)


def predictive_p_value(rng: np.random.Generator, lock: PhasePosterior, phi0: float, plus: np.ndarray,
                       totals: np.ndarray, offsets: Sequence[float], visibility: float,
                       samples: int = PREDICTIVE_SAMPLES) -> float:
    """
    Monte Carlo p-value of the consistency statistic

    Replicates draw a relative phase from the lock posterior and binomial plus
    counts with the observed per-arm totals; all are scored against phi0.
    """
    offsets = np.asarray(offsets)
    predicted = plus_probability(phi0, offsets, visibility)
    observed = pearson_statistic(plus, totals, predicted)
    draws = lock.angles[rng.choice(lock.grid_size, size=samples, p=lock.weights)]
    replicated = rng.binomial(totals[None, :], plus_probability(draws[:, None], offsets[None, :], visibility))
    simulated = pearson_statistic(replicated, totals[None, :], predicted[None, :])
    return float((1 + np.count_nonzero(simulated >= observed - 1e-12)) / (samples + 1))


class PhaseLockingExperiment(BaseExperiment):
    """Does a relative phase fixed by one packet persist over the rest of the beam?"""

    def __init__(self, mag: float, n_packets: int, trials: int, seed: int,
                 grid_points: int = PHASE_GRID_POINTS,
                 predictive_samples: int = PREDICTIVE_SAMPLES,
                 offsets: Sequence[float] = None,
                 lock: str = "sharp",
                 level: float = TEST_LEVEL,
                 mag_b: float = None):
        super().__init__("phase-lock", seed, trials)
        if mag < 0 or (mag_b is not None and mag_b < 0):
            raise InvalidArgumentError("Packet magnitudes must be >= 0")
        if n_packets < 1:
            raise InvalidArgumentError(f"Need at least one packet, got {n_packets}")
        if lock not in LOCK_MODES:
            raise InvalidArgumentError(f"lock must be one of {LOCK_MODES}, got '{lock}'")
        if not 0 < level < 1:
            raise InvalidArgumentError(f"Test level must lie in (0, 1), got {level}")
        if 1.0 / (int(predictive_samples) + 1) > level:
            raise InvalidArgumentError(
                f"predictive_samples={predictive_samples} cannot reach p-values below level={level}; "
                f"need at least {math.ceil(1.0 / level) - 1}")
        self.mag_a = float(mag)
        self.mag_b = float(mag if mag_b is None else mag_b)
        self.n_packets = int(n_packets)
        self.grid_points = int(grid_points)
        self.predictive_samples = int(predictive_samples)
        self.offsets = list(offsets if offsets is not None else MOLMER_SETTING_OFFSETS)
        self.lock = lock
        self.level = float(level)
        self.visibility = fringe_visibility(self.mag_a, self.mag_b)

    def _beams(self, model: str):
        build = make_beam if model == "exchangeable" else make_product_beam
        return (build(self.mag_a, self.n_packets, grid_size=self.grid_points),
                build(self.mag_b, self.n_packets, grid_size=self.grid_points))

    def _lock_posterior(self, lock_counts: np.ndarray, delta: float) -> PhasePosterior:
        if self.lock == "sharp":
            return delta_posterior(self.grid_points, delta)
        posterior = uniform_posterior(self.grid_points)
        log_likelihood = sum(interference_counts_log_likelihood(posterior.angles, n_plus, n_minus, theta,
                                                                self.visibility)
                             for (n_plus, n_minus), theta in zip(lock_counts, self.offsets))
        return bayes_update_log(posterior, log_likelihood)

    def _run_trial(self, seed_sequence: np.random.SeedSequence, beams) -> dict:
        seed_a, seed_b, seed_detect, seed_test = seed_sequence.spawn(4)
        realization_a = sample_realization(beams[0], seed_a)
        realization_b = sample_realization(beams[1], seed_b)
        rng = np.random.default_rng(seed_detect)
        counts = np.stack([detect_packet(rng, realization_a.labels[k], realization_b.labels[k], self.offsets)
                           for k in range(self.n_packets)])

        first_delta = (realization_b.phases[0] - realization_a.phases[0]) % (2 * math.pi)
        lock = self._lock_posterior(counts[0], first_delta)
        phi0 = posterior_mode(lock)
        if self.n_packets == 1:
            return {"phi0": phi0, "statistic": float("nan"), "p_value": float("nan"),
                    "asymptotic_p_value": float("nan"), "passed": False}

        later = counts[1:].sum(axis=0)
        plus, totals = later[:, 0], later.sum(axis=1)
        statistic = float(pearson_statistic(plus, totals, plus_probability(phi0, np.asarray(self.offsets),
                                                                            self.visibility)))
        p_value = predictive_p_value(np.random.default_rng(seed_test), lock, phi0, plus, totals,
                                     self.offsets, self.visibility, self.predictive_samples)
        dof = int(np.count_nonzero(totals))
        asymptotic = float(chi2.sf(statistic, dof)) if dof else 1.0
        return {"phi0": phi0, "statistic": statistic, "p_value": p_value,
                "asymptotic_p_value": asymptotic, "passed": p_value > self.level}

    def run(self) -> ExperimentReport:
        logger.info(f"Phase lock: |a0|={self.mag_a}, N={self.n_packets}, trials={self.trials}, lock={self.lock}")
        rows = []
        for stream, model in enumerate(BEAM_MODELS):
            beams = self._beams(model)
            for index, seed_sequence in enumerate(self._trial_seeds(stream=stream)):
                result = self._run_trial(seed_sequence, beams)
                rows.append({"model": model, "trial": index, **result})
        frame = pd.DataFrame(rows, columns=["model", "trial", "phi0", "statistic", "p_value",
                                            "asymptotic_p_value", "passed"])

        parameters = {"mag_a": self.mag_a, "mag_b": self.mag_b, "packets": self.n_packets,
                      "trials": self.trials, "grid_points": self.grid_points,
                      "predictive_samples": self.predictive_samples, "offsets": self.offsets,
                      "lock": self.lock, "level": self.level}
        if self.n_packets == 1:
            self._warn("Only one packet: nothing left after the lock, consistency test skipped")
            summary = {"insufficient_data": True}
            return self._create_report(parameters, summary, {"sufficient_data": False}, {"trials": frame})

        rates = frame.groupby("model")["passed"].mean()
        exchangeable_rate = float(rates["exchangeable"])
        control_rate = float(rates["control"])
        control_ceiling = self.level + 3 * math.sqrt(self.level * (1 - self.level) / self.trials)
        summary = {
            "insufficient_data": False,
            "exchangeable_pass_rate": exchangeable_rate,
            "control_pass_rate": control_rate,
            "control_pass_ceiling": control_ceiling,
            "exchangeable_median_p_value": float(frame.loc[frame.model == "exchangeable", "p_value"].median()),
            "control_median_p_value": float(frame.loc[frame.model == "control", "p_value"].median()),
            "exchangeable_asymptotic_pass_rate": float(
                (frame.loc[frame.model == "exchangeable", "asymptotic_p_value"] > self.level).mean()),
        }
        verdicts = {
            "exchangeable_phase_persists": exchangeable_rate >= PHASE_LOCK_PASS_RATE,
            "control_rejected": control_rate <= control_ceiling,
        }
        return self._create_report(parameters, summary, verdicts, {"trials": frame})


def run_phase_locking(mag: float, n_packets: int, trials: int, seed: int, **options) -> ExperimentReport:
    return PhaseLockingExperiment(mag, n_packets, trials, seed, **options).run()
