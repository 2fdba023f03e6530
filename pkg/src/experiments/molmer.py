from typing import Dict, List, Sequence
import logging
import math

import numpy as np
import pandas as pd

from config.settings import MOLMER_SETTING_OFFSETS, MOLMER_CHECKPOINTS, PHASE_GRID_POINTS
from src.beam.packets import make_beam, sample_realization
from src.inference.likelihoods import fringe_visibility, interference_likelihood, plus_probability
from src.inference.posterior import (uniform_posterior, delta_posterior, bayes_update, circular_stats,
                                     posterior_trace_frame)
from src.utils.errors import InvalidArgumentError
from src.utils.helpers import standard_error
from .base import BaseExperiment
from .records import ExperimentReport, MeasurementRecord

logger = logging.getLogger(__name__)

PHASE_MODELS = ("mixture", "pinned", "fixed")


def detect_packet(rng: np.random.Generator, alpha_a: complex, alpha_b: complex,
                  offsets: Sequence[float]) -> np.ndarray:
    """
    Photon counts of one packet pair

    Both packets are split evenly over len(offsets) interference arms; in arm s
    beam B picks up the reference offset theta_s before the 50-50 beamsplitter.
    Coherent inputs give independent Poisson counts with means
    |alpha_a +/- alpha_b e^{i theta_s}|^2 / (2 * arms).

    Returns:
        Integer array of shape (arms, 2): columns plus, minus
    """
    arms = len(offsets)
    shifted = alpha_b * np.exp(1j * np.asarray(offsets))
    means = np.stack([np.abs(alpha_a + shifted) ** 2, np.abs(shifted - alpha_a) ** 2], axis=1) / (2 * arms)
    return rng.poisson(means)


def shuffled_detections(rng: np.random.Generator, counts: np.ndarray) -> List[tuple]:
    """Arrival order of a packet's detections as (arm, plus?) pairs"""
    events = [(arm, column == 0) for arm in range(counts.shape[0]) for column in (0, 1)
              for _ in range(int(counts[arm, column]))]
    return [events[i] for i in rng.permutation(len(events))]


class MolmerExperiment(BaseExperiment):
    """Relative-phase collapse between two independent beams under photon counting"""

    def __init__(self, mag_a: float, mag_b: float, n_packets: int, trials: int, seed: int,
                 grid_points: int = PHASE_GRID_POINTS,
                 offsets: Sequence[float] = None,
                 checkpoints: Dict[int, float] = None,
                 phase_model: str = "mixture",
                 fixed_delta: float = 0.0):
        super().__init__("molmer", seed, trials)
        if mag_a < 0 or mag_b < 0:
            raise InvalidArgumentError(f"Packet magnitudes must be >= 0, got {mag_a}, {mag_b}")
        if n_packets < 1:
            raise InvalidArgumentError(f"Need at least one packet, got {n_packets}")
        if phase_model not in PHASE_MODELS:
            raise InvalidArgumentError(f"phase_model must be one of {PHASE_MODELS}, got '{phase_model}'")
        self.mag_a = float(mag_a)
        self.mag_b = float(mag_b)
        self.n_packets = int(n_packets)
        self.grid_points = int(grid_points)
        self.offsets = list(offsets if offsets is not None else MOLMER_SETTING_OFFSETS)
        self.checkpoints = dict(checkpoints if checkpoints is not None else MOLMER_CHECKPOINTS)
        self.phase_model = phase_model
        self.fixed_delta = float(fixed_delta)
        self.horizon = 2 * max(self.checkpoints)

    def _beams(self):
        if self.phase_model == "fixed":
            # pure coherent packets at a known relative phase
            return (make_beam(self.mag_a, self.n_packets, delta_posterior(self.grid_points, 0.0)),
                    make_beam(self.mag_b, self.n_packets, delta_posterior(self.grid_points, self.fixed_delta)))
        if self.phase_model == "pinned":
            # global phase pinned to 0, relative phase still unknown
            return (make_beam(self.mag_a, self.n_packets, delta_posterior(self.grid_points, 0.0)),
                    make_beam(self.mag_b, self.n_packets, grid_size=self.grid_points))
        return (make_beam(self.mag_a, self.n_packets, grid_size=self.grid_points),
                make_beam(self.mag_b, self.n_packets, grid_size=self.grid_points))

    def _run_trial(self, seed_sequence: np.random.SeedSequence, beams, tables, keep_trace: bool) -> dict:
        seed_a, seed_b, seed_detect = seed_sequence.spawn(3)
        realization_a = sample_realization(beams[0], seed_a)
        realization_b = sample_realization(beams[1], seed_b)
        delta = (realization_b.phi - realization_a.phi) % (2 * math.pi)
        rng = np.random.default_rng(seed_detect)

        posterior = uniform_posterior(self.grid_points)
        record = MeasurementRecord()
        resultants = []
        trace = [posterior] if keep_trace else None
        counts = np.zeros((len(self.offsets), 2), dtype=int)
        for k in range(self.n_packets):
            packet = detect_packet(rng, realization_a.labels[k], realization_b.labels[k], self.offsets)
            counts += packet
            for arm, plus in shuffled_detections(rng, packet):
                posterior = bayes_update(posterior, tables[arm][0 if plus else 1])
                record.append(k, "plus" if plus else "minus", arm)
                resultants.append(circular_stats(posterior).resultant_length)
                if keep_trace:
                    trace.append(posterior)

        stats = circular_stats(posterior)
        error = abs((stats.mean_direction - delta + math.pi) % (2 * math.pi) - math.pi)
        return {
            "delta": delta,
            "detections": len(record),
            "resultants": resultants,
            "final_resultant": stats.resultant_length,
            "phase_error": error if len(record) else float("nan"),
            "counts": counts,
            "trace": trace,
        }

    def run(self) -> ExperimentReport:
        logger.info(f"Molmer: |a|={self.mag_a}, |b|={self.mag_b}, N={self.n_packets}, "
                    f"trials={self.trials}, model={self.phase_model}")
        beams = self._beams()
        visibility = fringe_visibility(self.mag_a, self.mag_b)
        angles = uniform_posterior(self.grid_points).angles
        tables = [(interference_likelihood(angles, True, theta, visibility),
                   interference_likelihood(angles, False, theta, visibility)) for theta in self.offsets]

        results = []
        for index, seed_sequence in enumerate(self._trial_seeds()):
            results.append(self._run_trial(seed_sequence, beams, tables, keep_trace=index == 0))
            logger.debug(f"trial {index}: {results[-1]['detections']} detections")

        # resultant length after each cumulative detection count
        rows = []
        for count in range(1, self.horizon + 1):
            values = [r["resultants"][count - 1] for r in results if r["detections"] >= count]
            if not values:
                break
            rows.append({"detections": count, "median_R": float(np.median(values)),
                         "q25_R": float(np.quantile(values, 0.25)), "q75_R": float(np.quantile(values, 0.75)),
                         "trials": len(values)})
        by_count = {row["detections"]: row for row in rows}

        verdicts = {}
        checkpoints = {}
        for count, threshold in sorted(self.checkpoints.items()):
            row = by_count.get(count)
            if row is None:
                self._warn(f"No trial reached {count} detections")
                continue
            checkpoints[str(count)] = row["median_R"]
            verdicts[f"median_R_after_{count}_above_{threshold}"] = row["median_R"] > threshold

        # long-run detector rates per arm against the fringe law
        total = np.sum([r["counts"] for r in results], axis=0)
        rates = []
        for arm, theta in enumerate(self.offsets):
            row = {"arm": arm, "offset": theta,
                   "plus_per_packet": total[arm, 0] / (self.trials * self.n_packets),
                   "minus_per_packet": total[arm, 1] / (self.trials * self.n_packets)}
            if self.phase_model == "fixed":
                mean = (self.mag_a ** 2 + self.mag_b ** 2) / len(self.offsets)
                p_plus = float(plus_probability(np.array([self._grid_delta()]), theta, visibility)[0])
                for label, p in (("plus", p_plus), ("minus", 1 - p_plus)):
                    expected = mean * p
                    observed = total[arm, 0 if label == "plus" else 1]
                    sigma = math.sqrt(max(expected * self.trials * self.n_packets, 1e-300))
                    row[f"{label}_expected"] = expected
                    row[f"{label}_z"] = (observed - expected * self.trials * self.n_packets) / sigma
            rates.append(row)
        if self.phase_model == "fixed":
            verdicts["detector_rates_match_fringe"] = all(
                abs(row[f"{label}_z"]) < 3 for row in rates for label in ("plus", "minus")
                if row[f"{label}_expected"] > 0)

        finals = [r["final_resultant"] for r in results]
        errors = [r["phase_error"] for r in results if not math.isnan(r["phase_error"])]
        summary = {
            "visibility": visibility,
            "median_R_at_checkpoints": checkpoints,
            "mean_detections": float(np.mean([r["detections"] for r in results])),
            "final_R_mean": float(np.mean(finals)),
            "final_R_se": standard_error(finals),
            "final_phase_error_median": float(np.median(errors)) if errors else float("nan"),
            "detector_rates": rates,
        }
        parameters = {"mag_a": self.mag_a, "mag_b": self.mag_b, "packets": self.n_packets,
                      "trials": self.trials, "grid_points": self.grid_points, "offsets": self.offsets,
                      "checkpoints": {str(k): v for k, v in self.checkpoints.items()},
                      "phase_model": self.phase_model, "fixed_delta": self.fixed_delta}
        traces = {"resultant": pd.DataFrame(rows, columns=["detections", "median_R", "q25_R", "q75_R", "trials"]),
                  "posterior": posterior_trace_frame(results[0]["trace"])}
        return self._create_report(parameters, summary, verdicts, traces)

    def _grid_delta(self) -> float:
        """Fixed relative phase as realized on the grid"""
        step = 2 * math.pi / self.grid_points
        return round(self.fixed_delta % (2 * math.pi) / step) % self.grid_points * step


def run_molmer(mag_a: float, mag_b: float, n_packets: int, trials: int, seed: int, **options) -> ExperimentReport:
    return MolmerExperiment(mag_a, mag_b, n_packets, trials, seed, **options).run()
