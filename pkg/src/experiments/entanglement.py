import logging
import math

import numpy as np
import pandas as pd

from config.settings import (PHASE_GRID_POINTS, SEPARABILITY_TOLERANCE, EIGENVALUE_FLOOR, CROSS_FORMALISM_BITS,
                             DISTILLATION_FRACTION)
from src.beam.packets import make_beam, sample_realization
from src.fock.metrics import log_negativity, trace_distance
from src.fock.operators import partial_transpose_min_eig
from src.fock.states import FockOperator, check_capacity, two_mode_squeezed, phase_grid
from src.gaussian import covariance
from src.inference.likelihoods import heterodyne_log_likelihood
from src.inference.posterior import uniform_posterior, bayes_update_log, circular_stats
from src.utils.errors import InvalidArgumentError
from src.utils.helpers import standard_error
from .base import BaseExperiment
from .records import ExperimentReport

logger = logging.getLogger(__name__)

# precondition on the squeezed-state norm loss tanh(r)^(2D)
SEPARABILITY_MAX_LOSS = 1e-8
CROSS_FORMALISM_MAX_SQUEEZE = 0.6
CROSS_FORMALISM_MIN_DIM = 16


def squeezed_columns(r: float, dim: int, angles: np.ndarray) -> np.ndarray:
    """Two-mode squeezed vectors for every pump phase, shape (dim^2, len(angles))"""
    base = two_mode_squeezed(r, 0.0, dim).amplitudes.reshape(dim, dim).diagonal()
    columns = np.zeros((dim * dim, angles.size), dtype=complex)
    n = np.arange(dim)
    columns[n * dim + n, :] = base[:, None] * np.exp(2j * np.outer(n, angles))
    return columns


def conditional_squeezed_state(r: float, dim: int, angles: np.ndarray, weights: np.ndarray) -> FockOperator:
    """sum_k P(phi_k) |TMSS(r, phi_k)><TMSS(r, phi_k)|"""
    dim = check_capacity(dim)
    support = np.nonzero(weights)[0]
    columns = squeezed_columns(r, dim, angles[support])
    rho = (columns * weights[support][None, :]) @ columns.conj().T
    loss = max(0.0, 1.0 - float(np.trace(rho).real))
    return FockOperator(dim, rho, 2, loss, loss > SEPARABILITY_MAX_LOSS)


def squeezed_diagonal(r: float, dim: int) -> FockOperator:
    """Closed form sum_n tanh^{2n} r / cosh^2 r |n,n><n,n|"""
    n = np.arange(dim)
    rho = np.zeros((dim * dim, dim * dim), dtype=complex)
    rho[n * dim + n, n * dim + n] = math.tanh(r) ** (2 * n) / math.cosh(r) ** 2
    return FockOperator(dim, rho, 2, math.tanh(r) ** (2 * dim))


class SeparabilityCheck(BaseExperiment):
    """Phase-averaged two-mode squeezing is separable; each fixed-phase component is not"""

    def __init__(self, r: float, dim: int, grid_points: int = 0, seed: int = 0, cross_dim: int = 0):
        super().__init__("separability", seed)
        if r < 0:
            raise InvalidArgumentError(f"Squeeze parameter must be >= 0, got {r}")
        self.r = float(r)
        self.dim = check_capacity(dim)
        self.grid_points = int(grid_points) or 2 * self.dim
        self.cross_dim = int(cross_dim) or max(self.dim, CROSS_FORMALISM_MIN_DIM)

    def run(self) -> ExperimentReport:
        loss = math.tanh(self.r) ** (2 * self.dim)
        self._check_truncation(f"two_mode_squeezed(r={self.r}, D={self.dim})", loss, SEPARABILITY_MAX_LOSS)
        if self.grid_points < 2 * self.dim - 1:
            self._warn(f"M={self.grid_points} < 2D-1={2 * self.dim - 1}: phase average is not exact")

        angles = phase_grid(self.grid_points)
        averaged = conditional_squeezed_state(self.r, self.dim, angles,
                                              np.full(self.grid_points, 1.0 / self.grid_points))
        diagonal = squeezed_diagonal(self.r, self.dim)
        max_deviation = float(np.max(np.abs(averaged.entries - diagonal.entries)))
        mixture_min_eig = partial_transpose_min_eig(averaged)
        pure = two_mode_squeezed(self.r, 0.0, self.dim)
        pure_min_eig = partial_transpose_min_eig(pure)
        logger.info(f"r={self.r}, D={self.dim}: mixture PT min eig {mixture_min_eig:.3e}, "
                    f"pure PT min eig {pure_min_eig:.3e}")

        # Fock route against the symplectic closed form
        fock_bits = log_negativity(two_mode_squeezed(self.r, 0.0, self.cross_dim))
        gaussian_bits = covariance.log_negativity(covariance.tmss_cov(self.r))
        cross_gap = abs(fock_bits - gaussian_bits)

        summary = {
            "truncation_loss": loss,
            "grid_points": self.grid_points,
            "max_deviation_from_diagonal": max_deviation,
            "trace_distance_from_diagonal": trace_distance(averaged, diagonal),
            "mixture_pt_min_eig": mixture_min_eig,
            "pure_pt_min_eig": pure_min_eig,
            "mixture_log_negativity": log_negativity(averaged),
            "pure_log_negativity": log_negativity(pure),
            "fock_log_negativity": fock_bits,
            "gaussian_log_negativity": gaussian_bits,
            "cross_formalism_gap": cross_gap,
            "cross_dim": self.cross_dim,
        }
        verdicts = {
            "mixture_is_number_diagonal": max_deviation <= SEPARABILITY_TOLERANCE,
            "mixture_separable": mixture_min_eig >= EIGENVALUE_FLOOR,
        }
        if self.r > 0:
            verdicts["components_entangled"] = pure_min_eig < -0.01
        if self.r <= CROSS_FORMALISM_MAX_SQUEEZE:
            verdicts["fock_matches_gaussian"] = cross_gap <= CROSS_FORMALISM_BITS
        else:
            self._warn(f"r={self.r} > {CROSS_FORMALISM_MAX_SQUEEZE}: cross-formalism gap reported only")

        n = np.arange(self.dim)
        weights = pd.DataFrame({"n": n, "weight": np.real(np.diag(averaged.entries))[n * self.dim + n],
                                "closed_form": math.tanh(self.r) ** (2 * n) / math.cosh(self.r) ** 2})
        parameters = {"squeeze": self.r, "dim": self.dim, "grid_points": self.grid_points,
                      "cross_dim": self.cross_dim}
        return self._create_report(parameters, summary, verdicts, {"weights": weights})


class DistillationExperiment(BaseExperiment):
    """Heterodyne on the local-oscillator packets turns the phase-averaged resource back into TMSS"""

    def __init__(self, r: float, lo_mag: float, n_lo: int, dim: int, trials: int, seed: int,
                 grid_points: int = PHASE_GRID_POINTS):
        super().__init__("distill", seed, trials)
        if r < 0 or lo_mag < 0:
            raise InvalidArgumentError(f"Squeeze and LO magnitude must be >= 0, got {r}, {lo_mag}")
        if n_lo < 0:
            raise InvalidArgumentError(f"LO packet count must be >= 0, got {n_lo}")
        self.r = float(r)
        self.lo_mag = float(lo_mag)
        self.n_lo = int(n_lo)
        self.dim = check_capacity(dim)
        self.grid_points = int(grid_points)

    def _run_trial(self, seed_sequence: np.random.SeedSequence, beam) -> dict:
        seed_beam, seed_noise = seed_sequence.spawn(2)
        realization = sample_realization(beam, seed_beam)
        rng = np.random.default_rng(seed_noise)
        posterior = uniform_posterior(self.grid_points)
        angles = posterior.angles
        negativities, resultants = [], []
        for j in range(self.n_lo + 1):
            if j > 0:
                noise = rng.normal(size=2) / math.sqrt(2)
                outcome = realization.labels[j - 1] + complex(noise[0], noise[1])
                posterior = bayes_update_log(posterior, heterodyne_log_likelihood(angles, outcome, self.lo_mag))
            state = conditional_squeezed_state(self.r, self.dim, angles, posterior.weights)
            negativities.append(log_negativity(state))
            resultants.append(circular_stats(posterior).resultant_length)
        return {"phi": realization.phi, "log_negativity": negativities, "resultant": resultants}

    def run(self) -> ExperimentReport:
        logger.info(f"Distillation: r={self.r}, |alpha'|={self.lo_mag}, N={self.n_lo}, D={self.dim}, "
                    f"trials={self.trials}")
        self._check_truncation(f"two_mode_squeezed(r={self.r}, D={self.dim})", math.tanh(self.r) ** (2 * self.dim))
        beam = make_beam(self.lo_mag, max(self.n_lo, 1), grid_size=self.grid_points)
        results = [self._run_trial(s, beam) for s in self._trial_seeds()]

        values = np.array([r["log_negativity"] for r in results])
        lengths = np.array([r["resultant"] for r in results])
        means = values.mean(axis=0)
        errors = np.array([standard_error(values[:, j]) for j in range(self.n_lo + 1)])
        benchmark = covariance.log_negativity(covariance.tmss_cov(self.r))

        steps = pd.DataFrame({"packets": np.arange(self.n_lo + 1), "mean_log_negativity": means,
                              "se_log_negativity": errors, "mean_R": lengths.mean(axis=0)})
        monotone = all(means[j + 1] >= means[j] - 3 * math.hypot(errors[j], errors[j + 1])
                       for j in range(self.n_lo))
        summary = {
            "benchmark_bits": benchmark,
            "pure_fock_bits": log_negativity(two_mode_squeezed(self.r, 0.0, self.dim)),
            "final_mean_log_negativity": float(means[-1]),
            "final_se_log_negativity": float(errors[-1]),
            "final_mean_R": float(lengths[:, -1].mean()),
            "unconditioned_log_negativity": float(means[0]),
        }
        verdicts = {
            "separable_without_measurement": means[0] <= SEPARABILITY_TOLERANCE,
            "nondecreasing_in_packets": monotone,
        }
        if self.n_lo > 0 and self.r > 0:
            verdicts["distillable_entanglement"] = means[-1] >= DISTILLATION_FRACTION * benchmark
        parameters = {"squeeze": self.r, "lo_mag": self.lo_mag, "n_lo": self.n_lo, "dim": self.dim,
                      "trials": self.trials, "grid_points": self.grid_points}
        return self._create_report(parameters, summary, verdicts, {"negativity": steps})


def check_separability(r: float, dim: int, grid_points: int = 0) -> ExperimentReport:
    return SeparabilityCheck(r, dim, grid_points).run()


def run_distillation(r: float, lo_mag: float, n_lo: int, dim: int, seed: int, trials: int = 200,
                     grid_points: int = PHASE_GRID_POINTS) -> ExperimentReport:
    return DistillationExperiment(r, lo_mag, n_lo, dim, trials, seed, grid_points).run()
