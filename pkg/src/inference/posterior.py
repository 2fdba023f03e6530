from dataclasses import dataclass
from typing import List, Sequence
import logging
import math

import numpy as np
import pandas as pd

from config.settings import MIN_PHASE_GRID_POINTS, NORMALIZATION_TOLERANCE
from src.utils.errors import InvalidArgumentError, ImpossibleEvidenceError, DimensionMismatchError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PhasePosterior:
    """Probability weights on the uniform grid phi_k = 2 pi k / M"""
    weights: np.ndarray

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if weights.size < MIN_PHASE_GRID_POINTS:
            raise InvalidArgumentError(
                f"Phase grid needs at least {MIN_PHASE_GRID_POINTS} points, got {weights.size}")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise InvalidArgumentError("Posterior weights must be finite and nonnegative")
        if abs(weights.sum() - 1.0) > NORMALIZATION_TOLERANCE:
            raise InvalidArgumentError(f"Posterior weights sum to {weights.sum()!r}, not 1")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    @property
    def grid_size(self) -> int:
        return self.weights.size

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.grid_size) / self.grid_size


@dataclass(frozen=True)
class CircularStats:
    mean_direction: float
    resultant_length: float
    circular_std: float


def _normalized(weights: np.ndarray) -> PhasePosterior:
    return PhasePosterior(weights / weights.sum())


def uniform_posterior(grid_size: int) -> PhasePosterior:
    """Flat prior: every weight 1/M"""
    if grid_size < MIN_PHASE_GRID_POINTS:
        raise InvalidArgumentError(f"Phase grid needs at least {MIN_PHASE_GRID_POINTS} points, got {grid_size}")
    return PhasePosterior(np.full(grid_size, 1.0 / grid_size))


def delta_posterior(grid_size: int, phi: float) -> PhasePosterior:
    """All weight on the grid point nearest to phi (a sharp measurement)"""
    if grid_size < MIN_PHASE_GRID_POINTS:
        raise InvalidArgumentError(f"Phase grid needs at least {MIN_PHASE_GRID_POINTS} points, got {grid_size}")
    weights = np.zeros(grid_size)
    weights[int(round(phi % (2 * math.pi) / (2 * math.pi) * grid_size)) % grid_size] = 1.0
    return PhasePosterior(weights)


def von_mises_posterior(grid_size: int, mu: float, kappa: float) -> PhasePosterior:
    """Discretized von Mises density exp(kappa cos(phi - mu))"""
    angles = 2 * np.pi * np.arange(grid_size) / grid_size
    log_weights = kappa * np.cos(angles - mu)
    return _normalized(np.exp(log_weights - log_weights.max()))


def rotate_posterior(post: PhasePosterior, steps: int) -> PhasePosterior:
    """Rotate by steps grid spacings"""
    return PhasePosterior(np.roll(post.weights, steps))


def _check_length(post: PhasePosterior, values: np.ndarray):
    if values.shape != (post.grid_size,):
        raise DimensionMismatchError(f"Likelihood of length {values.size} on a grid of {post.grid_size}")


def bayes_update(post: PhasePosterior, likelihood: Sequence[float]) -> PhasePosterior:
    """
    Posterior proportional to prior times likelihood, renormalized

    Raises:
        ImpossibleEvidenceError: if no grid point keeps positive weight
    """
    likelihood = np.asarray(likelihood, dtype=float)
    _check_length(post, likelihood)
    if np.any(likelihood < 0):
        raise InvalidArgumentError("Likelihood values must be nonnegative")
    weights = post.weights * likelihood
    total = weights.sum()
    if not np.isfinite(total) or total <= 0:
        raise ImpossibleEvidenceError("Evidence has zero probability under the current posterior")
    return _normalized(weights)


def bayes_update_log(post: PhasePosterior, log_likelihood: Sequence[float]) -> PhasePosterior:
    """bayes_update for likelihoods given as logarithms (shifted before exponentiation)"""
    log_likelihood = np.asarray(log_likelihood, dtype=float)
    _check_length(post, log_likelihood)
    support = post.weights > 0
    if not np.any(support & np.isfinite(log_likelihood)):
        raise ImpossibleEvidenceError("Evidence has zero probability under the current posterior")
    shift = np.max(log_likelihood[support & np.isfinite(log_likelihood)])
    return bayes_update(post, np.exp(log_likelihood - shift))


def circular_stats(post: PhasePosterior) -> CircularStats:
    """Mean direction, resultant length R and circular std sqrt(-2 ln R)"""
    moment = np.sum(post.weights * np.exp(1j * post.angles))
    length = float(min(1.0, abs(moment)))
    if length < 1e-15:
        return CircularStats(0.0, 0.0, math.inf)
    direction = float(np.angle(moment) % (2 * math.pi))
    spread = math.sqrt(max(0.0, -2.0 * math.log(length)))
    return CircularStats(direction, length, spread)


def posterior_mode(post: PhasePosterior) -> float:
    """Grid angle with the largest weight (lowest index on ties)"""
    return float(post.angles[int(np.argmax(post.weights))])


def posterior_trace_frame(steps: List[PhasePosterior]) -> pd.DataFrame:
    """Wide trace table: a step column then one column of weights per grid angle"""
    if not steps:
        return pd.DataFrame(columns=["step"])
    angles = steps[0].angles
    frame = pd.DataFrame(np.stack([p.weights for p in steps]), columns=[f"{a:.6f}" for a in angles])
    frame.insert(0, "step", np.arange(len(steps)))
    return frame
