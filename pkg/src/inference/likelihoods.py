import numpy as np
from scipy.special import xlogy


def fringe_visibility(mag_a: float, mag_b: float) -> float:
    """2|a||b| / (|a|^2 + |b|^2); zero when both beams are dark"""
    total = mag_a ** 2 + mag_b ** 2
    return 0.0 if total == 0 else 2 * mag_a * mag_b / total


def plus_probability(angles: np.ndarray, offset: float, visibility: float = 1.0) -> np.ndarray:
    """Probability that a photon reaches the (a+b)/sqrt2 port given relative phase Delta"""
    return 0.5 * (1.0 + visibility * np.cos(np.asarray(angles) + offset))


def interference_likelihood(angles: np.ndarray, plus: bool, offset: float,
                            visibility: float = 1.0) -> np.ndarray:
    """Per-photon detector likelihood (1 +/- V cos(Delta + offset)) / 2"""
    p = plus_probability(angles, offset, visibility)
    return p if plus else 1.0 - p


def interference_counts_log_likelihood(angles: np.ndarray, n_plus: int, n_minus: int, offset: float,
                                       visibility: float = 1.0) -> np.ndarray:
    """
    Log likelihood of a packet's detector counts

    The total count is Poissonian with a phase-independent mean and drops out.
    """
    p = plus_probability(angles, offset, visibility)
    return xlogy(n_plus, p) + xlogy(n_minus, 1.0 - p)


def heterodyne_log_likelihood(angles: np.ndarray, outcome: complex, amplitude: float) -> np.ndarray:
    """
    Log of the heterodyne outcome density exp(-|z - amplitude e^{i phi}|^2) / pi,
    up to a phase-independent constant
    """
    return 2.0 * amplitude * np.real(np.conj(outcome) * np.exp(1j * np.asarray(angles)))
