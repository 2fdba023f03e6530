from dataclasses import dataclass
import logging
import math

import numpy as np

from config.settings import SYMMETRY_TOLERANCE, EIGENVALUE_FLOOR
from src.utils.errors import InvalidArgumentError, InvalidStateError, DimensionMismatchError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CovarianceState:
    """
    Gaussian state: quadrature means (x1, p1, x2, p2, ...) and covariance

    Convention: vacuum variance 1/2, x = (a + a^dag)/sqrt2, p = (a - a^dag)/(i sqrt2).
    """
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.cov, dtype=float)
        if mean.size % 2 or cov.shape != (mean.size, mean.size):
            raise DimensionMismatchError(f"Mean of length {mean.size} does not fit covariance {cov.shape}")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def modes(self) -> int:
        return self.mean.size // 2


def symplectic_form(modes: int) -> np.ndarray:
    """Block-diagonal Omega with [[0, 1], [-1, 0]] per mode"""
    return np.kron(np.eye(modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _check_symmetric(state: CovarianceState):
    if np.max(np.abs(state.cov - state.cov.T), initial=0.0) > SYMMETRY_TOLERANCE:
        raise InvalidArgumentError("Covariance matrix is not symmetric")


def is_physical(state: CovarianceState) -> bool:
    """Uncertainty principle: cov + (i/2) Omega is positive semidefinite"""
    _check_symmetric(state)
    matrix = state.cov + 0.5j * symplectic_form(state.modes)
    return bool(np.linalg.eigvalsh(matrix).min() >= EIGENVALUE_FLOOR)


def _validated(state: CovarianceState) -> CovarianceState:
    if not is_physical(state):
        raise InvalidStateError("Covariance matrix violates the uncertainty principle")
    return state


def symplectic_eigenvalues(state: CovarianceState) -> np.ndarray:
    """Sorted symplectic eigenvalues (moduli of the eigenvalues of i Omega cov)"""
    _check_symmetric(state)
    values = np.abs(np.linalg.eigvals(1j * symplectic_form(state.modes) @ state.cov))
    # eigenvalues come in +/- pairs
    return np.sort(values)[::2]


def rotation(phi: float) -> np.ndarray:
    """Phase-space rotation taking the amplitude a to a e^{i phi}"""
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s], [s, c]])


def vacuum_cov(modes: int = 1) -> CovarianceState:
    return CovarianceState(np.zeros(2 * modes), np.eye(2 * modes) / 2)


def coherent_cov(alpha: complex) -> CovarianceState:
    """Single-mode coherent state: mean sqrt2 (Re alpha, Im alpha), cov I/2"""
    alpha = complex(alpha)
    return CovarianceState(math.sqrt(2) * np.array([alpha.real, alpha.imag]), np.eye(2) / 2)


def thermal_cov(mean_photons: float) -> CovarianceState:
    if mean_photons < 0:
        raise InvalidArgumentError(f"Mean photon number must be >= 0, got {mean_photons}")
    return CovarianceState(np.zeros(2), (mean_photons + 0.5) * np.eye(2))


def product_cov(first: CovarianceState, second: CovarianceState) -> CovarianceState:
    """Direct sum of two uncorrelated Gaussian states"""
    cov = np.zeros((2 * (first.modes + second.modes),) * 2)
    k = 2 * first.modes
    cov[:k, :k] = first.cov
    cov[k:, k:] = second.cov
    return CovarianceState(np.concatenate([first.mean, second.mean]), cov)


def reduced_cov(state: CovarianceState, mode: int) -> CovarianceState:
    """Marginal of a single mode"""
    if not 0 <= mode < state.modes:
        raise InvalidArgumentError(f"Mode index {mode} outside 0..{state.modes - 1}")
    window = slice(2 * mode, 2 * mode + 2)
    return CovarianceState(state.mean[window], state.cov[window, window])


def tmss_cov(r: float, phi: float = 0.0) -> CovarianceState:
    """
    Two-mode squeezed vacuum with pump phase phi

    Diagonal blocks cosh(2r)/2 I, off-diagonal block sinh(2r)/2 R(phi) Z R(phi)^T.
    """
    if r < 0:
        raise InvalidArgumentError(f"Squeeze parameter must be >= 0, got {r}")
    rot = rotation(phi)
    off = 0.5 * math.sinh(2 * r) * rot @ np.diag([1.0, -1.0]) @ rot.T
    cov = np.block([[0.5 * math.cosh(2 * r) * np.eye(2), off],
                    [off.T, 0.5 * math.cosh(2 * r) * np.eye(2)]])
    return CovarianceState(np.zeros(4), cov)


def log_negativity(state: CovarianceState) -> float:
    """max(0, -log2(2 nu_min)) of the partially transposed two-mode covariance, in bits"""
    if state.modes != 2:
        raise DimensionMismatchError("log_negativity expects a two-mode state")
    _validated(state)
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    transposed = CovarianceState(flip @ state.mean, flip @ state.cov @ flip)
    nu_min = symplectic_eigenvalues(transposed)[0]
    return max(0.0, -math.log2(2 * nu_min))


def pure_state_fidelity(state: CovarianceState, target: CovarianceState) -> float:
    """
    Fidelity of a single-mode Gaussian state with a pure Gaussian target

    F = exp(-d^T (V1+V2)^{-1} d / 2) / sqrt(det(V1+V2)), d the mean difference.
    """
    total = state.cov + target.cov
    delta = state.mean - target.mean
    return float(math.exp(-0.5 * delta @ np.linalg.solve(total, delta)) / math.sqrt(np.linalg.det(total)))


def bk_teleport_fidelity(r: float, gain: float = 1.0, amplitude: complex = 0.0) -> float:
    """
    Average coherent-state teleportation fidelity of the Gaussian protocol

    Output quadratures are gain * input plus the resource noise; each output
    variance is gain^2/2 + (1 + gain^2) cosh(2r)/2 - gain sinh(2r). At unit
    gain the fidelity is 1/(1 + e^{-2r}) for every input amplitude.

    Args:
        r: Squeeze parameter of the shared resource
        gain: Classical feed-forward gain
        amplitude: Input coherent amplitude (irrelevant at unit gain)
    """
    if r < 0:
        raise InvalidArgumentError(f"Squeeze parameter must be >= 0, got {r}")
    variance = gain ** 2 / 2 + (1 + gain ** 2) * math.cosh(2 * r) / 2 - gain * math.sinh(2 * r)
    target = coherent_cov(amplitude)
    output = CovarianceState(gain * target.mean, variance * np.eye(2))
    return pure_state_fidelity(output, target)
