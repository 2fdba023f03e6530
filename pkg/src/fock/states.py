from dataclasses import dataclass
from typing import Sequence, Union
import logging
import math

import numpy as np
from scipy.special import gammaln, xlogy

from config.settings import TRUNCATION_TOLERANCE, HERMITIAN_TOLERANCE, EIGENVALUE_FLOOR, MAX_DENSE_SIDE
from src.utils.errors import InvalidDimensionError, InvalidArgumentError, DimensionMismatchError, CapacityError

logger = logging.getLogger(__name__)


def _frozen(array: np.ndarray, dtype=complex) -> np.ndarray:
    """Copy to a read-only array so values stay immutable after construction"""
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def check_dim(dim: int) -> int:
    """Validate a truncation dimension"""
    if int(dim) != dim or dim < 2:
        raise InvalidDimensionError(f"Truncation dimension must be an integer >= 2, got {dim}")
    return int(dim)


def check_capacity(dim: int, modes: int = 2) -> int:
    """Validate a mode count and, for two modes, that the D^2 side fits MAX_DENSE_SIDE"""
    dim = check_dim(dim)
    if modes not in (1, 2):
        raise InvalidArgumentError(f"Unsupported mode count {modes}")
    if modes == 2 and dim * dim > MAX_DENSE_SIDE:
        raise CapacityError(f"Two-mode dense state at D={dim} has side {dim * dim} > {MAX_DENSE_SIDE}")
    return dim


@dataclass(frozen=True)
class FockVector:
    """
    Pure state on a truncated number basis

    Two-mode amplitudes are stored row-major, index n*D + m for |n>|m>.
    """
    dim: int
    amplitudes: np.ndarray
    modes: int = 1
    truncation_loss: float = 0.0
    truncation_warning: bool = False

    def __post_init__(self):
        check_capacity(self.dim, self.modes)
        amplitudes = np.asarray(self.amplitudes).reshape(-1)
        if amplitudes.size != self.dim ** self.modes:
            raise DimensionMismatchError(
                f"Expected {self.dim ** self.modes} amplitudes for {self.modes} mode(s), got {amplitudes.size}")
        object.__setattr__(self, "amplitudes", _frozen(amplitudes))

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def to_operator(self) -> "FockOperator":
        """Projector |psi><psi| carrying the same truncation figures"""
        return FockOperator(self.dim, np.outer(self.amplitudes, self.amplitudes.conj()), self.modes,
                            self.truncation_loss, self.truncation_warning)


@dataclass(frozen=True)
class FockOperator:
    """Operator (usually a density operator) on a truncated number basis"""
    dim: int
    entries: np.ndarray
    modes: int = 1
    truncation_loss: float = 0.0
    truncation_warning: bool = False

    def __post_init__(self):
        check_capacity(self.dim, self.modes)
        side = self.dim ** self.modes
        entries = np.asarray(self.entries)
        if entries.shape != (side, side):
            raise DimensionMismatchError(
                f"Expected a {side}x{side} matrix for {self.modes} mode(s), got {entries.shape}")
        object.__setattr__(self, "entries", _frozen(entries))

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def is_hermitian(self, tol: float = HERMITIAN_TOLERANCE) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T), initial=0.0) <= tol)

    def is_density(self, trace_tol: float = None) -> bool:
        """Hermitian, unit trace within tolerance and positive semidefinite"""
        trace_tol = max(trace_tol if trace_tol is not None else TRUNCATION_TOLERANCE, self.truncation_loss * 1.01)
        if not self.is_hermitian():
            return False
        if abs(1.0 - self.trace) > trace_tol + 1e-12:
            return False
        hermitian = (self.entries + self.entries.conj().T) / 2
        return bool(np.linalg.eigvalsh(hermitian).min() >= EIGENVALUE_FLOOR)


FockState = Union[FockVector, FockOperator]


def _warn_truncation(label: str, loss: float, heuristic: bool = False) -> bool:
    """Log truncation problems and return the warning flag"""
    if loss > TRUNCATION_TOLERANCE:
        logger.warning(f"{label}: truncation loss {loss:.3e} exceeds tolerance {TRUNCATION_TOLERANCE:.1e}")
        return True
    if heuristic:
        logger.debug(f"{label}: amplitude close to the truncation edge (heuristic)")
        return True
    return False


def number_state(n: int, dim: int) -> FockVector:
    """Fock state |n>"""
    dim = check_dim(dim)
    if not 0 <= n < dim:
        raise InvalidArgumentError(f"Photon number {n} outside truncation 0..{dim - 1}")
    amplitudes = np.zeros(dim, dtype=complex)
    amplitudes[n] = 1.0
    return FockVector(dim, amplitudes)


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """Raw amplitudes exp(-|a|^2/2) a^n / sqrt(n!) for n < dim"""
    amplitudes = np.empty(dim, dtype=complex)
    amplitudes[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, dim):
        amplitudes[n] = amplitudes[n - 1] * alpha / math.sqrt(n)
    return amplitudes


def coherent_state(alpha: complex, dim: int) -> FockVector:
    """
    Coherent state |alpha> truncated to dim levels

    Args:
        alpha: Complex amplitude
        dim: Truncation dimension D >= 2

    Returns:
        FockVector whose truncation_loss is 1 - norm^2
    """
    dim = check_dim(dim)
    amplitudes = coherent_amplitudes(complex(alpha), dim)
    loss = max(0.0, 1.0 - float(np.vdot(amplitudes, amplitudes).real))
    heuristic = abs(alpha) ** 2 > dim - 6 * math.sqrt(dim)
    flag = _warn_truncation(f"coherent_state(alpha={alpha}, D={dim})", loss, heuristic)
    return FockVector(dim, amplitudes, 1, loss, flag)


def poisson_number_mixture(mag: float, dim: int) -> FockOperator:
    """Number-diagonal mixture with Poissonian weights of mean mag^2"""
    dim = check_dim(dim)
    if mag < 0:
        raise InvalidArgumentError(f"Amplitude magnitude must be >= 0, got {mag}")
    mean = mag ** 2
    n = np.arange(dim)
    weights = np.exp(xlogy(n, mean) - mean - gammaln(n + 1))
    loss = max(0.0, 1.0 - float(weights.sum()))
    flag = _warn_truncation(f"poisson_number_mixture(|alpha|={mag}, D={dim})", loss)
    return FockOperator(dim, np.diag(weights).astype(complex), 1, loss, flag)


def phase_grid(points: int) -> np.ndarray:
    """Uniform angles 2*pi*k/points"""
    return 2 * np.pi * np.arange(points) / points


def phase_average(mag: float, dim: int, points: int) -> FockOperator:
    """
    Uniform-grid average of |mag e^{i phi}><mag e^{i phi}| over phi_k = 2 pi k / points

    For points >= 2*dim - 1 the grid integrates every matrix element exactly,
    so the result equals poisson_number_mixture up to floating error.
    """
    dim = check_dim(dim)
    if points < 1:
        raise InvalidArgumentError(f"Phase average needs at least one point, got {points}")
    if mag < 0:
        raise InvalidArgumentError(f"Amplitude magnitude must be >= 0, got {mag}")
    base = coherent_amplitudes(mag, dim)
    n = np.arange(dim)
    columns = base[:, None] * np.exp(1j * np.outer(n, phase_grid(points)))
    rho = columns @ columns.conj().T / points
    loss = max(0.0, 1.0 - float(np.trace(rho).real))
    flag = _warn_truncation(f"phase_average(|alpha|={mag}, D={dim}, M={points})", loss)
    return FockOperator(dim, rho, 1, loss, flag)


def two_mode_squeezed(r: float, phi: float, dim: int) -> FockVector:
    """
    Two-mode squeezed vacuum sum_n (e^{2i phi} tanh r)^n |n,n> / cosh r

    The pump phase enters twice per photon pair.
    """
    dim = check_capacity(dim)
    if r < 0:
        raise InvalidArgumentError(f"Squeeze parameter must be >= 0, got {r}")
    ratio = np.exp(2j * phi) * math.tanh(r)
    amplitudes = np.zeros((dim, dim), dtype=complex)
    n = np.arange(dim)
    amplitudes[n, n] = ratio ** n / math.cosh(r)
    loss = math.tanh(r) ** (2 * dim)
    flag = _warn_truncation(f"two_mode_squeezed(r={r}, D={dim})", loss)
    return FockVector(dim, amplitudes, 2, loss, flag)


def thermal_state(mean_photons: float, dim: int) -> FockOperator:
    """Geometric number distribution with the given mean"""
    dim = check_dim(dim)
    if mean_photons < 0:
        raise InvalidArgumentError(f"Mean photon number must be >= 0, got {mean_photons}")
    n = np.arange(dim)
    weights = (1.0 / (1.0 + mean_photons)) * (mean_photons / (1.0 + mean_photons)) ** n
    loss = max(0.0, 1.0 - float(weights.sum()))
    return FockOperator(dim, np.diag(weights).astype(complex), 1, loss, loss > TRUNCATION_TOLERANCE)


def mixture(vectors: Sequence[FockVector], weights: Sequence[float]) -> FockOperator:
    """Density operator sum_k w_k |v_k><v_k|"""
    if len(vectors) == 0 or len(vectors) != len(weights):
        raise InvalidArgumentError("mixture needs equally many vectors and weights")
    dim, modes = vectors[0].dim, vectors[0].modes
    for vector in vectors:
        if vector.dim != dim or vector.modes != modes:
            raise DimensionMismatchError("All mixture components must share dimension and mode count")
    weights = np.asarray(weights, dtype=float)
    columns = np.stack([v.amplitudes for v in vectors], axis=1)
    rho = (columns * weights[None, :]) @ columns.conj().T
    loss = max(0.0, float(weights.sum()) - float(np.trace(rho).real))
    flag = any(v.truncation_warning for v in vectors)
    return FockOperator(dim, rho, modes, loss, flag)


def tensor(first: FockOperator, second: FockOperator) -> FockOperator:
    """Two-mode product first (x) second of single-mode operators"""
    if first.modes != 1 or second.modes != 1:
        raise DimensionMismatchError("tensor expects two single-mode operators")
    if first.dim != second.dim:
        raise DimensionMismatchError(f"Dimensions differ: {first.dim} vs {second.dim}")
    check_capacity(first.dim)
    loss = max(0.0, 1.0 - first.trace * second.trace)
    return FockOperator(first.dim, np.kron(first.entries, second.entries), 2, loss,
                        first.truncation_warning or second.truncation_warning)
