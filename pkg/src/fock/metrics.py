from dataclasses import dataclass
from typing import Optional, Union
import logging

import numpy as np

from src.utils.errors import DimensionMismatchError, InvalidArgumentError
from .states import FockVector, FockOperator
from .operators import partial_transpose

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StateMetrics:
    trace_distance: float
    fidelity: float


def _as_operator(state: Union[FockVector, FockOperator]) -> FockOperator:
    return state.to_operator() if isinstance(state, FockVector) else state


def _hermitian_part(matrix: np.ndarray) -> np.ndarray:
    return (matrix + matrix.conj().T) / 2


def _psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    values, vectors = np.linalg.eigh(_hermitian_part(matrix))
    return (vectors * np.sqrt(np.clip(values, 0.0, None))[None, :]) @ vectors.conj().T


def trace_distance(a: FockOperator, b: FockOperator) -> float:
    """Half the trace norm of a - b, clipped to [0, 1]"""
    a, b = _as_operator(a), _as_operator(b)
    if a.entries.shape != b.entries.shape:
        raise DimensionMismatchError(f"Operators differ in shape: {a.entries.shape} vs {b.entries.shape}")
    values = np.linalg.eigvalsh(_hermitian_part(a.entries - b.entries))
    return float(np.clip(0.5 * np.abs(values).sum(), 0.0, 1.0))


def fidelity(a: FockOperator, b: FockOperator) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2, clipped to [0, 1]"""
    a, b = _as_operator(a), _as_operator(b)
    if a.entries.shape != b.entries.shape:
        raise DimensionMismatchError(f"Operators differ in shape: {a.entries.shape} vs {b.entries.shape}")
    root = _psd_sqrt(a.entries)
    values = np.linalg.eigvalsh(_hermitian_part(root @ b.entries @ root))
    return float(np.clip(np.sqrt(np.clip(values, 0.0, None)).sum() ** 2, 0.0, 1.0))


def state_metrics(a: FockOperator, b: FockOperator) -> StateMetrics:
    """Trace distance and fidelity between two density operators"""
    return StateMetrics(trace_distance(a, b), fidelity(a, b))


def log_negativity(state: Union[FockVector, FockOperator]) -> float:
    """
    Logarithmic negativity log2 ||rho^{T_B}||_1 in bits (Fock route)

    The trace norm is divided by the trace so truncated states are compared
    on equal footing; the result is floored at zero.
    """
    state = _as_operator(state)
    trace = state.trace
    if trace <= 0:
        raise InvalidArgumentError("log_negativity needs a positive-trace operator")
    norm = np.abs(np.linalg.eigvalsh(partial_transpose(state))).sum() / trace
    return max(0.0, float(np.log2(norm)))


def expectation_number(state: Union[FockVector, FockOperator], mode: Optional[int] = None) -> float:
    """Mean photon number of a single-mode state, or of `mode` in a two-mode state"""
    state = _as_operator(state)
    d = state.dim
    n = np.arange(d)
    if state.modes == 1:
        return float(np.real(np.diag(state.entries)) @ n)
    if mode not in (0, 1):
        raise InvalidArgumentError("Two-mode expectation needs mode 0 or 1")
    occupation = np.kron(n, np.ones(d)) if mode == 0 else np.kron(np.ones(d), n)
    return float(np.real(np.diag(state.entries)) @ occupation)
