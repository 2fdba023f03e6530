from functools import lru_cache
from typing import Union
import logging
import math

import numpy as np
from scipy.linalg import expm
from scipy.special import eval_genlaguerre, gammaln

from config.settings import TRUNCATION_TOLERANCE, HERMITIAN_TOLERANCE
from src.utils.errors import InvalidArgumentError, DimensionMismatchError
from .states import FockVector, FockOperator, check_dim, check_capacity

logger = logging.getLogger(__name__)


def annihilation(dim: int) -> np.ndarray:
    """Truncated annihilation operator a"""
    dim = check_dim(dim)
    return np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(complex)


def displacement_matrix(beta: complex, dim: int) -> np.ndarray:
    """
    Matrix elements <m|exp(beta a^dag - beta* a)|n> for m, n < dim

    Uses the closed form sqrt(n!/m!) beta^(m-n) e^{-|beta|^2/2} L_n^(m-n)(|beta|^2)
    for m >= n (and the adjoint relation for m < n), so the block is the exact
    restriction of the infinite-dimensional operator.
    """
    dim = check_dim(dim)
    beta = complex(beta)
    x = abs(beta) ** 2
    m, n = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    low, high = np.minimum(m, n), np.maximum(m, n)
    amplitude = np.where(m >= n, beta, -beta.conjugate())
    prefactor = np.exp(0.5 * (gammaln(low + 1) - gammaln(high + 1)) - x / 2)
    return prefactor * amplitude ** (high - low) * eval_genlaguerre(low, high - low, x)


def displacement_apply(beta: complex, state: Union[FockVector, FockOperator]):
    """
    Apply D_beta to a single-mode vector (D psi) or operator (D rho D^dag)

    Norm (or trace) lost off the truncated block is added to truncation_loss
    and logged when it exceeds the tolerance.
    """
    if state.modes != 1:
        raise DimensionMismatchError("displacement_apply expects a single-mode state")
    matrix = displacement_matrix(beta, state.dim)
    if isinstance(state, FockVector):
        amplitudes = matrix @ state.amplitudes
        lost = state.norm_squared - float(np.vdot(amplitudes, amplitudes).real)
        new_loss = state.truncation_loss + max(0.0, lost)
        flag = state.truncation_warning or lost > TRUNCATION_TOLERANCE
        if lost > TRUNCATION_TOLERANCE:
            logger.warning(f"displacement_apply(beta={beta}): norm loss {lost:.3e} at D={state.dim}")
        return FockVector(state.dim, amplitudes, 1, new_loss, flag)
    entries = matrix @ state.entries @ matrix.conj().T
    lost = state.trace - float(np.trace(entries).real)
    flag = state.truncation_warning or lost > TRUNCATION_TOLERANCE
    if lost > TRUNCATION_TOLERANCE:
        logger.warning(f"displacement_apply(beta={beta}): trace loss {lost:.3e} at D={state.dim}")
    return FockOperator(state.dim, entries, 1, state.truncation_loss + max(0.0, lost), flag)


@lru_cache(maxsize=16)
def beamsplitter_unitary(dim: int) -> np.ndarray:
    """
    50-50 beamsplitter exp(pi/4 (a^dag b - a b^dag)) on two truncated modes

    Heisenberg action (a, b) -> ((a+b)/sqrt2, (b-a)/sqrt2). The generator
    conserves total photon number, so every block with n_a + n_b < dim is exact.
    """
    dim = check_capacity(dim)
    a = annihilation(dim)
    identity = np.eye(dim)
    mode_a = np.kron(a, identity)
    mode_b = np.kron(identity, a)
    generator = mode_a.conj().T @ mode_b - mode_a @ mode_b.conj().T
    unitary = expm((math.pi / 4) * generator)
    unitary.setflags(write=False)
    return unitary


def beamsplitter_apply(state: Union[FockVector, FockOperator]):
    """Apply the fixed 50-50 beamsplitter to a two-mode state"""
    if state.modes != 2:
        raise DimensionMismatchError("beamsplitter_apply expects a two-mode state")
    unitary = beamsplitter_unitary(state.dim)
    if isinstance(state, FockVector):
        return FockVector(state.dim, unitary @ state.amplitudes, 2,
                          state.truncation_loss, state.truncation_warning)
    return FockOperator(state.dim, unitary @ state.entries @ unitary.conj().T, 2,
                        state.truncation_loss, state.truncation_warning)


def _as_two_mode_operator(state: Union[FockVector, FockOperator]) -> FockOperator:
    if isinstance(state, FockVector):
        state = state.to_operator()
    if state.modes != 2:
        raise DimensionMismatchError("Expected a two-mode state")
    return state


def partial_trace(state: Union[FockVector, FockOperator], keep: int) -> FockOperator:
    """Reduce a two-mode state to mode `keep` (0 = A, 1 = B)"""
    state = _as_two_mode_operator(state)
    if keep not in (0, 1):
        raise InvalidArgumentError(f"Mode index must be 0 or 1, got {keep}")
    d = state.dim
    tensor4 = state.entries.reshape(d, d, d, d)
    if keep == 0:
        reduced = np.einsum("ijkj->ik", tensor4)
    else:
        reduced = np.einsum("ijil->jl", tensor4)
    reduced = (reduced + reduced.conj().T) / 2
    return FockOperator(d, reduced, 1, state.truncation_loss, state.truncation_warning)


def partial_transpose(state: Union[FockVector, FockOperator]) -> np.ndarray:
    """Partial transpose over mode B as a dense matrix"""
    state = _as_two_mode_operator(state)
    if not state.is_hermitian(max(HERMITIAN_TOLERANCE, 1e-12 * np.abs(state.entries).max(initial=1.0))):
        raise InvalidArgumentError("Partial transpose test needs a Hermitian operator")
    d = state.dim
    transposed = state.entries.reshape(d, d, d, d).transpose(0, 3, 2, 1).reshape(d * d, d * d)
    return (transposed + transposed.conj().T) / 2


def partial_transpose_min_eig(state: Union[FockVector, FockOperator]) -> float:
    """Smallest eigenvalue of the partial transpose; negative certifies entanglement"""
    return float(np.linalg.eigvalsh(partial_transpose(state)).min())


def swap_modes(state: FockOperator) -> FockOperator:
    """Exchange the two tensor factors of a two-mode operator"""
    state = _as_two_mode_operator(state)
    d = state.dim
    swapped = state.entries.reshape(d, d, d, d).transpose(1, 0, 3, 2).reshape(d * d, d * d)
    return FockOperator(d, swapped, 2, state.truncation_loss, state.truncation_warning)
