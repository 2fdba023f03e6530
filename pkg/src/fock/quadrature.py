import math

import numpy as np

from .states import check_dim


def hermite_functions(points: np.ndarray, dim: int) -> np.ndarray:
    """
    Number-state wavefunctions psi_n(x) = <x|n> with vacuum variance 1/2

    Args:
        points: Quadrature values
        dim: Number of levels

    Returns:
        Real array of shape (len(points), dim)
    """
    dim = check_dim(dim)
    x = np.atleast_1d(np.asarray(points, dtype=float))
    values = np.empty((x.size, dim))
    values[:, 0] = math.pi ** -0.25 * np.exp(-x ** 2 / 2)
    values[:, 1] = math.sqrt(2.0) * x * values[:, 0]
    for n in range(1, dim - 1):
        values[:, n + 1] = math.sqrt(2.0 / (n + 1)) * x * values[:, n] - math.sqrt(n / (n + 1)) * values[:, n - 1]
    return values


def quadrature_bra(points: np.ndarray, theta: float, dim: int) -> np.ndarray:
    """
    Rows <x_theta|n> = e^{-i n theta} psi_n(x) for the rotated quadrature
    x_theta = (a e^{-i theta} + a^dag e^{i theta}) / sqrt(2); theta = pi/2 gives p
    """
    phases = np.exp(-1j * theta * np.arange(dim))
    return hermite_functions(points, dim) * phases[None, :]


def quadrature_extent(dim: int) -> float:
    """Half-width beyond which every truncated wavefunction is negligible"""
    return math.sqrt(2 * dim + 1) + 4.0
