import math

import numpy as np
import pytest
from scipy.linalg import expm

from src.fock.metrics import trace_distance, fidelity, log_negativity, expectation_number, state_metrics
from src.fock.operators import (annihilation, displacement_matrix, displacement_apply, beamsplitter_unitary,
                                beamsplitter_apply, partial_trace, partial_transpose_min_eig, swap_modes)
from src.fock.quadrature import hermite_functions, quadrature_bra
from src.fock.states import (FockVector, FockOperator, number_state, coherent_state, poisson_number_mixture,
                             phase_average, two_mode_squeezed, thermal_state, mixture, tensor)
from src.utils.errors import InvalidDimensionError, InvalidArgumentError, DimensionMismatchError, CapacityError


def test_dimension_must_be_at_least_two():
    with pytest.raises(InvalidDimensionError):
        coherent_state(0.5, 1)
    assert coherent_state(0.5, 2).dim == 2


def test_coherent_zero_is_vacuum():
    state = coherent_state(0, 5)
    assert np.allclose(state.amplitudes, number_state(0, 5).amplitudes)
    assert state.truncation_loss == 0.0


def test_coherent_truncation_loss_is_tail_weight():
    state = coherent_state(2.0, 6)
    n = np.arange(6)
    poisson = np.exp(-4.0) * 4.0 ** n / np.array([math.factorial(k) for k in n])
    assert state.truncation_loss == pytest.approx(1 - poisson.sum(), abs=1e-14)
    assert state.truncation_warning


def test_state_arrays_are_read_only():
    state = coherent_state(1.0, 8)
    with pytest.raises(ValueError):
        state.amplitudes[0] = 0


@pytest.mark.parametrize("mag", [0.5, 1.0, 2.0])
def test_phase_average_equals_poisson_mixture(mag):
    dim = int(math.ceil(mag ** 2 + 6 * mag + 10))
    averaged = phase_average(mag, dim, 2 * dim)
    assert trace_distance(averaged, poisson_number_mixture(mag, dim)) < 1e-10


def test_coarse_phase_average_keeps_coherences():
    assert trace_distance(phase_average(1.0, 12, 1), poisson_number_mixture(1.0, 12)) > 0.1


def test_poisson_mixture_rejects_negative_magnitude():
    with pytest.raises(InvalidArgumentError):
        poisson_number_mixture(-1.0, 5)


def test_displacement_closed_form_matches_large_exponential():
    beta = 0.4 - 0.3j
    big = 60
    a = annihilation(big)
    reference = expm(beta * a.conj().T - np.conj(beta) * a)[:10, :10]
    assert np.allclose(displacement_matrix(beta, 10), reference, atol=1e-10)


def test_displacement_of_vacuum_is_coherent():
    beta = 0.7 + 0.2j
    displaced = displacement_apply(beta, number_state(0, 20))
    assert abs(np.vdot(coherent_state(beta, 20).amplitudes, displaced.amplitudes)) == pytest.approx(1.0, abs=1e-10)


def test_displacement_tracks_norm_loss():
    displaced = displacement_apply(3.0, number_state(0, 6))
    assert displaced.truncation_loss > 0.1
    assert displaced.truncation_warning


def test_displacement_rejects_two_mode_state():
    with pytest.raises(DimensionMismatchError):
        displacement_apply(0.1, two_mode_squeezed(0.2, 0.0, 4))


def test_beamsplitter_is_unitary():
    unitary = beamsplitter_unitary(6)
    assert np.allclose(unitary @ unitary.conj().T, np.eye(36), atol=1e-10)


def test_beamsplitter_single_photon_convention():
    dim = 4
    photon = np.zeros(dim * dim, dtype=complex)
    photon[1 * dim + 0] = 1.0
    out = beamsplitter_apply(FockVector(dim, photon, 2)).amplitudes
    assert out[1 * dim + 0] == pytest.approx(1 / math.sqrt(2))
    assert out[0 * dim + 1] == pytest.approx(-1 / math.sqrt(2))


def test_beamsplitter_on_coherent_pair():
    dim = 16
    alpha, beta = 0.6, 0.3j
    pair = np.kron(coherent_state(alpha, dim).amplitudes, coherent_state(beta, dim).amplitudes)
    out = beamsplitter_apply(FockVector(dim, pair, 2)).amplitudes
    expected = np.kron(coherent_state((alpha + beta) / math.sqrt(2), dim).amplitudes,
                       coherent_state((beta - alpha) / math.sqrt(2), dim).amplitudes)
    assert abs(np.vdot(expected, out)) == pytest.approx(1.0, abs=1e-8)


def test_beamsplitter_needs_two_modes():
    with pytest.raises(DimensionMismatchError):
        beamsplitter_apply(coherent_state(0.1, 4))


def test_squeezed_marginal_is_thermal():
    r = 0.5
    reduced = partial_trace(two_mode_squeezed(r, 0.7, 20), keep=1)
    assert trace_distance(reduced, thermal_state(math.sinh(r) ** 2, 20)) < 1e-6
    assert expectation_number(reduced) == pytest.approx(math.sinh(r) ** 2, abs=1e-5)


def test_squeezed_truncation_loss():
    state = two_mode_squeezed(0.4, 0.0, 10)
    assert state.truncation_loss == pytest.approx(math.tanh(0.4) ** 20)
    assert state.norm_squared == pytest.approx(1 - state.truncation_loss, abs=1e-14)


def test_partial_transpose_detects_entanglement():
    assert partial_transpose_min_eig(two_mode_squeezed(0.4, 0.0, 14)) < -0.01
    product = tensor(thermal_state(0.5, 6), poisson_number_mixture(0.8, 6))
    assert partial_transpose_min_eig(product) >= -1e-12


def test_partial_transpose_rejects_non_hermitian():
    entries = np.zeros((9, 9), dtype=complex)
    entries[0, 1] = 1.0
    with pytest.raises(InvalidArgumentError):
        partial_transpose_min_eig(FockOperator(3, entries, 2))


def test_log_negativity_matches_closed_form():
    r = 0.3
    assert log_negativity(two_mode_squeezed(r, 0.0, 20)) == pytest.approx(2 * r / math.log(2), abs=0.02)
    assert log_negativity(tensor(thermal_state(0.3, 5), thermal_state(0.3, 5))) == pytest.approx(0.0, abs=1e-12)


def test_swap_exchanges_marginals():
    product = tensor(number_state(1, 3).to_operator(), number_state(0, 3).to_operator())
    swapped = swap_modes(product)
    assert expectation_number(swapped, 0) == pytest.approx(0.0)
    assert expectation_number(swapped, 1) == pytest.approx(1.0)


def test_mixture_validates_inputs():
    with pytest.raises(InvalidArgumentError):
        mixture([], [])
    with pytest.raises(DimensionMismatchError):
        mixture([number_state(0, 3), number_state(0, 4)], [0.5, 0.5])
    rho = mixture([number_state(0, 3), number_state(1, 3)], [0.25, 0.75])
    assert rho.is_density()
    assert np.allclose(np.diag(rho.entries).real, [0.25, 0.75, 0.0])


def test_tensor_rejects_unequal_dimensions():
    with pytest.raises(DimensionMismatchError):
        tensor(thermal_state(0.1, 3), thermal_state(0.1, 4))


def test_metrics_extremes():
    zero, one = number_state(0, 4).to_operator(), number_state(1, 4).to_operator()
    assert trace_distance(zero, zero) == pytest.approx(0.0, abs=1e-12)
    assert fidelity(zero, zero) == pytest.approx(1.0)
    metrics = state_metrics(zero, one)
    assert metrics.trace_distance == pytest.approx(1.0)
    assert metrics.fidelity == pytest.approx(0.0, abs=1e-12)


def test_hermite_functions_are_orthonormal():
    x = np.linspace(-12, 12, 2401)
    values = hermite_functions(x, 12)
    gram = values.T @ values * (x[1] - x[0])
    assert np.allclose(gram, np.eye(12), atol=1e-10)


def test_coherent_quadrature_density():
    alpha = 0.8
    x = np.linspace(-8, 8, 1601)
    amplitude = quadrature_bra(x, 0.0, 20) @ coherent_state(alpha, 20).amplitudes
    density = np.abs(amplitude) ** 2
    step = x[1] - x[0]
    mean = np.sum(x * density) * step
    variance = np.sum((x - mean) ** 2 * density) * step
    assert mean == pytest.approx(math.sqrt(2) * alpha, abs=1e-8)
    assert variance == pytest.approx(0.5, abs=1e-8)


def test_displacement_moves_coherent_state_with_phase():
    alpha, beta = 0.5 + 0.3j, -0.2 + 0.6j
    displaced = displacement_apply(beta, coherent_state(alpha, 40)).amplitudes
    expected = np.exp(1j * (beta * np.conj(alpha)).imag) * coherent_state(alpha + beta, 40).amplitudes
    assert np.allclose(displaced, expected, atol=1e-10)


def test_displacements_compose_up_to_phase():
    beta, gamma = 0.3 - 0.4j, 0.5 + 0.1j
    product = displacement_matrix(beta, 40) @ displacement_matrix(gamma, 40)
    expected = np.exp(1j * (beta * np.conj(gamma)).imag) * displacement_matrix(beta + gamma, 40)
    assert np.allclose(product[:10, :10], expected[:10, :10], atol=1e-10)
    inverse = displacement_matrix(-beta, 40) @ displacement_matrix(beta, 40)
    assert np.allclose(inverse[:10, :10], np.eye(10), atol=1e-10)


def test_squeezed_vacuum_matches_exponential():
    r, phi, big = 0.3, 0.4, 20
    a = annihilation(big)
    a1, a2 = np.kron(a, np.eye(big)), np.kron(np.eye(big), a)
    generator = r * (np.exp(2j * phi) * a1.conj().T @ a2.conj().T - np.exp(-2j * phi) * a1 @ a2)
    column = expm(generator)[:, 0].reshape(big, big).diagonal()[:10]
    closed = two_mode_squeezed(r, phi, 10).amplitudes.reshape(10, 10).diagonal()
    assert np.allclose(closed, column, atol=1e-8)


def test_coarse_phase_average_aliases_by_grid_size():
    entries = phase_average(1.0, 12, 3).entries
    m, n = np.meshgrid(np.arange(12), np.arange(12), indexing="ij")
    assert np.allclose(entries[(m - n) % 3 != 0], 0.0, atol=1e-14)
    assert abs(entries[3, 0]) > 0.05
    assert abs(entries[6, 3]) > 1e-3


def test_two_mode_capacity_is_enforced():
    with pytest.raises(CapacityError):
        beamsplitter_unitary(21)
    with pytest.raises(CapacityError):
        two_mode_squeezed(0.1, 0.0, 21)
    with pytest.raises(CapacityError):
        tensor(thermal_state(0.1, 21), thermal_state(0.1, 21))
    assert beamsplitter_unitary(20).shape == (400, 400)


def test_only_one_or_two_modes():
    with pytest.raises(InvalidArgumentError):
        FockVector(3, np.zeros(27), 3)
    with pytest.raises(InvalidArgumentError):
        FockOperator(2, np.eye(8), 3)
