import math

import numpy as np
import pytest
from scipy.stats import kstest

from config.settings import TRUNCATION_TOLERANCE
from src.beam.packets import (packet_amplitude, make_beam, make_beam_from_cavity, make_product_beam,
                              reduced_state, sample_realization)
from src.fock.metrics import trace_distance
from src.fock.operators import partial_trace, swap_modes
from src.fock.states import poisson_number_mixture, tensor, coherent_state, coherent_amplitudes
from src.inference.conditioning import condition_beam
from src.inference.posterior import delta_posterior
from src.utils.errors import InvalidArgumentError, CapacityError


def test_single_packet_is_poisson_mixture():
    beam = make_beam(1.0, 4)
    assert trace_distance(reduced_state(beam, 1, 16), poisson_number_mixture(1.0, 16)) < 1e-10


def test_two_packets_are_correlated():
    beam = make_beam(1.0, 2)
    single = reduced_state(beam, 1, 16)
    assert trace_distance(reduced_state(beam, 2, 16), tensor(single, single)) > 0.1


def test_pair_marginal_is_single_packet():
    beam = make_beam(0.8, 3)
    pair = reduced_state(beam, 2, 12)
    assert trace_distance(partial_trace(pair, 0), reduced_state(beam, 1, 12)) < 1e-10


def test_product_beam_pair_is_product():
    beam = make_product_beam(1.0, 2)
    single = reduced_state(beam, 1, 12)
    assert trace_distance(reduced_state(beam, 2, 12), tensor(single, single)) < 1e-12


def test_known_phase_gives_coherent_packets():
    beam = make_beam(0.7, 2, delta_posterior(64, 0.0))
    assert trace_distance(reduced_state(beam, 1, 14), coherent_state(0.7, 14).to_operator()) < 1e-10


def test_reduction_limits():
    beam = make_beam(1.0, 3)
    with pytest.raises(CapacityError):
        reduced_state(beam, 3, 4)
    with pytest.raises(CapacityError):
        reduced_state(beam, 2, 30)
    with pytest.raises(InvalidArgumentError):
        reduced_state(make_beam(1.0, 1), 2, 4)


def test_invalid_beams():
    with pytest.raises(InvalidArgumentError):
        make_beam(-1.0, 3)
    with pytest.raises(InvalidArgumentError):
        packet_amplitude(0.0, 1.0, 0.0)


def test_cavity_beam_magnitude_and_provenance():
    beam = make_beam_from_cavity(0.25, 4.0, 10)
    assert beam.mag == pytest.approx(2.0)
    assert beam.provenance.kappa_t == 0.25
    assert packet_amplitude(0.25, 4.0, math.pi / 2) == pytest.approx(2j)


def test_realization_shares_one_phase():
    realization = sample_realization(make_beam(1.5, 6, grid_size=32), 11)
    assert np.all(realization.phases == realization.phi)
    assert np.allclose(realization.labels, 1.5 * np.exp(1j * realization.phi))
    assert realization.phi in set(2 * np.pi * np.arange(32) / 32)


def test_realization_is_deterministic():
    beam = make_beam(1.0, 4)
    assert sample_realization(beam, 5).phi == sample_realization(beam, 5).phi


def test_product_realization_draws_per_packet():
    realization = sample_realization(make_product_beam(1.0, 50, grid_size=64), 3)
    assert len(set(realization.phases)) > 10


def test_delta_beam_always_samples_its_phase():
    beam = make_beam(1.0, 3, delta_posterior(16, math.pi / 2))
    assert all(sample_realization(beam, s).phi == pytest.approx(math.pi / 2) for s in range(5))


def test_realized_phase_is_uniform():
    beam = make_beam(1.0, 1, grid_size=256)
    draws = np.array([sample_realization(beam, s).phi for s in range(5000)]) / (2 * math.pi)
    assert kstest(draws, "uniform").statistic < 1.63 / math.sqrt(draws.size) + 1 / 256


@pytest.mark.parametrize("build", [make_beam, make_product_beam])
def test_pair_state_is_symmetric(build):
    pair = reduced_state(build(0.9, 3, grid_size=64), 2, 12)
    assert np.allclose(swap_modes(pair).entries, pair.entries, atol=1e-14)


def test_heterodyne_on_one_packet_matches_conditioned_beam():
    dim = 16
    beam = make_beam(0.8, 2, grid_size=64)
    outcome = coherent_amplitudes(0.9 * np.exp(0.7j), dim)
    projector = np.outer(outcome, outcome.conj())
    pair = reduced_state(beam, 2, dim).entries.reshape(dim, dim, dim, dim)
    direct = np.einsum("ki,ijkl->jl", projector, pair)
    direct /= np.trace(direct)

    likelihood = [abs(np.vdot(outcome, coherent_amplitudes(0.8 * np.exp(1j * phi), dim))) ** 2
                  for phi in beam.posterior.angles]
    remaining = reduced_state(condition_beam(beam, likelihood), 1, dim).entries
    assert np.allclose(direct, remaining / np.trace(remaining), atol=1e-12)


def test_reduced_state_flags_truncation_against_tolerance():
    lossy = reduced_state(make_beam(2.0, 1), 1, 6)
    assert lossy.truncation_loss > TRUNCATION_TOLERANCE
    assert lossy.truncation_warning
    assert not reduced_state(make_beam(0.5, 1), 1, 20).truncation_warning
