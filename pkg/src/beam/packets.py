import logging
import math

from config.settings import PHASE_GRID_POINTS
from src.fock.states import FockOperator
from src.inference.posterior import PhasePosterior, uniform_posterior
from src.utils.errors import InvalidArgumentError
from .base import BaseBeam, BeamRealization
from .exchangeable import ExchangeableBeamState, BeamProvenance
from .pulsed import ProductBeamState

logger = logging.getLogger(__name__)


def packet_amplitude(kappa_t: float, alpha: complex, phi: float) -> complex:
    """Coherent amplitude sqrt(kappa T) alpha e^{i phi} of every packet of duration T"""
    if kappa_t <= 0:
        raise InvalidArgumentError(f"kappa*T must be positive, got {kappa_t}")
    return math.sqrt(kappa_t) * complex(alpha) * complex(math.cos(phi), math.sin(phi))


def make_beam(mag: float, n_packets: int, posterior: PhasePosterior = None,
              grid_size: int = PHASE_GRID_POINTS) -> ExchangeableBeamState:
    """Beam of n_packets sharing one global phase, uniform unless a posterior is given"""
    if mag < 0:
        raise InvalidArgumentError(f"Packet amplitude magnitude must be >= 0, got {mag}")
    posterior = posterior if posterior is not None else uniform_posterior(grid_size)
    return ExchangeableBeamState(float(mag), int(n_packets), posterior)


def make_beam_from_cavity(kappa_t: float, alpha: complex, n_packets: int,
                          grid_size: int = PHASE_GRID_POINTS) -> ExchangeableBeamState:
    """Beam emitted by a cavity of amplitude alpha, keeping the provenance"""
    mag = abs(packet_amplitude(kappa_t, alpha, 0.0))
    return ExchangeableBeamState(mag, int(n_packets), uniform_posterior(grid_size),
                                 BeamProvenance(float(kappa_t), complex(alpha)))


def make_product_beam(mag: float, n_packets: int, posterior: PhasePosterior = None,
                      grid_size: int = PHASE_GRID_POINTS) -> ProductBeamState:
    """Control model with an independent phase per packet"""
    posterior = posterior if posterior is not None else uniform_posterior(grid_size)
    return ProductBeamState(float(mag), int(n_packets), posterior)


def reduced_state(beam: BaseBeam, k: int, dim: int) -> FockOperator:
    """State of any k packets of the beam"""
    return beam.reduced_state(k, dim)


def sample_realization(beam: BaseBeam, seed) -> BeamRealization:
    """Phases and coherent labels of one realization, deterministic given the seed"""
    return beam.sample_realization(seed)
