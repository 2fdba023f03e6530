from dataclasses import dataclass
from typing import Optional
import logging

import numpy as np

from src.fock.states import FockOperator
from src.inference.posterior import PhasePosterior
from .base import BaseBeam, BeamRealization

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BeamProvenance:
    """Cavity origin of a beam; only the product kappa*T is observable"""
    kappa_t: float
    cavity_alpha: complex


@dataclass(frozen=True)
class ExchangeableBeamState(BaseBeam):
    """
    CW beam as N packets sharing one unknown global phase

    The state is integral dphi P(phi) (|a0 e^{i phi}><a0 e^{i phi}|)^{(x)N}. No
    per-packet data is stored, so every packet is interchangeable.
    """
    mag: float
    n_packets: int
    posterior: PhasePosterior
    provenance: Optional[BeamProvenance] = None

    def __post_init__(self):
        self._validate()

    def reduced_state(self, k: int, dim: int) -> FockOperator:
        dim = self._check_packets(k, dim)
        support = np.nonzero(self.posterior.weights)[0]
        weights = self.posterior.weights[support]
        columns = self._packet_columns(self.posterior.angles[support], k, dim)
        rho = (columns * weights[None, :]) @ columns.conj().T
        return self._operator(rho, dim, k)

    def sample_realization(self, seed) -> BeamRealization:
        rng = np.random.default_rng(seed)
        phi = float(self.posterior.angles[rng.choice(self.posterior.grid_size, p=self.posterior.weights)])
        phases = np.full(self.n_packets, phi)
        return BeamRealization(phi, phases, self._labels(phases))
