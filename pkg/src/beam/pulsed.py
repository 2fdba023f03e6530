from dataclasses import dataclass
import logging

import numpy as np

from src.fock.states import FockOperator
from src.inference.posterior import PhasePosterior
from .base import BaseBeam, BeamRealization

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProductBeamState(BaseBeam):
    """
    Product of identical phase-averaged packets, (rho_|a0|)^{(x)N}

    What a pulsed source with a fresh random phase per pulse emits. Each
    packet draws its own phase from `posterior`.
    """
    mag: float
    n_packets: int
    posterior: PhasePosterior

    def __post_init__(self):
        self._validate()

    def reduced_state(self, k: int, dim: int) -> FockOperator:
        dim = self._check_packets(k, dim)
        support = np.nonzero(self.posterior.weights)[0]
        weights = self.posterior.weights[support]
        columns = self._packet_columns(self.posterior.angles[support], 1, dim)
        single = (columns * weights[None, :]) @ columns.conj().T
        rho = single if k == 1 else np.kron(single, single)
        return self._operator(rho, dim, k)

    def sample_realization(self, seed) -> BeamRealization:
        rng = np.random.default_rng(seed)
        draws = rng.choice(self.posterior.grid_size, size=max(self.n_packets, 1), p=self.posterior.weights)
        phases = self.posterior.angles[draws][:self.n_packets]
        return BeamRealization(float(self.posterior.angles[draws[0]]), phases, self._labels(phases))
