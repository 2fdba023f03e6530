from abc import ABC, abstractmethod
from dataclasses import dataclass
import logging

import numpy as np

from config.settings import MAX_DENSE_PACKETS, MAX_DENSE_SIDE, TRUNCATION_TOLERANCE
from src.fock.states import FockOperator, coherent_amplitudes, check_dim
from src.utils.errors import InvalidArgumentError, CapacityError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BeamRealization:
    """One draw of the beam: a phase per packet and the matching coherent labels"""
    phi: float
    phases: np.ndarray
    labels: np.ndarray


class BaseBeam(ABC):
    """Base class for packetized beams (magnitude |alpha_0|, packet count, phase law)"""

    mag: float
    n_packets: int

    def _validate(self):
        if self.mag < 0:
            raise InvalidArgumentError(f"Packet amplitude magnitude must be >= 0, got {self.mag}")
        if self.n_packets < 0 or int(self.n_packets) != self.n_packets:
            raise InvalidArgumentError(f"Packet count must be a nonnegative integer, got {self.n_packets}")

    def _check_packets(self, k: int, dim: int) -> int:
        """Validate a k-packet reduction request and return the checked dimension"""
        dim = check_dim(dim)
        if k < 1 or k > self.n_packets:
            raise InvalidArgumentError(f"Cannot reduce to {k} packets of a beam with {self.n_packets}")
        if k > MAX_DENSE_PACKETS or dim ** k > MAX_DENSE_SIDE:
            raise CapacityError(f"{k}-packet dense state at D={dim} exceeds the dense limit")
        return dim

    def _labels(self, phases: np.ndarray) -> np.ndarray:
        return self.mag * np.exp(1j * phases)

    def _packet_columns(self, angles: np.ndarray, k: int, dim: int) -> np.ndarray:
        """Columns (|mag e^{i phi}>)^{(x)k} for each angle, shape (dim^k, len(angles))"""
        single = coherent_amplitudes(self.mag, dim)[:, None] * np.exp(1j * np.outer(np.arange(dim), angles))
        if k == 1:
            return single
        return np.einsum("is,js->ijs", single, single).reshape(dim * dim, angles.size)

    @staticmethod
    def _operator(rho: np.ndarray, dim: int, k: int) -> FockOperator:
        loss = max(0.0, 1.0 - float(np.trace(rho).real))
        return FockOperator(dim, rho, k, loss, loss > TRUNCATION_TOLERANCE)

    @abstractmethod
    def reduced_state(self, k: int, dim: int) -> FockOperator:
        """
        Dense state of any k packets

        Returns:
            FockOperator on k modes
        """
        pass

    @abstractmethod
    def sample_realization(self, seed) -> BeamRealization:
        """
        Draw the per-packet phases of one realization

        Args:
            seed: int, numpy SeedSequence or Generator

        Returns:
            BeamRealization
        """
        pass
