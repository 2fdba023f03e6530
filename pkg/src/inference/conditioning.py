import logging
from typing import Sequence

from src.beam.exchangeable import ExchangeableBeamState
from src.utils.errors import InvalidArgumentError
from .posterior import bayes_update, bayes_update_log

logger = logging.getLogger(__name__)


def condition_beam(beam: ExchangeableBeamState, likelihood: Sequence[float], measured: int = 1,
                   log: bool = False) -> ExchangeableBeamState:
    """
    Condition a beam on measurement results from `measured` of its packets

    Args:
        beam: Beam before measurement
        likelihood: Phase likelihood of the data on the posterior grid
        measured: Number of packets consumed by the measurement
        log: Whether `likelihood` is given as a logarithm

    Returns:
        Beam on the remaining packets with the Bayes-updated posterior
    """
    if measured < 0 or measured > beam.n_packets:
        raise InvalidArgumentError(f"Cannot measure {measured} of {beam.n_packets} packets")
    update = bayes_update_log if log else bayes_update
    posterior = update(beam.posterior, likelihood)
    logger.debug(f"Conditioned beam on {measured} packet(s); {beam.n_packets - measured} remain")
    return ExchangeableBeamState(beam.mag, beam.n_packets - measured, posterior, beam.provenance)
