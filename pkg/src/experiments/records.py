from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple, Union
import math

import pandas as pd

from config.settings import SCHEMA_VERSION, CONVENTIONS
from src.utils.helpers import to_jsonable
from src.utils.errors import InvalidArgumentError

DETECTORS = ("plus", "minus")


@dataclass
class MeasurementRecord:
    """Ordered detection events (packet_index, detector id or quadrature value, arm)"""
    events: List[Tuple[int, Union[str, float], int]] = field(default_factory=list)

    def append(self, packet_index: int, outcome: Union[str, float], arm: int = 0):
        if self.events and packet_index < self.events[-1][0]:
            raise InvalidArgumentError(f"Packet index {packet_index} precedes {self.events[-1][0]}")
        if isinstance(outcome, str):
            if outcome not in DETECTORS:
                raise InvalidArgumentError(f"Unknown detector '{outcome}'")
        elif not math.isfinite(outcome):
            raise InvalidArgumentError("Quadrature outcomes must be finite")
        self.events.append((int(packet_index), outcome, int(arm)))

    def __len__(self) -> int:
        return len(self.events)

    def counts(self) -> Dict[str, int]:
        return {d: sum(1 for _, o, _ in self.events if o == d) for d in DETECTORS}

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.events, columns=["packet", "outcome", "arm"])


@dataclass
class ExperimentReport:
    """Serializable record of one experiment run"""
    experiment: str
    parameters: Dict[str, Any]
    seed: int
    summary: Dict[str, Any] = field(default_factory=dict)
    verdicts: Dict[str, bool] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)
    traces: Dict[str, pd.DataFrame] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready dictionary with schema version and convention header (traces excluded)"""
        return to_jsonable({
            "schema_version": SCHEMA_VERSION,
            "conventions": CONVENTIONS,
            "experiment": self.experiment,
            "seed": self.seed,
            "parameters": self.parameters,
            "summary": self.summary,
            "verdicts": self.verdicts,
            "passed": self.passed,
            "warnings": self.warnings,
            "traces": sorted(self.traces),
        })
