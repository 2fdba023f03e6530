"""Exception hierarchy for the laser phase laboratory"""


class LaserLabError(Exception):
    """Base class for all library errors"""


class InvalidDimensionError(LaserLabError, ValueError):
    """Truncation dimension below 2"""


class InvalidArgumentError(LaserLabError, ValueError):
    """Argument outside its documented domain"""


class DimensionMismatchError(LaserLabError, ValueError):
    """Operands live on incompatible spaces"""


class InvalidStateError(LaserLabError, ValueError):
    """Covariance matrix violates the uncertainty principle"""


class ImpossibleEvidenceError(LaserLabError):
    """Bayes update left no probability mass; signals a modeling bug"""


class CapacityError(LaserLabError):
    """Requested dense representation is too large"""


class TruncationError(LaserLabError):
    """Truncation loss exceeds the hard limit of an experiment"""


class ConfigError(LaserLabError):
    """Invalid run configuration"""

    def __init__(self, message: str, key: str = None):
        super().__init__(message)
        self.key = key
