from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional
import logging
import math

from dotenv import dotenv_values

from config.settings import EXPERIMENT_DEFAULTS, SMOKE_PRESETS, MIN_PHASE_GRID_POINTS, RUN_LEDGER_URL
from src.utils.errors import ConfigError
from src.utils.helpers import parse_complex

logger = logging.getLogger(__name__)

EXPERIMENTS = tuple(EXPERIMENT_DEFAULTS)
MAX_SEED = 2 ** 64 - 1


def _number(kind: Callable, low: float = None, high: float = None) -> Callable:
    def convert(key: str, value: Any):
        try:
            number = kind(value)
        except (TypeError, ValueError):
            raise ConfigError(f"'{key}' expects a {kind.__name__}, got {value!r}", key)
        if isinstance(number, float) and not math.isfinite(number):
            raise ConfigError(f"'{key}' must be finite, got {value!r}", key)
        if low is not None and number < low:
            raise ConfigError(f"'{key}' must be >= {low}, got {number}", key)
        if high is not None and number > high:
            raise ConfigError(f"'{key}' must be <= {high}, got {number}", key)
        return number
    return convert


def _choice(*options: str) -> Callable:
    def convert(key: str, value: Any):
        if str(value) not in options:
            raise ConfigError(f"'{key}' must be one of {options}, got {value!r}", key)
        return str(value)
    return convert


def _magnitudes(key: str, value: Any) -> str:
    """Comma-separated list of nonnegative magnitudes (kept as text)"""
    try:
        values = [float(v) for v in str(value).split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"'{key}' expects comma-separated numbers, got {value!r}", key)
    if not values or any(v < 0 or not math.isfinite(v) for v in values):
        raise ConfigError(f"'{key}' needs at least one finite magnitude >= 0, got {value!r}", key)
    return ",".join(str(v) for v in values)


def _complex(key: str, value: Any) -> str:
    try:
        amplitude = parse_complex(value)
    except ValueError:
        raise ConfigError(f"'{key}' expects a complex amplitude like 1+0.5i, got {value!r}", key)
    if not (math.isfinite(amplitude.real) and math.isfinite(amplitude.imag)):
        raise ConfigError(f"'{key}' must be finite, got {value!r}", key)
    return str(value).strip()


def _grid(key: str, value: Any) -> int:
    number = _number(int, 0)(key, value)
    if 0 < number < MIN_PHASE_GRID_POINTS:
        raise ConfigError(f"'{key}' must be 0 (automatic) or >= {MIN_PHASE_GRID_POINTS}, got {number}", key)
    return number


# documented ranges for every parameter key
PARAMETER_SPECS: Dict[str, Callable] = {
    "mags": _magnitudes,
    "mag": _number(float, 0.0),
    "mag_a": _number(float, 0.0),
    "mag_b": _number(float, 0.0),
    "lo_mag": _number(float, 0.0),
    "squeeze": _number(float, 0.0, 5.0),
    "packets": _number(int, 1),
    "n_lo": _number(int, 0),
    "trials": _number(int, 1),
    "dim": _number(int, 0, 400),
    "grid_points": _grid,
    "predictive_samples": _number(int, 1),
    "phase_model": _choice("mixture", "pinned", "fixed"),
    "fixed_delta": _number(float),
    "lock": _choice("sharp", "counting"),
    "input_disp": _complex,
    "input_photons": _number(int, 0),
    "mode": _choice("shared-reference", "independent-reference", "phase-offset"),
    "offset": _number(float),
    "gain": _number(float, 0.0),
}

# keys that are not experiment parameters
GENERAL_KEYS = ("seed", "out", "ledger")

# short physics names accepted in config files
ALIASES = {"r": "squeeze", "n": "packets", "d": "dim", "m": "grid_points", "delta": "offset"}


@dataclass
class RunConfig:
    """Effective configuration of one CLI run"""
    experiment: str
    seed: int
    parameters: Dict[str, Any] = field(default_factory=dict)
    out_dir: str = "."
    ledger_url: Optional[str] = None


def parse_seed(value: Any) -> int:
    """Seeds are unsigned 64-bit integers"""
    try:
        seed = int(str(value).strip())
    except ValueError:
        raise ConfigError(f"'seed' must be an unsigned 64-bit integer, got {value!r}", "seed")
    if not 0 <= seed <= MAX_SEED:
        raise ConfigError(f"'seed' must lie in 0..2^64-1, got {seed}", "seed")
    return seed


def read_config_file(path: str) -> Dict[str, Optional[str]]:
    """Flat key=value file; '#' starts a comment"""
    try:
        with open(path, encoding="utf-8") as handle:
            return dict(dotenv_values(stream=handle))
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}")


def parse_config(experiment: str,
                 path: Optional[str] = None,
                 overrides: Optional[Dict[str, Any]] = None,
                 preset: Optional[str] = None) -> RunConfig:
    """
    Build the effective RunConfig

    Precedence: defaults < preset < file < flags. Flags left unset (None) do
    not override anything.

    Args:
        experiment: Subcommand name
        path: Optional flat key=value file
        overrides: Values given as command-line flags
        preset: Optional preset name ("smoke")

    Returns:
        RunConfig with validated parameters

    Raises:
        ConfigError: unknown experiment, preset or key; missing seed; value out of range
    """
    if experiment not in EXPERIMENT_DEFAULTS:
        raise ConfigError(f"Unknown experiment '{experiment}'", experiment)
    allowed = EXPERIMENT_DEFAULTS[experiment]
    merged: Dict[str, Any] = dict(allowed)
    if preset is not None:
        if preset != "smoke":
            raise ConfigError(f"Unknown preset '{preset}'", preset)
        merged.update(SMOKE_PRESETS[experiment])

    layers = []
    if path:
        layers.append(("config file", read_config_file(path)))
    if overrides:
        layers.append(("flags", {k: v for k, v in overrides.items() if v is not None}))

    general: Dict[str, Any] = {}
    for source, values in layers:
        for key, value in values.items():
            name = key.strip().lower().replace("-", "_")
            name = ALIASES.get(name, name)
            if name in GENERAL_KEYS:
                general[name] = value
            elif name in allowed:
                merged[name] = value
            else:
                raise ConfigError(f"Unknown key '{key}' for {experiment} (from {source})", key)

    if general.get("seed") is None:
        raise ConfigError("A seed is required (--seed or seed=... in the config file)", "seed")
    parameters = {key: PARAMETER_SPECS[key](key, value) for key, value in merged.items()}
    if experiment != "identity-check" and parameters.get("dim", 2) < 2:
        raise ConfigError(f"'dim' must be >= 2 for {experiment}, got {parameters['dim']}", "dim")
    logger.debug(f"{experiment} parameters: {parameters}")
    return RunConfig(
        experiment=experiment,
        seed=parse_seed(general["seed"]),
        parameters=parameters,
        out_dir=str(general.get("out") or "."),
        ledger_url=general.get("ledger") or RUN_LEDGER_URL,
    )
