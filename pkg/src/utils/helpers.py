from typing import Any
import math

import numpy as np


def to_jsonable(value: Any) -> Any:
    """
    Convert numpy scalars/arrays and nested containers to plain JSON types

    Args:
        value: Arbitrary report value

    Returns:
        Value built from dict, list, str, int, float, bool and None only.
        Non-finite floats become strings so the JSON stays strict.
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": to_jsonable(float(value.real)), "im": to_jsonable(float(value.imag))}
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


def parse_complex(text: str) -> complex:
    """Parse '1', '0.5+1j', '1-2i' style amplitudes"""
    cleaned = str(text).strip().replace(" ", "").replace("i", "j")
    return complex(cleaned)


def standard_error(values) -> float:
    """Standard error of the mean (0 for fewer than two values)"""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(values.size))
