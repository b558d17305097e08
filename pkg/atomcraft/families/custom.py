"""
User-supplied finite generator list.

No closed-form atom set is asserted; atom questions go to the truncation oracle.
"""

from fractions import Fraction
from typing import Any, Dict, List

from atomcraft.exactnum import as_fraction
from atomcraft.utils import validate_count

ATOM_SET = None
DESCRIPTION = "finitely generated, user-supplied generators"


def normalize(**params: Any) -> Dict[str, Any]:
    unknown = set(params) - {"values"}
    if unknown or "values" not in params:
        raise ValueError("Invalid parameters for custom: exactly one parameter 'values' required")
    values = tuple(as_fraction(v) for v in params["values"])
    if not values:
        raise ValueError("Invalid values: at least one generator required")
    for v in values:
        if v <= 0:
            raise ValueError(f"Invalid generator {v}: must be positive")
    return {"values": values}


def generators(count: int, **params: Any) -> List[Fraction]:
    values = normalize(**params)["values"]
    validate_count(count)
    if count > len(values):
        raise ValueError(f"Invalid count: {count}. Only {len(values)} generators supplied")
    return list(values[:count])
