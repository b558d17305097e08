"""
Geometric monoid <q^n : n >= 0> for 0 < q < 1 with 1/q not an integer.

Writing q = a/b in lowest terms, a*q^n = (b - a)*q^(n+1) + a*q^(n+1), so the
ideals a*q^n + M ascend strictly.
"""

from fractions import Fraction
from typing import Any, Dict, List

from atomcraft.exactnum import as_fraction
from atomcraft.models import ChainStep
from atomcraft.utils import validate_count

ATOM_SET = "{q^n : n >= 0}"
DESCRIPTION = "<q^n : n >= 0>"


def normalize(**params: Any) -> Dict[str, Any]:
    unknown = set(params) - {"q"}
    if unknown or "q" not in params:
        raise ValueError("Invalid parameters for geometric: exactly one parameter 'q' required")
    q = as_fraction(params["q"])
    if not 0 < q < 1:
        raise ValueError(f"Invalid q: {q}. Must satisfy 0 < q < 1")
    if q.numerator == 1:
        raise ValueError(f"Invalid q: {q}. 1/q must not be an integer")
    return {"q": q}


def generators(count: int, **params: Any) -> List[Fraction]:
    q = normalize(**params)["q"]
    validate_count(count)
    return [q ** i for i in range(count)]


def chain_step(n: int, **params: Any) -> ChainStep:
    q = normalize(**params)["q"]
    validate_count(n, "n")
    a, b = q.numerator, q.denominator
    return ChainStep(
        ideal=a * q ** n,
        ideal_coefficients={n: a},
        witness_coefficients={n + 1: b - a},
    )
