"""
Grams' monoid: generated by 1/(2^(n-1) * p_n), p_n the n-th odd prime.

Atomic without ACCP: the ideals 1/2^n + M ascend strictly, since
1/2^n = p_(n+1) * 1/(2^n * p_(n+1)).
"""

from fractions import Fraction
from typing import Any, Dict, List

from atomcraft.models import ChainStep
from atomcraft.utils import odd_prime, validate_count

ATOM_SET = "{1/(2^(n-1) * p_n) : n >= 1}, p_n the n-th odd prime"
DESCRIPTION = "Grams' monoid <1/(2^(n-1) p_n)>"


def normalize(**params: Any) -> Dict[str, Any]:
    if params:
        raise ValueError(f"Invalid parameters for grams: {sorted(params)}. None accepted")
    return {}


def generators(count: int, **params: Any) -> List[Fraction]:
    normalize(**params)
    validate_count(count)
    return [Fraction(1, 2 ** i * odd_prime(i + 1)) for i in range(count)]


def chain_step(n: int, **params: Any) -> ChainStep:
    """b_n = 1/2^n and the witness b_n - b_(n+1) = 1/2^(n+1)."""
    normalize(**params)
    validate_count(n, "n")
    return ChainStep(
        ideal=Fraction(1, 2 ** n),
        ideal_coefficients={n: odd_prime(n + 1)},
        witness_coefficients={n + 1: odd_prime(n + 2)},
    )
