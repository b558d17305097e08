"""
Generated by 1/(p_n * p_(n+2)) over all primes p_n.

The ideals (1/p_n + 1/p_(n+1)) + M ascend strictly; consecutive ideal
generators differ by (p_(n+2) - p_n) copies of 1/(p_n * p_(n+2)).
"""

from fractions import Fraction
from typing import Any, Dict, List

from atomcraft.models import ChainStep
from atomcraft.utils import nth_prime, validate_count

ATOM_SET = "{1/(p_n * p_(n+2)) : n >= 1}, p_n the n-th prime"
DESCRIPTION = "<1/(p_n p_(n+2))> over all primes"


def normalize(**params: Any) -> Dict[str, Any]:
    if params:
        raise ValueError(f"Invalid parameters for prime_gap: {sorted(params)}. None accepted")
    return {}


def generators(count: int, **params: Any) -> List[Fraction]:
    normalize(**params)
    validate_count(count)
    return [Fraction(1, nth_prime(i + 1) * nth_prime(i + 3)) for i in range(count)]


def chain_step(n: int, **params: Any) -> ChainStep:
    normalize(**params)
    validate_count(n, "n")
    p, p_next, p_gap, p_far = (nth_prime(n + k) for k in range(4))
    return ChainStep(
        ideal=Fraction(1, p) + Fraction(1, p_next),
        ideal_coefficients={n - 1: p_gap, n: p_far},
        witness_coefficients={n - 1: p_gap - p},
    )
