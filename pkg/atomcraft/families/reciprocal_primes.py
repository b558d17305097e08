"""
The monoid <1/p : p prime>.

Atomic with atoms 1/p, and 1 has a factorization of length p for every prime p.
"""

from fractions import Fraction
from typing import Any, Dict, List

from atomcraft.utils import nth_prime, validate_count

ATOM_SET = "{1/p : p prime}"
DESCRIPTION = "<1/p : p prime>"


def normalize(**params: Any) -> Dict[str, Any]:
    if params:
        raise ValueError(
            f"Invalid parameters for reciprocal_primes: {sorted(params)}. None accepted"
        )
    return {}


def generators(count: int, **params: Any) -> List[Fraction]:
    normalize(**params)
    validate_count(count)
    return [Fraction(1, nth_prime(i + 1)) for i in range(count)]
