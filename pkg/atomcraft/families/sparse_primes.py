"""
Reciprocals of a sparse prime sequence: p_n is the least prime above base^n.

Since p_n > base^n, the sum of 1/p_n stays below 1/(base - 1), which is at most
1/3 for base >= 4. Every element then has a normal form n_0 + sum n_i/p_i with
0 <= n_i < p_i.
"""

from fractions import Fraction
from typing import Any, Dict, List

from atomcraft.utils import sparse_prime, validate_count

ATOM_SET = "{1/p_n : n >= 1}, p_n the least prime > base^n"
DESCRIPTION = "<1/p_n>, p_n = nextprime(base^n)"
DEFAULT_BASE = 5


def normalize(**params: Any) -> Dict[str, Any]:
    unknown = set(params) - {"base"}
    if unknown:
        raise ValueError(f"Invalid parameters for sparse_primes: {sorted(unknown)}")
    base = params.get("base", DEFAULT_BASE)
    if isinstance(base, bool) or not isinstance(base, int) or base < 4:
        raise ValueError(f"Invalid base: {base!r}. Must be an integer >= 4")
    return {"base": base}


def primes(count: int, **params: Any) -> List[int]:
    base = normalize(**params)["base"]
    validate_count(count)
    return [sparse_prime(n, base) for n in range(1, count + 1)]


def generators(count: int, **params: Any) -> List[Fraction]:
    return [Fraction(1, p) for p in primes(count, **params)]
