"""
Utility functions for atomcraft library.
"""

import os
from typing import List, Sequence

from sympy import isprime, nextprime, prime, primerange

from atomcraft.models import DimensionMismatchError, LatticePoint


def validate_prime(p: int) -> int:
    """Validate a prime modulus. Raises ValueError otherwise."""
    if isinstance(p, bool) or not isinstance(p, int) or not isprime(p):
        raise ValueError(f"Invalid modulus: {p} is not prime")
    return p


def validate_count(value: int, name: str = "count", minimum: int = 1) -> int:
    """Validate an integer size argument. Raises ValueError below ``minimum``."""
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"Invalid {name}: {value!r}. Must be an integer")
    if value < minimum:
        raise ValueError(f"Invalid {name}: {value}. Must be >= {minimum}")
    return value


def as_point(coords: Sequence[int], dim: int = 0) -> LatticePoint:
    """Normalize coordinates to a lattice point, checking dimension when given."""
    point = tuple(coords)
    for coord in point:
        if isinstance(coord, bool) or not isinstance(coord, int):
            raise ValueError(f"Invalid lattice point {coords!r}: coordinates must be integers")
    if not point:
        raise ValueError("Invalid lattice point: empty coordinates")
    if dim and len(point) != dim:
        raise DimensionMismatchError(dim, len(point))
    return point


def odd_prime(n: int) -> int:
    """The n-th odd prime (3, 5, 7, 11, ...), n >= 1."""
    return int(prime(n + 1))


def nth_prime(n: int) -> int:
    """The n-th prime (2, 3, 5, ...), n >= 1."""
    return int(prime(n))


def primes_up_to(bound: int) -> List[int]:
    """All primes p <= bound."""
    return [int(p) for p in primerange(2, bound + 1)]


def sparse_prime(n: int, base: int = 5) -> int:
    """Least prime strictly greater than base**n."""
    return int(nextprime(base ** n))


def env_int(name: str, default: int) -> int:
    """Read an integer setting from the environment."""
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError as e:
        raise ValueError(f"Invalid {name}={raw!r}: expected an integer") from e


def env_str(name: str, default: str) -> str:
    """Read a string setting from the environment."""
    raw = os.getenv(name)
    return default if raw is None or raw.strip() == "" else raw.strip()
