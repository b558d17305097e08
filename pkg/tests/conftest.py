"""
Pytest configuration and shared fixtures for testing
"""

import random
from typing import List

import pytest

from atomcraft import construct
from atomcraft.construction import ConstructionState
from atomcraft.models import LatticePoint
from atomcraft.puiseux import PuiseuxFamily, geometric, grams, sparse_primes

STAGE_ONE_POINTS: List[LatticePoint] = [(0, 1), (125, 177), (-5, -7)]
STAGE_TWO_POINTS: List[LatticePoint] = STAGE_ONE_POINTS + [
    (-941094125, -1330908075),
    (13860, 19601),
]


@pytest.fixture(scope="session")
def stage_one() -> ConstructionState:
    """Construction after one stage: a_0, a_1, a_2."""
    return construct(1)


@pytest.fixture(scope="session")
def stage_two() -> ConstructionState:
    """Construction after two stages: a_0 .. a_4."""
    return construct(2)


@pytest.fixture
def tampered_stage_one() -> ConstructionState:
    """Stage-1 state with a_1 replaced by a_0 + a_2, so a_1 is no longer an atom."""
    return ConstructionState(
        points=[(0, 1), (-5, -6), (-5, -7)],
        multipliers=[2, 25],
        claim1_bounds=[6, 21125],
    )


@pytest.fixture
def grams_family() -> PuiseuxFamily:
    return grams()


@pytest.fixture
def geometric_two_thirds() -> PuiseuxFamily:
    return geometric("2/3")


@pytest.fixture
def sparse_family() -> PuiseuxFamily:
    """Sparse prime reciprocals with base 5: 1/7, 1/29, 1/127, ..."""
    return sparse_primes(5)


@pytest.fixture
def rng() -> random.Random:
    """Seeded generator so randomized checks are reproducible."""
    return random.Random(20240613)
