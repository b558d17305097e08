"""Tests for lattice monoids, membership oracles, planar cones and the lex cone."""

import pytest

from atomcraft.construction import PI_U
from atomcraft.exactnum import QuadRat
from atomcraft.lattice import (
    ConeKind,
    LatticeMonoid,
    LinearFunctional,
    atoms_certified,
    cone_member_2d,
    cone_member_pairwise,
    extreme_rays_2d,
    lex_cone,
    member_bounded,
    positive_bound,
    product_with_n0,
    zaks_truncation,
)
from atomcraft.models import (
    DimensionMismatchError,
    MembershipCertificate,
    NotFound,
    UnboundedError,
    linear_combination,
)

from .conftest import STAGE_ONE_POINTS

DIAGONAL = LinearFunctional((QuadRat(1), QuadRat(1)))


def _random_nonnegative_generators(rng, dim=2):
    gens = set()
    target = rng.randint(2, 5)
    while len(gens) < target:
        g = tuple(rng.randint(0, 6) for _ in range(dim))
        if any(g):
            gens.add(g)
    return sorted(gens)


def _reachability_atoms(gens):
    """Atoms by direct search: g is an atom unless reachable from the other generators."""
    atoms = []
    for g in gens:
        others = [h for h in gens if h != g]
        seen, frontier = {tuple(0 for _ in g)}, [tuple(0 for _ in g)]
        while frontier:
            point = frontier.pop()
            for h in others:
                nxt = tuple(a + b for a, b in zip(point, h))
                if nxt not in seen and all(a <= b for a, b in zip(nxt, g)):
                    seen.add(nxt)
                    frontier.append(nxt)
        if g not in seen:
            atoms.append(g)
    return atoms


# ============================================================================
# Monoids
# ============================================================================

class TestLatticeMonoid:
    def test_rejects_zero_generator(self):
        with pytest.raises(ValueError, match="zero vector"):
            LatticeMonoid.of([(1, 0), (0, 0)])

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError, match="pairwise distinct"):
            LatticeMonoid.of([(1, 2), (1, 2)])

    def test_rejects_mixed_dimensions(self):
        with pytest.raises(DimensionMismatchError):
            LatticeMonoid.of([(1, 0), (1, 0, 0)])

    def test_rank(self):
        assert LatticeMonoid.of([(1, 0), (2, 0)]).rank() == 1
        assert LatticeMonoid.of(STAGE_ONE_POINTS).rank() == 2

    def test_without(self):
        monoid = LatticeMonoid.of([(1, 0), (0, 1), (1, 1)])
        assert monoid.without((0, 1)).generators == ((1, 0), (1, 1))


class TestMemberBounded:
    def test_numerical_monoid(self):
        monoid = LatticeMonoid.of([(3,), (5,)])
        result = member_bounded(monoid, (8,), 10)
        assert isinstance(result, MembershipCertificate)
        assert result.coefficients == {0: 1, 1: 1}

    def test_gap_is_not_found(self):
        monoid = LatticeMonoid.of([(3,), (5,)])
        result = member_bounded(monoid, (7,), 10)
        assert isinstance(result, NotFound)
        assert result.bound == 10
        assert result.to_dict()["found"] is False

    def test_zero_target(self):
        result = member_bounded(LatticeMonoid.of([(1, 2)]), (0, 0), 0)
        assert isinstance(result, MembershipCertificate)
        assert result.coefficients == {}

    def test_bound_is_respected(self):
        monoid = LatticeMonoid.of([(1, 0), (0, 1)])
        assert isinstance(member_bounded(monoid, (3, 0), 2), NotFound)
        assert isinstance(member_bounded(monoid, (3, 0), 3), MembershipCertificate)

    def test_negative_bound(self):
        with pytest.raises(ValueError, match="Invalid bound"):
            member_bounded(LatticeMonoid.of([(1, 0)]), (1, 0), -1)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            member_bounded(LatticeMonoid.of([(1, 0)]), (1, 0, 0), 3)

    def test_stage_one_double_of_a0(self):
        # 2*a_0 = a_1 + 25*a_2
        monoid = LatticeMonoid.of(STAGE_ONE_POINTS)
        bound = positive_bound(monoid, (0, 2), PI_U)
        assert bound == 29
        result = member_bounded(monoid, (0, 2), bound, PI_U)
        assert isinstance(result, MembershipCertificate)
        assert result.coefficients == {1: 1, 2: 25}
        assert linear_combination(monoid.generators, result.coefficients, (0, 2)) == (0, 2)

    def test_functional_must_be_positive(self):
        monoid = LatticeMonoid.of([(1, 0), (0, 1)])
        functional = LinearFunctional((QuadRat(1), QuadRat(0)))
        with pytest.raises(UnboundedError) as excinfo:
            member_bounded(monoid, (1, 1), 5, functional)
        assert excinfo.value.generator == (0, 1)


class TestAtomsCertified:
    def test_sum_of_generators_is_not_an_atom(self):
        monoid = LatticeMonoid.of([(1, 0), (0, 1), (1, 1)])
        reports = atoms_certified(monoid, DIAGONAL)
        assert [r.is_atom for r in reports] == [True, True, False]
        assert reports[2].certificate.coefficients == {0: 1, 1: 1}

    def test_stage_one_generators_are_atoms(self):
        reports = atoms_certified(LatticeMonoid.of(STAGE_ONE_POINTS), PI_U)
        assert all(r.is_atom for r in reports)
        assert all(r.certificate is None for r in reports)

    def test_report_serializes(self):
        reports = atoms_certified(LatticeMonoid.of([(1, 0), (2, 0)]), DIAGONAL)
        data = reports[1].to_dict()
        assert data["isAtom"] is False
        assert data["certificate"]["coefficients"] == {"0": 2}

    @pytest.mark.slow
    def test_agrees_with_reachability(self, rng):
        for _ in range(80):
            gens = _random_nonnegative_generators(rng)
            reports = atoms_certified(LatticeMonoid.of(gens), DIAGONAL)
            assert [r.point for r in reports if r.is_atom] == _reachability_atoms(gens)

    @pytest.mark.slow
    def test_idempotent_and_order_independent(self, rng):
        for _ in range(60):
            gens = _random_nonnegative_generators(rng)
            reports = atoms_certified(LatticeMonoid.of(gens), DIAGONAL)
            atoms = [r.point for r in reports if r.is_atom]
            again = atoms_certified(LatticeMonoid.of(atoms), DIAGONAL)
            assert all(r.is_atom for r in again)
            shuffled = list(gens)
            rng.shuffle(shuffled)
            reordered = atoms_certified(LatticeMonoid.of(shuffled), DIAGONAL)
            assert {r.point for r in reordered if r.is_atom} == set(atoms)


# ============================================================================
# Cones
# ============================================================================

class TestExtremeRays:
    def test_sector(self):
        shape = extreme_rays_2d([(1, 0), (0, 1), (1, 1)])
        assert shape.kind is ConeKind.SECTOR
        assert shape.rays == ((1, 0), (0, 1))
        assert shape.contains((2, 3))
        assert not shape.contains((-1, 1))

    def test_line_half_plane_plane(self):
        assert extreme_rays_2d([(1, 0), (-1, 0)]).kind is ConeKind.LINE
        half = extreme_rays_2d([(1, 0), (-1, 0), (0, 1)])
        assert half.kind is ConeKind.HALF_PLANE
        assert half.contains((5, 1))
        assert not half.contains((0, -1))
        assert extreme_rays_2d([(1, 0), (0, 1), (-1, -1)]).kind is ConeKind.PLANE

    def test_ray_and_zero(self):
        ray = extreme_rays_2d([(2, 2), (1, 1)])
        assert ray.kind is ConeKind.RAY
        assert ray.contains((3, 3))
        assert not ray.contains((-1, -1))
        assert extreme_rays_2d([]).kind is ConeKind.ZERO

    def test_quadratic_points(self):
        w = (QuadRat(1), QuadRat(0, 1))
        assert cone_member_2d([(1, 1), (0, 1)], w)
        assert not cone_member_2d([(1, 0), (1, 1)], w)

    def test_empty_generators(self):
        with pytest.raises(ValueError, match="nonempty"):
            cone_member_2d([], (1, 0))

    @pytest.mark.slow
    def test_pairwise_oracle_agrees(self, rng):
        for _ in range(300):
            gens = set()
            while len(gens) < rng.randint(1, 4):
                g = (rng.randint(-4, 4), rng.randint(-4, 4))
                if g != (0, 0):
                    gens.add(g)
            gens = sorted(gens)
            w = (rng.randint(-6, 6), rng.randint(-6, 6))
            assert cone_member_2d(gens, w) == cone_member_pairwise(gens, w), (gens, w)


class TestLexCone:
    def test_membership(self):
        cone = lex_cone(2)
        assert cone.contains((1, -5))
        assert cone.contains((0, 0))
        assert not cone.contains((0, -1))
        assert not cone.contains((-1, 100))

    def test_atom_and_witness(self):
        cone = lex_cone(2)
        assert cone.atom == (0, 1)
        assert cone.witness == (1, 0)
        report = cone.report()
        assert report["witnessInMonoid"] is True
        assert report["witnessFactorable"] is False
        assert report["atomic"] is False

    def test_divides(self):
        cone = lex_cone(2)
        assert cone.divides((0, 1), (1, -3))
        assert not cone.divides((1, 0), (0, 5))

    def test_priority(self):
        cone = lex_cone(3, (2, 0, 1))
        assert cone.atom == (0, 1, 0)
        assert cone.witness == (0, 0, 1)
        assert cone.contains((-7, 3, 1))
        assert not cone.contains((0, 0, -1))

    def test_invalid(self):
        with pytest.raises(ValueError, match="d >= 2"):
            lex_cone(1)
        with pytest.raises(ValueError, match="permutation"):
            lex_cone(2, (0, 0))


# ============================================================================
# Generator families
# ============================================================================

class TestZaks:
    def test_truncation(self):
        monoid = zaks_truncation(2)
        assert monoid.dim == 5
        assert len(monoid.generators) == 7
        assert (-1, 1, 1, -1, 0) in monoid.generators
        assert (-2, 1, 1, 0, -1) in monoid.generators

    def test_product_with_n0(self):
        monoid = product_with_n0(zaks_truncation(2), 2)
        assert monoid.dim == 7
        assert len(monoid.generators) == 9
        assert monoid.generators[-1] == (0, 0, 0, 0, 0, 0, 1)
        assert product_with_n0(zaks_truncation(1), 0) == zaks_truncation(1)

    def test_invalid(self):
        with pytest.raises(ValueError, match="Invalid k"):
            zaks_truncation(0)
        with pytest.raises(ValueError, match="Invalid extra"):
            product_with_n0(zaks_truncation(1), -1)

    @pytest.mark.slow
    def test_product_atoms_are_padded_atoms_and_units(self, rng):
        for _ in range(40):
            gens = _random_nonnegative_generators(rng)
            extra = rng.randint(1, 2)
            product = product_with_n0(LatticeMonoid.of(gens), extra)
            functional = LinearFunctional((QuadRat(1),) * product.dim)
            atoms = {r.point for r in atoms_certified(product, functional) if r.is_atom}
            units = {tuple(int(i == j) for i in range(product.dim)) for j in range(2, product.dim)}
            padded = {g + (0,) * extra for g in _reachability_atoms(gens)}
            assert atoms == padded | units
