"""Tests for monoid algebras over F_p: parsing, Frobenius roots, classification, search."""

from fractions import Fraction

import pytest

from atomcraft.algebra import (
    AlgebraElem,
    ExponentGroup,
    FieldDescriptor,
    GroupShape,
    PrimeFieldElem,
    antimatter_witness,
    classify_group_algebra,
    format_element,
    frobenius_root,
    irreducible_search_bounded,
    length_demo,
    parse_element,
    rational_ge1_split,
    truncated_elements,
)
from atomcraft.groups import ChainRule, FgGroupPresentation, QSubgroupDescriptor
from atomcraft.models import AlgebraDomainError, SearchStatus
from atomcraft.puiseux import grams


def _random_element(rng, p):
    terms = tuple(
        (Fraction(rng.randint(-6, 12), rng.choice([1, 2, 3, 6])), rng.randint(1, p - 1))
        for _ in range(rng.randint(1, 4))
    )
    return AlgebraElem(p, terms)


class TestPrimeField:
    def test_arithmetic(self):
        assert PrimeFieldElem(3, 5) + 4 == PrimeFieldElem(2, 5)
        assert PrimeFieldElem(2, 5).inverse() == PrimeFieldElem(3, 5)
        assert PrimeFieldElem(2, 5) ** 4 == PrimeFieldElem(1, 5)
        assert PrimeFieldElem(7, 5) == 2
        assert not PrimeFieldElem(5, 5)

    def test_errors(self):
        with pytest.raises(ZeroDivisionError):
            PrimeFieldElem(0, 7).inverse()
        with pytest.raises(AlgebraDomainError, match="Modulus mismatch"):
            PrimeFieldElem(1, 2) + PrimeFieldElem(1, 3)
        with pytest.raises(ValueError, match="not prime"):
            PrimeFieldElem(1, 4)

    def test_algebra_coefficients(self):
        f = parse_element("2*x + 4", 5)
        assert all(isinstance(c, PrimeFieldElem) for _, c in f.terms)
        assert f.leading_coefficient == PrimeFieldElem(2, 5)
        assert AlgebraElem(3, ((1, PrimeFieldElem(2, 3)), (1, 1))).is_zero

    def test_coefficient_modulus_mismatch(self):
        with pytest.raises(AlgebraDomainError, match="Modulus mismatch"):
            AlgebraElem(3, ((1, PrimeFieldElem(1, 2)),))


class TestElements:
    def test_parse_and_format(self):
        f = parse_element("1 + x^(1/2)", 2)
        assert f.terms == ((Fraction(1, 2), 1), (Fraction(0), 1))
        assert format_element(f) == "x^(1/2) + 1"
        assert str(parse_element("3*x^2 + 4", 5)) == "3*x^2 + 4"
        assert str(parse_element("x^(-2)", 3)) == "x^(-2)"

    def test_coefficients_reduce(self):
        assert str(parse_element("2*x + 1", 2)) == "1"
        assert str(parse_element("x - x", 3)) == "0"
        assert str(parse_element("-x", 3)) == "2*x"

    def test_invalid_term(self):
        with pytest.raises(ValueError, match="Invalid term"):
            parse_element("y + 1", 2)

    def test_arithmetic(self):
        f = parse_element("1 + x", 2)
        assert f ** 2 == parse_element("1 + x^2", 2)
        assert (f * f).degree == 2
        assert f.order == 0
        assert f.shift(Fraction(1, 2)) == parse_element("x^(1/2) + x^(3/2)", 2)

    def test_modulus_mismatch(self):
        with pytest.raises(AlgebraDomainError, match="Modulus mismatch"):
            parse_element("x", 2) + parse_element("x", 3)


class TestRingAxioms:
    @pytest.mark.slow
    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_associative_and_distributive(self, rng, p):
        for _ in range(60):
            f, g, h = (_random_element(rng, p) for _ in range(3))
            assert (f * g) * h == f * (g * h)
            assert f * (g + h) == f * g + f * h
            assert f * g == g * f
            assert f * AlgebraElem.one(p) == f
            assert f - f == AlgebraElem.zero(p)

    @pytest.mark.slow
    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_degree_and_order_add(self, rng, p):
        for _ in range(60):
            f, g = _random_element(rng, p), _random_element(rng, p)
            if f.is_zero or g.is_zero:
                continue
            product = f * g
            assert not product.is_zero
            assert product.degree == f.degree + g.degree
            assert product.order == f.order + g.order


class TestExponentGroup:
    def test_parse(self):
        group = ExponentGroup.parse("Z[1/3, 1/2]")
        assert group.primes == (2, 3)
        assert str(group) == "Z[1/2,1/3]"
        assert str(ExponentGroup.parse("Z")) == "Z"
        assert str(ExponentGroup.parse("Q")) == "Q"

    def test_divisibility(self):
        group = ExponentGroup.localized(2, 3)
        assert group.contains(Fraction(1, 6))
        assert not group.contains(Fraction(1, 5))
        assert not ExponentGroup.integers().divisible(1, 2)
        assert ExponentGroup.rationals().divisible(Fraction(1, 7), 5)

    def test_invalid(self):
        with pytest.raises(ValueError, match="Invalid exponent group"):
            ExponentGroup.parse("R")


# ============================================================================
# Frobenius roots
# ============================================================================

class TestFrobenius:
    def test_root(self):
        g = frobenius_root(parse_element("1 + x", 2), 2)
        assert str(g) == "x^(1/2) + 1"
        assert g ** 2 == parse_element("1 + x", 2)

    def test_group_without_roots(self):
        with pytest.raises(AlgebraDomainError, match="not divisible"):
            frobenius_root(parse_element("1 + x", 2), 2, ExponentGroup.integers())

    def test_modulus_mismatch(self):
        with pytest.raises(AlgebraDomainError, match="Modulus mismatch"):
            frobenius_root(parse_element("1 + x", 3), 2)

    def test_antimatter_witness(self):
        witness = antimatter_witness(parse_element("1 + x", 2), 2)
        assert witness.not_irreducible
        assert witness.to_dict()["rootPowerEqualsElement"] is True
        unit = antimatter_witness(parse_element("x", 2), 2)
        assert unit.is_unit
        assert not unit.not_irreducible

    @pytest.mark.slow
    def test_random_elements(self, rng):
        for _ in range(200):
            p = rng.choice([2, 3, 5])
            terms = tuple(
                (Fraction(rng.randint(0, 20), p ** rng.randint(0, 2)), rng.randint(1, p - 1))
                for _ in range(rng.randint(1, 4))
            )
            f = AlgebraElem(p, terms)
            if f.is_zero:
                continue
            g = frobenius_root(f, p)
            assert g ** p == f


# ============================================================================
# Classification, lengths and bounded search
# ============================================================================

class TestClassifyGroupAlgebra:
    def test_prime_field_and_integers(self):
        info = classify_group_algebra(FieldDescriptor.prime_field(2), GroupShape.INFINITE_CYCLIC)
        assert info.hereditarily_atomic

    def test_negative_cases(self):
        assert not classify_group_algebra(
            FieldDescriptor.rationals(), GroupShape.INFINITE_CYCLIC
        ).hereditarily_atomic
        assert not classify_group_algebra(
            FieldDescriptor(3, False), GroupShape.INFINITE_CYCLIC
        ).hereditarily_atomic
        info = classify_group_algebra(FieldDescriptor(2), FgGroupPresentation(2))
        assert not info.hereditarily_atomic
        assert info.reason == "group is not infinite cyclic"

    def test_group_descriptors(self):
        field = FieldDescriptor(5)
        assert classify_group_algebra(field, FgGroupPresentation(1)).hereditarily_atomic
        assert not classify_group_algebra(
            field, FgGroupPresentation.from_rows([[2]])
        ).hereditarily_atomic
        assert classify_group_algebra(field, QSubgroupDescriptor((1, 3))).hereditarily_atomic
        dyadic = QSubgroupDescriptor((1, 2), ChainRule("power", 2))
        assert not classify_group_algebra(field, dyadic).hereditarily_atomic

    def test_trivial_group(self):
        with pytest.raises(ValueError, match="trivial group"):
            classify_group_algebra(FieldDescriptor(2), GroupShape.TRIVIAL)

    def test_invalid_characteristic(self):
        with pytest.raises(ValueError, match="Invalid characteristic"):
            FieldDescriptor(4)


class TestLengths:
    def test_length_demo(self):
        demo = length_demo(10)
        assert demo.primes == [2, 3, 5, 7]
        assert demo.length_set == [2, 3, 5, 7]
        assert demo.passes
        assert demo.to_dict()["algebraFactorizations"][1]["factor"] == "x^(1/3)"

    def test_rational_split(self):
        assert rational_ge1_split(Fraction(3, 2)) == (Fraction(9, 8), Fraction(4, 3))
        assert rational_ge1_split(2) == (Fraction(4, 3), Fraction(3, 2))
        with pytest.raises(ValueError, match="Must be > 1"):
            rational_ge1_split(1)


class TestBoundedSearch:
    def test_truncated_elements(self):
        values = truncated_elements([Fraction(1, 3), Fraction(1, 2)], Fraction(1))
        assert values == [0, Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(5, 6), 1]

    def test_factors_x_over_grams(self):
        report = irreducible_search_bounded(parse_element("x", 2), grams(), 2)
        assert report.status is SearchStatus.FACTORED
        assert report.to_dict()["factors"] == ["x^(1/10)", "x^(9/10)"]

    def test_square_over_f2(self):
        report = irreducible_search_bounded(parse_element("1 + x^2", 2))
        assert report.status is SearchStatus.FACTORED
        assert [str(h) for h in report.factors] == ["x + 1", "x + 1"]

    def test_irreducible_within_bound(self):
        report = irreducible_search_bounded(parse_element("1 + x", 2))
        assert report.status is SearchStatus.IRREDUCIBLE_WITHIN_BOUND
        assert report.candidates_tried == 0
        assert "truncation" in report.to_dict()["caveat"]
        cubic = irreducible_search_bounded(parse_element("x^3 + x + 1", 2))
        assert cubic.status is SearchStatus.IRREDUCIBLE_WITHIN_BOUND

    def test_budget_exhausted(self):
        report = irreducible_search_bounded(parse_element("x^3 + x + 1", 2), budget=1)
        assert report.status is SearchStatus.INCONCLUSIVE
        assert report.candidates_tried == 1

    def test_invalid_inputs(self):
        with pytest.raises(ValueError, match="count is required"):
            irreducible_search_bounded(parse_element("x", 2), grams())
        with pytest.raises(ValueError, match="not in the truncated monoid"):
            irreducible_search_bounded(parse_element("x^(1/2) + 1", 2))
        with pytest.raises(ValueError, match="zero"):
            irreducible_search_bounded(AlgebraElem.zero(2))
