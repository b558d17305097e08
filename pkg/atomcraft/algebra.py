"""
Monoid algebras F_p[x; M] over totally ordered exponent monoids.

Elements are kept in canonical form: exponents strictly decreasing, coefficients
nonzero PrimeFieldElem values. Exponents are Fractions, or BetaElem values for the
rank-2 monoid built over the sparse prime family.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations, product
from math import floor
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from sympy import factorint, isprime

from atomcraft.exactnum import as_fraction, render
from atomcraft.groups import FgGroupPresentation, QSubgroupDescriptor, classify_fg
from atomcraft.models import AlgebraDomainError, SearchStatus, VerificationError
from atomcraft.puiseux import BetaElem, PuiseuxFamily, length_set_truncated, reciprocal_primes
from atomcraft.utils import primes_up_to as list_primes
from atomcraft.utils import validate_count, validate_prime

logger = logging.getLogger(__name__)

Exponent = Union[Fraction, BetaElem]

TRUNCATION_CAVEAT = (
    "Result holds only for divisors whose exponents lie in the stated truncation; "
    "it says nothing about atomicity of the untruncated monoid algebra."
)


# ============================================================================
# Coefficients and exponents
# ============================================================================

@dataclass(frozen=True)
class PrimeFieldElem:
    """An element of F_p, kept as its least nonnegative residue."""
    value: int
    modulus: int

    def __post_init__(self):
        validate_prime(self.modulus)
        object.__setattr__(self, "value", int(self.value) % self.modulus)

    def _other(self, other: Any) -> "PrimeFieldElem":
        if isinstance(other, PrimeFieldElem):
            if other.modulus != self.modulus:
                raise AlgebraDomainError(
                    f"Modulus mismatch: F_{self.modulus} and F_{other.modulus}"
                )
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            return PrimeFieldElem(other, self.modulus)
        raise TypeError(f"Cannot combine F_{self.modulus} with {type(other).__name__}")

    def __add__(self, other: Any) -> "PrimeFieldElem":
        return PrimeFieldElem(self.value + self._other(other).value, self.modulus)

    __radd__ = __add__

    def __neg__(self) -> "PrimeFieldElem":
        return PrimeFieldElem(-self.value, self.modulus)

    def __sub__(self, other: Any) -> "PrimeFieldElem":
        return PrimeFieldElem(self.value - self._other(other).value, self.modulus)

    def __mul__(self, other: Any) -> "PrimeFieldElem":
        return PrimeFieldElem(self.value * self._other(other).value, self.modulus)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "PrimeFieldElem":
        return PrimeFieldElem(pow(self.value, n, self.modulus), self.modulus)

    def inverse(self) -> "PrimeFieldElem":
        if self.value == 0:
            raise ZeroDivisionError(f"0 has no inverse in F_{self.modulus}")
        return PrimeFieldElem(pow(self.value, -1, self.modulus), self.modulus)

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, PrimeFieldElem):
            return (self.value, self.modulus) == (other.value, other.modulus)
        if isinstance(other, int) and not isinstance(other, bool):
            return self.value == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.value)

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return str(self.value)


class ExponentGroupKind(Enum):
    """Exponent groups used for p-divisibility checks"""
    INTEGERS = "integers"
    LOCALIZED = "localized"
    RATIONALS = "rationals"


@dataclass(frozen=True)
class ExponentGroup:
    """Z, the localization Z[1/p_1, ..., 1/p_k], or Q."""
    kind: ExponentGroupKind
    primes: Tuple[int, ...] = ()

    @classmethod
    def integers(cls) -> "ExponentGroup":
        return cls(ExponentGroupKind.INTEGERS)

    @classmethod
    def localized(cls, *primes: int) -> "ExponentGroup":
        if not primes:
            raise ValueError("Invalid localization: at least one prime required")
        return cls(ExponentGroupKind.LOCALIZED, tuple(sorted(validate_prime(p) for p in primes)))

    @classmethod
    def rationals(cls) -> "ExponentGroup":
        return cls(ExponentGroupKind.RATIONALS)

    @classmethod
    def parse(cls, text: str) -> "ExponentGroup":
        """Accepts 'Z', 'Q' or 'Z[1/2]', 'Z[1/2,1/3]'."""
        cleaned = text.replace(" ", "")
        if cleaned in ("Z", "integers"):
            return cls.integers()
        if cleaned in ("Q", "rationals"):
            return cls.rationals()
        match = re.fullmatch(r"Z\[(1/\d+(?:,1/\d+)*)\]", cleaned)
        if not match:
            raise ValueError(f"Invalid exponent group: {text!r}. Use Z, Q or Z[1/p,...]")
        return cls.localized(*(int(part[2:]) for part in match.group(1).split(",")))

    def contains(self, e: Exponent) -> bool:
        if isinstance(e, BetaElem):
            return False
        e = as_fraction(e)
        if self.kind is ExponentGroupKind.RATIONALS:
            return True
        if self.kind is ExponentGroupKind.INTEGERS:
            return e.denominator == 1
        return all(r in self.primes for r in factorint(e.denominator))

    def divisible(self, e: Exponent, p: int) -> bool:
        """e/p lies in the group."""
        return self.contains(e) and self.contains(as_fraction(e) / p)

    def __str__(self) -> str:
        if self.kind is ExponentGroupKind.INTEGERS:
            return "Z"
        if self.kind is ExponentGroupKind.RATIONALS:
            return "Q"
        return "Z[" + ",".join(f"1/{p}" for p in self.primes) + "]"


# ============================================================================
# Elements
# ============================================================================

def _normalize_exponent(e: Any) -> Exponent:
    return e if isinstance(e, BetaElem) else as_fraction(e)


@dataclass(frozen=True)
class AlgebraElem:
    """sum c_i x^(e_i) over F_p, exponents strictly decreasing."""
    modulus: int
    terms: Tuple[Tuple[Exponent, PrimeFieldElem], ...] = ()

    def __post_init__(self):
        validate_prime(self.modulus)
        zero = PrimeFieldElem(0, self.modulus)
        merged: Dict[Exponent, PrimeFieldElem] = {}
        for e, c in self.terms:
            e = _normalize_exponent(e)
            merged[e] = merged.get(e, zero) + c
        kinds = {isinstance(e, BetaElem) for e in merged}
        if len(kinds) > 1:
            beta = next(e.beta for e in merged if isinstance(e, BetaElem))
            merged = {
                (e if isinstance(e, BetaElem) else BetaElem(0, e, beta)): c
                for e, c in merged.items()
            }
        ordered = tuple(sorted(((e, c) for e, c in merged.items() if c), reverse=True,
                               key=lambda t: t[0]))
        object.__setattr__(self, "terms", ordered)

    @classmethod
    def zero(cls, p: int) -> "AlgebraElem":
        return cls(p)

    @classmethod
    def one(cls, p: int) -> "AlgebraElem":
        return cls(p, ((Fraction(0), 1),))

    @classmethod
    def monomial(cls, p: int, exponent: Any, coefficient: Any = 1) -> "AlgebraElem":
        return cls(p, ((exponent, coefficient),))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    @property
    def degree(self) -> Exponent:
        if self.is_zero:
            raise ValueError("The zero element has no degree")
        return self.terms[0][0]

    @property
    def order(self) -> Exponent:
        if self.is_zero:
            raise ValueError("The zero element has no order")
        return self.terms[-1][0]

    @property
    def leading_coefficient(self) -> PrimeFieldElem:
        return self.terms[0][1] if self.terms else PrimeFieldElem(0, self.modulus)

    def exponents(self) -> List[Exponent]:
        return [e for e, _ in self.terms]

    def _check(self, other: "AlgebraElem") -> None:
        if not isinstance(other, AlgebraElem):
            raise TypeError(f"Expected AlgebraElem, got {type(other).__name__}")
        if other.modulus != self.modulus:
            raise AlgebraDomainError(
                f"Modulus mismatch: F_{self.modulus}[M] and F_{other.modulus}[M]"
            )

    def __add__(self, other: "AlgebraElem") -> "AlgebraElem":
        self._check(other)
        return AlgebraElem(self.modulus, self.terms + other.terms)

    def __neg__(self) -> "AlgebraElem":
        return AlgebraElem(self.modulus, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: "AlgebraElem") -> "AlgebraElem":
        return self + (-other)

    def __mul__(self, other: "AlgebraElem") -> "AlgebraElem":
        self._check(other)
        return AlgebraElem(
            self.modulus,
            tuple((e + f, c * d) for e, c in self.terms for f, d in other.terms),
        )

    def scale(self, c: Any) -> "AlgebraElem":
        return AlgebraElem(self.modulus, tuple((e, c * d) for e, d in self.terms))

    def shift(self, exponent: Exponent) -> "AlgebraElem":
        return AlgebraElem(self.modulus, tuple((e + exponent, c) for e, c in self.terms))

    def __pow__(self, n: int) -> "AlgebraElem":
        if n < 0:
            raise ValueError(f"Invalid power: {n}. Must be >= 0")
        result, base = AlgebraElem.one(self.modulus), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __str__(self) -> str:
        return format_element(self)


# ============================================================================
# Parsing and formatting
# ============================================================================

_TERM_PATTERN = re.compile(
    r"^(?P<coeff>\d+)?\*?(?P<x>x(?:\^(?:\((?P<paren>-?\d+(?:/\d+)?)\)|(?P<plain>\d+)))?)?$"
)


def _split_terms(text: str) -> List[str]:
    terms, depth, current = [], 0, ""
    for ch in text.replace(" ", ""):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and current not in ("", "+", "-"):
            terms.append(current)
            current = ""
        current += ch
    if current:
        terms.append(current)
    return terms


def parse_element(text: str, modulus: int) -> AlgebraElem:
    """
    Parse "c*x^(a/b) + c*x^n + x + c" over F_modulus.

    Coefficients are reduced mod p; a leading '-' negates the term.
    """
    validate_prime(modulus)
    cleaned = text.strip()
    if cleaned in ("", "0"):
        return AlgebraElem.zero(modulus)
    terms = []
    for raw in _split_terms(cleaned):
        sign = -1 if raw.startswith("-") else 1
        body = raw.lstrip("+-")
        match = _TERM_PATTERN.match(body)
        if not body or match is None or (match.group("coeff") is None and not match.group("x")):
            raise ValueError(f"Invalid term {raw!r} in {text!r}")
        coeff = int(match.group("coeff") or 1)
        if match.group("x") is None:
            exponent = Fraction(0)
        elif match.group("paren") is not None:
            exponent = Fraction(match.group("paren"))
        elif match.group("plain") is not None:
            exponent = Fraction(int(match.group("plain")))
        else:
            exponent = Fraction(1)
        terms.append((exponent, sign * coeff))
    return AlgebraElem(modulus, tuple(terms))


def _format_exponent(e: Exponent) -> str:
    if isinstance(e, BetaElem):
        return f"^({e})"
    if e == 1:
        return ""
    if e.denominator == 1 and e > 0:
        return f"^{e.numerator}"
    return f"^({e})"


def format_element(f: AlgebraElem) -> str:
    """Inverse of parse_element for rational exponents."""
    if f.is_zero:
        return "0"
    parts = []
    for e, c in f.terms:
        if e == 0:
            parts.append(str(c))
            continue
        head = "" if c == 1 else f"{c}*"
        parts.append(f"{head}x{_format_exponent(e)}")
    return " + ".join(parts)


# ============================================================================
# Frobenius roots
# ============================================================================

def frobenius_root(
    f: AlgebraElem, p: int, group: Optional[ExponentGroup] = None
) -> AlgebraElem:
    """
    The g with g^p = f in F_p[G] for a p-divisible exponent group G.

    In characteristic p, (sum b_i x^(h_i))^p = sum b_i^p x^(p h_i) and b^p = b in
    F_p, so g keeps the coefficients and divides the exponents by p.

    Raises:
        AlgebraDomainError: On modulus mismatch or an exponent not p-divisible in group
        VerificationError: If g^p != f
    """
    validate_prime(p)
    if f.modulus != p:
        raise AlgebraDomainError(f"Modulus mismatch: element over F_{f.modulus}, p = {p}")
    group = group or ExponentGroup.localized(p)
    for e, _ in f.terms:
        if not group.divisible(e, p):
            raise AlgebraDomainError(f"Exponent {e} is not divisible by {p} in {group}")
    g = AlgebraElem(p, tuple((as_fraction(e) / p, c) for e, c in f.terms))
    if g ** p != f:
        raise VerificationError("frobenius-root", f"({g})^{p} != {f}")
    return g


@dataclass
class AntimatterWitness:
    """f = g^p; when f is a nonunit this factors it into p nonunits."""
    element: AlgebraElem
    root: AlgebraElem
    p: int
    group: ExponentGroup

    @property
    def is_unit(self) -> bool:
        # units of F_p[G], G torsion-free ordered, are the nonzero monomials
        return self.element.is_monomial

    @property
    def not_irreducible(self) -> bool:
        return not self.element.is_zero and not self.is_unit

    def to_dict(self) -> Dict[str, Any]:
        return {
            "element": format_element(self.element),
            "root": format_element(self.root),
            "p": self.p,
            "group": str(self.group),
            "rootPowerEqualsElement": self.root ** self.p == self.element,
            "isUnit": self.is_unit,
            "notIrreducible": self.not_irreducible,
        }


def antimatter_witness(
    f: AlgebraElem, p: int, group: Optional[ExponentGroup] = None
) -> AntimatterWitness:
    group = group or ExponentGroup.localized(p)
    return AntimatterWitness(f, frobenius_root(f, p, group), p, group)


# ============================================================================
# Group algebra classification
# ============================================================================

class GroupShape(Enum):
    """Abstract group descriptors for classify_group_algebra"""
    TRIVIAL = "trivial"
    INFINITE_CYCLIC = "infinite-cyclic"
    OTHER = "other"


@dataclass(frozen=True)
class FieldDescriptor:
    characteristic: int
    algebraic_over_prime_field: bool = True

    def __post_init__(self):
        c = self.characteristic
        if isinstance(c, bool) or not isinstance(c, int) or (c != 0 and not isprime(c)):
            raise ValueError(f"Invalid characteristic: {c!r}. Must be 0 or a prime")

    @classmethod
    def prime_field(cls, p: int) -> "FieldDescriptor":
        return cls(validate_prime(p), True)

    @classmethod
    def rationals(cls) -> "FieldDescriptor":
        return cls(0, True)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "characteristic": self.characteristic,
            "algebraicOverPrimeField": self.algebraic_over_prime_field,
        }


GroupInput = Union[GroupShape, FgGroupPresentation, QSubgroupDescriptor]


def _group_shape(group: GroupInput) -> Tuple[GroupShape, Dict[str, Any]]:
    if isinstance(group, GroupShape):
        return group, {"shape": group.value}
    if isinstance(group, FgGroupPresentation):
        info = classify_fg(group)
        if info.rank == 0 and not info.invariant_factors:
            shape = GroupShape.TRIVIAL
        elif info.rank == 1 and not info.invariant_factors:
            shape = GroupShape.INFINITE_CYCLIC
        else:
            shape = GroupShape.OTHER
        return shape, {"presentation": group.to_dict(), **info.to_dict()}
    if isinstance(group, QSubgroupDescriptor):
        shape = GroupShape.INFINITE_CYCLIC if group.stabilizes else GroupShape.OTHER
        return shape, {"chain": group.to_dict()}
    raise TypeError(f"Unsupported group descriptor: {type(group).__name__}")


@dataclass
class AlgebraClassification:
    field: FieldDescriptor
    group: Dict[str, Any]
    hereditarily_atomic: bool
    reason: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            "field": self.field.to_dict(),
            "group": self.group,
            "hereditarilyAtomic": self.hereditarily_atomic,
            "reason": self.reason,
        }


def classify_group_algebra(
    field_desc: FieldDescriptor, group: GroupInput
) -> AlgebraClassification:
    """
    F[G] is hereditarily atomic iff F is algebraic over F_p for a prime p and G is
    infinite cyclic.

    Raises:
        ValueError: If the group is trivial
    """
    shape, info = _group_shape(group)
    if shape is GroupShape.TRIVIAL:
        raise ValueError("Invalid group: the trivial group is excluded")
    if field_desc.characteristic == 0:
        return AlgebraClassification(field_desc, info, False, "characteristic 0")
    if not field_desc.algebraic_over_prime_field:
        return AlgebraClassification(
            field_desc, info, False, "field is transcendental over its prime field"
        )
    if shape is not GroupShape.INFINITE_CYCLIC:
        return AlgebraClassification(field_desc, info, False, "group is not infinite cyclic")
    return AlgebraClassification(
        field_desc, info, True, "algebraic over F_p and infinite cyclic group"
    )


# ============================================================================
# Length sets and the multiplicative monoid Q_{>=1}
# ============================================================================

@dataclass
class LengthDemo:
    modulus: int
    primes: List[int]
    factorizations: List[Dict[str, Any]]
    element: Fraction
    length_set: List[int]

    @property
    def passes(self) -> bool:
        return all(item["verified"] for item in self.factorizations)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "modulus": self.modulus,
            "primes": self.primes,
            "algebraFactorizations": self.factorizations,
            "monoidElement": render(self.element),
            "monoidLengthSet": self.length_set,
            "monoid": f"<1/p : p prime, p <= {self.primes[-1]}>",
        }


def length_demo(primes_up_to: int, modulus: int = 2, element: Any = 1) -> LengthDemo:
    """
    x = (x^(1/q))^q for each prime q up to the bound, and the length set of
    ``element`` in <1/p : p <= bound> (conclusive within those generators).
    """
    validate_count(primes_up_to, "primes_up_to", minimum=2)
    validate_prime(modulus)
    primes = list_primes(primes_up_to)
    x = AlgebraElem.monomial(modulus, 1)
    factorizations = []
    for q in primes:
        root = AlgebraElem.monomial(modulus, Fraction(1, q))
        factorizations.append({
            "q": q,
            "factor": format_element(root),
            "length": q,
            "verified": root ** q == x,
        })
    target = as_fraction(element)
    lengths = length_set_truncated(reciprocal_primes(), len(primes), target)
    return LengthDemo(modulus, primes, factorizations, target, lengths)


def rational_ge1_split(q: Any) -> Tuple[Fraction, Fraction]:
    """
    q = (n/(n+1) q) * ((n+1)/n) with both factors > 1, n least possible.

    Shows that no q > 1 is an atom of the multiplicative monoid Q_{>=1}.
    """
    q = as_fraction(q)
    if q <= 1:
        raise ValueError(f"Invalid q: {q}. Must be > 1")
    n = floor(1 / (q - 1)) + 1
    left, right = Fraction(n, n + 1) * q, Fraction(n + 1, n)
    if not (left > 1 and right > 1 and left * right == q):
        raise VerificationError("rational-split", f"{left} * {right} for {q}")
    return left, right


# ============================================================================
# Bounded irreducibility search
# ============================================================================

def truncated_elements(gens: Sequence[Fraction], bound: Fraction) -> List[Fraction]:
    """All elements <= bound of the monoid generated by gens, ascending."""
    seen = {Fraction(0)}
    frontier = [Fraction(0)]
    while frontier:
        nxt = []
        for value in frontier:
            for g in gens:
                s = value + g
                if s <= bound and s not in seen:
                    seen.add(s)
                    nxt.append(s)
        frontier = nxt
    return sorted(seen)


def _divide(
    f: AlgebraElem, g: AlgebraElem, allowed: Iterable[Fraction]
) -> Optional[AlgebraElem]:
    allowed = set(allowed)
    remainder, quotient = f, []
    inverse = g.leading_coefficient.inverse()
    while not remainder.is_zero:
        e = remainder.degree - g.degree
        if e < 0 or e not in allowed:
            return None
        c = remainder.leading_coefficient * inverse
        quotient.append((e, c))
        remainder = remainder - g.shift(e).scale(c)
    return AlgebraElem(f.modulus, tuple(quotient))


@dataclass
class SearchReport:
    status: SearchStatus
    element: AlgebraElem
    truncation: Dict[str, Any]
    candidates_tried: int
    budget: int
    factors: Optional[Tuple[AlgebraElem, AlgebraElem]] = None
    caveat: str = TRUNCATION_CAVEAT

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status.value,
            "element": format_element(self.element),
            "factors": None if self.factors is None else [format_element(h) for h in self.factors],
            "truncation": self.truncation,
            "candidatesTried": self.candidates_tried,
            "budget": self.budget,
            "caveat": self.caveat,
        }


def irreducible_search_bounded(
    f: AlgebraElem,
    family: Optional[PuiseuxFamily] = None,
    count: Optional[int] = None,
    budget: int = 5000,
) -> SearchReport:
    """
    Look for f = g*h with g, h nonconstant and all exponents in a truncated monoid.

    Exponents come from N_0 when no family is given, otherwise from the monoid
    generated by the first ``count`` generators of ``family``. Candidates g are
    monic, ordered by degree, then support size, then coefficients; each is
    tested by exact long division. The status never speaks for the untruncated
    algebra.
    """
    validate_count(budget, "budget")
    if f.is_zero:
        raise ValueError("Invalid element: zero")
    for e in f.exponents():
        if isinstance(e, BetaElem):
            raise AlgebraDomainError("Bounded search supports rational exponents only")
    top = as_fraction(f.degree)
    if family is None:
        truncation = {"exponentMonoid": "N_0"}
        gens = [Fraction(1)]
    else:
        if count is None:
            raise ValueError("Invalid truncation: count is required with a family")
        gens = family.generators(count)
        truncation = {"exponentMonoid": family.to_dict(), "N": count,
                      "generators": render(gens)}
    support = truncated_elements(gens, top)
    allowed = set(support)
    for e in f.exponents():
        if e not in allowed:
            raise ValueError(f"Invalid element: exponent {e} is not in the truncated monoid")
    truncation["support"] = render(support)

    p = f.modulus
    tried = 0
    ord_f = f.order
    for deg_g in support:
        if not 0 < deg_g < top:
            continue
        lower = [e for e in support if e < deg_g]
        for size in range(len(lower) + 1):
            for chosen in combinations(lower, size):
                if chosen and min(chosen) > ord_f:
                    continue
                if not chosen and deg_g > ord_f:
                    continue
                for coeffs in product(range(1, p), repeat=size):
                    if tried >= budget:
                        logger.warning("Irreducibility search budget %d exhausted", budget)
                        return SearchReport(SearchStatus.INCONCLUSIVE, f, truncation, tried, budget)
                    tried += 1
                    g = AlgebraElem(p, ((deg_g, 1),) + tuple(zip(chosen, coeffs)))
                    h = _divide(f, g, allowed)
                    if h is None:
                        continue
                    if g * h != f:
                        raise VerificationError("search-factor", f"({g})*({h}) != {f}")
                    logger.info("Factored %s after %d candidates", format_element(f), tried)
                    return SearchReport(
                        SearchStatus.FACTORED, f, truncation, tried, budget, (g, h)
                    )
    return SearchReport(SearchStatus.IRREDUCIBLE_WITHIN_BOUND, f, truncation, tried, budget)


