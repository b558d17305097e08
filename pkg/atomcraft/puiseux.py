"""
Puiseux monoids: additive submonoids of the nonnegative rationals.

Families are described in closed form by plugin modules under
``atomcraft.families``. Everything infinite is reached through truncations to
the first N generators; closed-form atom sets are reported only where they are
known, and every oracle answer says which truncation it was computed on.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from math import floor, lcm
from types import ModuleType
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from sympy import Matrix, factorint

from atomcraft.exactnum import SQRT2, QuadRat, as_fraction, quad_sign, render
from atomcraft.models import (
    AlgebraDomainError,
    CertificateError,
    FamilyKind,
    MembershipCertificate,
    NotFound,
    UnsupportedFamilyError,
    VerificationError,
)
from atomcraft.utils import validate_count

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PuiseuxFamily:
    """A family kind plus its normalized parameters."""
    kind: FamilyKind
    params: Tuple[Tuple[str, Any], ...] = ()

    @classmethod
    def create(cls, kind: Union[str, FamilyKind], **params: Any) -> "PuiseuxFamily":
        try:
            kind = FamilyKind(kind) if isinstance(kind, str) else kind
        except ValueError as e:
            valid = ", ".join(k.value for k in FamilyKind)
            raise ValueError(f"Unknown family: {kind!r}. Valid families: {valid}") from e
        family = cls(kind)
        normalized = family.module.normalize(**params)
        return cls(kind, tuple(sorted(normalized.items())))

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def module(self) -> ModuleType:
        from atomcraft.api import load_family

        return load_family(self.name)

    @property
    def kwargs(self) -> Dict[str, Any]:
        return dict(self.params)

    @property
    def atom_set(self) -> Optional[str]:
        return self.module.ATOM_SET

    @property
    def supports_chain(self) -> bool:
        return hasattr(self.module, "chain_step")

    def generators(self, count: int) -> List[Fraction]:
        return self.module.generators(count, **self.kwargs)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.name, "params": render(self.kwargs)}


def grams() -> PuiseuxFamily:
    return PuiseuxFamily.create(FamilyKind.GRAMS)


def prime_gap() -> PuiseuxFamily:
    return PuiseuxFamily.create(FamilyKind.PRIME_GAP)


def geometric(q: Any) -> PuiseuxFamily:
    return PuiseuxFamily.create(FamilyKind.GEOMETRIC, q=q)


def reciprocal_primes() -> PuiseuxFamily:
    return PuiseuxFamily.create(FamilyKind.RECIPROCAL_PRIMES)


def sparse_primes(base: int = 5) -> PuiseuxFamily:
    return PuiseuxFamily.create(FamilyKind.SPARSE_PRIMES, base=base)


def custom(values: Sequence[Any]) -> PuiseuxFamily:
    return PuiseuxFamily.create(FamilyKind.CUSTOM, values=values)


def generators(family: PuiseuxFamily, count: int) -> List[Fraction]:
    """First ``count`` generators in the family's canonical order."""
    return family.generators(count)


# ============================================================================
# Truncation oracles
# ============================================================================

def iter_representations(
    gens: Sequence[Fraction], target: Fraction
) -> Iterator[Dict[int, int]]:
    """
    Every way of writing target as a nonnegative integer combination of gens.

    Coefficient of g is at most floor(target/g). A branch is cut when the
    remainder is not a multiple of 1/L, L the lcm of the remaining denominators;
    the last generator is solved exactly.
    """
    gens = [as_fraction(g) for g in gens]
    for g in gens:
        if g <= 0:
            raise ValueError(f"Invalid generator {g}: must be positive")
    n = len(gens)
    suffix_lcm = [1] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix_lcm[i] = lcm(suffix_lcm[i + 1], gens[i].denominator)

    def walk(i: int, remaining: Fraction, chosen: Dict[int, int]) -> Iterator[Dict[int, int]]:
        if remaining == 0:
            yield dict(chosen)
            return
        if i == n or (remaining * suffix_lcm[i]).denominator != 1:
            return
        g = gens[i]
        if i == n - 1:
            c = remaining / g
            if c.denominator == 1:
                yield {**chosen, i: int(c)}
            return
        for c in range(floor(remaining / g), -1, -1):
            if c:
                chosen[i] = c
            yield from walk(i + 1, remaining - c * g, chosen)
            chosen.pop(i, None)

    yield from walk(0, as_fraction(target), {})


def member_in(
    gens: Sequence[Fraction], target: Any
) -> Union[MembershipCertificate, NotFound]:
    """Conclusive membership of target in the monoid generated by gens."""
    target = as_fraction(target)
    if target < 0:
        raise ValueError(f"Invalid target: {target}. Must be >= 0")
    for coefficients in iter_representations(gens, target):
        return MembershipCertificate(target, tuple(gens), coefficients)
    return NotFound(target, None, f"not in the monoid generated by {len(gens)} generators")


def member_truncated(
    family: PuiseuxFamily, count: int, q: Any
) -> Union[MembershipCertificate, NotFound]:
    """Membership of q in the submonoid generated by the first ``count`` generators."""
    result = member_in(family.generators(count), q)
    if isinstance(result, NotFound):
        return NotFound(result.target, None, f"not in the truncation to {count} generators")
    return result


def factorizations_truncated(
    family: PuiseuxFamily, count: int, q: Any, limit: int = 10000
) -> List[MembershipCertificate]:
    """All representations of q over the first ``count`` generators (at most ``limit``)."""
    gens = tuple(family.generators(count))
    target = as_fraction(q)
    if target < 0:
        raise ValueError(f"Invalid target: {target}. Must be >= 0")
    found = []
    for coefficients in iter_representations(gens, target):
        if len(found) >= limit:
            logger.warning("Factorization listing for %s stopped at limit %d", target, limit)
            break
        found.append(MembershipCertificate(target, gens, coefficients))
    return found


def length_set_truncated(family: PuiseuxFamily, count: int, q: Any) -> List[int]:
    """Sorted lengths of the representations of q over the first ``count`` generators."""
    gens = family.generators(count)
    return sorted({sum(c.values()) for c in iter_representations(gens, as_fraction(q))})


@dataclass
class FamilyAtomReport:
    """Closed-form atom set (if known) and the truncated spot-check behind it."""
    family: PuiseuxFamily
    closed_form: Optional[str]
    checked: int
    decomposable: List[MembershipCertificate] = field(default_factory=list)

    @property
    def passes(self) -> bool:
        return not self.decomposable

    @property
    def oracle_only(self) -> bool:
        return self.closed_form is None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family.to_dict(),
            "atomSet": self.closed_form,
            "oracleOnly": self.oracle_only,
            "spotCheck": {
                "generators": self.checked,
                "passes": self.passes,
                "decomposable": [c.to_dict() for c in self.decomposable],
            },
        }


def atoms_family(family: PuiseuxFamily, count: int = 5) -> FamilyAtomReport:
    """
    Closed-form atom set plus a spot-check on the first ``count`` generators:
    none of them is a nonnegative integer combination of the others.
    """
    gens = family.generators(count)
    decomposable = []
    for i, g in enumerate(gens):
        others = gens[:i] + gens[i + 1:]
        result = member_in(others, g)
        if isinstance(result, MembershipCertificate):
            remapped = {j if j < i else j + 1: c for j, c in result.coefficients.items()}
            decomposable.append(MembershipCertificate(g, tuple(gens), remapped))
    report = FamilyAtomReport(family, family.atom_set, len(gens), decomposable)
    logger.info(
        "Atom spot-check for %s on %d generators: %s",
        family.name, count, "pass" if report.passes else "FAIL",
    )
    return report


# ============================================================================
# Ascending chains
# ============================================================================

@dataclass
class ChainCertificate:
    """Ideal generators b_1..b_N and witnesses b_n - b_(n+1) in the monoid."""
    family: PuiseuxFamily
    ideals: List[MembershipCertificate]
    witnesses: List[MembershipCertificate]

    def verify(self) -> None:
        """Re-check every identity exactly. Raises VerificationError."""
        for n, witness in enumerate(self.witnesses):
            expected = self.ideals[n].target - self.ideals[n + 1].target
            if witness.target != expected:
                raise VerificationError(
                    "chain-witness", f"step {n + 1}: {witness.target} != {expected}"
                )
            if witness.target <= 0:
                raise VerificationError("chain-witness", f"step {n + 1}: witness is zero")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family.to_dict(),
            "ideals": [c.to_dict() for c in self.ideals],
            "witnesses": [c.to_dict() for c in self.witnesses],
        }


def chain_certificate(family: PuiseuxFamily, count: int) -> ChainCertificate:
    """
    Ideals b_1..b_count of a strictly ascending chain b_n + M with exact witnesses.

    Raises:
        UnsupportedFamilyError: If the family has no ascending chain description
        ValueError: If count < 2
    """
    if not family.supports_chain:
        raise UnsupportedFamilyError(family.name, "chain")
    validate_count(count, "N", minimum=2)
    steps = [family.module.chain_step(n, **family.kwargs) for n in range(1, count + 1)]
    needed = 1 + max(
        max(list(s.ideal_coefficients) + list(s.witness_coefficients)) for s in steps
    )
    gens = tuple(family.generators(needed))
    try:
        ideals = [MembershipCertificate(s.ideal, gens, s.ideal_coefficients) for s in steps]
        witnesses = [
            MembershipCertificate(s.ideal - steps[n + 1].ideal, gens, s.witness_coefficients)
            for n, s in enumerate(steps[:-1])
        ]
    except CertificateError as e:
        raise VerificationError("chain-identity", str(e)) from e
    certificate = ChainCertificate(family, ideals, witnesses)
    certificate.verify()
    return certificate


# ============================================================================
# Normal form for sparse prime reciprocals
# ============================================================================

@dataclass(frozen=True)
class NormalForm:
    """q = n0 + sum(digits[i] / primes[i]) with 0 <= digits[i] < primes[i]."""
    target: Fraction
    n0: int
    digits: Dict[int, int]
    primes: Dict[int, int]

    def reassemble(self) -> Fraction:
        return self.n0 + sum(
            (Fraction(d, self.primes[i]) for i, d in self.digits.items()), Fraction(0)
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "member": True,
            "target": render(self.target),
            "n0": self.n0,
            "digits": {str(i): d for i, d in self.digits.items()},
            "primes": {str(i): p for i, p in self.primes.items()},
        }


@dataclass(frozen=True)
class NotMember:
    target: Fraction
    reason: str

    def to_dict(self) -> Dict[str, Any]:
        return {"member": False, "target": render(self.target), "reason": self.reason}


def normal_form_P(family: PuiseuxFamily, q: Any) -> Union[NormalForm, NotMember]:
    """
    Unique digits of q in the sparse prime family.

    The r-part of the denominator of q = a/b determines the digit at r:
    n_r = a * (b/r)^(-1) mod r. What is left must be a nonnegative integer n0.

    Raises:
        UnsupportedFamilyError: For any family other than sparse_primes
        VerificationError: If the reciprocal sum bound fails on the truncation used
    """
    if family.kind is not FamilyKind.SPARSE_PRIMES:
        raise UnsupportedFamilyError(family.name, "normal_form")
    q = as_fraction(q)
    if q < 0:
        return NotMember(q, "negative")

    factors = factorint(q.denominator)
    largest = max(factors, default=1)
    count = 1
    sequence = family.module.primes(1, **family.kwargs)
    while sequence[-1] < largest:
        count += 1
        sequence = family.module.primes(count, **family.kwargs)
    if sum(Fraction(1, p) for p in sequence) >= Fraction(1, 3):
        raise VerificationError("reciprocal-sum", f"sum over {count} primes is >= 1/3")
    index = {p: i + 1 for i, p in enumerate(sequence)}

    digits, primes = {}, {}
    for r, e in sorted(factors.items()):
        r = int(r)
        if r not in index:
            return NotMember(q, f"denominator prime {r} is not in the family")
        if e > 1:
            return NotMember(q, f"denominator divisible by {r}^{e}")
        digit = q.numerator * pow(q.denominator // r, -1, r) % r
        digits[index[r]] = digit
        primes[index[r]] = r

    rest = q - sum((Fraction(d, primes[i]) for i, d in digits.items()), Fraction(0))
    if rest.denominator != 1:
        raise VerificationError("normal-form", f"residue extraction left {rest}")
    if rest < 0:
        return NotMember(q, f"integer part {rest} is negative")
    form = NormalForm(q, int(rest), dict(sorted(digits.items())), dict(sorted(primes.items())))
    if form.reassemble() != q:
        raise VerificationError("normal-form", f"reassembly gives {form.reassemble()}")
    return form


# ============================================================================
# Rank-2 monoid over the sparse prime family
# ============================================================================

@total_ordering
@dataclass(frozen=True, eq=False)
class BetaElem:
    """The real number k*beta + q for a fixed irrational beta > 1."""
    k: int
    q: Fraction = Fraction(0)
    beta: QuadRat = SQRT2

    def __post_init__(self):
        object.__setattr__(self, "q", as_fraction(self.q))
        object.__setattr__(self, "beta", validate_beta(self.beta))

    @property
    def value(self) -> QuadRat:
        return self.k * self.beta + self.q

    def _check(self, other: "BetaElem") -> None:
        if self.beta != other.beta:
            raise AlgebraDomainError(f"Mixed beta values: {self.beta} and {other.beta}")

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, BetaElem):
            return (self.k, self.q, self.beta) == (other.k, other.q, other.beta)
        try:
            return self.k == 0 and self.q == as_fraction(other)
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash(self.q) if self.k == 0 else hash((self.k, self.q, self.beta))

    def __lt__(self, other: Any) -> bool:
        if not isinstance(other, BetaElem):
            try:
                other = BetaElem(0, as_fraction(other), self.beta)
            except TypeError:
                return NotImplemented
        self._check(other)
        return quad_sign(self.value - other.value) < 0

    def __add__(self, other: Any) -> "BetaElem":
        if not isinstance(other, BetaElem):
            other = BetaElem(0, as_fraction(other), self.beta)
        self._check(other)
        return BetaElem(self.k + other.k, self.q + other.q, self.beta)

    __radd__ = __add__

    def __neg__(self) -> "BetaElem":
        return BetaElem(-self.k, -self.q, self.beta)

    def __sub__(self, other: Any) -> "BetaElem":
        return self + (-other)

    def __mul__(self, n: int) -> "BetaElem":
        if isinstance(n, bool) or not isinstance(n, int):
            return NotImplemented
        return BetaElem(n * self.k, n * self.q, self.beta)

    __rmul__ = __mul__

    def __str__(self) -> str:
        if self.k == 0:
            return str(self.q)
        head = "beta" if self.k == 1 else f"{self.k}*beta"
        if self.q == 0:
            return head
        op = "-" if self.q < 0 else "+"
        return f"{head} {op} {abs(self.q)}"


def validate_beta(beta: Any) -> QuadRat:
    """beta must be an irrational element of Q(sqrt2) greater than 1."""
    if not isinstance(beta, QuadRat):
        raise ValueError(f"Invalid beta: {beta!r}. Must be an exactly comparable QuadRat")
    if beta.b == 0:
        raise ValueError(f"Invalid beta: {beta}. Must be irrational")
    if quad_sign(beta - 1) <= 0:
        raise ValueError(f"Invalid beta: {beta}. Must be > 1")
    return beta


@dataclass
class GottiLiMonoid:
    """Generators A (sums of atoms of P with one repeat) and B (beta shifted down)."""
    family: PuiseuxFamily
    beta: QuadRat
    count: int
    a_elements: List[BetaElem]
    b_elements: List[BetaElem]

    @property
    def generators(self) -> List[BetaElem]:
        return self.a_elements + self.b_elements

    def rank(self) -> int:
        """Rank of the generated group; beta irrational makes (k, q) coordinates faithful."""
        rows = [[e.k, e.q] for e in self.generators]
        return int(Matrix(rows).rank())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family.to_dict(),
            "beta": str(self.beta),
            "N": self.count,
            "A": [str(e) for e in self.a_elements],
            "B": [str(e) for e in self.b_elements],
            "rank": self.rank(),
        }


def gottili_generators(
    family: PuiseuxFamily, count: int, beta: QuadRat = SQRT2
) -> GottiLiMonoid:
    """
    Elements of A and B up to index ``count``.

    A holds 1/p_k + sum_{i<=l} 1/p_i for 1 <= k <= l <= count (contiguous prefix
    sums with one repeated atom); B holds beta and beta - sum_{i<=l} 1/p_i.
    """
    if family.kind is not FamilyKind.SPARSE_PRIMES:
        raise UnsupportedFamilyError(family.name, "gottili")
    beta = validate_beta(beta)
    atoms = family.generators(validate_count(count, "N"))
    prefix = Fraction(0)
    a_elements, b_elements = [], [BetaElem(1, Fraction(0), beta)]
    for ell, atom in enumerate(atoms, start=1):
        prefix += atom
        for k in range(ell):
            a_elements.append(BetaElem(0, prefix + atoms[k], beta))
        b_elements.append(BetaElem(1, -prefix, beta))
    return GottiLiMonoid(family, beta, count, a_elements, b_elements)
