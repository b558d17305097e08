"""
Abelian groups: which ones are hereditarily atomic.

A torsion-free-rank argument decides it. G is hereditarily atomic (and every
submonoid satisfies ACCP) exactly when G/T is cyclic, T the torsion subgroup.
Finitely generated groups come in as presentations Z^m / im(A) and are read
off their Smith normal form; rank-1 subgroups of Q come in as denominator
chains. When the answer is negative a witness monoid is produced.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from sympy import Matrix

from atomcraft.exactnum import render
from atomcraft.lattice import LexCone, lex_cone
from atomcraft.models import LatticePoint, VerificationError
from atomcraft.utils import as_point, validate_count

logger = logging.getLogger(__name__)


# ============================================================================
# Smith normal form
# ============================================================================

def _extended_gcd(a: int, b: int) -> Tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def exgcd(a: int, b: int) -> np.ndarray:
    """A 2x2 integer matrix M of determinant 1 with M @ [a, b] = [gcd(a, b), 0]."""
    g, x, y = _extended_gcd(int(a), int(b))
    if g == 0:
        return np.eye(2, dtype=object)
    return np.array([[x, y], [-int(b) // g, int(a) // g]], dtype=object)


def _eye(n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=object)
    for i in range(n):
        out[i, i] = 1
    return out


def as_integer_matrix(rows: Sequence[Sequence[int]], columns: Optional[int] = None) -> np.ndarray:
    """Integer matrix as an object-dtype array (exact big integers)."""
    rows = [list(r) for r in rows]
    if not rows:
        if columns is None:
            raise ValueError("Invalid matrix: no rows and no column count")
        return np.zeros((0, columns), dtype=object)
    width = len(rows[0])
    if columns is not None and width != columns:
        raise ValueError(f"Invalid matrix: expected {columns} columns, got {width}")
    for r in rows:
        if len(r) != width:
            raise ValueError("Invalid matrix: rows have different lengths")
        for x in r:
            if isinstance(x, bool) or not isinstance(x, int):
                raise ValueError(f"Invalid matrix entry {x!r}: must be an integer")
    if width == 0:
        raise ValueError("Invalid matrix: at least one column required")
    return np.array(rows, dtype=object).reshape(len(rows), width)


class SmithForm(NamedTuple):
    """U @ A @ V == D with U, V unimodular and d_1 | d_2 | ... on the diagonal."""
    U: np.ndarray
    D: np.ndarray
    V: np.ndarray

    @property
    def diagonal(self) -> List[int]:
        return [int(self.D[i, i]) for i in range(min(self.D.shape))]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "U": self.U.tolist(),
            "D": self.D.tolist(),
            "V": self.V.tolist(),
            "diagonal": self.diagonal,
        }


def _pivot(D: np.ndarray, t: int) -> Optional[Tuple[int, int]]:
    best = None
    for i in range(t, D.shape[0]):
        for j in range(t, D.shape[1]):
            if D[i, j] != 0 and (best is None or abs(D[i, j]) < best[0]):
                best = (abs(D[i, j]), i, j)
    return None if best is None else best[1:]


def smith_normal_form(matrix: Any) -> SmithForm:
    """
    Diagonalize an integer matrix by unimodular row and column operations.

    Nonzero diagonal entries are positive, each divides the next, and zeros come
    last. The identity U @ A @ V == D and |det U| = |det V| = 1 are verified
    exactly before returning.

    Raises:
        VerificationError: If a post-condition fails
    """
    A = matrix if isinstance(matrix, np.ndarray) else as_integer_matrix(matrix)
    A = A.astype(object)
    rows, cols = A.shape
    D = A.copy()
    U, V = _eye(rows), _eye(cols)

    for t in range(min(rows, cols)):
        while True:
            pivot = _pivot(D, t)
            if pivot is None:
                break
            i, j = pivot
            D[[t, i]] = D[[i, t]]
            U[[t, i]] = U[[i, t]]
            D[:, [t, j]] = D[:, [j, t]]
            V[:, [t, j]] = V[:, [j, t]]

            for i in range(t + 1, rows):
                if D[i, t] != 0:
                    M = exgcd(D[t, t], D[i, t])
                    D[[t, i]] = M @ D[[t, i]]
                    U[[t, i]] = M @ U[[t, i]]
            for j in range(t + 1, cols):
                if D[t, j] != 0:
                    M = exgcd(D[t, t], D[t, j]).T
                    D[:, [t, j]] = D[:, [t, j]] @ M
                    V[:, [t, j]] = V[:, [t, j]] @ M
            if any(D[i, t] != 0 for i in range(t + 1, rows)):
                continue

            # d_t must divide the whole remaining block
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if D[i, j] % D[t, t]),
                None,
            )
            if bad is None:
                break
            D[t] = D[t] + D[bad]
            U[t] = U[t] + U[bad]
        if D[t, t] < 0:
            D[t] = -D[t]
            U[t] = -U[t]

    form = SmithForm(U, D, V)
    _verify_smith(A, form)
    return form


def _verify_smith(A: np.ndarray, form: SmithForm) -> None:
    U, D, V = form
    if not (U.dot(A).dot(V) == D).all():
        raise VerificationError("smith-identity", "U @ A @ V != D")
    for i in range(D.shape[0]):
        for j in range(D.shape[1]):
            if i != j and D[i, j] != 0:
                raise VerificationError("smith-diagonal", f"D[{i}, {j}] = {D[i, j]}")
    diag = form.diagonal
    for a, b in zip(diag, diag[1:]):
        if a < 0 or (a == 0 and b != 0) or (a and b % a):
            raise VerificationError("smith-divisibility", f"{a} does not divide {b}")
    for name, M in (("U", U), ("V", V)):
        if M.shape[0] and abs(Matrix(M.tolist()).det()) != 1:
            raise VerificationError("smith-unimodular", f"det {name} is not +/-1")


# ============================================================================
# Finitely generated groups
# ============================================================================

@dataclass(frozen=True)
class FgGroupPresentation:
    """Z^generators modulo the row span of ``relations``."""
    generators: int
    relations: Tuple[Tuple[int, ...], ...] = ()

    def __post_init__(self):
        validate_count(self.generators, "generators")
        object.__setattr__(
            self, "relations", tuple(as_point(r, self.generators) for r in self.relations)
        )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "FgGroupPresentation":
        if not rows:
            raise ValueError("Invalid relations: give at least one row or use generators=")
        return cls(len(rows[0]), tuple(tuple(r) for r in rows))

    def matrix(self) -> np.ndarray:
        return as_integer_matrix(self.relations, self.generators)

    def to_dict(self) -> Dict[str, Any]:
        return {"generators": self.generators, "relations": [list(r) for r in self.relations]}


@dataclass
class GroupClassification:
    rank: int
    invariant_factors: List[int]
    hereditarily_atomic: bool
    witness: Optional[Dict[str, Any]] = None
    smith: Optional[SmithForm] = None

    @property
    def hereditary_accp(self) -> bool:
        return self.hereditarily_atomic

    def to_dict(self) -> Dict[str, Any]:
        out = {
            "rank": self.rank,
            "invariantFactors": self.invariant_factors,
            "hereditarilyAtomic": self.hereditarily_atomic,
            "hereditaryACCP": self.hereditary_accp,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def classify_fg(pres: FgGroupPresentation) -> GroupClassification:
    """
    Rank and invariant factors of Z^m / im(A); hereditarily atomic iff rank <= 1.

    The quotient by torsion is Z^rank, which is cyclic exactly when rank <= 1.
    """
    form = smith_normal_form(pres.matrix())
    diag = form.diagonal
    rank = pres.generators - sum(1 for d in diag if d != 0)
    factors = [d for d in diag if d > 1]
    atomic = rank <= 1
    witness = None if atomic else witness_rank2().to_dict()
    logger.info("Classified group: rank %d, invariant factors %s", rank, factors)
    return GroupClassification(rank, factors, atomic, witness, form)


# ============================================================================
# Rank-1 subgroups of Q
# ============================================================================

@dataclass(frozen=True)
class ChainRule:
    """Closed-form continuation d_(n+1) = d_n * base (power) or d_n * (n+1) (factorial)."""
    kind: str
    base: int = 2

    def __post_init__(self):
        if self.kind not in ("power", "factorial"):
            raise ValueError(f"Invalid rule kind: {self.kind!r}. Use 'power' or 'factorial'")
        if self.kind == "power" and (not isinstance(self.base, int) or self.base < 2):
            raise ValueError(f"Invalid base: {self.base!r}. Must be an integer >= 2")

    def next(self, n: int, d: int) -> int:
        """Term n+1 given the n-th term d (1-based)."""
        return d * self.base if self.kind == "power" else d * (n + 1)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"kind": self.kind}
        if self.kind == "power":
            out["base"] = self.base
        return out


@dataclass(frozen=True)
class QSubgroupDescriptor:
    """
    The union of (1/d_n)Z over a divisibility chain d_1 | d_2 | ...

    ``prefix`` lists the first terms. Without a rule the chain is constant after
    the prefix, so the union is cyclic.
    """
    prefix: Tuple[int, ...]
    rule: Optional[ChainRule] = None

    def __post_init__(self):
        prefix = tuple(self.prefix)
        if not prefix:
            raise ValueError("Invalid chain: at least one term required")
        for d in prefix:
            if isinstance(d, bool) or not isinstance(d, int) or d < 1:
                raise ValueError(f"Invalid chain term {d!r}: must be a positive integer")
        for a, b in zip(prefix, prefix[1:]):
            if b % a:
                raise ValueError(f"Invalid chain: {a} does not divide {b}")
        object.__setattr__(self, "prefix", prefix)

    @property
    def stabilizes(self) -> bool:
        return self.rule is None

    def terms(self, count: int) -> List[int]:
        out = list(self.prefix[:count])
        while len(out) < count:
            last = out[-1]
            out.append(last if self.rule is None else self.rule.next(len(out), last))
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "prefix": list(self.prefix),
            "rule": None if self.rule is None else self.rule.to_dict(),
            "stabilizes": self.stabilizes,
        }


def classify_q_subgroup(desc: QSubgroupDescriptor, witness_terms: int = 5) -> GroupClassification:
    """Hereditarily atomic iff the chain stabilizes (the group is then cyclic)."""
    if desc.stabilizes:
        return GroupClassification(1, [], True)
    witness = witness_rank1_noncyclic(desc, count=witness_terms)
    return GroupClassification(1, [], False, witness.to_dict())


# ============================================================================
# Witness monoids
# ============================================================================

@dataclass
class Rank2Witness:
    """
    M = (N u + Z v) union N_0 v inside a group containing independent u, v.

    v is the only atom and u has no factorization; realized in Z^2 through
    coordinates in the basis (u, v) and the lexicographic cone.
    """
    u: LatticePoint
    v: LatticePoint
    cone: LexCone
    spot_radius: int = 3

    def coordinates(self, w: Sequence[int]) -> Optional[Tuple[int, int]]:
        w = as_point(w, 2)
        det = self.u[0] * self.v[1] - self.u[1] * self.v[0]
        alpha = w[0] * self.v[1] - w[1] * self.v[0]
        beta = self.u[0] * w[1] - self.u[1] * w[0]
        if alpha % det or beta % det:
            return None
        return alpha // det, beta // det

    def contains(self, w: Sequence[int]) -> bool:
        coords = self.coordinates(w)
        return coords is not None and self.cone.contains(coords)

    def divides(self, a: Sequence[int], w: Sequence[int]) -> bool:
        return self.contains(tuple(x - y for x, y in zip(w, a)))

    def atom_divides_members(self) -> bool:
        """The atom v divides every nonzero member within the spot-check box."""
        r = self.spot_radius
        for x in range(-r, r + 1):
            for y in range(-r, r + 1):
                w = (x, y)
                if w != (0, 0) and self.contains(w) and not self.divides(self.v, w):
                    return False
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "type": "rank2",
            "u": render(self.u),
            "v": render(self.v),
            "atoms": [render(self.v)],
            "witness": render(self.u),
            "witnessInMonoid": self.contains(self.u),
            "witnessFactorable": self.cone.in_atom_span(self.coordinates(self.u)),
            "atomDividesMembers": self.atom_divides_members(),
            "lexCone": self.cone.report(),
            "atomic": False,
        }


def witness_rank2(
    u: Sequence[int] = (1, 0), v: Sequence[int] = (0, 1)
) -> Rank2Witness:
    """
    Non-atomic submonoid of a rank >= 2 group, realized in Z^2.

    For the standard basis this is the lex cone of Z^2; u = e_2, v = e_1 gives
    the mirror monoid with coordinate priority (1, 0).

    Raises:
        ValueError: If u and v are not independent
    """
    u, v = as_point(u, 2), as_point(v, 2)
    if u[0] * v[1] - u[1] * v[0] == 0:
        raise ValueError(f"Invalid realization: {u} and {v} are dependent")
    return Rank2Witness(u, v, lex_cone(2))


@dataclass
class Rank1Witness:
    """
    Generators s_n, t_n with s_n = b_(n+1) s_(n+1) + t_n and b_(n+1) >= 2.

    Every generator splits, so the monoid has no atoms, and it is not a group.
    Group elements are (rational part, torsion part) with torsion in
    Z/m_1 + ... + Z/m_k.
    """
    denominators: List[int]
    torsion_moduli: Tuple[int, ...]
    s_terms: List[Tuple[Fraction, Tuple[int, ...]]]
    t_terms: List[Tuple[int, ...]]
    multipliers: List[int] = field(default_factory=list)

    def _add(self, x, y):
        return (x[0] + y[0], tuple((a + b) % m for a, b, m in zip(x[1], y[1], self.torsion_moduli)))

    def _scale(self, n, x):
        return (n * x[0], tuple((n * a) % m for a, m in zip(x[1], self.torsion_moduli)))

    def identities_hold(self) -> bool:
        for n, b in enumerate(self.multipliers):
            lhs = self.s_terms[n]
            rhs = self._add(self._scale(b, self.s_terms[n + 1]), (Fraction(0), self.t_terms[n]))
            if lhs != rhs:
                return False
        return True

    def to_dict(self) -> Dict[str, Any]:
        identities = []
        for n, b in enumerate(self.multipliers):
            identities.append({
                "n": n + 1,
                "s_n": render(self.s_terms[n][0]),
                "b_next": b,
                "s_next": render(self.s_terms[n + 1][0]),
                "t_n": list(self.t_terms[n]),
            })
        return {
            "type": "rank1",
            "denominators": self.denominators,
            "torsionModuli": list(self.torsion_moduli),
            "identities": identities,
            "identitiesHold": self.identities_hold(),
            "everyGeneratorSplits": all(b >= 2 for b in self.multipliers),
            "negativesExcluded": all(s[0] > 0 for s in self.s_terms),
            "atoms": [],
            "atomic": False,
        }


def witness_rank1_noncyclic(
    desc: QSubgroupDescriptor,
    torsion_terms: Optional[Sequence[Sequence[int]]] = None,
    torsion_moduli: Sequence[int] = (),
    count: int = 5,
) -> Rank1Witness:
    """
    Antimatter submonoid of a non-cyclic rank-1 group.

    s_n = 1/d_n over the strictly increasing part of the chain. With torsion
    terms t_n the torsion parts of s_n are solved downward from zero at the
    truncation, so each identity holds exactly.

    Raises:
        ValueError: If the chain stabilizes (the group is cyclic)
    """
    if desc.stabilizes:
        raise ValueError("Invalid chain: it stabilizes, the group is cyclic and has no witness")
    validate_count(count, "count", minimum=2)
    moduli = tuple(torsion_moduli)
    for m in moduli:
        if isinstance(m, bool) or not isinstance(m, int) or m < 2:
            raise ValueError(f"Invalid torsion modulus {m!r}: must be an integer >= 2")

    denominators: List[int] = []
    size = count
    while len(denominators) < count:
        denominators = sorted(set(desc.terms(size)))
        size *= 2
    denominators = denominators[:count]
    multipliers = [b // a for a, b in zip(denominators, denominators[1:])]

    zero = tuple(0 for _ in moduli)
    if torsion_terms is None:
        t_terms = [zero] * (count - 1)
    else:
        t_terms = [tuple(int(x) % m for x, m in zip(t, moduli)) for t in torsion_terms]
        if len(t_terms) != count - 1 or any(len(t) != len(moduli) for t in torsion_terms):
            raise ValueError(
                f"Invalid torsion terms: expected {count - 1} elements of length {len(moduli)}"
            )

    sigma = [zero] * count
    for n in range(count - 2, -1, -1):
        sigma[n] = tuple(
            (multipliers[n] * s + t) % m for s, t, m in zip(sigma[n + 1], t_terms[n], moduli)
        )
    s_terms = [(Fraction(1, d), sigma[n]) for n, d in enumerate(denominators)]
    witness = Rank1Witness(denominators, moduli, s_terms, t_terms, multipliers)
    if not witness.identities_hold():
        raise VerificationError("rank1-identities")
    return witness
