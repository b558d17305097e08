"""
Finitely generated submonoids of Z^d.

Bounded membership and atom oracles with certificates, exact 2D cone
membership, the lexicographic cone, Zaks generator truncations and the
product with N_0^k.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cmp_to_key
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from sympy import Matrix

from atomcraft.exactnum import QuadRat, quad_ceil, quad_floor, quad_sign, render
from atomcraft.models import (
    DimensionMismatchError,
    LatticePoint,
    MembershipCertificate,
    NotFound,
    UnboundedError,
)
from atomcraft.utils import as_point, validate_count

logger = logging.getLogger(__name__)

Scalar = Union[int, QuadRat]


def add_points(p: Sequence[int], q: Sequence[int]) -> LatticePoint:
    return tuple(x + y for x, y in zip(p, q))


def sub_points(p: Sequence[int], q: Sequence[int]) -> LatticePoint:
    return tuple(x - y for x, y in zip(p, q))


def scale_point(c: int, p: Sequence[int]) -> LatticePoint:
    return tuple(c * x for x in p)


def is_zero(p: Sequence[Any]) -> bool:
    return not any(p)


@dataclass(frozen=True)
class LatticeMonoid:
    """The monoid generated by finitely many nonzero lattice points."""
    dim: int
    generators: Tuple[LatticePoint, ...] = ()

    def __post_init__(self):
        validate_count(self.dim, "dimension")
        points = tuple(as_point(g, self.dim) for g in self.generators)
        if any(is_zero(g) for g in points):
            raise ValueError("Invalid generators: the zero vector is not allowed")
        if len(set(points)) != len(points):
            raise ValueError("Invalid generators: generators must be pairwise distinct")
        object.__setattr__(self, "generators", points)

    @classmethod
    def of(cls, generators: Sequence[Sequence[int]]) -> "LatticeMonoid":
        """Build a monoid, inferring the dimension from the first generator."""
        points = [tuple(g) for g in generators]
        if not points:
            raise ValueError("Cannot infer dimension from an empty generator list")
        return cls(len(points[0]), tuple(points))

    def without(self, point: LatticePoint) -> "LatticeMonoid":
        return LatticeMonoid(self.dim, tuple(g for g in self.generators if g != point))

    def rank(self) -> int:
        """Rank of the difference group gp(M)."""
        if not self.generators:
            return 0
        return int(Matrix([list(g) for g in self.generators]).rank())

    def to_dict(self) -> Dict[str, Any]:
        return {"dim": self.dim, "generators": render(self.generators)}


@dataclass(frozen=True)
class LinearFunctional:
    """A linear form on R^d with coefficients in Q(sqrt2)."""
    coefficients: Tuple[QuadRat, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", tuple(QuadRat.coerce(c) for c in self.coefficients)
        )

    @property
    def dim(self) -> int:
        return len(self.coefficients)

    def __call__(self, point: Sequence[int]) -> QuadRat:
        if len(point) != self.dim:
            raise DimensionMismatchError(self.dim, len(point))
        total = QuadRat(0)
        for coeff, coord in zip(self.coefficients, point):
            total = total + coeff * coord
        return total


# ============================================================================
# Membership
# ============================================================================

def _solve_single(generator: LatticePoint, remainder: LatticePoint, bound: int) -> Optional[int]:
    pivot = next(j for j, x in enumerate(generator) if x)
    if remainder[pivot] % generator[pivot]:
        return None
    c = remainder[pivot] // generator[pivot]
    if not 0 <= c <= bound or scale_point(c, generator) != remainder:
        return None
    return c


def _solve_pair(
    s: LatticePoint, t: LatticePoint, remainder: LatticePoint, bound: int
) -> Optional[Tuple[int, int]]:
    det = s[0] * t[1] - s[1] * t[0]
    alpha = remainder[0] * t[1] - remainder[1] * t[0]
    beta = s[0] * remainder[1] - s[1] * remainder[0]
    if alpha % det or beta % det:
        return None
    alpha, beta = alpha // det, beta // det
    if not (0 <= alpha <= bound and 0 <= beta <= bound):
        return None
    return alpha, beta


def _sign_guards(points: Sequence[LatticePoint], dim: int) -> List[Tuple[bool, bool]]:
    """Per coordinate: (all >= 0, all <= 0) over ``points``."""
    return [
        (all(p[j] >= 0 for p in points), all(p[j] <= 0 for p in points))
        for j in range(dim)
    ]


def _search(
    gens: Sequence[LatticePoint],
    order: Sequence[int],
    remainder: LatticePoint,
    bound: int,
    functional: Optional[LinearFunctional],
    values: Optional[Sequence[QuadRat]],
    guards: Sequence[Sequence[Tuple[bool, bool]]],
    position: int,
    chosen: Dict[int, int],
) -> Optional[Dict[int, int]]:
    if is_zero(remainder):
        return dict(chosen)
    if position == len(order):
        return None

    for j, (nonneg, nonpos) in enumerate(guards[position]):
        if (nonneg and remainder[j] < 0) or (nonpos and remainder[j] > 0):
            return None

    cap = bound
    if functional is not None:
        budget = functional(remainder)
        if quad_sign(budget) <= 0:
            return None

    left = order[position:]
    if len(left) == 1:
        c = _solve_single(gens[left[0]], remainder, bound)
        return None if c is None else {**chosen, left[0]: c}
    if len(left) == 2 and len(remainder) == 2:
        s, t = gens[left[0]], gens[left[1]]
        if s[0] * t[1] - s[1] * t[0] != 0:
            pair = _solve_pair(s, t, remainder, bound)
            if pair is None:
                return None
            return {**chosen, left[0]: pair[0], left[1]: pair[1]}

    idx = order[position]
    if functional is not None:
        cap = min(bound, quad_floor(budget / values[idx]))
    for c in range(cap + 1):
        nxt = sub_points(remainder, scale_point(c, gens[idx])) if c else remainder
        if c:
            chosen[idx] = c
        found = _search(gens, order, nxt, bound, functional, values, guards, position + 1, chosen)
        chosen.pop(idx, None)
        if found is not None:
            return found
    return None


def member_bounded(
    monoid: LatticeMonoid,
    target: Sequence[int],
    bound: int,
    functional: Optional[LinearFunctional] = None,
) -> Union[MembershipCertificate, NotFound]:
    """
    Decide whether target is a sum of generators with every coefficient <= bound.

    The search is exhaustive. It prunes with coordinate sign constraints, solves
    the last generator (or the last two in dimension 2) exactly, and, when a
    strictly positive functional is supplied, caps each coefficient by the
    remaining functional budget.

    Returns:
        A MembershipCertificate if a representation exists within the bound,
        otherwise NotFound carrying the bound.

    Raises:
        DimensionMismatchError: If target has the wrong dimension
        UnboundedError: If functional is not strictly positive on a generator
    """
    target = as_point(target, monoid.dim)
    if bound < 0:
        raise ValueError(f"Invalid bound: {bound}. Must be >= 0")
    gens = monoid.generators
    if is_zero(target):
        return MembershipCertificate(target, gens, {})

    order = list(range(len(gens)))
    values = None
    if functional is not None:
        values = [functional(g) for g in gens]
        for g, value in zip(gens, values):
            if quad_sign(value) <= 0:
                raise UnboundedError(g, value)
        order.sort(key=lambda i: values[i], reverse=True)

    guards = [_sign_guards([gens[i] for i in order[k:]], monoid.dim) for k in range(len(order))]
    coefficients = None
    if order:
        coefficients = _search(gens, order, target, bound, functional, values, guards, 0, {})
    if coefficients is None:
        logger.debug("No representation of %s within bound %d", target, bound)
        return NotFound(target, bound)
    return MembershipCertificate(target, gens, coefficients)


def positive_bound(
    monoid: LatticeMonoid, target: Sequence[int], functional: LinearFunctional
) -> int:
    """
    Coefficient bound ceil(f(target) / min f(g_i)) from a positive functional.

    Any representation of target has every coefficient at most this value, which
    makes member_bounded conclusive.

    Raises:
        UnboundedError: If some generator has f(g) <= 0
    """
    target = as_point(target, monoid.dim)
    values = [functional(g) for g in monoid.generators]
    for g, value in zip(monoid.generators, values):
        if quad_sign(value) <= 0:
            raise UnboundedError(g, value)
    if not values:
        return 0
    value = functional(target)
    if quad_sign(value) <= 0:
        return 0
    return quad_ceil(value / min(values))


@dataclass(frozen=True)
class AtomReport:
    """Atom decision for one generator."""
    point: LatticePoint
    is_atom: bool
    certificate: Optional[MembershipCertificate]
    bound: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "point": render(self.point),
            "isAtom": self.is_atom,
            "bound": self.bound,
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
        }


def atoms_certified(monoid: LatticeMonoid, functional: LinearFunctional) -> List[AtomReport]:
    """
    Decide for each generator g whether g lies in the monoid of the others.

    Conclusive because the functional bounds every coefficient. A found
    certificate is re-indexed against the full generator list.

    Raises:
        UnboundedError: If functional is not strictly positive on a generator
    """
    for g in monoid.generators:
        value = functional(g)
        if quad_sign(value) <= 0:
            raise UnboundedError(g, value)

    reports = []
    index = {g: i for i, g in enumerate(monoid.generators)}
    for g in monoid.generators:
        others = monoid.without(g)
        bound = positive_bound(others, g, functional)
        result = member_bounded(others, g, bound, functional)
        certificate = None
        if isinstance(result, MembershipCertificate):
            remapped = {
                index[others.generators[i]]: c for i, c in result.coefficients.items()
            }
            certificate = MembershipCertificate(g, monoid.generators, remapped)
        reports.append(AtomReport(g, certificate is None, certificate, bound))
    logger.info(
        "Certified atoms: %d of %d generators",
        sum(r.is_atom for r in reports),
        len(reports),
    )
    return reports


# ============================================================================
# Cones in the plane
# ============================================================================

class ConeKind(Enum):
    """Shapes of a finitely generated cone in R^2"""
    ZERO = "zero"
    RAY = "ray"
    SECTOR = "sector"
    LINE = "line"
    HALF_PLANE = "half-plane"
    PLANE = "plane"


@dataclass(frozen=True)
class ConeShape:
    """A planar cone with its bounding rays (counterclockwise order)."""
    kind: ConeKind
    rays: Tuple[LatticePoint, ...] = field(default=())

    def contains(self, w: Sequence[Scalar]) -> bool:
        if self.kind is ConeKind.PLANE:
            return True
        if self.kind is ConeKind.ZERO:
            return is_zero(w)
        if self.kind is ConeKind.RAY:
            (r,) = self.rays
            return _sign(_cross(r, w)) == 0 and _sign(_dot(r, w)) >= 0
        if self.kind is ConeKind.LINE:
            return _sign(_cross(self.rays[0], w)) == 0
        if self.kind is ConeKind.HALF_PLANE:
            return _sign(_cross(self.rays[0], w)) >= 0
        start, end = self.rays
        return _sign(_cross(start, w)) >= 0 and _sign(_cross(w, end)) >= 0


def _sign(value: Scalar) -> int:
    if isinstance(value, QuadRat):
        return quad_sign(value)
    return (value > 0) - (value < 0)


def _cross(s: Sequence[Scalar], t: Sequence[Scalar]) -> Scalar:
    return s[0] * t[1] - s[1] * t[0]


def _dot(s: Sequence[Scalar], t: Sequence[Scalar]) -> Scalar:
    return s[0] * t[0] + s[1] * t[1]


def _half(v: LatticePoint) -> int:
    return 0 if v[1] > 0 or (v[1] == 0 and v[0] > 0) else 1


def _angle_cmp(s: LatticePoint, t: LatticePoint) -> int:
    if _half(s) != _half(t):
        return _half(s) - _half(t)
    return -_sign(_cross(s, t))


def _check_planar(points: Sequence[Sequence[Any]]) -> None:
    for p in points:
        if len(p) != 2:
            raise DimensionMismatchError(2, len(p))


def extreme_rays_2d(generators: Sequence[Sequence[int]]) -> ConeShape:
    """
    Shape of cone(S) for S in Z^2.

    Directions are sorted by angle with exact cross products (collinear
    generators collapse to the shortest). A gap wider than pi between
    consecutive directions marks a pointed cone, a gap of exactly pi a
    half-plane or line, and no such gap the whole plane.
    """
    _check_planar(generators)
    directions: List[LatticePoint] = []
    for g in sorted({tuple(g) for g in generators if any(g)}, key=lambda p: _dot(p, p)):
        if not any(_cross(d, g) == 0 and _dot(d, g) > 0 for d in directions):
            directions.append(g)
    if not directions:
        return ConeShape(ConeKind.ZERO)
    if len(directions) == 1:
        return ConeShape(ConeKind.RAY, (directions[0],))

    ordered = sorted(directions, key=cmp_to_key(_angle_cmp))
    n = len(ordered)
    straight = None
    for i in range(n):
        s, t = ordered[i], ordered[(i + 1) % n]
        cross = _cross(s, t)
        if cross < 0:
            return ConeShape(ConeKind.SECTOR, (t, s))
        if cross == 0 and straight is None:
            straight = (s, t)
    if straight is not None:
        if n == 2:
            return ConeShape(ConeKind.LINE, (straight[0], straight[1]))
        return ConeShape(ConeKind.HALF_PLANE, (straight[1], straight[0]))
    return ConeShape(ConeKind.PLANE)


def cone_member_2d(generators: Sequence[Sequence[int]], w: Sequence[Scalar]) -> bool:
    """
    Exact decision whether w lies in cone(S), S a nonempty set in Z^2.

    ``w`` may be a lattice point or a pair of QuadRat values.
    """
    if not generators:
        raise ValueError("Invalid cone: generator set must be nonempty")
    _check_planar([w])
    return extreme_rays_2d(generators).contains(w)


def cone_member_pairwise(generators: Sequence[Sequence[int]], w: Sequence[Scalar]) -> bool:
    """
    Independent check of w in cone(S): a nonnegative combination of one
    generator or of two linearly independent generators (planar Caratheodory).
    """
    _check_planar(list(generators) + [w])
    if all(_sign(x) == 0 for x in w):
        return True
    gens = [tuple(g) for g in generators if any(g)]
    for s in gens:
        if _sign(_cross(s, w)) == 0 and _sign(_dot(s, w)) > 0:
            return True
    for i, s in enumerate(gens):
        for t in gens[i + 1:]:
            det = _sign(_cross(s, t))
            if det == 0:
                continue
            alpha = _sign(_cross(w, t)) * det
            beta = _sign(_cross(s, w)) * det
            if alpha >= 0 and beta >= 0:
                return True
    return False


# ============================================================================
# Lexicographic cone
# ============================================================================

@dataclass(frozen=True)
class LexCone:
    """
    Nonnegative cone of Z^d under a lexicographic order.

    A point belongs to the cone when its first nonzero coordinate, read in
    ``priority`` order, is positive (or the point is zero). The cone is not
    finitely generated; it is represented by this predicate.
    """
    dim: int
    priority: Tuple[int, ...]

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"Invalid dimension: {self.dim}. Lex cone requires d >= 2")
        if sorted(self.priority) != list(range(self.dim)):
            raise ValueError(
                f"Invalid priority {self.priority!r}: must be a permutation of 0..{self.dim - 1}"
            )

    def contains(self, point: Sequence[int]) -> bool:
        point = as_point(point, self.dim)
        for j in self.priority:
            if point[j]:
                return point[j] > 0
        return True

    def _unit(self, j: int) -> LatticePoint:
        return tuple(1 if i == j else 0 for i in range(self.dim))

    @property
    def atom(self) -> LatticePoint:
        """The unique atom: the minimum nonzero element."""
        return self._unit(self.priority[-1])

    @property
    def witness(self) -> LatticePoint:
        """An element with no atomic factorization."""
        return self._unit(self.priority[0])

    def divides(self, a: Sequence[int], x: Sequence[int]) -> bool:
        """a | x in the cone, i.e. x - a is a member."""
        return self.contains(sub_points(as_point(x, self.dim), as_point(a, self.dim)))

    def in_atom_span(self, point: Sequence[int]) -> bool:
        """Membership in the submonoid generated by the atom."""
        point = as_point(point, self.dim)
        j = self.priority[-1]
        return point[j] >= 0 and all(x == 0 for i, x in enumerate(point) if i != j)

    def report(self) -> Dict[str, Any]:
        witness = self.witness
        return {
            "dim": self.dim,
            "priority": list(self.priority),
            "atoms": [render(self.atom)],
            "witness": render(witness),
            "witnessInMonoid": self.contains(witness),
            "witnessFactorable": self.in_atom_span(witness),
            "atomic": False,
        }


def lex_cone(d: int, priority: Optional[Sequence[int]] = None) -> LexCone:
    """Lex nonnegative cone of Z^d (coordinate 0 has top priority by default)."""
    if d < 2:
        raise ValueError(f"Invalid dimension: {d}. Lex cone requires d >= 2")
    order = tuple(range(d)) if priority is None else tuple(priority)
    return LexCone(d, order)


# ============================================================================
# Generator families
# ============================================================================

def zaks_truncation(k: int) -> LatticeMonoid:
    """
    Generators of the Zaks monoid restricted to indices 1..k, in Z^(3+k).

    e_1, e_2, e_3, then e_{n+3} and f_n = (-n, 1, 1, 0, ..., -1 at n+3, ...)
    for n = 1..k.
    """
    validate_count(k, "k")
    dim = 3 + k

    def unit(j: int) -> LatticePoint:
        return tuple(1 if i == j else 0 for i in range(dim))

    gens = [unit(0), unit(1), unit(2)]
    gens.extend(unit(n + 2) for n in range(1, k + 1))
    for n in range(1, k + 1):
        f = [0] * dim
        f[0], f[1], f[2] = -n, 1, 1
        f[n + 2] = -1
        gens.append(tuple(f))
    return LatticeMonoid(dim, tuple(gens))


def product_with_n0(monoid: LatticeMonoid, extra: int) -> LatticeMonoid:
    """M x N_0^extra: pad generators with zeros and add the new unit vectors."""
    if extra < 0:
        raise ValueError(f"Invalid extra: {extra}. Must be >= 0")
    if extra == 0:
        return monoid
    dim = monoid.dim + extra
    gens = [tuple(g) + (0,) * extra for g in monoid.generators]
    gens.extend(tuple(1 if i == j else 0 for i in range(dim)) for j in range(monoid.dim, dim))
    return LatticeMonoid(dim, tuple(gens))
