"""
Rank-2 lattice monoids that are atomic but fail ACCP.

The construction fixes the line L: y = sqrt2*x + sqrt3, which is tangent to
the unit circle and contains no lattice point, and the axis L0: y = sqrt2*x.
Every distance is measured through the scaled projections

    pi_u(x, y) = y - sqrt2*x        pi_v(x, y) = x + sqrt2*y

(the true projections carry a common factor 1/sqrt3), so membership in the
half-plane L^+ is a single exact comparison of pi_u against sqrt3.

Starting from a_0 = (0, 1) each stage picks a near-axis lattice point a_{2n+2}
from the convergents of sqrt2, its least multiple m_{2n+2} reaching L^+, and
closes the gap with a_{2n+1} = m_{2n} a_{2n} - m_{2n+2} a_{2n+2}. The ideals
generated by m_{2k} a_{2k} then ascend forever.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import mpmath
import pandas as pd

from atomcraft.exactnum import (
    MixedQuad,
    QuadRat,
    cmp_sqrt3,
    decimal_str,
    iter_sqrt2_convergents,
    mp_value,
    quad_floor,
    quad_sign,
    render,
)
from atomcraft.lattice import (
    AtomReport,
    LatticeMonoid,
    LinearFunctional,
    add_points,
    atoms_certified,
    cone_member_2d,
    scale_point,
    sub_points,
)
from atomcraft.models import (
    CheckResult,
    ConstructionError,
    LatticePoint,
    MembershipCertificate,
)
from atomcraft.utils import as_point

logger = logging.getLogger(__name__)

PI_U = LinearFunctional((QuadRat(0, -1), QuadRat(1)), name="pi_u")
PI_V = LinearFunctional((QuadRat(1), QuadRat(0, 1)), name="pi_v")


@dataclass(frozen=True)
class TangentLineConfig:
    """
    The fixed line L: y = sqrt2*x + sqrt3 and the axis L0 = R*v.

    u = (-sqrt2, 1)/sqrt3 is the unit normal (and tangent point) of L,
    v = (1, sqrt2)/sqrt3 spans L0.
    """
    label: str = "y = sqrt2*x + sqrt3"

    def pi_u(self, w: Sequence[int]) -> QuadRat:
        return PI_U(w)

    def pi_v(self, w: Sequence[int]) -> QuadRat:
        return PI_V(w)

    def side(self, w: Sequence[int]) -> int:
        """+1 in the open half-plane above L, -1 below, 0 on L."""
        return cmp_sqrt3(PI_U(w), 1)

    def in_upper(self, w: Sequence[int]) -> bool:
        return self.side(w) >= 0

    def in_lower(self, w: Sequence[int]) -> bool:
        return self.side(w) <= 0

    def on_line(self, w: Sequence[int]) -> bool:
        return self.side(w) == 0

    def in_axis_upper(self, w: Sequence[int]) -> bool:
        return quad_sign(PI_U(w)) >= 0

    def describe(self) -> Dict[str, str]:
        return {
            "line": self.label,
            "axis": "y = sqrt2*x",
            "u": "(-sqrt2, 1)/sqrt3",
            "v": "(1, sqrt2)/sqrt3",
            "pi_u": "y - sqrt2*x",
            "pi_v": "x + sqrt2*y",
        }


TANGENT_LINE = TangentLineConfig()


@dataclass
class ConstructionState:
    """Points a_0..a_{2n}, multipliers m_0, m_2, ..., m_{2n} and bounds l_0..l_n."""
    points: List[LatticePoint]
    multipliers: List[int]
    claim1_bounds: List[int] = field(default_factory=list)
    config: TangentLineConfig = TANGENT_LINE

    @property
    def stage(self) -> int:
        return len(self.multipliers) - 1

    def stage_points(self, n: int) -> List[LatticePoint]:
        return list(self.points[: 2 * n + 1])

    def stage_monoid(self, n: int) -> LatticeMonoid:
        return LatticeMonoid(2, tuple(self.stage_points(n)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "stage": self.stage,
            "line": self.config.describe(),
            "points": render(self.points),
            "multipliers": list(self.multipliers),
            "bounds": list(self.claim1_bounds),
            "piU": [str(PI_U(p)) for p in self.points],
            "piV": [str(PI_V(p)) for p in self.points],
        }


# ============================================================================
# Building blocks
# ============================================================================

def find_near_axis_point(threshold: Any, pv_floor: Any = 0) -> LatticePoint:
    """
    First convergent point close enough to L0 and far enough along it.

    Scans w = +/-(q_k, p_k) over the convergents p_k/q_k of sqrt2, with the sign
    chosen so that pi_u(w) > 0, and returns the first w with
    pi_u(w) < threshold, |pi_v(w)| > pv_floor and w below L.

    Args:
        threshold: Positive bound on pi_u (QuadRat, rational or MixedQuad)
        pv_floor: Lower bound on |pi_v| (same types)

    Raises:
        ValueError: If threshold is not positive
    """
    threshold = MixedQuad.coerce(threshold)
    floor = MixedQuad.coerce(pv_floor)
    if threshold.sign() <= 0:
        raise ValueError(f"Invalid threshold: {threshold}. Must be > 0")

    for conv in iter_sqrt2_convergents():
        w = (conv.q, conv.p)
        u = PI_U(w)
        if quad_sign(u) < 0:
            w = (-conv.q, -conv.p)
            u = -u
        if not threshold > u:
            continue
        # the sign flip can make pi_v negative; the floor bounds its magnitude
        if not floor < abs(PI_V(w)):
            continue
        if cmp_sqrt3(u, 1) >= 0:
            continue
        logger.debug("Convergent %d gives near-axis point %s", conv.index, w)
        return w
    raise AssertionError("unreachable: convergent stream is infinite")


def min_multiple_into_upper(a: Sequence[int]) -> int:
    """
    Least m with m*a in L^+ (m*pi_u(a) >= sqrt3).

    Raises:
        ValueError: If pi_u(a) <= 0, so no multiple reaches L^+
    """
    a = as_point(a, 2)
    u = PI_U(a)
    if quad_sign(u) <= 0:
        raise ValueError(f"Invalid point {a}: pi_u = {u} <= 0, multiples never reach L^+")
    with mpmath.workdps(60):
        m = max(1, int(mpmath.floor(mpmath.sqrt(3) / mp_value(u))))
    while cmp_sqrt3(m * u, 1) < 0:
        m += 1
    while m > 1 and cmp_sqrt3((m - 1) * u, 1) >= 0:
        m -= 1
    return m


def _claim1_bound_for(points: Sequence[LatticePoint]) -> int:
    if not points:
        raise ValueError("Invalid state: no points")
    min_u = min(PI_U(p) for p in points)
    if quad_sign(min_u) <= 0:
        raise ValueError(f"Invalid state: pi_u must be positive on every point, got {min_u}")
    max_v = max(abs(PI_V(p)) for p in points)
    return quad_floor(4 * max_v / min_u) + 1


def claim1_bound(state: ConstructionState) -> int:
    """Least integer l with l * min pi_u(a_i) > 4 * max |pi_v(a_i)|."""
    return _claim1_bound_for(state.points)


# ============================================================================
# Construction
# ============================================================================

def verify_conditions(state: ConstructionState) -> List[CheckResult]:
    """Exact checks of the construction invariants for every built stage."""
    pts, mults, bounds = state.points, state.multipliers, state.claim1_bounds
    checks = []

    for k in range(state.stage):
        expected = sub_points(
            scale_point(mults[k], pts[2 * k]), scale_point(mults[k + 1], pts[2 * k + 2])
        )
        checks.append(CheckResult(
            f"condition-1/stage-{k + 1}",
            pts[2 * k + 1] == expected,
            f"a_{2 * k + 1} = m_{2 * k} a_{2 * k} - m_{2 * k + 2} a_{2 * k + 2}",
        ))

    for k, m in enumerate(mults):
        u = PI_U(pts[2 * k])
        minimal = m >= 1 and cmp_sqrt3(m * u, 1) > 0 and cmp_sqrt3((m - 1) * u, 1) < 0
        checks.append(CheckResult(
            f"condition-2/m_{2 * k}", minimal, f"m_{2 * k} = {m} is least with m*a in L^+"
        ))
        checks.append(CheckResult(f"multiplier/m_{2 * k}", m >= 2, f"m_{2 * k} = {m} >= 2"))

    values = [PI_U(p) for p in pts]
    decreasing = all(quad_sign(v) > 0 for v in values) and all(
        values[i + 1] < values[i] for i in range(len(values) - 1)
    )
    checks.append(CheckResult(
        "condition-3", decreasing, "0 < pi_u(a_{k+1}) < pi_u(a_k) for all k"
    ))
    checks.append(CheckResult(
        "off-line",
        all(cmp_sqrt3(v, 1) != 0 for v in values),
        "no constructed point lies on L",
    ))
    checks.append(CheckResult(
        "below-line",
        all(cmp_sqrt3(values[2 * k], 1) < 0 for k in range(len(mults))),
        "every even-index point lies in L^-",
    ))

    for k in range(min(state.stage, len(bounds))):
        floor = MixedQuad(QuadRat(0), bounds[k])
        large = all(floor < abs(PI_V(pts[i])) for i in (2 * k + 1, 2 * k + 2))
        checks.append(CheckResult(
            f"pv-bound/stage-{k + 1}",
            large,
            f"|pi_v| of a_{2 * k + 1}, a_{2 * k + 2} exceeds {bounds[k]} * sqrt3",
        ))
    return checks


def _extend(state: ConstructionState) -> None:
    n = state.stage
    a = state.points[2 * n]
    m = state.multipliers[n]
    ell = state.claim1_bounds[n]

    threshold = MixedQuad(m * PI_U(a) / 2, Fraction(-1, 2))
    pv_floor = max(
        MixedQuad(QuadRat(0), ell), MixedQuad.coerce(abs(PI_V(scale_point(m, a))))
    )
    new = find_near_axis_point(threshold, pv_floor)
    m_new = min_multiple_into_upper(new)
    odd = sub_points(scale_point(m, a), scale_point(m_new, new))
    state.points.extend([odd, new])
    state.multipliers.append(m_new)
    logger.info(
        "Stage %d: a_%d = %s, m_%d = %d, a_%d = %s",
        n + 1, 2 * n + 2, new, 2 * n + 2, m_new, 2 * n + 1, odd,
    )


def construct(stages: int) -> ConstructionState:
    """
    Run the construction for ``stages`` stages, checking invariants after each.

    Raises:
        ValueError: If stages < 0
        ConstructionError: If an invariant fails (names the condition)
    """
    if stages < 0:
        raise ValueError(f"Invalid stages: {stages}. Must be >= 0")
    a0 = (0, 1)
    state = ConstructionState([a0], [min_multiple_into_upper(a0)])
    for _ in range(stages):
        state.claim1_bounds.append(claim1_bound(state))
        _extend(state)
        for check in verify_conditions(state):
            if not check.passed:
                raise ConstructionError(check.name, state.stage, check.detail)
    state.claim1_bounds.append(claim1_bound(state))
    return state


# ============================================================================
# Atom verification
# ============================================================================

@dataclass(frozen=True)
class GeometricVerdict:
    """Whether the cone geometry establishes that a generator is an atom."""
    point: LatticePoint
    is_atom: bool
    reason: str

    def to_dict(self) -> Dict[str, Any]:
        return {"point": render(self.point), "isAtom": self.is_atom, "reason": self.reason}


@dataclass
class StageAtomReport:
    """Geometric and (optionally) enumerated atom decisions for one stage monoid."""
    stage: int
    generators: List[LatticePoint]
    geometric: List[GeometricVerdict]
    algebraic: Optional[List[AtomReport]] = None

    @property
    def passes(self) -> bool:
        if not all(v.is_atom for v in self.geometric):
            return False
        return self.algebraic is None or all(r.is_atom for r in self.algebraic)

    def failures(self) -> List[Dict[str, Any]]:
        failed = []
        for verdict in self.geometric:
            if not verdict.is_atom:
                failed.append({"check": "geometric", **verdict.to_dict()})
        for report in self.algebraic or []:
            if not report.is_atom:
                failed.append({"check": "algebraic", **report.to_dict()})
        return failed

    def to_dict(self) -> Dict[str, Any]:
        return {
            "stage": self.stage,
            "generators": render(self.generators),
            "geometric": [v.to_dict() for v in self.geometric],
            "algebraic": None if self.algebraic is None else [r.to_dict() for r in self.algebraic],
            "passes": self.passes,
            "failures": self.failures(),
        }


@dataclass
class AtomVerification:
    stages: List[StageAtomReport]

    @property
    def passes(self) -> bool:
        return all(s.passes for s in self.stages)

    def to_dict(self) -> Dict[str, Any]:
        return {"passes": self.passes, "stages": [s.to_dict() for s in self.stages]}


def _outside_integral_span(a: LatticePoint, s: LatticePoint, t: LatticePoint) -> bool:
    det = s[0] * t[1] - s[1] * t[0]
    if det == 0:
        return False
    alpha = a[0] * t[1] - a[1] * t[0]
    beta = s[0] * a[1] - s[1] * a[0]
    return bool(alpha % det or beta % det)


def _geometric_stage(
    state: ConstructionState, k: int, previous: Optional[List[GeometricVerdict]]
) -> List[GeometricVerdict]:
    pts = state.stage_points(k)
    if k == 0:
        return [GeometricVerdict(pts[0], True, "single generator")]

    odd, new = pts[2 * k - 1], pts[2 * k]
    base = pts[: 2 * k - 1]
    verdicts = []
    if k == 1:
        ok = _outside_integral_span(base[0], odd, new)
        reason = (
            "non-integral coordinates in the basis {a_1, a_2}" if ok
            else "integral coordinates in the basis {a_1, a_2}; not decided"
        )
        verdicts.append(GeometricVerdict(base[0], ok, reason))
    else:
        bounds = state.claim1_bounds
        ell = bounds[k - 1] if len(bounds) >= k else _claim1_bound_for(base)
        floor = MixedQuad(QuadRat(0), ell)
        large = all(floor < abs(PI_V(w)) for w in (odd, new))
        for i, a in enumerate(base):
            separated = all(not cone_member_2d(base, add_points(w, a)) for w in (odd, new))
            ok = previous[i].is_atom and separated and large
            if ok:
                reason = f"w + a_{i} outside cone(M_{2 * k - 2}) for both new points"
            elif not previous[i].is_atom:
                reason = "not established at the previous stage"
            elif not separated:
                reason = f"w + a_{i} inside cone(M_{2 * k - 2})"
            else:
                reason = f"|pi_v| of a new point does not exceed l_{k - 1} * sqrt3"
            verdicts.append(GeometricVerdict(a, ok, reason))

    for w, other in ((odd, new), (new, odd)):
        outside = not cone_member_2d(base + [other], w)
        reason = (
            "outside the cone of the other generators" if outside
            else "inside the cone of the other generators"
        )
        verdicts.append(GeometricVerdict(w, outside, reason))
    return verdicts


def verify_atoms(state: ConstructionState, enumerate_up_to: int = 2) -> AtomVerification:
    """
    Check that every generator of every stage monoid M_{2n} is an atom.

    Two independent checks: the cone geometry behind the atomicity argument,
    and, for stages <= ``enumerate_up_to``, the enumeration oracle bounded by
    the positive functional pi_u.
    """
    reports = []
    previous = None
    for k in range(state.stage + 1):
        geometric = _geometric_stage(state, k, previous)
        algebraic = None
        if k <= enumerate_up_to:
            algebraic = atoms_certified(state.stage_monoid(k), PI_U)
        reports.append(StageAtomReport(k, state.stage_points(k), geometric, algebraic))
        previous = geometric
        logger.info("Stage %d atom check: %s", k, "pass" if reports[-1].passes else "FAIL")
    return AtomVerification(reports)


# ============================================================================
# Chain and figure
# ============================================================================

@dataclass
class AccpFailureChain:
    """Ideal generators b_k = m_{2k} a_{2k} and witnesses b_k - b_{k+1} = a_{2k+1}."""
    ideals: List[LatticePoint]
    witnesses: List[MembershipCertificate]

    def __len__(self) -> int:
        return len(self.ideals)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ideals": render(self.ideals),
            "witnesses": [w.to_dict() for w in self.witnesses],
        }


def accp_chain(state: ConstructionState) -> AccpFailureChain:
    """
    The non-stabilizing chain of principal ideals b_0 + M, b_1 + M, ...

    Raises:
        ValueError: If the state has no stage yet
        ConstructionError: If a witness does not re-sum or is not positive
    """
    if state.stage < 1:
        raise ValueError("Invalid state: the chain requires stage >= 1")
    ideals = [scale_point(m, state.points[2 * k]) for k, m in enumerate(state.multipliers)]
    witnesses = []
    for k in range(state.stage):
        odd = 2 * k + 1
        certificate = MembershipCertificate(state.points[odd], state.points, {odd: 1})
        if add_points(ideals[k + 1], certificate.target) != ideals[k]:
            raise ConstructionError("chain-witness", k + 1, f"b_{k} != b_{k + 1} + a_{odd}")
        if quad_sign(PI_U(certificate.target)) <= 0:
            raise ConstructionError("chain-witness", k + 1, f"a_{odd} is not a nonzero nonunit")
        witnesses.append(certificate)
    return AccpFailureChain(ideals, witnesses)


@dataclass(frozen=True)
class FigureExport:
    csv: str
    svg: str


_CSV_COLUMNS = ["label", "x", "y", "pi_u", "pi_u_decimal", "pi_v", "pi_v_decimal"]


def _figure_csv(state: ConstructionState, digits: int) -> str:
    rows = []
    for i, p in enumerate(state.points):
        u, v = PI_U(p), PI_V(p)
        rows.append({
            "label": f"a_{i}",
            "x": p[0],
            "y": p[1],
            "pi_u": str(u),
            "pi_u_decimal": decimal_str(u, digits),
            "pi_v": str(v),
            "pi_v_decimal": decimal_str(v, digits),
        })
    frame = pd.DataFrame(rows, columns=_CSV_COLUMNS)
    return frame.to_csv(index=False, lineterminator="\n")


def _figure_svg(state: ConstructionState, digits: int) -> str:
    with mpmath.workdps(digits + 20):
        def fmt(value: Any) -> str:
            return mpmath.nstr(value, digits)

        xs = [mpmath.mpf(p[0]) for p in state.points] + [mpmath.mpf(0)]
        ys = [mpmath.mpf(p[1]) for p in state.points] + [mpmath.mpf(0)]
        span = max(max(xs) - min(xs), max(ys) - min(ys), mpmath.mpf(1))
        pad = span / 10
        x_lo, x_hi = min(xs) - pad, max(xs) + pad
        y_lo, y_hi = min(ys) - pad, max(ys) + pad
        radius = span / 100
        sqrt2, sqrt3 = mpmath.sqrt(2), mpmath.sqrt(3)

        lines = [
            '<svg xmlns="http://www.w3.org/2000/svg" width="800" height="800" '
            f'viewBox="{fmt(x_lo)} {fmt(-y_hi)} {fmt(x_hi - x_lo)} {fmt(y_hi - y_lo)}">',
            f"  <title>Points a_0..a_{len(state.points) - 1} with L and L0 "
            f"(approximate rendering of exact data, {digits} significant digits)</title>",
            '  <g transform="scale(1,-1)">',
        ]
        for name, offset, style in (
            ("L", sqrt3, 'stroke="#c0392b"'),
            ("L0", mpmath.mpf(0), 'stroke="#2c3e50" stroke-dasharray="4 4"'),
        ):
            lines.append(
                f'    <line id="{name}" x1="{fmt(x_lo)}" y1="{fmt(sqrt2 * x_lo + offset)}" '
                f'x2="{fmt(x_hi)}" y2="{fmt(sqrt2 * x_hi + offset)}" {style} '
                'stroke-width="1" vector-effect="non-scaling-stroke"/>'
            )
        for i, p in enumerate(state.points):
            lines.append(
                f'    <circle id="a_{i}" cx="{fmt(mpmath.mpf(p[0]))}" '
                f'cy="{fmt(mpmath.mpf(p[1]))}" r="{fmt(radius)}" fill="#2980b9">'
                f"<title>a_{i} = ({p[0]}, {p[1]})</title></circle>"
            )
        lines.extend(["  </g>", "</svg>"])
    return "\n".join(lines) + "\n"


def export_figure(state: ConstructionState, digits: int = 12) -> FigureExport:
    """
    CSV of exact points with decimal projections, and an SVG plot of the points
    with L and L0. The SVG is a plot only; coordinates are rounded to ``digits``.
    """
    if state.stage < 1:
        raise ValueError("Invalid state: the figure requires stage >= 1")
    return FigureExport(_figure_csv(state, digits), _figure_svg(state, digits))
