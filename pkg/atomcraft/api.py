"""
Public API for atomcraft library.

Family plugins are discovered and loaded here; every demonstration is also
reachable as a named command that returns a CertificateEnvelope, which is what
the command-line front end prints and what ``verify_envelope`` re-checks.
"""

from __future__ import annotations

import importlib
import json
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from types import ModuleType
from typing import Any, Callable, Dict, List, Optional, Tuple

from atomcraft.algebra import (
    ExponentGroup,
    FieldDescriptor,
    GroupShape,
    antimatter_witness,
    classify_group_algebra,
    irreducible_search_bounded,
    length_demo,
    parse_element,
    rational_ge1_split,
)
from atomcraft.construction import (
    PI_U,
    accp_chain,
    construct,
    export_figure,
    verify_atoms,
    verify_conditions,
)
from atomcraft.exactnum import parse_quad, quad_sign, render
from atomcraft.groups import (
    ChainRule,
    FgGroupPresentation,
    QSubgroupDescriptor,
    classify_fg,
    classify_q_subgroup,
    witness_rank1_noncyclic,
    witness_rank2,
)
from atomcraft.lattice import (
    LatticeMonoid,
    LinearFunctional,
    add_points,
    atoms_certified,
    member_bounded,
    positive_bound,
    product_with_n0,
    zaks_truncation,
)
from atomcraft.models import (
    CertificateEnvelope,
    CheckResult,
    ConstructionError,
    MembershipCertificate,
    SearchStatus,
    VerificationError,
)
from atomcraft.puiseux import (
    NormalForm,
    PuiseuxFamily,
    atoms_family,
    chain_certificate,
    gottili_generators,
    member_truncated,
    normal_form_P,
)
from atomcraft.utils import env_int

logger = logging.getLogger(__name__)

_FAMILY_NAME_PATTERN = re.compile(r"^[a-z][a-z0-9_]*$")
_REQUIRED_EXPORTS = ("normalize", "generators", "ATOM_SET")


# ============================================================================
# Family plugins
# ============================================================================

def list_families() -> List[str]:
    """
    List the packaged family modules.

    Returns:
        List of family names (without .py extension)
    """
    pkg = resources.files("atomcraft.families")
    return sorted(
        entry.name[:-3]
        for entry in pkg.iterdir()
        if entry.name.endswith(".py") and not entry.name.startswith("_")
    )


def load_family(family_name: str) -> ModuleType:
    """
    Load a family module from ``atomcraft.families``.

    Args:
        family_name: Name of the family (e.g., 'grams')

    Returns:
        The family module

    Raises:
        FileNotFoundError: If family module not found
        AttributeError: If module lacks one of normalize, generators, ATOM_SET
        ValueError: If family_name is invalid
    """
    if not _FAMILY_NAME_PATTERN.match(family_name):
        raise ValueError(
            f"Invalid family name: {family_name!r}. "
            "Use lowercase letters, digits, and underscores."
        )

    try:
        module = importlib.import_module(f"atomcraft.families.{family_name}")
    except ModuleNotFoundError as e:
        raise FileNotFoundError(
            f"Family module not found: {family_name}. "
            f"Available families: {', '.join(list_families()) or 'none'}"
        ) from e

    for name in _REQUIRED_EXPORTS:
        if not hasattr(module, name):
            raise AttributeError(f"Family module '{family_name}' does not export '{name}'")
    return module


# ============================================================================
# Commands
# ============================================================================

@dataclass(frozen=True)
class Settings:
    """Run settings; the CLI fills them from the environment and flags."""
    verify_stages: int = 2
    search_budget: int = 5000

    @classmethod
    def from_env(cls) -> "Settings":
        return cls(
            verify_stages=env_int("ATOMCRAFT_VERIFY_STAGES", 2),
            search_budget=env_int("ATOMCRAFT_SEARCH_BUDGET", 5000),
        )


Checks = List[CheckResult]
Handler = Callable[[Dict[str, Any], Settings], Tuple[Dict[str, Any], Checks]]


def _family(params: Dict[str, Any]) -> PuiseuxFamily:
    return PuiseuxFamily.create(params["family"], **params.get("familyParams", {}))


def _functional(coefficients: List[str]) -> LinearFunctional:
    return LinearFunctional(tuple(parse_quad(str(c)) for c in coefficients))


def _certificate_check(name: str, certificate: Any) -> CheckResult:
    ok = isinstance(certificate, MembershipCertificate) and _resums(certificate.to_dict())
    return CheckResult(name, ok, "re-summed exactly" if ok else "no certificate")


def _chain_checks(
    ideals: List[Any],
    witnesses: List[MembershipCertificate],
    combine: Callable[[Any, Any], Any],
    positive: Callable[[Any], bool],
) -> Checks:
    """One check per step: b_n == b_(n+1) + w_n, with w_n re-summing and nonzero."""
    checks = []
    for n, witness in enumerate(witnesses):
        identity = combine(ideals[n + 1], witness.target) == ideals[n]
        ok = identity and positive(witness.target) and _resums(witness.to_dict())
        detail = f"b_{n} == b_{n + 1} + w_{n}" if identity else f"b_{n} != b_{n + 1} + w_{n}"
        checks.append(CheckResult(f"chain-witness/{n + 1}", ok, detail))
    return checks


def _accp_checks(state: Any) -> Tuple[Dict[str, Any], Checks]:
    chain = accp_chain(state)
    checks = _chain_checks(
        chain.ideals, chain.witnesses, add_points, lambda w: quad_sign(PI_U(w)) > 0
    )
    return chain.to_dict(), checks


def _figure_result(state: Any, digits: int) -> Tuple[Dict[str, Any], CheckResult]:
    figure = export_figure(state, digits)
    circles = figure.svg.count("<circle ")
    ok = figure.svg.count("<line ") == 2 and circles == len(state.points)
    result = {"points": render(state.points), "csv": figure.csv, "svg": figure.svg}
    return result, CheckResult("figure-elements", ok, f"{circles} points, 2 lines")


def _construct(params: Dict[str, Any], settings: Settings) -> Tuple[Dict[str, Any], Checks]:
    stages = int(params.get("stages", 1))
    state = construct(stages)
    result = state.to_dict()
    checks = verify_conditions(state)
    if params.get("verifyAtoms"):
        report = verify_atoms(state, int(params.get("enumerateUpTo", settings.verify_stages)))
        result["atoms"] = report.to_dict()
        checks.extend(
            CheckResult(f"atoms/stage-{s.stage}", s.passes, "geometric and enumerated")
            for s in report.stages
        )
    if params.get("chain") and stages >= 1:
        try:
            result["chain"], chain_checks = _accp_checks(state)
            checks.extend(chain_checks)
        except ConstructionError as e:
            checks.append(CheckResult(e.condition, False, str(e)))
    if params.get("figure"):
        figure, figure_check = _figure_result(state, int(params.get("digits", 12)))
        result["figure"] = {"csv": figure["csv"], "svg": figure["svg"]}
        checks.append(figure_check)
    return result, checks


def _atoms(params: Dict[str, Any], settings: Settings) -> Tuple[Dict[str, Any], Checks]:
    if "family" in params:
        report = atoms_family(_family(params), int(params.get("count", 5)))
        return report.to_dict(), [
            CheckResult("atom-spot-check", report.passes, f"{report.checked} generators")
        ]
    if "generators" in params:
        monoid = LatticeMonoid.of(params["generators"])
        reports = atoms_certified(monoid, _functional(params["functional"]))
        checks = [
            _certificate_check(f"certificate/{i}", r.certificate)
            for i, r in enumerate(reports)
            if r.certificate is not None
        ]
        return {"monoid": monoid.to_dict(), "atoms": [r.to_dict() for r in reports]}, checks
    state = construct(int(params.get("stages", 2)))
    report = verify_atoms(state, int(params.get("enumerateUpTo", settings.verify_stages)))
    checks = [CheckResult(f"atoms/stage-{s.stage}", s.passes, "") for s in report.stages]
    return report.to_dict(), checks


def _chain(params: Dict[str, Any], settings: Settings) -> Tuple[Dict[str, Any], Checks]:
    if "family" in params:
        certificate = chain_certificate(_family(params), int(params.get("count", 8)))
        checks = _chain_checks(
            [c.target for c in certificate.ideals],
            certificate.witnesses,
            lambda a, b: a + b,
            lambda w: w > 0,
        )
        return certificate.to_dict(), checks
    return _accp_checks(construct(int(params.get("stages", 3))))


def _member(params: Dict[str, Any], settings: Settings) -> Tuple[Dict[str, Any], Checks]:
    if "family" in params:
        family = _family(params)
        if params.get("normalForm"):
            form = normal_form_P(family, params["target"])
            checks = []
            if isinstance(form, NormalForm):
                ok = form.reassemble() == form.target
                checks.append(CheckResult("normal-form-reassembles", ok, ""))
            return form.to_dict(), checks
        result = member_truncated(family, int(params.get("count", 5)), params["target"])
    else:
        monoid = LatticeMonoid.of(params["generators"])
        target = params["target"]
        if "functional" in params:
            functional = _functional(params["functional"])
            bound = positive_bound(monoid, target, functional)
            result = member_bounded(monoid, target, bound, functional)
        else:
            result = member_bounded(monoid, target, int(params["bound"]))
    checks = []
    if isinstance(result, MembershipCertificate):
        checks.append(_certificate_check("certificate-resums", result))
    return result.to_dict(), checks


def _classify_group(params: Dict[str, Any], settings: Settings) -> Tuple[Dict[str, Any], Checks]:
    if "chain" in params:
        desc = _chain_descriptor(params)
        info = classify_q_subgroup(desc)
        checks = []
        if info.witness is not None:
            checks.append(CheckResult("witness-identities", info.witness["identitiesHold"], ""))
        return {"chain": desc.to_dict(), **info.to_dict()}, checks
    pres = _presentation(params)
    info = classify_fg(pres)
    U, D, V = info.smith
    ok = bool((U.dot(pres.matrix()).dot(V) == D).all())
    checks = [
        CheckResult("smith-identity", ok, "U @ A @ V == D"),
        CheckResult("accp-equals-atomic", info.hereditary_accp == info.hereditarily_atomic, ""),
    ]
    return {"presentation": pres.to_dict(), **info.to_dict()}, checks


def _chain_descriptor(params: Dict[str, Any]) -> QSubgroupDescriptor:
    rule = params.get("rule")
    return QSubgroupDescriptor(
        tuple(int(d) for d in params["chain"]),
        None if rule is None else ChainRule(rule["kind"], int(rule.get("base", 2))),
    )


def _presentation(params: Dict[str, Any]) -> FgGroupPresentation:
    relations = [tuple(int(x) for x in row) for row in params.get("relations", [])]
    if "generators" in params:
        return FgGroupPresentation(int(params["generators"]), tuple(relations))
    return FgGroupPresentation.from_rows(relations)


def _classify_algebra(params: Dict[str, Any], settings: Settings) -> Tuple[Dict[str, Any], Checks]:
    field_desc = FieldDescriptor(
        int(params.get("characteristic", 2)), bool(params.get("algebraic", True))
    )
    if "chain" in params:
        group: Any = _chain_descriptor(params)
    elif "relations" in params or "generators" in params:
        group = _presentation(params)
    else:
        group = GroupShape(params.get("group", GroupShape.INFINITE_CYCLIC.value))
    return classify_group_algebra(field_desc, group).to_dict(), []


def _frobenius(params: Dict[str, Any], settings: Settings) -> Tuple[Dict[str, Any], Checks]:
    p = int(params["p"])
    f = parse_element(params["element"], p)
    group = ExponentGroup.parse(params["group"]) if "group" in params else None
    witness = antimatter_witness(f, p, group)
    check = CheckResult("root-power", witness.root ** p == f, f"g^{p} == f")
    return witness.to_dict(), [check]


def _lengths(params: Dict[str, Any], settings: Settings) -> Tuple[Dict[str, Any], Checks]:
    demo = length_demo(
        int(params.get("primesUpTo", 7)),
        int(params.get("modulus", 2)),
        Fraction(str(params.get("element", "1"))),
    )
    result = demo.to_dict()
    checks = [CheckResult("algebra-factorizations", demo.passes, "(x^(1/q))^q == x")]
    if "split" in params:
        left, right = rational_ge1_split(Fraction(str(params["split"])))
        result["split"] = {"q": str(params["split"]), "factors": [str(left), str(right)]}
        product_ok = left * right == Fraction(str(params["split"]))
        checks.append(CheckResult("split-product", product_ok, ""))
    return result, checks


def _figure(params: Dict[str, Any], settings: Settings) -> Tuple[Dict[str, Any], Checks]:
    state = construct(int(params.get("stages", 1)))
    result, check = _figure_result(state, int(params.get("digits", 12)))
    return result, [check]


def _zaks(params: Dict[str, Any], settings: Settings) -> Tuple[Dict[str, Any], Checks]:
    k = int(params.get("k", 3))
    monoid = zaks_truncation(k)
    extra = int(params.get("extra", 0))
    if extra:
        monoid = product_with_n0(monoid, extra)
    expected = 3 + 2 * k + extra
    return monoid.to_dict(), [
        CheckResult("generator-count", len(monoid.generators) == expected, f"{expected}")
    ]


def _gottili(params: Dict[str, Any], settings: Settings) -> Tuple[Dict[str, Any], Checks]:
    family = PuiseuxFamily.create("sparse_primes", base=int(params.get("base", 5)))
    beta = parse_quad(str(params.get("beta", "0,1")))
    monoid = gottili_generators(family, int(params.get("count", 3)), beta)
    return monoid.to_dict(), [CheckResult("rank-two", monoid.rank() == 2, "")]


def _witness(params: Dict[str, Any], settings: Settings) -> Tuple[Dict[str, Any], Checks]:
    if params.get("kind", "rank2") == "rank2":
        witness = witness_rank2(tuple(params.get("u", (1, 0))), tuple(params.get("v", (0, 1))))
        report = witness.to_dict()
        return report, [
            CheckResult("atom-divides-members", report["atomDividesMembers"], ""),
            CheckResult("witness-unfactorable", not report["witnessFactorable"], ""),
        ]
    witness = witness_rank1_noncyclic(
        _chain_descriptor(params),
        params.get("torsion"),
        tuple(params.get("moduli", ())),
        int(params.get("count", 5)),
    )
    return witness.to_dict(), [CheckResult("identities", witness.identities_hold(), "")]


def _search(params: Dict[str, Any], settings: Settings) -> Tuple[Dict[str, Any], Checks]:
    f = parse_element(params["element"], int(params.get("modulus", 2)))
    family = _family(params) if "family" in params else None
    report = irreducible_search_bounded(
        f,
        family,
        int(params["count"]) if "count" in params else None,
        int(params.get("budget", settings.search_budget)),
    )
    checks = []
    if report.status is SearchStatus.FACTORED:
        g, h = report.factors
        checks.append(CheckResult("factors-multiply", g * h == f, "g * h == f"))
    return report.to_dict(), checks


def _failure(error: ConstructionError | VerificationError) -> Tuple[Dict[str, Any], Checks]:
    if isinstance(error, ConstructionError):
        name, where = error.condition, {"stage": error.stage}
    else:
        name, where = error.check, {}
    failure = {"condition": name, "error": type(error).__name__, "message": str(error), **where}
    return {"failure": failure}, [CheckResult(name, False, str(error))]


COMMANDS: Dict[str, Handler] = {
    "construct": _construct,
    "atoms": _atoms,
    "chain": _chain,
    "member": _member,
    "classify-group": _classify_group,
    "classify-algebra": _classify_algebra,
    "frobenius": _frobenius,
    "lengths": _lengths,
    "figure": _figure,
    "zaks": _zaks,
    "gottili": _gottili,
    "witness": _witness,
    "search": _search,
}


def certify(
    command: str, parameters: Dict[str, Any], settings: Optional[Settings] = None
) -> CertificateEnvelope:
    """
    Run a named command and wrap its result with the checks that were run.

    A violated construction condition or a failed post-condition does not
    raise: the envelope is still returned, carrying the failure as a check
    named after the condition and the error under ``result["failure"]``.

    Raises:
        ValueError: If the command is unknown or its parameters are invalid
    """
    from atomcraft import __version__

    if command not in COMMANDS:
        raise ValueError(f"Unknown command: {command!r}. Valid commands: {', '.join(COMMANDS)}")
    settings = settings or Settings()
    try:
        result, checks = COMMANDS[command](parameters, settings)
    except (ConstructionError, VerificationError) as e:
        result, checks = _failure(e)
        logger.warning("%s: %s", command, e)
    envelope = CertificateEnvelope(
        command, parameters, json.loads(json.dumps(result)), checks, __version__
    )
    logger.info("%s: %d checks, passed=%s", command, len(checks), envelope.passed)
    return envelope


# ============================================================================
# Standalone verification
# ============================================================================

def _as_exact(value: Any) -> Any:
    if isinstance(value, list):
        return tuple(_as_exact(v) for v in value)
    return Fraction(str(value))


def _resums(doc: Dict[str, Any]) -> bool:
    """Recompute sum(c_i * g_i) from a serialized certificate."""
    try:
        target = _as_exact(doc["target"])
        gens = [_as_exact(g) for g in doc["generators"]]
        if isinstance(target, tuple):
            total = tuple(
                sum(int(c) * gens[int(i)][j] for i, c in doc["coefficients"].items())
                for j in range(len(target))
            )
        else:
            total = sum(
                (int(c) * gens[int(i)] for i, c in doc["coefficients"].items()), Fraction(0)
            )
        return total == target
    except (KeyError, IndexError, TypeError, ValueError):
        return False


def _certificates(node: Any) -> List[Dict[str, Any]]:
    found = []
    if isinstance(node, dict):
        if node.get("found") is True and {"target", "generators", "coefficients"} <= set(node):
            found.append(node)
        for value in node.values():
            found.extend(_certificates(value))
    elif isinstance(node, list):
        for value in node:
            found.extend(_certificates(value))
    return found


def verify_envelope(
    document: Dict[str, Any], settings: Optional[Settings] = None
) -> List[CheckResult]:
    """
    Re-check an emitted envelope: its own checks passed, re-running the command
    reproduces the result, and every embedded certificate re-sums.
    """
    envelope = CertificateEnvelope.from_dict(document)
    count = len(envelope.verification)
    checks = [CheckResult("embedded-checks", envelope.passed, f"{count} checks")]
    fresh = certify(envelope.command, envelope.parameters, settings)
    checks.append(CheckResult("re-execution", fresh.result == envelope.result, envelope.command))
    certificates = _certificates(envelope.result)
    bad = [c for c in certificates if not _resums(c)]
    detail = f"{len(certificates) - len(bad)} of {len(certificates)}"
    checks.append(CheckResult("certificates-resum", not bad, detail))
    return checks
