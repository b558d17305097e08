"""
Data models for atomcraft library.
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from atomcraft.exactnum import render

LatticePoint = Tuple[int, ...]


class FamilyKind(Enum):
    """Puiseux monoid family kinds"""
    GRAMS = "grams"
    PRIME_GAP = "prime_gap"
    GEOMETRIC = "geometric"
    RECIPROCAL_PRIMES = "reciprocal_primes"
    SPARSE_PRIMES = "sparse_primes"
    CUSTOM = "custom"


class SearchStatus(Enum):
    """Outcome vocabulary of the bounded irreducibility search"""
    IRREDUCIBLE_WITHIN_BOUND = "irreducible-within-bound"
    FACTORED = "factored"
    INCONCLUSIVE = "inconclusive"


# ============================================================================
# Exceptions
# ============================================================================

class DimensionMismatchError(ValueError):
    """
    Raised when lattice points of different dimensions are combined.

    Attributes:
        expected: Dimension required by the monoid or operation
        actual: Dimension that was supplied
    """
    def __init__(self, expected: int, actual: int, what: str = "point"):
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"Dimension mismatch: expected {what} of dimension {expected}, got {actual}"
        )


class UnboundedError(ValueError):
    """
    Raised when a linear functional is not strictly positive on a generator,
    so no coefficient bound exists.

    Attributes:
        generator: The offending generator
        value: The functional's value on it
    """
    def __init__(self, generator: Any, value: Any):
        self.generator = generator
        self.value = value
        super().__init__(
            f"Unbounded: functional is not strictly positive on generator {generator} "
            f"(value {value})"
        )


class CertificateError(ValueError):
    """Raised when a membership certificate does not re-sum to its target."""
    def __init__(self, target: Any, total: Any):
        self.target = target
        self.total = total
        super().__init__(f"Certificate does not re-sum: expected {target}, got {total}")


class ConstructionError(RuntimeError):
    """
    Raised when a construction condition fails.

    Attributes:
        condition: Name of the violated condition
        stage: Stage at which it was detected
    """
    def __init__(self, condition: str, stage: int, detail: str = ""):
        self.condition = condition
        self.stage = stage
        message = f"Construction condition {condition!r} violated at stage {stage}"
        if detail:
            message += f": {detail}"
        super().__init__(message)


class UnsupportedFamilyError(ValueError):
    """Raised when an operation is not defined for a Puiseux family kind."""
    def __init__(self, family: str, operation: str):
        self.family = family
        self.operation = operation
        super().__init__(f"Operation {operation!r} is not supported for family {family!r}")


class AlgebraDomainError(ValueError):
    """Raised on modulus or exponent-domain mismatches in monoid algebras."""


class VerificationError(RuntimeError):
    """Raised when a post-condition check fails after a computation."""
    def __init__(self, check: str, detail: str = ""):
        self.check = check
        message = f"Verification failed: {check}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


# ============================================================================
# Certificates
# ============================================================================

def linear_combination(
    generators: Sequence[Any], coefficients: Dict[int, int], like: Any
) -> Any:
    """Sum c_i * g_i; ``like`` fixes the shape (lattice point or rational)."""
    if isinstance(like, tuple):
        total = [0] * len(like)
        for idx, coeff in coefficients.items():
            point = generators[idx]
            if len(point) != len(like):
                raise DimensionMismatchError(len(like), len(point))
            for j, coord in enumerate(point):
                total[j] += coeff * coord
        return tuple(total)
    total = Fraction(0)
    for idx, coeff in coefficients.items():
        total += coeff * generators[idx]
    return total


@dataclass(frozen=True)
class MembershipCertificate:
    """Exact witness that ``target`` equals sum(c_i * generators[i])."""
    target: Any
    generators: Tuple[Any, ...]
    coefficients: Dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        cleaned = {}
        for idx, coeff in sorted(self.coefficients.items()):
            if not 0 <= idx < len(self.generators):
                raise ValueError(f"Invalid generator index {idx} in certificate")
            if coeff < 0:
                raise ValueError(f"Invalid coefficient {coeff}: must be >= 0")
            if coeff:
                cleaned[int(idx)] = int(coeff)
        object.__setattr__(self, "coefficients", cleaned)
        total = linear_combination(self.generators, cleaned, self.target)
        if total != self.target:
            raise CertificateError(self.target, total)

    @property
    def length(self) -> int:
        """Number of generators used, with multiplicity."""
        return sum(self.coefficients.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "found": True,
            "target": render(self.target),
            "generators": render(self.generators),
            "coefficients": {str(idx): coeff for idx, coeff in self.coefficients.items()},
        }


@dataclass(frozen=True)
class NotFound:
    """No certificate exists with every coefficient at most ``bound``."""
    target: Any
    bound: Optional[int]
    reason: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "found": False,
            "target": render(self.target),
            "bound": self.bound,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class ChainStep:
    """One link of a Puiseux chain: ideal b_n and the witness for b_n - b_{n+1}."""
    ideal: Fraction
    ideal_coefficients: Dict[int, int]
    witness_coefficients: Dict[int, int]


# ============================================================================
# Envelopes
# ============================================================================

@dataclass
class CheckResult:
    """A single verification check and its outcome."""
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class CertificateEnvelope:
    """Command output: parameters, result payload and the checks actually run."""
    command: str
    parameters: Dict[str, Any]
    result: Dict[str, Any]
    verification: List[CheckResult]
    version: str

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.verification)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "result": self.result,
            "verification": {
                "passed": self.passed,
                "checks": [check.to_dict() for check in self.verification],
            },
            "version": self.version,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CertificateEnvelope":
        try:
            checks = [
                CheckResult(item["name"], bool(item["passed"]), item.get("detail", ""))
                for item in data["verification"]["checks"]
            ]
            return cls(
                command=data["command"],
                parameters=data["parameters"],
                result=data["result"],
                verification=checks,
                version=data["version"],
            )
        except (KeyError, TypeError) as e:
            raise ValueError(f"Invalid certificate document: missing {e}") from e
