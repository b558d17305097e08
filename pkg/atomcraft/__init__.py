"""
atomcraft - Exact certificates for atomicity and ACCP in commutative monoids.

This library builds the rank-2 lattice monoid that is atomic but fails the
ascending chain condition on principal ideals, Puiseux monoid families with
their chains and normal forms, the classification of hereditarily atomic
abelian groups and group algebras, and Frobenius witnesses in monoid algebras.
Every result comes with an exactly re-checkable certificate.
"""

from atomcraft.api import Settings, certify, list_families, load_family, verify_envelope
from atomcraft.construction import accp_chain, construct, export_figure, verify_atoms
from atomcraft.exactnum import SQRT2, MixedQuad, QuadRat
from atomcraft.lattice import LatticeMonoid, LinearFunctional, atoms_certified, member_bounded
from atomcraft.models import (
    AlgebraDomainError,
    CertificateEnvelope,
    CertificateError,
    ConstructionError,
    DimensionMismatchError,
    MembershipCertificate,
    NotFound,
    UnboundedError,
    UnsupportedFamilyError,
    VerificationError,
)
from atomcraft.puiseux import PuiseuxFamily

__version__ = "0.3.0"
__all__ = [
    "certify",
    "verify_envelope",
    "list_families",
    "load_family",
    "Settings",
    "construct",
    "verify_atoms",
    "accp_chain",
    "export_figure",
    "QuadRat",
    "MixedQuad",
    "SQRT2",
    "LatticeMonoid",
    "LinearFunctional",
    "member_bounded",
    "atoms_certified",
    "PuiseuxFamily",
    "MembershipCertificate",
    "NotFound",
    "CertificateEnvelope",
    "AlgebraDomainError",
    "CertificateError",
    "ConstructionError",
    "DimensionMismatchError",
    "UnboundedError",
    "UnsupportedFamilyError",
    "VerificationError",
]
