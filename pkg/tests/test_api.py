"""Tests for the public API: family plugins, named commands and envelope verification."""

import json
import os
import types
from unittest.mock import patch

import pytest

from atomcraft import Settings, __version__, certify, list_families, load_family, verify_envelope
from atomcraft.models import ConstructionError
from atomcraft.puiseux import ChainCertificate, PuiseuxFamily, chain_certificate

PI_U_COEFFICIENTS = ["0,-1", "1"]


def _checks(envelope):
    return {c.name: c.passed for c in envelope.verification}


class TestFamilies:
    def test_packaged_families(self):
        assert list_families() == [
            "custom",
            "geometric",
            "grams",
            "prime_gap",
            "reciprocal_primes",
            "sparse_primes",
        ]

    def test_load_packaged(self):
        module = load_family("grams")
        assert module.ATOM_SET.startswith("{1/(2^(n-1) * p_n)")

    def test_invalid_name(self):
        with pytest.raises(ValueError, match="Invalid family name"):
            load_family("Bad-Name")

    def test_not_found(self):
        with pytest.raises(FileNotFoundError, match="Family module not found"):
            load_family("fibonacci")

    def test_missing_export(self):
        partial = types.ModuleType("partial")
        with patch("atomcraft.api.importlib.import_module", return_value=partial):
            with pytest.raises(AttributeError, match="does not export 'normalize'"):
                load_family("partial")


class TestSettings:
    def test_defaults(self):
        with patch.dict(os.environ, {}, clear=True):
            assert Settings.from_env() == Settings(2, 5000)

    def test_from_env(self):
        env = {"ATOMCRAFT_VERIFY_STAGES": "1", "ATOMCRAFT_SEARCH_BUDGET": "10"}
        with patch.dict(os.environ, env):
            assert Settings.from_env() == Settings(verify_stages=1, search_budget=10)

    def test_invalid_value(self):
        with patch.dict(os.environ, {"ATOMCRAFT_SEARCH_BUDGET": "lots"}):
            with pytest.raises(ValueError, match="ATOMCRAFT_SEARCH_BUDGET"):
                Settings.from_env()


# ============================================================================
# Commands
# ============================================================================

class TestCertify:
    def test_construct(self):
        envelope = certify("construct", {"stages": 1, "chain": True})
        assert envelope.passed
        assert envelope.version == __version__
        assert envelope.result["multipliers"] == [2, 25]
        assert envelope.result["chain"]["ideals"] == [[0, 2], [-125, -175]]
        assert _checks(envelope)["chain-witness/1"]

    def test_construct_with_atoms(self):
        envelope = certify("construct", {"stages": 1, "verifyAtoms": True}, Settings(1))
        assert envelope.passed
        assert envelope.result["atoms"]["passes"] is True
        assert "atoms/stage-1" in _checks(envelope)

    def test_lattice_member_with_functional(self):
        params = {
            "generators": [[0, 1], [125, 177], [-5, -7]],
            "target": [0, 2],
            "functional": PI_U_COEFFICIENTS,
        }
        envelope = certify("member", params)
        assert envelope.passed
        assert envelope.result["coefficients"] == {"1": 1, "2": 25}

    def test_lattice_member_not_found(self):
        params = {"generators": [[3], [5]], "target": [7], "bound": 10}
        envelope = certify("member", params)
        assert envelope.result["found"] is False
        assert envelope.verification == []

    def test_family_member(self):
        params = {"family": "grams", "count": 2, "target": "1/2"}
        envelope = certify("member", params)
        assert envelope.result["coefficients"] == {"1": 5}
        assert _checks(envelope) == {"certificate-resums": True}

    def test_normal_form(self):
        params = {
            "family": "sparse_primes",
            "familyParams": {"base": 5},
            "target": "36/203",
            "normalForm": True,
        }
        envelope = certify("member", params)
        assert _checks(envelope) == {"normal-form-reassembles": True}

    def test_atoms_with_functional(self):
        params = {"generators": [[1, 0], [0, 1], [1, 1]], "functional": ["1", "1"]}
        envelope = certify("atoms", params)
        assert envelope.passed
        assert [a["isAtom"] for a in envelope.result["atoms"]] == [True, True, False]
        assert _checks(envelope) == {"certificate/2": True}

    def test_family_atoms_and_chain(self):
        assert certify("atoms", {"family": "grams", "count": 5}).passed
        chain = certify("chain", {"family": "geometric", "familyParams": {"q": "2/3"}, "count": 8})
        assert chain.passed
        assert len(chain.result["ideals"]) == 8

    def test_family_chain_checks_every_step(self):
        envelope = certify("chain", {"family": "grams", "count": 4})
        assert _checks(envelope) == {f"chain-witness/{n}": True for n in (1, 2, 3)}

    def test_tampered_chain_fails(self):
        real = chain_certificate(PuiseuxFamily.create("grams"), 4)
        tampered = ChainCertificate(real.family, real.ideals, list(reversed(real.witnesses)))
        with patch("atomcraft.api.chain_certificate", return_value=tampered):
            envelope = certify("chain", {"family": "grams", "count": 4})
        assert not envelope.passed
        assert _checks(envelope)["chain-witness/1"] is False

    def test_construction_failure_is_enveloped(self):
        error = ConstructionError("chain-witness", 1, "ideal does not shrink")
        with patch("atomcraft.api.accp_chain", side_effect=error):
            envelope = certify("chain", {"stages": 1})
        assert not envelope.passed
        assert _checks(envelope) == {"chain-witness": False}
        assert envelope.result["failure"]["condition"] == "chain-witness"
        assert envelope.result["failure"]["stage"] == 1

    def test_construct_chain_failure_keeps_result(self):
        error = ConstructionError("chain-witness", 1)
        with patch("atomcraft.api.accp_chain", side_effect=error):
            envelope = certify("construct", {"stages": 1, "chain": True})
        assert not envelope.passed
        assert envelope.result["multipliers"] == [2, 25]
        assert _checks(envelope)["chain-witness"] is False

    def test_classify_group(self):
        envelope = certify("classify-group", {"relations": [[2, 0], [0, 3]]})
        assert envelope.passed
        assert envelope.result["invariantFactors"] == [6]
        assert envelope.result["hereditarilyAtomic"] is True
        rule = {"kind": "power", "base": 2}
        chain = certify("classify-group", {"chain": [1, 2, 4], "rule": rule})
        assert chain.passed
        assert chain.result["hereditarilyAtomic"] is False

    def test_classify_algebra(self):
        assert certify("classify-algebra", {}).result["hereditarilyAtomic"] is True
        envelope = certify("classify-algebra", {"characteristic": 0})
        assert envelope.result["hereditarilyAtomic"] is False
        assert envelope.result["reason"] == "characteristic 0"
        cyclic = certify("classify-algebra", {"characteristic": 3, "generators": 1})
        assert cyclic.result["hereditarilyAtomic"] is True

    def test_frobenius(self):
        envelope = certify("frobenius", {"element": "1 + x", "p": 2})
        assert envelope.passed
        assert envelope.result["root"] == "x^(1/2) + 1"
        assert envelope.result["notIrreducible"] is True

    def test_lengths(self):
        envelope = certify("lengths", {"primesUpTo": 7, "split": "3/2"})
        assert envelope.passed
        assert envelope.result["monoidLengthSet"] == [2, 3, 5, 7]
        assert envelope.result["split"]["factors"] == ["9/8", "4/3"]

    def test_figure(self):
        envelope = certify("figure", {"stages": 1})
        assert envelope.passed
        assert envelope.result["csv"].startswith("label,x,y,")

    def test_zaks_and_gottili(self):
        zaks = certify("zaks", {"k": 2, "extra": 1})
        assert zaks.passed
        assert len(zaks.result["generators"]) == 8
        assert certify("gottili", {"count": 2}).passed

    def test_witness(self):
        assert certify("witness", {}).passed
        params = {"kind": "rank1", "chain": [1, 2], "rule": {"kind": "power"}, "count": 4}
        assert certify("witness", params).passed

    def test_search(self):
        envelope = certify("search", {"element": "1 + x^2", "modulus": 2})
        assert envelope.passed
        assert envelope.result["status"] == "factored"
        assert envelope.result["factors"] == ["x + 1", "x + 1"]

    def test_search_budget_from_settings(self):
        envelope = certify("search", {"element": "x^3 + x + 1"}, Settings(search_budget=1))
        assert envelope.result["status"] == "inconclusive"
        assert envelope.result["budget"] == 1

    def test_unknown_command(self):
        with pytest.raises(ValueError, match="Unknown command"):
            certify("prove", {})

    def test_deterministic(self):
        first = certify("construct", {"stages": 2}).to_json()
        assert first == certify("construct", {"stages": 2}).to_json()


# ============================================================================
# Standalone verification
# ============================================================================

class TestVerifyEnvelope:
    @pytest.fixture
    def member_document(self):
        params = {"family": "grams", "count": 2, "target": "1/2"}
        return json.loads(certify("member", params).to_json())

    def test_untouched(self, member_document):
        checks = verify_envelope(member_document)
        assert [c.name for c in checks] == ["embedded-checks", "re-execution", "certificates-resum"]
        assert all(c.passed for c in checks)
        assert checks[2].detail == "1 of 1"

    def test_tampered_result(self, member_document):
        member_document["result"]["coefficients"] = {"1": 4}
        checks = {c.name: c.passed for c in verify_envelope(member_document)}
        assert checks == {
            "embedded-checks": True,
            "re-execution": False,
            "certificates-resum": False,
        }

    def test_tampered_checks(self, member_document):
        member_document["verification"]["checks"][0]["passed"] = False
        checks = {c.name: c.passed for c in verify_envelope(member_document)}
        assert checks["embedded-checks"] is False
        assert checks["re-execution"] is True

    def test_invalid_document(self):
        with pytest.raises(ValueError, match="Invalid certificate document"):
            verify_envelope({"command": "member"})
