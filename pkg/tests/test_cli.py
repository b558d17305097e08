"""Tests for the certify.py command-line front end."""

import json
from unittest.mock import patch

import pytest

from atomcraft.models import CertificateEnvelope, CheckResult, ConstructionError
from certify import EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION, _family_params, _rule, run


def _stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


class TestArgumentHelpers:
    def test_family_params(self):
        params = _family_params(["q=2/3", "base=5", "values=1/2,1/3"])
        assert params == {"q": "2/3", "base": 5, "values": ["1/2", "1/3"]}

    def test_rule(self):
        assert _rule("power:3") == {"kind": "power", "base": 3}
        assert _rule("factorial") == {"kind": "factorial"}
        assert _rule(None) is None


class TestCommands:
    def test_construct(self, capsys):
        assert run(["construct", "--stages", "1", "--chain"]) == EXIT_OK
        document = _stdout_json(capsys)
        assert document["command"] == "construct"
        assert document["parameters"] == {"stages": 1, "chain": True}
        assert document["verification"]["passed"] is True
        assert document["result"]["points"] == [[0, 1], [125, 177], [-5, -7]]

    def test_status_lines_on_stderr(self, capsys):
        run(["zaks", "--k", "2"])
        err = capsys.readouterr().err
        assert "✓ zaks: 1/1 checks passed" in err

    def test_member_with_functional(self, capsys):
        argv = [
            "member",
            "--generators", "[[0,1],[125,177],[-5,-7]]",
            "--target", "[0,2]",
            "--functional", "0,-1", "1",
        ]
        assert run(argv) == EXIT_OK
        assert _stdout_json(capsys)["result"]["coefficients"] == {"1": 1, "2": 25}

    def test_family_chain(self, capsys):
        argv = ["chain", "--family", "geometric", "--param", "q=2/3", "--count", "4"]
        assert run(argv) == EXIT_OK
        assert len(_stdout_json(capsys)["result"]["ideals"]) == 4

    def test_classify_group_chain(self, capsys):
        assert run(["classify-group", "--chain", "1,2,4", "--rule", "power:2"]) == EXIT_OK
        assert _stdout_json(capsys)["result"]["hereditarilyAtomic"] is False

    def test_search_budget_flag(self, capsys):
        assert run(["search", "--element", "x^3 + x + 1", "--budget", "1"]) == EXIT_OK
        assert _stdout_json(capsys)["result"]["status"] == "inconclusive"

    def test_families(self, capsys):
        assert run(["families"]) == EXIT_OK
        rows = _stdout_json(capsys)
        assert [r["name"] for r in rows][:3] == ["custom", "geometric", "grams"]
        assert {r["name"]: r["chain"] for r in rows}["prime_gap"] is True


class TestFiles:
    def test_figure_outputs_are_reproducible(self, tmp_path):
        outputs = []
        for run_id in ("first", "second"):
            csv_path = tmp_path / run_id / "points.csv"
            svg_path = tmp_path / run_id / "points.svg"
            argv = ["figure", "--stages", "1", "--csv", str(csv_path), "--figure", str(svg_path)]
            assert run(argv) == EXIT_OK
            outputs.append((csv_path.read_bytes(), svg_path.read_bytes()))
        assert outputs[0] == outputs[1]
        assert outputs[0][0].startswith(b"label,x,y,")
        assert b"<svg" in outputs[0][1]

    def test_construct_writes_figure(self, tmp_path, capsys):
        csv_path = tmp_path / "points.csv"
        svg_path = tmp_path / "points.svg"
        argv = ["construct", "--stages", "1", "--figure", str(svg_path), "--csv", str(csv_path)]
        assert run(argv) == EXIT_OK
        document = _stdout_json(capsys)
        assert document["parameters"]["figure"] is True
        assert "figure-elements" in [c["name"] for c in document["verification"]["checks"]]
        assert csv_path.read_bytes().startswith(b"label,x,y,")
        assert b"<svg" in svg_path.read_bytes()

    def test_out_then_verify(self, tmp_path, capsys):
        out = tmp_path / "certs" / "member.json"
        argv = ["member", "--family", "grams", "--count", "2", "--target", "1/2", "--out", str(out)]
        assert run(argv) == EXIT_OK
        assert run(["verify", str(out)]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["passed"] is True

    def test_verify_tampered(self, tmp_path):
        out = tmp_path / "construct.json"
        assert run(["construct", "--stages", "1", "--out", str(out)]) == EXIT_OK
        document = json.loads(out.read_text())
        document["result"]["multipliers"] = [2, 24]
        out.write_text(json.dumps(document))
        assert run(["verify", str(out)]) == EXIT_VERIFICATION

    def test_verify_missing_file(self, tmp_path):
        assert run(["verify", str(tmp_path / "nothing.json")]) == EXIT_USAGE

    def test_verify_invalid_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run(["verify", str(bad)]) == EXIT_USAGE


class TestExitCodes:
    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["badcmd"],
            ["member", "--generators", "[[1,0]", "--target", "[1,0]", "--bound", "2"],
            ["member", "--generators", "[[1,0]]", "--target", "[1,0]"],
            ["construct", "--stages", "-1"],
            ["chain", "--family", "fibonacci"],
            ["frobenius", "--element", "1 + x", "--p", "4"],
        ],
        ids=["empty", "unknown", "bad-json", "no-bound", "negative", "family", "modulus"],
    )
    def test_usage_errors(self, argv):
        assert run(argv) == EXIT_USAGE

    def test_help(self, capsys):
        assert run(["--help"]) == EXIT_OK
        assert "Examples:" in capsys.readouterr().out

    def test_failed_check(self):
        failing = CertificateEnvelope(
            "zaks", {}, {}, [CheckResult("generator-count", False, "7")], "0.3.0"
        )
        with patch("certify.certify", return_value=failing):
            assert run(["zaks"]) == EXIT_VERIFICATION

    def test_construction_error_still_emits(self, tmp_path):
        out = tmp_path / "construct.json"
        error = ConstructionError("condition-1", 1)
        with patch("atomcraft.api.construct", side_effect=error):
            assert run(["construct", "--out", str(out)]) == EXIT_VERIFICATION
        document = json.loads(out.read_text())
        assert document["verification"]["passed"] is False
        assert document["result"]["failure"]["condition"] == "condition-1"
