"""
Tests for the polyred command-line interface

Exit codes follow the contract: 0 when the audited property holds, 1 when it
is violated, 2 on bad input.
"""

import json
from pathlib import Path

import pytest
from typer.testing import CliRunner

from config.settings import settings
from polyred_cli import app

DATA = Path(__file__).resolve().parent.parent / "data"

runner = CliRunner()


def _invoke(*args: str):
    return runner.invoke(app, [str(a) for a in args])


def _report(result) -> dict:
    return json.loads(result.stdout)


class TestStructureCommands:
    """validate and orthogonal"""

    def test_validate_standard_model(self):
        result = _invoke("validate", DATA / "standard_k2n1.json")
        assert result.exit_code == 0
        report = _report(result)
        assert report["kind"] == "Polycosymplectic"
        assert report["success"] is True
        assert report["reeb"] == [["1", "0", "0", "0", "0"], ["0", "1", "0", "0", "0"]]

    def test_validate_invalid_structure(self, tmp_path):
        source = tmp_path / "degenerate.json"
        zero = [["0", "0"], ["0", "0"]]
        source.write_text(json.dumps({"dim": 2, "k": 2, "omega": [zero, zero]}))
        result = _invoke("validate", source)
        assert result.exit_code == 1
        assert _report(result)["kind"] == "Invalid"

    def test_validate_missing_file(self, tmp_path):
        result = _invoke("validate", tmp_path / "absent.json")
        assert result.exit_code == 2
        assert '"success": false' in result.output

    def test_validate_malformed_json(self, tmp_path):
        source = tmp_path / "broken.json"
        source.write_text("{not json")
        result = _invoke("validate", source)
        assert result.exit_code == 2

    def test_orthogonal(self):
        result = _invoke("orthogonal", "--structure", DATA / "standard_k2n1.json",
                         "--subspace", DATA / "subspace_q.json")
        assert result.exit_code == 0
        report = _report(result)
        assert report["forms"] == [1, 2]
        assert report["result"]["dim"] == 3

    def test_orthogonal_selected_forms(self):
        result = _invoke("orthogonal", "-s", DATA / "standard_k2n1.json",
                         "--subspace", DATA / "subspace_q.json", "--forms", "1")
        assert result.exit_code == 0
        report = _report(result)
        assert report["forms"] == [1]
        assert report["result"]["dim"] == 4

    def test_double_orthogonal(self):
        result = _invoke("orthogonal", "-s", DATA / "standard_k2n1.json",
                         "--subspace", DATA / "subspace_q.json", "--double")
        assert result.exit_code == 0
        assert _report(result)["result"]["dim"] == 3

    def test_form_index_out_of_range(self):
        result = _invoke("orthogonal", "-s", DATA / "standard_k2n1.json",
                         "--subspace", DATA / "subspace_q.json", "--forms", "3")
        assert result.exit_code == 2


class TestReductionCommands:
    """reduce and check"""

    def test_reduce_reports_invalid_structure(self):
        result = _invoke("reduce", "--input", DATA / "bad_action.json")
        report = _report(result)
        assert report["reduced_kind"] == "Invalid"
        assert report["consistent"] is True
        assert report["well_defined"] is True
        assert report["dimension"]["formula_holds"] is True
        assert result.exit_code == 0

    def test_check_a2_fails(self):
        result = _invoke("check", "--condition", "A2", "--input", DATA / "bad_action.json")
        assert result.exit_code == 1
        report = _report(result)
        assert report["holds"] is False
        assert report["lhs"]["dim"] == 1 and report["rhs"]["dim"] == 2

    def test_check_a1_reports_indices(self):
        result = _invoke("check", "-c", "A1", "-i", DATA / "bad_action.json")
        assert result.exit_code == 1
        assert len(_report(result)["per_index"]) == 2

    def test_unknown_condition(self):
        result = _invoke("check", "--condition", "A3", "--input", DATA / "bad_action.json")
        assert result.exit_code == 2
        assert '"success": false' in result.output

    def test_unknown_flag(self):
        result = _invoke("check", "--no-such-flag")
        assert result.exit_code == 2


class TestLiftCommand:
    """Structures and actions on M × ℝ"""

    def test_lift_structure(self):
        result = _invoke("lift", "--input", DATA / "standard_k2n1.json")
        assert result.exit_code == 0
        report = _report(result)
        assert report["lifted_kind"] == "Polysymplectic"
        assert report["s_index"] == 5
        assert report["recovered"] is True

    def test_lift_action(self):
        result = _invoke("lift", "--input", DATA / "r6_action.json", "--action")
        assert result.exit_code == 0
        report = _report(result)
        assert report["lemma"]["holds"] is True
        assert report["equivalence"]["verdicts_agree"] is True


class TestExampleCommand:
    """Built-in worked examples"""

    def test_list(self):
        result = _invoke("example", "list")
        assert result.exit_code == 0
        assert "r6-cross" in _report(result)["available"]

    def test_example_passes(self):
        result = _invoke("example", "r6-cross")
        assert result.exit_code == 0
        report = _report(result)
        assert report["name"] == "r6-cross"
        assert all(e["holds"] for e in report["expectations"])

    def test_human_rendering(self):
        result = _invoke("example", "stable-r3", "--human")
        assert result.exit_code == 0
        assert "stable-r3" in result.stdout

    def test_unknown_example(self):
        assert _invoke("example", "no-such-example").exit_code == 2


class TestDynamicsCommands:
    """Residuals, pointwise solves, obstructions and the lifted dynamics"""

    def test_residual_corrected_sign(self):
        result = _invoke("dynamics", "residual", "--model", "k=2,n=1",
                         "--hamiltonian", DATA / "example_hamiltonian.json",
                         "--section", DATA / "example_section.json")
        assert result.exit_code == 0
        assert _report(result)["solves"] is True

    def test_residual_printed_sign(self):
        result = _invoke("dynamics", "residual", "--model", "k=2,n=1",
                         "--hamiltonian", DATA / "example_hamiltonian_printed.json",
                         "--section", DATA / "example_section.json")
        assert result.exit_code == 1
        assert _report(result)["q_residuals"][0]["text"] == "2*t1*t2"

    def test_residual_shape_mismatch(self):
        result = _invoke("dynamics", "residual", "--model", "k=1,n=1", "--expr", "q1",
                         "--section", DATA / "example_section.json")
        assert result.exit_code == 2

    def test_bad_model(self):
        result = _invoke("dynamics", "lift-verify", "--model", "k=two,n=1", "--expr", "q1")
        assert result.exit_code == 2

    def test_section_obstruction(self):
        result = _invoke("dynamics", "obstruction", "--model", "k=2,n=1",
                         "--hamiltonian", DATA / "example_hamiltonian.json",
                         "--section", DATA / "example_section.json")
        assert result.exit_code == 0
        report = _report(result)
        assert report["vanishes"] is False
        assert report["mixed_partial_mismatch"][0][1]["text"] == "t1**3*t2/3"

    def test_bracket_obstruction_vanishes(self):
        result = _invoke("dynamics", "obstruction", "-m", "k=2,n=1", "--expr", "q1**2 + p1_1*p2_1")
        assert result.exit_code == 0
        assert _report(result)["vanishes"] is True

    def test_solve(self):
        result = _invoke("dynamics", "solve", "--model", "k=1,n=1,cosym=0",
                         "--expr", "(p1_1**2 + q1**2)/2", "--point", "1,2")
        assert result.exit_code == 0
        report = _report(result)
        assert report["mode"] == "kSym"
        assert report["particular"] == [["2", "-1"]]
        assert report["freedom"] == 0

    def test_solve_needs_one_source(self):
        result = _invoke("dynamics", "solve", "--expr", "x1", "--point", "0,0")
        assert result.exit_code == 2

    def test_lift_verify(self):
        result = _invoke("dynamics", "lift-verify", "--model", "k=2,n=1",
                         "--hamiltonian", DATA / "example_hamiltonian.json")
        assert result.exit_code == 0
        assert _report(result)["holds"] is True


class TestCampaignCommand:
    """Small serial and concurrent campaigns"""

    def test_serial_campaign(self):
        result = _invoke("campaign", "--property", "LIFT_IFF", "--trials", "6", "--seed", "3",
                         "--dim-max", "8", "--k-max", "2", "--serial")
        assert result.exit_code == 0
        report = _report(result)
        assert report["passed"] == 6
        assert [t["trial"] for t in report["trials"]] == list(range(6))

    def test_concurrent_campaign_matches_serial(self):
        args = ["campaign", "-p", "ALBERT_K1", "-n", "6", "--seed", "3", "--dim-max", "8"]
        serial = _report(_invoke(*args, "--serial"))
        concurrent = _report(_invoke(*args, "--threads", "3"))
        serial.pop("duration_seconds")
        concurrent.pop("duration_seconds")
        assert serial == concurrent

    def test_replay(self):
        result = _invoke("campaign", "-p", "PRESYM_DOUBLE_ORTHO", "-n", "4", "--seed", "3",
                         "--dim-max", "8", "--replay", "2")
        assert result.exit_code == 0
        assert _report(result)["replay"]["trial"] == 2

    @pytest.mark.parametrize("flag,value", [("--dim-max", "41"), ("--adversarial", "3/2"), ("--trials", "0"),
                                            ("--k-max", "0"), ("--dim-max", "0"), ("--threads", "0")])
    def test_invalid_configuration(self, flag, value):
        result = _invoke("campaign", "-p", "LIFT_IFF", "-n", "2", flag, value)
        assert result.exit_code == 2
        assert '"success": false' in result.output

    def test_unknown_property(self):
        assert _invoke("campaign", "-p", "NO_SUCH_PROPERTY").exit_code == 2

    def test_save_writes_report(self, tmp_path, monkeypatch):
        monkeypatch.setattr(settings, "storage_path", str(tmp_path))
        result = _invoke("campaign", "-p", "LIFT_IFF", "-n", "3", "--seed", "5", "--dim-max", "8", "--serial", "--save")
        assert result.exit_code == 0
        report = _report(result)
        target = tmp_path / "reports" / "campaign_LIFT_IFF_5.json"
        assert report["saved_to"] == str(target)
        assert json.loads(target.read_text())["passed"] == 3

    def test_metrics_are_embedded(self):
        result = _invoke("campaign", "-p", "ALBERT_K1", "-n", "4", "--dim-max", "8", "--serial", "--metrics")
        assert result.exit_code == 0
        metrics = _report(result)["trial_metrics"]
        assert metrics["property_id"] == "ALBERT_K1"
        assert metrics["overall_metrics"]["total_trials"] >= 4


class TestOutputFile:
    """--output exports the same report"""

    def test_output(self, tmp_path):
        target = tmp_path / "reports" / "validate.json"
        result = _invoke("validate", DATA / "standard_k2n1.json", "--output", target)
        assert result.exit_code == 0
        assert json.loads(target.read_text()) == _report(result)
