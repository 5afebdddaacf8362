"""Command-line interface: parsers, golden algebra outputs, loop fixtures,
suite execution exit codes, and report digests."""

import json

import numpy as np
import pytest

from g2knot.cli import (format_form, format_vector, parse_form, parse_vector,
                        run, _extract_tolerance_flags)
from g2knot.forms import AltForm


class TestVectorParsing:
    def test_basis_vector(self):
        assert np.allclose(parse_vector("e1"), np.eye(7)[0])

    def test_combination(self):
        v = parse_vector("e1+2.5e4")
        expected = np.eye(7)[0] + 2.5 * np.eye(7)[3]
        assert np.allclose(v, expected)

    def test_negative_and_bare_signs(self):
        v = parse_vector("-e2+e7")
        assert v[1] == -1.0 and v[6] == 1.0

    def test_comma_tuple(self):
        v = parse_vector("1,0,0,0,0,0,0.5")
        assert v[0] == 1.0 and v[6] == 0.5

    def test_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_vector("banana")
        with pytest.raises(ValueError):
            parse_vector("1,2,3")
        with pytest.raises(ValueError):
            parse_vector("e8")

    def test_format_roundtrip(self):
        v = parse_vector("e1-2e4+0.5e7")
        assert np.allclose(parse_vector(format_vector(v)), v)


class TestFormParsing:
    def test_signed_terms(self):
        form = parse_form("+123 -257")
        assert form[(0, 1, 2)] == 1.0
        assert form[(1, 4, 6)] == -1.0

    def test_coefficient_terms(self):
        form = parse_form("+2.5*12")
        assert form[(0, 1)] == 2.5

    def test_rejects_mixed_degree_and_garbage(self):
        with pytest.raises(ValueError):
            parse_form("+12 -345")
        with pytest.raises(ValueError):
            parse_form("+11")
        with pytest.raises(ValueError):
            parse_form("what")

    def test_format_roundtrip(self):
        form = parse_form("+123 -2*145")
        back = parse_form(format_form(form))
        assert np.allclose(back.coeffs, form.coeffs)


class TestToleranceFlags:
    def test_extraction(self):
        rest, tols = _extract_tolerance_flags(
            ["verify", "kahler", "--tol-nijenhuis", "0.5", "--seed", "3",
             "--tol-d-omega-fd=1e-5"])
        assert rest == ["verify", "kahler", "--seed", "3"]
        assert tols == {"nijenhuis": 0.5, "d_omega_fd": 1e-5}

    def test_missing_value(self):
        with pytest.raises(ValueError):
            _extract_tolerance_flags(["--tol-nijenhuis"])


class TestAlgebraCommands:
    def test_cross_golden(self, capsys):
        assert run(["algebra", "cross", "--x", "e1", "--y", "e2"]) == 0
        assert capsys.readouterr().out.strip() == "e3"

    def test_octonion_golden(self, capsys):
        assert run(["algebra", "octonion", "--x", "e1", "--y", "e1"]) == 0
        out = capsys.readouterr().out
        assert "imag: 0" in out and "real: -1" in out

    def test_decompose_golden(self, capsys):
        assert run(["algebra", "decompose", "--form", "+23"]) == 0
        out = capsys.readouterr().out
        # e23 = (1/3)(rho contracted with e1) + 14-part; both parts nonzero
        assert "beta7:" in out and "beta14:" in out

    def test_decompose_rejects_three_form(self, capsys):
        assert run(["algebra", "decompose", "--form", "+123"]) == 2

    def test_associative_golden(self, capsys):
        assert run(["algebra", "associative", "--u", "e1", "--v", "e2", "--w", "e3"]) == 0
        out = capsys.readouterr().out
        assert "associative: True" in out and "calibration: 1" in out


class TestLoopCommands:
    def test_gen_and_reparam(self, tmp_path, capsys):
        path = tmp_path / "loop.json"
        out = tmp_path / "fixed.json"
        assert run(["loop", "gen", "--seed", "3", "--n", "256", "-o", str(path)]) == 0
        assert run(["loop", "reparam", "-i", str(path), "-o", str(out)]) == 0
        from g2knot.loops import loop_from_json
        fixed = loop_from_json(out.read_text())
        spread = (fixed.speeds.max() - fixed.speeds.min()) / fixed.speeds.mean()
        assert spread < 1e-3

    def test_circle_fixture(self, tmp_path):
        path = tmp_path / "circle.json"
        assert run(["loop", "gen", "--circle", "--n", "64", "-o", str(path)]) == 0
        doc = json.loads(path.read_text())
        assert doc["n"] == 64

    def test_missing_input_is_usage_error(self, capsys):
        assert run(["loop", "reparam", "-i", "/nonexistent/loop.json"]) == 2


class TestVerifyCommand:
    def test_passing_suite_exit_zero(self, tmp_path, capsys):
        report = tmp_path / "report.json"
        code = run(["verify", "associative", "--n", "128", "--loops", "4",
                    "--fields", "2", "-o", str(report)])
        assert code == 0
        doc = json.loads(report.read_text())
        assert doc[0]["suite"] == "associative" and doc[0]["pass"]

    def test_failing_suite_exit_one(self, capsys):
        # the Kaehler suite contains the genuinely failing Nijenhuis case
        code = run(["verify", "kahler", "--n", "128", "--loops", "2", "--fields", "1"])
        assert code == 1
        assert "nijenhuis" in capsys.readouterr().out

    def test_tolerance_override_changes_outcome(self, capsys):
        code = run(["verify", "kahler", "--n", "256", "--loops", "2",
                    "--fields", "1", "--tol-nijenhuis", "1e3"])
        assert code == 0

    def test_config_validation_exit_two(self, capsys):
        assert run(["verify", "kahler", "--n", "8"]) == 2

    def test_csv_output(self, tmp_path):
        out = tmp_path / "conv.csv"
        code = run(["verify", "instanton", "--n", "128", "--loops", "2",
                    "--fields", "1", "--ensemble", "6",
                    "-o", str(out), "--format", "csv"])
        assert code == 0
        assert out.read_text().startswith("study,parameter,value,residual")


class TestReportCommand:
    def test_summarize(self, tmp_path, capsys):
        report = tmp_path / "report.json"
        run(["verify", "associative", "--n", "128", "--loops", "4",
             "--fields", "2", "-o", str(report)])
        capsys.readouterr()
        assert run(["report", "summarize", "-i", str(report)]) == 0
        assert "associative: PASS" in capsys.readouterr().out

    def test_malformed_report(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run(["report", "summarize", "-i", str(bad)]) == 2


def test_usage_error_exit_two():
    assert run(["no-such-command"]) == 2
