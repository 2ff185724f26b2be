import os

import pytest
from click.testing import CliRunner

from entlp.cli import EXIT_UNCERTIFIED, EXIT_USAGE, main


@pytest.fixture()
def runner():
    return CliRunner()


def test_solve_ingleton(runner):
    res = runner.invoke(main, ["solve", "-p", "ingleton"])
    assert res.exit_code == 0, res.output
    assert "optimal: -3/19" in res.output
    assert "certified: yes" in res.output


def test_solve_no_copy_steps(runner):
    res = runner.invoke(
        main, ["solve", "-p", "ingleton", "--no-copy-steps"]
    )
    assert res.exit_code == 0, res.output
    assert "optimal: -1/4" in res.output


def test_solve_drop_step(runner):
    res = runner.invoke(
        main, ["solve", "-p", "ingleton", "--drop-copy-step", "3"]
    )
    assert res.exit_code == 0, res.output
    assert "optimal: -1/6" in res.output


def test_solve_float_path(runner):
    res = runner.invoke(
        main, ["solve", "-p", "ingleton", "--path", "float", "-v"]
    )
    assert res.exit_code == 0, res.output
    assert "optimal: -3/19" in res.output


def test_unknown_problem_is_usage_error(runner):
    res = runner.invoke(main, ["solve", "-p", "no-such-problem"])
    assert res.exit_code == EXIT_USAGE


def test_bad_drop_step_is_usage_error(runner):
    res = runner.invoke(
        main, ["solve", "-p", "ingleton", "--drop-copy-step", "9"]
    )
    assert res.exit_code == EXIT_USAGE


def test_solve_writes_certificate_and_verify_passes(runner, tmp_path):
    cert = tmp_path / "out.cert"
    res = runner.invoke(
        main, ["solve", "-p", "ingleton", "--certificate", str(cert)]
    )
    assert res.exit_code == 0, res.output
    assert cert.exists()
    res = runner.invoke(main, ["verify", str(cert)])
    assert res.exit_code == 0, res.output
    assert res.output.startswith("PASS: bound -3/19")


def test_verify_tampered_certificate_fails(runner, tmp_path):
    cert = tmp_path / "out.cert"
    runner.invoke(main, ["solve", "-p", "ingleton", "--certificate", str(cert)])
    lines = cert.read_text().splitlines()
    from fractions import Fraction

    for i, line in enumerate(lines):
        if line.startswith("factor ") and not line.startswith("factor 0"):
            parts = line.split(" ", 2)
            parts[1] = str(Fraction(parts[1]) + 7)
            lines[i] = " ".join(parts)
            break
    cert.write_text("\n".join(lines) + "\n")
    res = runner.invoke(main, ["verify", str(cert)])
    assert res.exit_code == EXIT_USAGE
    assert "FAIL" in res.output


def test_solution_output(runner, tmp_path):
    out = tmp_path / "point.txt"
    res = runner.invoke(
        main,
        ["solve", "-p", "ingleton", "--no-copy-steps", "--solution", str(out)],
    )
    assert res.exit_code == 0, res.output
    text = out.read_text()
    assert "value: -1/4" in text
    assert "H(A,B,C,D) = 1" in text


def test_export_lp_deterministic(runner, tmp_path):
    a, b = tmp_path / "a.lp", tmp_path / "b.lp"
    for out in (a, b):
        res = runner.invoke(
            main, ["export-lp", "-p", "ingleton", "-o", str(out)]
        )
        assert res.exit_code == 0, res.output
    assert a.read_bytes() == b.read_bytes()


def test_report_writes_files(runner, tmp_path):
    outdir = tmp_path / "rep"
    res = runner.invoke(
        main,
        ["report", "-p", "ingleton", "--path", "float", "-o", str(outdir)],
    )
    assert res.exit_code == 0, res.output
    names = sorted(os.listdir(outdir))
    assert "bounds.csv" in names
    assert "bounds.png" in names
    assert "multipliers.png" in names
    csv_text = (outdir / "bounds.csv").read_text()
    assert csv_text.splitlines()[0].startswith("config,")
    assert "full" in csv_text


def test_solve_custom_problem_file(runner, tmp_path):
    src = tmp_path / "toy.ent"
    src.write_text("var X Y;\nconstraint H(X) >= 1/2;\nminimize H(X,Y);\n")
    res = runner.invoke(main, ["solve", "-p", str(src)])
    assert res.exit_code == 0, res.output
    assert "optimal: 1/2" in res.output
