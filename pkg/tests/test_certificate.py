from fractions import Fraction
from importlib import resources

import pytest

from entlp.certificate import (
    Certificate,
    CertificateError,
    emit_certificate,
    from_dual,
    parse_certificate,
    read_certificate_header,
    verify,
)
from entlp.lp import LPOptions, build_lp
from entlp.problem import builtin_ingleton
from entlp.simplex import solve_exact


@pytest.fixture(scope="module")
def ingleton_cert():
    lp = build_lp(builtin_ingleton())
    sol = solve_exact(lp)
    return lp, sol, from_dual(lp, sol)


def test_from_dual_and_verify(ingleton_cert):
    lp, sol, cert = ingleton_cert
    assert sol.value == Fraction(-3, 19)
    assert cert.value == Fraction(-3, 19)
    report = verify(cert, lp)
    assert report.ok
    assert "verifies" in report.message(lp)
    # the target must be an integer combination: scale clears denominators
    assert all(c.denominator == 1 for _, c in cert.target.terms)


def test_from_dual_rejects_float_solution(ingleton_cert):
    lp, _, _ = ingleton_cert
    from entlp.simplex import solve_float

    flt = solve_float(lp, rationalize=False)
    with pytest.raises(CertificateError):
        from_dual(lp, flt)


def test_round_trip_text(ingleton_cert):
    lp, _, cert = ingleton_cert
    text = emit_certificate(cert, lp)
    again = parse_certificate(text, lp)
    assert again == cert
    assert emit_certificate(again, lp) == text
    header = read_certificate_header(text)
    assert header["problem"] == "ingleton"
    assert Fraction(header["value"]) == Fraction(-3, 19)


def test_tampered_multiplier_fails(ingleton_cert):
    lp, _, cert = ingleton_cert
    label, mult = cert.entries[0]
    bad = Certificate(
        cert.problem_name, cert.options_token, cert.value, cert.scale,
        cert.target, ((label, mult + 1),) + cert.entries[1:],
    )
    report = verify(bad, lp)
    assert not report.ok
    assert not report.residual.is_zero()
    assert "FAILS" in report.message(lp)


def test_negative_multiplier_on_inequality_fails(ingleton_cert):
    lp, _, cert = ingleton_cert
    entries = list(cert.entries)
    for i, (label, mult) in enumerate(entries):
        if label.startswith("elem:") and mult > 0:
            entries[i] = (label, -mult)
            break
    bad = Certificate(
        cert.problem_name, cert.options_token, cert.value, cert.scale,
        cert.target, tuple(entries),
    )
    report = verify(bad, lp)
    assert not report.ok
    assert report.sign_violations


def test_unknown_row_fails(ingleton_cert):
    lp, _, cert = ingleton_cert
    bad = Certificate(
        cert.problem_name, cert.options_token, cert.value, cert.scale,
        cert.target, cert.entries + (("elem:no-such-row", Fraction(1)),),
    )
    report = verify(bad, lp)
    assert not report.ok
    assert report.missing_rows == ["elem:no-such-row"]


def test_parse_errors():
    lp = build_lp(builtin_ingleton(), LPOptions(steps=()))
    with pytest.raises(CertificateError):
        read_certificate_header("problem: x\n")  # missing fields
    with pytest.raises(CertificateError):
        parse_certificate(
            "problem: x\noptions: s\nvalue: 0\ntarget: H(A)\nfactor 1 bad\n",
            lp,
        )


@pytest.mark.parametrize("name", ["ingleton", "vamos_v0"])
def test_shipped_certificates_verify(name):
    text = (
        resources.files("entlp") / "data" / "certs" / f"{name}.cert"
    ).read_text()
    header = read_certificate_header(text)
    from entlp.problem import load_problem

    problem = load_problem(header["problem"])
    lp = build_lp(problem, LPOptions.from_token(header["options"]))
    cert = parse_certificate(text, lp)
    assert verify(cert, lp).ok


def test_certificate_without_normalization():
    from entlp.problem import parse_problem

    p = parse_problem(
        "var X Y;\nconstraint H(X) >= 1/2;\nminimize H(X,Y);\n", "toy"
    )
    lp = build_lp(p, LPOptions(steps=()))
    sol = solve_exact(lp)
    assert sol.value == Fraction(1, 2)
    cert = from_dual(lp, sol)
    assert verify(cert, lp).ok
    # constant term absorbs the bound when there is no normalization row
    assert cert.target.constant == -cert.scale * cert.value
