"""Dual certificates: portable, independently checkable optimality proofs.

A certificate for the bound `objective >= value` is a list of (row label,
multiplier) pairs such that

    sum_i  y_i * row_i.form  ==  L * (objective - (value/nu) * N)

holds as an identity of linear forms, where N = nu is the normalization row
(if any) and L is the scaling that clears denominators on the right-hand
side.  Multipliers on inequality rows must be non-negative; equality rows
are unrestricted.  Any point satisfying the rows then satisfies
objective >= value, so verification needs only exact rational summation -
no LP solving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .core import EntlpError, LinearForm, parse_form, render_form
from .lp import LP
from .shannon import REL_GE
from .simplex import OPTIMAL, Solution


class CertificateError(EntlpError):
    pass


@dataclass(frozen=True)
class Certificate:
    problem_name: str
    options_token: str
    value: Fraction
    scale: Fraction
    target: LinearForm
    entries: Tuple[Tuple[str, Fraction], ...]

    def multiplier(self, label: str) -> Fraction:
        for lab, mult in self.entries:
            if lab == label:
                return mult
        return Fraction(0)


@dataclass
class VerifyReport:
    ok: bool
    residual: LinearForm
    sign_violations: List[str] = field(default_factory=list)
    missing_rows: List[str] = field(default_factory=list)

    def message(self, lp: Optional[LP] = None) -> str:
        if self.ok:
            return "certificate verifies: exact row combination matches target"
        parts = []
        if self.missing_rows:
            parts.append("unknown rows: " + ", ".join(self.missing_rows))
        if self.sign_violations:
            parts.append(
                "negative multipliers on inequality rows: "
                + ", ".join(self.sign_violations)
            )
        if not self.residual.is_zero():
            if lp is not None:
                parts.append(f"nonzero residual: {lp.render(self.residual)}")
            else:
                parts.append("nonzero residual")
        return "certificate FAILS: " + "; ".join(parts)


def from_dual(lp: LP, sol: Solution) -> Certificate:
    """Turn an exact optimal dual into a certificate for `objective >= value`."""
    if sol.status != OPTIMAL:
        raise CertificateError(f"no certificate from a {sol.status} solution")
    if not isinstance(sol.value, Fraction):
        raise CertificateError("certificate requires an exact (rational) dual")
    value = sol.value
    mults: Dict[str, Fraction] = {}
    for label, y in sol.dual.items():
        if not isinstance(y, Fraction):
            raise CertificateError("certificate requires an exact (rational) dual")
        if y != 0:
            mults[label] = y

    if lp.has_row("norm"):
        norm = lp.row("norm")
        nu = -norm.form.constant
        if nu == 0:
            raise CertificateError("normalization row has zero right-hand side")
        shift = value / nu
        mults["norm"] = mults.get("norm", Fraction(0)) - shift
        if mults["norm"] == 0:
            del mults["norm"]
        target = lp.objective - shift * lp.normalization_terms()
    else:
        target = lp.objective + LinearForm((), -value)

    denoms = [coef.denominator for _, coef in target.terms]
    denoms.append(target.constant.denominator)
    scale = Fraction(math.lcm(*denoms))
    target = scale * target
    # keep the LP's row order for readability and stable round-trips
    ordered = [
        (row.label, scale * mults[row.label])
        for row in lp.rows
        if row.label in mults
    ]
    leftover = set(mults) - {lab for lab, _ in ordered}
    if leftover:
        raise CertificateError(f"dual references unknown rows: {sorted(leftover)}")
    return Certificate(
        problem_name=lp.problem_name,
        options_token=lp.options.token(),
        value=value,
        scale=scale,
        target=target,
        entries=tuple(ordered),
    )


def verify(cert: Certificate, lp: LP) -> VerifyReport:
    """Exact re-derivation of the certificate identity against the LP rows."""
    missing: List[str] = []
    signs: List[str] = []
    acc = LinearForm()
    for label, mult in cert.entries:
        if not lp.has_row(label):
            missing.append(label)
            continue
        row = lp.row(label)
        if row.rel == REL_GE and mult < 0:
            signs.append(label)
        acc = acc + mult * row.form
    residual = acc - cert.target
    ok = not missing and not signs and residual.is_zero()
    return VerifyReport(
        ok=ok, residual=residual, sign_violations=signs, missing_rows=missing
    )


# ---------------------------------------------------------------------------
# Text format.
# ---------------------------------------------------------------------------


def emit_certificate(cert: Certificate, lp: LP) -> str:
    lines = [
        "# entlp certificate",
        f"problem: {cert.problem_name}",
        f"options: {cert.options_token}",
        f"value: {cert.value}",
        f"scale: {cert.scale}",
        f"target: {lp.render(cert.target)}",
        f"entries: {len(cert.entries)}",
    ]
    for label, mult in cert.entries:
        lines.append(f"factor {mult} : {label}")
    return "\n".join(lines) + "\n"


def read_certificate_header(text: str) -> Dict[str, str]:
    """Just the header fields, so a caller can rebuild the matching LP."""
    out: Dict[str, str] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("factor "):
            continue
        if ":" not in line:
            raise CertificateError(f"bad certificate line: {line!r}")
        key, _, val = line.partition(":")
        out[key.strip()] = val.strip()
    for key in ("problem", "options", "value", "target"):
        if key not in out:
            raise CertificateError(f"certificate missing {key!r} header")
    return out


def parse_certificate(text: str, lp: LP) -> Certificate:
    header = read_certificate_header(text)
    entries: List[Tuple[str, Fraction]] = []
    for line in text.splitlines():
        line = line.strip()
        if not line.startswith("factor "):
            continue
        body = line[len("factor "):]
        if " : " not in body:
            raise CertificateError(f"bad factor line: {line!r}")
        mult_text, _, label = body.partition(" : ")
        try:
            mult = Fraction(mult_text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise CertificateError(f"bad multiplier in {line!r}: {exc}")
        entries.append((label.strip(), mult))
    target = parse_form(header["target"], lp.vars, allow_max=True)
    if lp.rep_map is not None:
        target = target.map_keys(lambda m: lp.rep_map[m])
    try:
        value = Fraction(header["value"])
        scale = Fraction(header.get("scale", "1"))
    except (ValueError, ZeroDivisionError) as exc:
        raise CertificateError(f"bad rational in certificate header: {exc}")
    return Certificate(
        problem_name=header["problem"],
        options_token=header["options"],
        value=value,
        scale=scale,
        target=target,
        entries=tuple(entries),
    )
