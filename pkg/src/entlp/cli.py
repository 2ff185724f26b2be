"""Command-line front end.

Exit codes: 0 success (optimal / PASS), 1 parse or validation error,
2 solver failure, 3 float result that could not be certified exactly.
"""

from __future__ import annotations

import sys
import time
from fractions import Fraction
from typing import Optional, Tuple

import click

from .core import EntlpError, MAX_KEY
from .certificate import (
    CertificateError,
    emit_certificate,
    from_dual,
    parse_certificate,
    read_certificate_header,
    verify as verify_cert,
)
from .lp import (
    LP,
    LPOptions,
    SYM_INVARIANCE,
    SYM_OFF,
    SYM_QUOTIENT,
    build_lp,
    export_lp,
)
from .problem import Problem, load_problem
from .simplex import OPTIMAL, SolveError, Solution, solve_exact, solve_float

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SOLVER = 2
EXIT_UNCERTIFIED = 3

SYM_AUTO = "auto"


def render_value(value) -> str:
    """Exact fraction plus a 9-significant-digit decimal."""
    if isinstance(value, Fraction):
        return f"{value} ({float(value):.9g})"
    return f"{value:.9g}"


def _resolve_options(
    problem: Problem,
    symmetry: str,
    merged: bool,
    no_copy_steps: bool,
    drop_steps: Tuple[int, ...],
) -> LPOptions:
    steps: Optional[Tuple[int, ...]] = None
    nsteps = len(problem.copy_steps)
    if no_copy_steps:
        if drop_steps:
            raise EntlpError("--no-copy-steps conflicts with --drop-copy-step")
        steps = ()
    elif drop_steps:
        dropped = set()
        for k in drop_steps:
            if not 1 <= k <= nsteps:
                raise EntlpError(
                    f"--drop-copy-step {k}: problem has {nsteps} copy steps"
                )
            dropped.add(k - 1)
        steps = tuple(i for i in range(nsteps) if i not in dropped)
    if symmetry == SYM_AUTO:
        full_vars, _ = problem.expand(steps)
        big = len(full_vars) >= 10
        symmetry = SYM_QUOTIENT if problem.symmetry_gens and big else SYM_OFF
    return LPOptions(symmetry=symmetry, merged_independence=merged, steps=steps)


def _build(source: str, options: LPOptions) -> Tuple[Problem, LP]:
    problem = load_problem(source)
    return problem, build_lp(problem, options)


_SYM_CHOICES = (SYM_AUTO, SYM_OFF, SYM_INVARIANCE, SYM_QUOTIENT)


@click.group()
def main():
    """Exact lower bounds on linear entropy functionals."""


def _common_options(fn):
    fn = click.option(
        "--problem", "-p", "source", required=True,
        help="builtin name (ingleton, vamos-v0) or path to a problem file",
    )(fn)
    fn = click.option(
        "--symmetry", type=click.Choice(_SYM_CHOICES), default=SYM_AUTO,
        show_default=True, help="symmetry handling",
    )(fn)
    fn = click.option(
        "--merged-independence", is_flag=True,
        help="merge the independence rows of two same-conditioning copy steps",
    )(fn)
    fn = click.option(
        "--no-copy-steps", is_flag=True, help="drop every copy step"
    )(fn)
    fn = click.option(
        "--drop-copy-step", "drop_steps", type=int, multiple=True,
        help="drop copy step K (1-based); repeatable",
    )(fn)
    return fn


@main.command()
@_common_options
@click.option("--path", "solver_path", type=click.Choice(("exact", "float")),
              default="exact", show_default=True)
@click.option("--tolerance", type=float, default=1e-9, show_default=True,
              help="float-path verification tolerance")
@click.option("--certificate", "cert_out", type=click.Path(dir_okay=False),
              help="write the dual certificate here")
@click.option("--solution", "solution_out", type=click.Path(dir_okay=False),
              help="write the optimal point here")
@click.option("--export-lp", "lp_out", type=click.Path(dir_okay=False),
              help="also write the assembled LP here")
@click.option("-v", "--verbose", is_flag=True)
def solve(source, symmetry, merged_independence, no_copy_steps, drop_steps,
          solver_path, tolerance, cert_out, solution_out, lp_out, verbose):
    """Assemble and solve the LP; print the optimal value."""
    t0 = time.time()
    try:
        problem = load_problem(source)
        options = _resolve_options(
            problem, symmetry, merged_independence, no_copy_steps, drop_steps
        )
        lp = build_lp(problem, options)
    except EntlpError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    if verbose:
        click.echo(
            f"LP: {len(lp.columns)} columns, {len(lp.rows)} rows "
            f"[{options.token()}]"
        )
        for note in lp.notes:
            click.echo(f"note: {note}")
    if lp_out:
        with open(lp_out, "w", encoding="utf-8") as fh:
            fh.write(export_lp(lp))
    try:
        if solver_path == "exact":
            sol = solve_exact(lp)
        else:
            sol = solve_float(lp, tolerance=tolerance)
    except SolveError as exc:
        click.echo(f"solver error: {exc}", err=True)
        sys.exit(EXIT_SOLVER)
    elapsed = time.time() - t0
    if verbose:
        for note in sol.notes:
            click.echo(f"note: {note}")
    if sol.status != OPTIMAL:
        click.echo(f"status: {sol.status}")
        sys.exit(EXIT_SOLVER)
    click.echo(f"optimal: {render_value(sol.value)}")
    click.echo(f"certified: {'yes' if sol.certified else 'no'}")
    if verbose:
        click.echo(f"time: {elapsed:.2f}s")
    if solution_out:
        _write_solution(solution_out, lp, sol)
    if cert_out:
        if not sol.certified:
            click.echo("cannot emit a certificate from an uncertified solve",
                       err=True)
            sys.exit(EXIT_UNCERTIFIED)
        cert = from_dual(lp, sol)
        with open(cert_out, "w", encoding="utf-8") as fh:
            fh.write(emit_certificate(cert, lp))
        if verbose:
            click.echo(f"certificate: {cert_out} ({len(cert.entries)} rows)")
    if not sol.certified:
        sys.exit(EXIT_UNCERTIFIED)


def _write_solution(path: str, lp: LP, sol: Solution) -> None:
    lines = [f"status: {sol.status}", f"value: {render_value(sol.value)}"]
    for key in lp.columns:
        val = sol.primal.get(key)
        if not val:
            continue
        lines.append(f"{lp.column_name(key)} = {render_value(val)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


@main.command()
@click.argument("cert_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--problem", "-p", "source", default=None,
              help="problem source; defaults to the certificate's header")
def verify(cert_path, source):
    """Check a certificate against its problem's LP rows."""
    try:
        with open(cert_path, "r", encoding="utf-8") as fh:
            text = fh.read()
        header = read_certificate_header(text)
        problem = load_problem(source or header["problem"])
        options = LPOptions.from_token(header["options"])
        lp = build_lp(problem, options)
        cert = parse_certificate(text, lp)
    except (EntlpError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    report = verify_cert(cert, lp)
    click.echo(
        ("PASS" if report.ok else "FAIL")
        + f": bound {render_value(cert.value)} on {cert.problem_name}"
    )
    if not report.ok:
        click.echo(report.message(lp), err=True)
        sys.exit(EXIT_USAGE)


@main.command("export-lp")
@_common_options
@click.option("--output", "-o", type=click.Path(dir_okay=False), required=True)
def export_lp_cmd(source, symmetry, merged_independence, no_copy_steps,
                  drop_steps, output):
    """Write the assembled LP in the plain-text interchange format."""
    try:
        problem = load_problem(source)
        options = _resolve_options(
            problem, symmetry, merged_independence, no_copy_steps, drop_steps
        )
        lp = build_lp(problem, options)
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(export_lp(lp))
    except (EntlpError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    click.echo(f"wrote {output}: {len(lp.columns)} columns, {len(lp.rows)} rows")


@main.command()
@click.option("--problem", "-p", "source", required=True)
@click.option("--symmetry", type=click.Choice(_SYM_CHOICES), default=SYM_AUTO,
              show_default=True)
@click.option("--path", "solver_path", type=click.Choice(("exact", "float")),
              default="exact", show_default=True)
@click.option("--output-dir", "-o", type=click.Path(file_okay=False),
              default="report", show_default=True)
def report(source, symmetry, solver_path, output_dir):
    """Ablation report: bounds across constraint subsets, as CSV + figures."""
    from .report import run_report

    try:
        problem = load_problem(source)
    except EntlpError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    try:
        paths = run_report(problem, symmetry, solver_path, output_dir)
    except (EntlpError, SolveError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_SOLVER)
    for path in paths:
        click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
