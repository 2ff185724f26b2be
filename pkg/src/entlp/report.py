"""Ablation report: how the bound moves as copy steps are removed.

Writes a CSV with one row per constraint subset (no copy steps, each
leave-one-out subset, the full set) plus rendered figures: a bar chart of
the bounds and, when the full solve is exact, a histogram of the
certificate multiplier magnitudes.
"""

from __future__ import annotations

import csv
import math
import os
from fractions import Fraction
from typing import List, Optional, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .certificate import from_dual
from .core import ProblemError
from .lp import LPOptions, SYM_OFF, SYM_QUOTIENT, build_lp
from .problem import Problem
from .simplex import OPTIMAL, solve_exact, solve_float


def _configs(problem: Problem) -> List[Tuple[str, Optional[Tuple[int, ...]]]]:
    nsteps = len(problem.copy_steps)
    out: List[Tuple[str, Optional[Tuple[int, ...]]]] = [
        ("shannon-only", ())
    ]
    if nsteps > 1:
        for k in range(nsteps):
            kept = tuple(i for i in range(nsteps) if i != k)
            out.append((f"drop-step-{k + 1}", kept))
    out.append(("full", None))
    return out


def run_report(
    problem: Problem,
    symmetry: str = "auto",
    solver_path: str = "exact",
    output_dir: str = "report",
) -> List[str]:
    from .cli import SYM_AUTO, _resolve_options

    os.makedirs(output_dir, exist_ok=True)
    rows = []
    full_cert = None
    for name, steps in _configs(problem):
        if symmetry == SYM_AUTO:
            options = _resolve_options(problem, symmetry, False, False, ())
            options = LPOptions(
                symmetry=options.symmetry, steps=steps
            )
        else:
            options = LPOptions(symmetry=symmetry, steps=steps)
        try:
            lp = build_lp(problem, options)
        except ProblemError as exc:
            # a later copy step may reference this step's copies
            rows.append(
                {
                    "config": name,
                    "options": options.token(),
                    "columns": "",
                    "rows": "",
                    "status": f"invalid ({exc})",
                    "value": "",
                    "decimal": "",
                    "certified": 0,
                }
            )
            continue
        if solver_path == "exact":
            sol = solve_exact(lp)
        else:
            sol = solve_float(lp)
        value = sol.value if sol.status == OPTIMAL else None
        rows.append(
            {
                "config": name,
                "options": options.token(),
                "columns": len(lp.columns),
                "rows": len(lp.rows),
                "status": sol.status,
                "value": str(value) if value is not None else "",
                "decimal": f"{float(value):.9g}" if value is not None else "",
                "certified": int(sol.certified),
            }
        )
        if name == "full" and sol.certified and isinstance(sol.value, Fraction):
            full_cert = from_dual(lp, sol)

    written = []
    csv_path = os.path.join(output_dir, "bounds.csv")
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    written.append(csv_path)

    solved = [r for r in rows if r["decimal"]]
    fig, ax = plt.subplots(figsize=(1.6 + 1.1 * len(solved), 3.6))
    ax.bar(
        [r["config"] for r in solved],
        [float(r["decimal"]) for r in solved],
        color="#4878a8",
    )
    ax.set_ylabel("optimal value")
    ax.set_title(f"{problem.name}: bound vs. constraint subset")
    ax.axhline(0.0, color="black", linewidth=0.8)
    fig.tight_layout()
    bounds_png = os.path.join(output_dir, "bounds.png")
    fig.savefig(bounds_png, dpi=150)
    plt.close(fig)
    written.append(bounds_png)

    if full_cert is not None:
        mags = [
            math.log10(abs(float(mult)))
            for _, mult in full_cert.entries
            if mult != 0
        ]
        fig, ax = plt.subplots(figsize=(5.2, 3.6))
        ax.hist(mags, bins=20, color="#a86048")
        ax.set_xlabel("log10 |multiplier|")
        ax.set_ylabel("rows")
        ax.set_title(
            f"{problem.name}: certificate multipliers "
            f"({len(full_cert.entries)} rows)"
        )
        fig.tight_layout()
        mult_png = os.path.join(output_dir, "multipliers.png")
        fig.savefig(mult_png, dpi=150)
        plt.close(fig)
        written.append(mult_png)
    return written
