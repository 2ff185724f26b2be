"""Elemental Shannon inequalities.

The cone of Shannon-type inequalities over n variables is generated by the
elemental family:

  (a) H(X_i | X_[n]\{i}) >= 0                    for each i
  (b) I(X_i ; X_j | X_K) >= 0                     for i < j, K subset of the rest

There are n + C(n,2) * 2^(n-2) of them; every basic inequality I(A;B|C) >= 0
is a nonnegative combination of these, and none is implied by the others.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List

from .core import EntlpError, LinearForm, VarTable, cond_entropy, cond_mutual_info

REL_GE = ">="
REL_EQ = "="


@dataclass(frozen=True)
class Constraint:
    """A labeled row `form >= 0` or `form = 0` (constant folded into form)."""

    form: LinearForm
    rel: str
    label: str

    def __post_init__(self):
        if self.rel not in (REL_GE, REL_EQ):
            raise EntlpError(f"bad relation {self.rel!r}")


def elemental_inequalities(vars: VarTable) -> List[Constraint]:
    """The complete elemental family for the given variables, sorted by label."""
    n = len(vars)
    if n < 1:
        raise EntlpError("need at least one variable")
    full = vars.full_mask()
    rows: List[Constraint] = []
    for i in range(n):
        rest = full & ~(1 << i)
        label = f"elem:H({vars.names[i]}|{vars.render_set(rest)})"
        rows.append(Constraint(cond_entropy(1 << i, rest), REL_GE, label))
    for i in range(n):
        for j in range(i + 1, n):
            pair = (1 << i) | (1 << j)
            others = full & ~pair
            k = others
            # iterate all subsets of `others` in ascending order
            sub = 0
            while True:
                label = (
                    f"elem:I({vars.names[i]};{vars.names[j]}|"
                    f"{{{vars.render_set(sub)}}})"
                )
                rows.append(
                    Constraint(
                        cond_mutual_info(1 << i, 1 << j, sub), REL_GE, label
                    )
                )
                if sub == others:
                    break
                sub = (sub - others) & others
    rows.sort(key=lambda r: r.label)
    return rows


def elemental_count(n: int) -> int:
    """Closed form n + C(n,2) * 2^(n-2)."""
    if n == 1:
        return 1
    return n + (n * (n - 1) // 2) * (1 << (n - 2))


def is_shannon_feasible(point: Dict[int, object], vars: VarTable, slack=0) -> bool:
    """True iff every elemental inequality evaluates >= -slack at the point.

    `point` must assign a value to every non-empty subset mask.  Exact when
    the point values are rationals; pass a small slack for float profiles.
    """
    for mask in vars.subsets():
        if mask not in point:
            raise EntlpError(f"missing coordinate {vars.render_set(mask)}")
    for row in elemental_inequalities(vars):
        if row.form.evaluate(point) < -slack:
            return False
    return True
