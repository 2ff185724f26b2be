"""Copy Lemma extension steps.

A step `(Z'_1,...,Z'_k) := Y-copy(Z_1,...,Z_k | X)` appends k fresh variables
(each standing for one copied tuple, possibly composite) and emits

  * one substitution equality H(T) = H(sigma(T)) for every non-empty
    T subset of X u {copies} meeting the copies, where sigma replaces each
    copy by the bitmask of its original tuple; that is 2^(m+k) - 2^m
    equalities for |X| = m, and
  * one conditional-independence equality
    I(Z'_all ; Y u Z_all | X) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

from .core import LinearForm, ProblemError, VarTable, bits, coord, cond_mutual_info
from .shannon import REL_EQ, Constraint


@dataclass(frozen=True)
class CopyStep:
    """One Copy Lemma application over bitmasks of the pre-step variable table.

    copied: masks of the original tuples Z_i (each becomes one new variable);
    over: the conditioning tuple X; context: the tuple Y; new_names: fresh
    names for the copies, aligned with `copied`.
    """

    copied: Tuple[int, ...]
    over: int
    context: int
    new_names: Tuple[str, ...]

    def validate(self, vars: VarTable) -> None:
        if len(self.copied) != len(self.new_names):
            raise ProblemError("one fresh name per copied tuple required")
        if not self.copied:
            raise ProblemError("copy step must copy at least one tuple")
        seen = 0
        for mask in self.copied:
            if mask == 0:
                raise ProblemError("copied tuple must be non-empty")
            if mask & seen:
                raise ProblemError("copied tuples must be pairwise disjoint")
            seen |= mask
        if self.over & seen:
            raise ProblemError("conditioning tuple overlaps a copied tuple")
        if self.over & self.context:
            raise ProblemError("conditioning tuple overlaps the context tuple")
        known = vars.full_mask()
        for mask in (seen, self.over, self.context):
            if mask & ~known:
                raise ProblemError("copy step references unknown variables")
        for name in self.new_names:
            if name in vars:
                raise ProblemError(f"copy name {name!r} already in use")
        if len(set(self.new_names)) != len(self.new_names):
            raise ProblemError("duplicate copy names in one step")


def apply_copy_step(
    step: CopyStep, vars: VarTable, label_prefix: str
) -> Tuple[VarTable, List[Constraint]]:
    """Extend the variable table and emit the step's equality constraints."""
    step.validate(vars)
    out_vars = vars.copy()
    new_bits = []
    for name in step.new_names:
        new_bits.append(1 << out_vars.add(name))
    copies_mask = 0
    for b in new_bits:
        copies_mask |= b
    originals_mask = 0
    for m in step.copied:
        originals_mask |= m

    def substitute(mask: int) -> int:
        out = mask & ~copies_mask
        for b, orig in zip(new_bits, step.copied):
            if mask & b:
                out |= orig
        return out

    rows: List[Constraint] = []
    # substitution equalities: subsets of over u copies that meet the copies
    domain = step.over | copies_mask
    domain_bits = list(bits(domain))
    for sub_index in range(1, 1 << len(domain_bits)):
        mask = 0
        for pos, bit in enumerate(domain_bits):
            if sub_index & (1 << pos):
                mask |= 1 << bit
        if not mask & copies_mask:
            continue
        image = substitute(mask)
        label = (
            f"{label_prefix}:H({out_vars.render_set(mask)})"
            f"=H({out_vars.render_set(image)})"
        )
        rows.append(Constraint(coord(mask) - coord(image), REL_EQ, label))
    rows.sort(key=lambda r: r.form.terms[0][0])
    # conditional independence of the joint copies from context + originals
    other = step.context | originals_mask
    indep = cond_mutual_info(copies_mask, other, step.over)
    rows.append(Constraint(indep, REL_EQ, f"{label_prefix}:indep"))
    return out_vars, rows


def merged_independence(
    step1: CopyStep, step2: CopyStep, vars_after: VarTable, label: str
) -> Constraint:
    """Merge the independence equalities of two steps over the same tuple.

    Valid when both steps condition on the same `over` set and the second
    step's context contains the first step's copies; the merged constraint is
    the three-way additivity

      H(originals, copies1, copies2 | over)
        = H(originals | over) + H(copies1 | over) + H(copies2 | over).
    """
    if step1.over != step2.over:
        raise ProblemError("merged independence requires identical over-sets")
    copies1 = vars_after.mask(step1.new_names)
    copies2 = vars_after.mask(step2.new_names)
    if copies1 & ~step2.context:
        raise ProblemError(
            "second step's context must contain the first step's copies"
        )
    originals = 0
    for m in step1.copied:
        originals |= m
    for m in step2.copied:
        originals |= m
    originals |= (step1.context | step2.context) & ~copies1 & ~copies2
    over = step1.over

    def cond(v: int) -> LinearForm:
        return coord(v | over) - coord(over)

    form = (
        cond(originals | copies1 | copies2)
        - cond(originals)
        - cond(copies1)
        - cond(copies2)
    )
    if form.is_zero():
        raise ProblemError("degenerate merged-independence constraint")
    return Constraint(form, REL_EQ, label)
