"""LP assembly: Shannon block + problem rows + copy rows + symmetry.

The assembled LP minimizes a linear objective over the entropy coordinates
of the problem's full variable list (ground variables plus copies), with one
column per non-empty subset and, for min-max objectives, one extra epigraph
column (`MAX`).  Symmetry enters either as explicit invariance equalities or
as a quotient onto orbit representatives.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .core import (
    EntlpError,
    LinearForm,
    MAX_KEY,
    ProblemError,
    VarTable,
    coord,
    max_scalar,
    render_form,
)
from .extension import merged_independence
from .problem import LINEAR, MINMAX, Problem
from .shannon import REL_EQ, REL_GE, Constraint, elemental_inequalities
from .symmetry import PermGroup, act, invariance_equalities

SYM_OFF = "off"
SYM_INVARIANCE = "invariance-eqs"
SYM_QUOTIENT = "quotient"
SYMMETRY_MODES = (SYM_OFF, SYM_INVARIANCE, SYM_QUOTIENT)


@dataclass(frozen=True)
class LPOptions:
    symmetry: str = SYM_OFF
    merged_independence: bool = False
    steps: Optional[Tuple[int, ...]] = None  # None = all copy steps

    def __post_init__(self):
        if self.symmetry not in SYMMETRY_MODES:
            raise EntlpError(f"bad symmetry mode {self.symmetry!r}")

    def token(self) -> str:
        steps = "all" if self.steps is None else ",".join(map(str, self.steps))
        return (
            f"symmetry={self.symmetry};merged={int(self.merged_independence)};"
            f"steps={steps}"
        )

    def digest(self) -> str:
        return hashlib.sha256(self.token().encode()).hexdigest()[:12]

    @staticmethod
    def from_token(token: str) -> "LPOptions":
        fields = {}
        for part in token.split(";"):
            key, _, val = part.partition("=")
            fields[key.strip()] = val.strip()
        try:
            steps = fields.get("steps", "all")
            return LPOptions(
                symmetry=fields.get("symmetry", SYM_OFF),
                merged_independence=bool(int(fields.get("merged", "0"))),
                steps=None
                if steps == "all"
                else tuple(int(s) for s in steps.split(",") if s != ""),
            )
        except ValueError as exc:
            raise EntlpError(f"bad options token {token!r}: {exc}") from exc


@dataclass
class LP:
    """Rows over a fixed column list; every row is `form >= 0` or `form = 0`
    with the constant folded into the form."""

    problem_name: str
    options: LPOptions
    vars: VarTable
    columns: List[int]
    rows: List[Constraint]
    objective: LinearForm
    rep_map: Optional[Dict[int, int]] = None
    notes: List[str] = field(default_factory=list)

    def __post_init__(self):
        self.col_index = {key: i for i, key in enumerate(self.columns)}
        self._row_index = {row.label: row for row in self.rows}
        if len(self._row_index) != len(self.rows):
            raise EntlpError("duplicate row labels")
        for row in self.rows:
            for key in row.form.keys():
                if key not in self.col_index:
                    raise EntlpError(
                        f"row {row.label} references unknown column {key}"
                    )

    def row(self, label: str) -> Constraint:
        try:
            return self._row_index[label]
        except KeyError:
            raise EntlpError(f"unknown row label {label!r}") from None

    def has_row(self, label: str) -> bool:
        return label in self._row_index

    def column_name(self, key: int) -> str:
        if key == MAX_KEY:
            return "MAX"
        return f"H({self.vars.render_set(key)})"

    def render(self, form: LinearForm) -> str:
        return render_form(form, self.vars)

    def normalization_terms(self) -> LinearForm:
        """Coordinate part of the normalization row (empty form if none)."""
        if not self.has_row("norm"):
            return LinearForm()
        return LinearForm(self.row("norm").form.terms)


def _canon(rel: str, form: LinearForm):
    """Syntactic key for row comparison; equalities match up to global sign."""
    terms, constant = form.terms, form.constant
    if rel == REL_EQ and terms and terms[0][1] < 0:
        terms = tuple((k, -c) for k, c in terms)
        constant = -constant
    return (rel, terms, constant)


class _EqSpan:
    """Row-reduced basis of the equality rows; membership by reduction.

    The constant of a form is carried as a pseudo-coordinate so that affine
    equalities (the normalization) participate correctly.
    """

    _CONST = -2

    def __init__(self, forms: Sequence[LinearForm]):
        self.pivots: Dict[int, Dict[int, Fraction]] = {}
        for form in forms:
            red = self._reduce(form)
            if red:
                lead = min(red)
                inv = 1 / red[lead]
                self.pivots[lead] = {k: v * inv for k, v in red.items()}

    def _reduce(self, form: LinearForm) -> Dict[int, Fraction]:
        vec = {k: c for k, c in form.terms}
        if form.constant:
            vec[self._CONST] = form.constant
        while True:
            reducible = [k for k in vec if k in self.pivots]
            if not reducible:
                break
            lead = min(reducible)  # elimination only introduces larger keys
            factor = vec[lead]
            for k, v in self.pivots[lead].items():
                new = vec.get(k, Fraction(0)) - factor * v
                if new == 0:
                    vec.pop(k, None)
                else:
                    vec[k] = new
        return vec

    def contains(self, form: LinearForm) -> bool:
        return not self._reduce(form)


def _check_invariance(
    rows: Sequence[Constraint], objective: LinearForm, group: PermGroup
) -> Tuple[bool, List[str]]:
    """Validate invariance of the assembled rows under each generator.

    An equality row's image must lie in the span of all equality rows; an
    inequality row's image must be present verbatim.  A violation on a
    non-copy row (problem, normalization, epigraph, Shannon) is an error.
    Copy rows may break invariance: a copy step names specific variables, so
    the full extension of a ground symmetry need not fix the extended
    feasible set even when the ground problem is symmetric; the quotient
    then only identifies coordinates over the scope the group is declared
    on.  Returns (full_ok, notes): full_ok means the whole feasible set is
    invariant and the quotient may act on every coordinate.
    """
    notes: List[str] = []
    full_ok = True

    span = _EqSpan([r.form for r in rows if r.rel == REL_EQ])
    ineq_keys = {_canon(r.rel, r.form) for r in rows if r.rel == REL_GE}

    def image_ok(row: Constraint, gen) -> bool:
        image = row.form.map_keys(lambda m: act(gen, m))
        if row.rel == REL_EQ:
            return span.contains(image)
        return _canon(row.rel, image) in ineq_keys

    for g_idx, gen in enumerate(group.generators):
        mapped = objective.map_keys(lambda m: act(gen, m))
        if mapped != objective:
            raise EntlpError(
                f"objective is not invariant under symmetry generator {g_idx + 1}"
            )
        asym = 0
        for row in rows:
            if image_ok(row, gen):
                continue
            if not row.label.startswith("copy"):
                raise EntlpError(
                    f"constraint {row.label!r} is not invariant under "
                    f"symmetry generator {g_idx + 1}"
                )
            asym += 1
        if asym:
            full_ok = False
            notes.append(
                f"generator {g_idx + 1} maps {asym} copy rows outside the "
                "feasible set's equality span; quotient restricted to the "
                "declared ground action"
            )
    return full_ok, notes


def _symmetry_scope(
    problem: Problem, group: PermGroup, full_vars: VarTable
) -> VarTable:
    """Variables the symmetry argument covers: the ground variables plus
    anything a generator moves.  Must be a prefix of the full list."""
    moved = 0
    for gen in group.generators:
        for i, j in enumerate(gen.image):
            if i != j:
                moved |= (1 << i) | (1 << j)
    scope_mask = ((1 << len(problem.ground_vars)) - 1) | moved
    scope_names = [
        full_vars.names[i] for i in range(len(full_vars)) if (1 << i) & scope_mask
    ]
    scope = VarTable(scope_names)
    if scope.names != full_vars.names[: len(scope.names)]:
        raise ProblemError("symmetry scope is not a variable-list prefix")
    return scope


def build_lp(problem: Problem, options: LPOptions = LPOptions()) -> LP:
    """Assemble the full LP with deterministic row and column order."""
    include = None
    if options.steps is not None:
        nsteps = len(problem.copy_steps)
        for k in options.steps:
            if not 0 <= k < nsteps:
                raise ProblemError(f"copy step index {k} out of range")
        include = list(options.steps)
    full_vars, copy_blocks = problem.expand(include)
    full_mask = full_vars.full_mask()

    rows: List[Constraint] = []
    for row in problem.base_constraints:
        for key in row.form.keys():
            if key != MAX_KEY and key & ~full_mask:
                raise ProblemError(
                    f"constraint {row.label} references a dropped copy variable"
                )
        rows.append(row)
    if problem.normalization is not None:
        rows.append(problem.normalization)

    group: Optional[PermGroup] = None
    if problem.symmetry_gens and options.symmetry != SYM_OFF:
        group = PermGroup(problem.symmetry_perms(full_vars), len(full_vars))

    if options.symmetry == SYM_INVARIANCE:
        if group is None:
            raise ProblemError("symmetry mode requested but no generators")
        scope = _symmetry_scope(problem, group, full_vars)
        sub_group = PermGroup(problem.symmetry_perms(scope), len(scope))
        rows.extend(invariance_equalities(sub_group, scope))

    merged_done = False
    if options.merged_independence:
        steps = problem.resolved_steps(include)
        if len(steps) != 2:
            raise ProblemError(
                "merged independence needs exactly two copy steps"
            )
        merged = merged_independence(
            steps[0], steps[1], full_vars, "copy-merged:indep"
        )
        merged_done = True
    for block in copy_blocks:
        for row in block:
            if merged_done and row.label.endswith(":indep"):
                continue
            rows.append(row)
    if merged_done:
        rows.append(merged)

    if problem.objective.kind == MINMAX:
        objective = max_scalar()
        for form in problem.objective.forms:
            label = f"epi:MAX>={render_form(form, full_vars)}"
            rows.append(Constraint(max_scalar() - form, REL_GE, label))
    else:
        objective = problem.objective.forms[0]

    rows.extend(elemental_inequalities(full_vars))

    notes: List[str] = []
    rep_map: Optional[Dict[int, int]] = None
    if options.symmetry == SYM_QUOTIENT:
        if group is None:
            raise ProblemError("quotient requested but no symmetry generators")
        full_ok, notes = _check_invariance(rows, objective, group)
        if full_ok:
            rep_map = group.rep_map(full_mask)
        else:
            # identify only the subsets the ground symmetry argument covers
            scope = _symmetry_scope(problem, group, full_vars)
            scope_mask = (1 << len(scope)) - 1
            scoped = group.rep_map(scope_mask)
            rep_map = {
                m: scoped[m] if m & ~scope_mask == 0 else m
                for m in full_vars.subsets()
            }
        objective = objective.map_keys(lambda m: rep_map[m])
        reduced: List[Constraint] = []
        seen: Dict[Tuple, str] = {}
        for row in rows:
            form = row.form.map_keys(lambda m: rep_map[m])
            if form.is_zero() and row.rel == REL_EQ:
                continue
            if not form.terms and form.constant != 0:
                raise EntlpError(
                    f"row {row.label} reduces to an inconsistent constant"
                )
            key = (row.rel, form.terms, form.constant)
            if key in seen:
                continue
            seen[key] = row.label
            reduced.append(Constraint(form, row.rel, row.label))
        rows = reduced
        columns = sorted({m for m in rep_map.values()})
    else:
        columns = list(full_vars.subsets())
    if problem.objective.kind == MINMAX:
        columns = list(columns) + [MAX_KEY]

    return LP(
        problem_name=problem.name,
        options=options,
        vars=full_vars,
        columns=list(columns),
        rows=rows,
        objective=objective,
        rep_map=rep_map,
        notes=notes,
    )


def export_lp(lp: LP) -> str:
    """Plain-text interchange format; bit-exact across runs."""
    lines = [
        "# entlp lp export",
        f"problem: {lp.problem_name}",
        f"options: {lp.options.token()}",
        f"options-hash: {lp.options.digest()}",
        f"columns: {len(lp.columns)}",
        "  " + " ".join(lp.column_name(k) for k in lp.columns),
        f"minimize: {lp.render(lp.objective)}",
        f"rows: {len(lp.rows)}",
    ]
    for row in lp.rows:
        lines.append(f"row {row.label} : {lp.render(row.form)} {row.rel} 0")
    return "\n".join(lines) + "\n"
