"""Problem model, text DSL, and the builtin benchmarks.

A problem bundles ground variables, linear constraints, Copy Lemma steps,
a symmetry group, a normalization, and an objective (plain linear or
min-max over several forms).  Copy steps are stored symbolically (by
variable name) so ablations can drop individual steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .core import (
    LinearForm,
    ProblemError,
    VarTable,
    coord,
    cond_entropy,
    ingleton_form,
    parse_form,
    render_form,
)
from .extension import CopyStep, apply_copy_step
from .shannon import REL_EQ, REL_GE, Constraint
from .symmetry import Perm, PermGroup, invariance_equalities

LINEAR = "minimize-linear"
MINMAX = "minimize-max"


@dataclass(frozen=True)
class Objective:
    kind: str
    forms: Tuple[LinearForm, ...]

    def __post_init__(self):
        if self.kind not in (LINEAR, MINMAX):
            raise ProblemError(f"bad objective kind {self.kind!r}")
        if self.kind == LINEAR and len(self.forms) != 1:
            raise ProblemError("linear objective takes exactly one form")
        if self.kind == MINMAX and not self.forms:
            raise ProblemError("min-max objective needs at least one form")


@dataclass(frozen=True)
class CopyDecl:
    """Symbolic copy step: tuples of original names, over/context names."""

    copied: Tuple[Tuple[str, ...], ...]
    over: Tuple[str, ...]
    context: Tuple[str, ...]
    new_names: Tuple[str, ...]

    def resolve(self, vars: VarTable) -> CopyStep:
        return CopyStep(
            copied=tuple(vars.mask(t) for t in self.copied),
            over=vars.mask(self.over),
            context=vars.mask(self.context),
            new_names=self.new_names,
        )


# symmetry generator: list of cycles, each cycle a list of variable names
SymGen = Tuple[Tuple[str, ...], ...]


@dataclass(frozen=True)
class Problem:
    name: str
    ground_vars: VarTable
    base_constraints: Tuple[Constraint, ...]
    copy_steps: Tuple[CopyDecl, ...]
    symmetry_gens: Tuple[SymGen, ...]
    normalization: Optional[Constraint]
    objective: Objective

    def expand(
        self, include_steps: Optional[Sequence[int]] = None
    ) -> Tuple[VarTable, List[List[Constraint]]]:
        """Apply (a subset of) the copy steps; returns the final variable
        table and one constraint list per applied step."""
        steps = list(self.copy_steps)
        if include_steps is not None:
            steps = [steps[i] for i in include_steps]
        vars = self.ground_vars.copy()
        blocks: List[List[Constraint]] = []
        for k, decl in enumerate(steps, start=1):
            try:
                step = decl.resolve(vars)
            except ProblemError as exc:
                raise ProblemError(
                    f"copy step {k} of {self.name!r}: {exc}"
                ) from exc
            vars, rows = apply_copy_step(step, vars, f"copy{k}")
            blocks.append(rows)
        return vars, blocks

    def resolved_steps(
        self, include_steps: Optional[Sequence[int]] = None
    ) -> List[CopyStep]:
        steps = list(self.copy_steps)
        if include_steps is not None:
            steps = [steps[i] for i in include_steps]
        vars = self.ground_vars.copy()
        out = []
        for decl in steps:
            step = decl.resolve(vars)
            for name in decl.new_names:
                vars.add(name)
            out.append(step)
        return out

    def symmetry_perms(self, vars: VarTable) -> List[Perm]:
        """Resolve the symmetry generators against a variable table."""
        perms = []
        for gen in self.symmetry_gens:
            cycles = [[vars.index(name) for name in cyc] for cyc in gen]
            perms.append(Perm.from_cycles(cycles, len(vars)))
        return perms


# ---------------------------------------------------------------------------
# Builtin benchmark: worst-case Ingleton score.
# ---------------------------------------------------------------------------


def builtin_ingleton() -> Problem:
    """Minimize Ing(A,B,C,D) with H(A,B,C,D)=1, the (A B)/(C D) symmetry,
    and three copy steps introducing R,S,T,U.

    The invariance equalities over A,B,C,D are part of the problem statement
    (the copy steps below are chosen for a symmetric point, so dropping them
    weakens the bound from -3/19 to -1/5); the symmetry declaration then only
    drives the optional reductions."""
    vars = VarTable(["A", "B", "C", "D"])
    a, b, c, d = (1 << i for i in range(4))
    normalization = Constraint(
        coord(a | b | c | d) + LinearForm((), Fraction(-1)), REL_EQ, "norm"
    )
    group = PermGroup(
        [Perm.from_cycles([[0, 1]], 4), Perm.from_cycles([[2, 3]], 4)], 4
    )
    sym_base = tuple(
        Constraint(row.form, row.rel, "problem:" + row.label)
        for row in invariance_equalities(group, vars)
    )
    return Problem(
        name="ingleton",
        ground_vars=vars,
        base_constraints=sym_base,
        copy_steps=(
            CopyDecl(
                copied=(("B",), ("D",)),
                over=("A", "C"),
                context=(),
                new_names=("R", "S"),
            ),
            CopyDecl(
                copied=(("C",),),
                over=("A", "B", "S"),
                context=("D", "R"),
                new_names=("T",),
            ),
            CopyDecl(
                copied=(("B",),),
                over=("A", "C", "R", "S", "T"),
                context=("D",),
                new_names=("U",),
            ),
        ),
        symmetry_gens=((("A", "B"),), (("C", "D"),)),
        normalization=normalization,
        objective=Objective(LINEAR, (ingleton_form(a, b, c, d),)),
    )


# ---------------------------------------------------------------------------
# Builtin benchmark: information ratio of the Vamos V0 access structure.
# ---------------------------------------------------------------------------

_PARTIES = (1, 2, 3, 4, 5, 6, 7)


def minimal_qualified_sets() -> List[Tuple[int, ...]]:
    """The 3-sets {1,2,3}, {1,4,5} and all 4-sets containing neither of them,
    except {2,3,4,5}, {2,3,6,7}, {4,5,6,7}; 26 sets total."""
    threes = [(1, 2, 3), (1, 4, 5)]
    exceptions = {(2, 3, 4, 5), (2, 3, 6, 7), (4, 5, 6, 7)}
    out = list(threes)
    for four in combinations(_PARTIES, 4):
        if any(set(t) <= set(four) for t in threes):
            continue
        if four in exceptions:
            continue
        out.append(four)
    return out


def is_qualified(subset: Sequence[int]) -> bool:
    s = set(subset)
    return any(set(q) <= s for q in minimal_qualified_sets())


def maximal_unqualified_sets() -> List[Tuple[int, ...]]:
    """Unqualified sets all of whose proper supersets are qualified."""
    unqualified = [
        s
        for r in range(0, 8)
        for s in combinations(_PARTIES, r)
        if not is_qualified(s)
    ]
    as_sets = [set(s) for s in unqualified]
    out = []
    for s in unqualified:
        if any(set(s) < t for t in as_sets):
            continue
        if s:
            out.append(s)
    return sorted(out, key=lambda s: (len(s), s))


def builtin_vamos_v0(copy_swap: bool = False) -> Problem:
    """Minimize max{H(S1),...,H(S7)} with H(S0)=1 for the V0 access
    structure, two pair-copy steps, and the share symmetry group.

    copy_swap additionally declares the swap of the two copy pairs as a
    symmetry generator (the two steps are symmetric under it)."""
    vars = VarTable([f"S{i}" for i in range(8)])
    s = [1 << i for i in range(8)]
    base: List[Constraint] = []
    for q in minimal_qualified_sets():
        mask = 0
        for i in q:
            mask |= s[i]
        label = "problem:recover:{" + ",".join(str(i) for i in q) + "}"
        base.append(Constraint(cond_entropy(s[0], mask), REL_EQ, label))
    for u in maximal_unqualified_sets():
        mask = 0
        for i in u:
            mask |= s[i]
        label = "problem:indep:{" + ",".join(str(i) for i in u) + "}"
        form = cond_entropy(s[0], mask) - coord(s[0])
        base.append(Constraint(form, REL_EQ, label))
    gens: List[SymGen] = [
        (("S2", "S3"),),
        (("S4", "S5"),),
        (("S6", "S7"),),
        (("S2", "S4"), ("S3", "S5")),
    ]
    if copy_swap:
        gens.append((("Vp", "Vpp"), ("Wp", "Wpp")))
    copied = (("S0", "S1"), ("S6", "S7"))
    over = ("S2", "S3", "S4", "S5")
    return Problem(
        name="vamos-v0",
        ground_vars=vars,
        base_constraints=tuple(base),
        copy_steps=(
            CopyDecl(
                copied=copied,
                over=over,
                context=("S0", "S1", "S6", "S7"),
                new_names=("Vp", "Wp"),
            ),
            CopyDecl(
                copied=copied,
                over=over,
                context=("S0", "S1", "S6", "S7", "Vp", "Wp"),
                new_names=("Vpp", "Wpp"),
            ),
        ),
        symmetry_gens=tuple(tuple(g) for g in gens),
        normalization=Constraint(
            coord(s[0]) + LinearForm((), Fraction(-1)), REL_EQ, "norm"
        ),
        objective=Objective(MINMAX, tuple(coord(s[i]) for i in range(1, 8))),
    )


BUILTINS = {
    "ingleton": builtin_ingleton,
    "vamos-v0": builtin_vamos_v0,
}


# ---------------------------------------------------------------------------
# Text DSL.
# ---------------------------------------------------------------------------


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


def _split_statements(text: str) -> List[Tuple[int, str]]:
    """Split on top-level ';' (the form syntax uses ';' only inside parens).
    Returns (line_number, statement) pairs."""
    out = []
    depth = 0
    buf: List[str] = []
    line = 1
    start_line = 1
    for ch in text:
        if ch == "\n":
            line += 1
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ProblemError(f"line {line}: unbalanced ')'")
        if ch == ";" and depth == 0:
            stmt = "".join(buf).strip()
            if stmt:
                out.append((start_line, stmt))
            buf = []
            start_line = line
            continue
        if not buf and not ch.isspace():
            start_line = line
        buf.append(ch)
    tail = "".join(buf).strip()
    if tail:
        raise ProblemError(f"line {start_line}: missing ';' after {tail[:30]!r}")
    if depth != 0:
        raise ProblemError("unbalanced '(' at end of input")
    return out


def _split_toplevel(text: str, seps: Sequence[str]) -> Optional[Tuple[str, str, str]]:
    """Find the first top-level occurrence of any separator; longest first."""
    depth = 0
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0:
            for sep in seps:
                if text.startswith(sep, i):
                    return text[:i], sep, text[i + len(sep):]
        i += 1
    return None


def _parse_name_list(text: str, where: str) -> List[str]:
    names = [t.strip() for t in text.split(",") if t.strip()]
    if not names and text.strip():
        raise ProblemError(f"bad name list in {where}: {text!r}")
    return names


def _parse_copy_stmt(body: str, line: int) -> CopyDecl:
    split = _split_toplevel(body, [":="])
    if split is None:
        raise ProblemError(f"line {line}: copy statement needs ':='")
    lhs, _, rhs = split
    lhs = lhs.strip()
    if lhs.startswith("(") and lhs.endswith(")"):
        new_names = tuple(_parse_name_list(lhs[1:-1], "copy names"))
    else:
        new_names = (lhs,)
    rhs = rhs.strip()
    if not rhs.startswith("copy"):
        raise ProblemError(f"line {line}: expected copy(...) after ':='")
    rhs = rhs[len("copy"):].strip()
    given_split = _split_toplevel(rhs, ["given"])
    if given_split is None:
        raise ProblemError(f"line {line}: copy statement needs 'given (...)'")
    call, _, given = given_split
    call = call.strip()
    if not (call.startswith("(") and call.endswith(")")):
        raise ProblemError(f"line {line}: malformed copy(...) call")
    inner = call[1:-1]
    bar = _split_toplevel(inner, ["|"])
    if bar is None:
        raise ProblemError(f"line {line}: copy(...) needs '| over-vars'")
    copied_text, _, over_text = bar
    copied: List[Tuple[str, ...]] = []
    # copied tuples: comma-separated at depth 0; parenthesized = composite
    depth = 0
    item: List[str] = []
    items: List[str] = []
    for ch in copied_text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            items.append("".join(item))
            item = []
        else:
            item.append(ch)
    if "".join(item).strip():
        items.append("".join(item))
    for raw in items:
        raw = raw.strip()
        if raw.startswith("(") and raw.endswith(")"):
            copied.append(tuple(_parse_name_list(raw[1:-1], "copied tuple")))
        else:
            copied.append((raw,))
    given = given.strip()
    if not (given.startswith("(") and given.endswith(")")):
        raise ProblemError(f"line {line}: 'given' takes a parenthesized list")
    context = tuple(_parse_name_list(given[1:-1], "context"))
    over = tuple(_parse_name_list(over_text, "over"))
    return CopyDecl(
        copied=tuple(copied), over=over, context=context, new_names=new_names
    )


def _parse_cycles(body: str, line: int) -> List[List[str]]:
    cycles = []
    depth = 0
    buf: List[str] = []
    for ch in body:
        if ch == "(":
            if depth:
                raise ProblemError(f"line {line}: nested '(' in cycle notation")
            depth = 1
            buf = []
        elif ch == ")":
            if not depth:
                raise ProblemError(f"line {line}: stray ')' in cycle notation")
            depth = 0
            elems = "".join(buf).replace(",", " ").split()
            if len(elems) < 2:
                raise ProblemError(f"line {line}: cycle needs >= 2 elements")
            cycles.append(elems)
        elif depth:
            buf.append(ch)
        elif not ch.isspace():
            raise ProblemError(f"line {line}: malformed cycle notation")
    if depth:
        raise ProblemError(f"line {line}: unterminated cycle")
    if not cycles:
        raise ProblemError(f"line {line}: empty symmetry statement")
    return cycles


def parse_problem(text: str, name: str = "problem") -> Problem:
    """Parse the DSL into a validated Problem."""
    vars = VarTable()
    base: List[Constraint] = []
    copies: List[CopyDecl] = []
    sym_raw: List[Tuple[int, List[List[str]]]] = []
    normalization: Optional[Constraint] = None
    objective: Optional[Objective] = None
    n_constraints = 0
    # the table including copy names, for form parsing as statements arrive
    scope = vars

    for line, stmt in _split_statements(_strip_comments(text)):
        word, _, body = stmt.partition(" ")
        body = body.strip()
        if word == "var":
            if copies:
                raise ProblemError(f"line {line}: 'var' after a copy step")
            for nm in body.replace(",", " ").split():
                try:
                    scope.add(nm)
                except ProblemError as exc:
                    raise ProblemError(f"line {line}: {exc}") from exc
        elif word == "constraint":
            split = _split_toplevel(body, [">=", "="])
            if split is None:
                raise ProblemError(f"line {line}: constraint needs '>=' or '='")
            lhs, sep, rhs = split
            try:
                form = parse_form(lhs, scope) - parse_form(rhs, scope)
            except (ProblemError, Exception) as exc:
                raise ProblemError(f"line {line}: {exc}") from exc
            n_constraints += 1
            rel = REL_GE if sep == ">=" else REL_EQ
            base.append(Constraint(form, rel, f"problem:{n_constraints}"))
        elif word == "copy":
            decl = _parse_copy_stmt(body, line)
            # validate + extend the scope now so later forms may use the names
            try:
                step = decl.resolve(scope)
                scope, _ = apply_copy_step(step, scope, f"copy{len(copies)+1}")
            except ProblemError as exc:
                raise ProblemError(f"line {line}: {exc}") from exc
            copies.append(decl)
        elif word == "symmetry":
            sym_raw.append((line, _parse_cycles(body, line)))
        elif word == "normalize":
            split = _split_toplevel(body, ["="])
            if split is None:
                raise ProblemError(f"line {line}: normalize needs '='")
            lhs, _, rhs = split
            try:
                value = Fraction(rhs.strip())
                form = parse_form(lhs, scope)
            except (ValueError, ZeroDivisionError) as exc:
                raise ProblemError(f"line {line}: bad rational {rhs!r}") from exc
            if normalization is not None:
                raise ProblemError(f"line {line}: duplicate normalize")
            normalization = Constraint(
                form + LinearForm((), -value), REL_EQ, "norm"
            )
        elif word == "minimize":
            if objective is not None:
                raise ProblemError(f"line {line}: duplicate minimize")
            if body.startswith("max"):
                inner = body[len("max"):].strip()
                if not (inner.startswith("(") and inner.endswith(")")):
                    raise ProblemError(f"line {line}: minimize max(...) expected")
                pieces = []
                depth = 0
                buf: List[str] = []
                for ch in inner[1:-1]:
                    if ch == "(":
                        depth += 1
                    elif ch == ")":
                        depth -= 1
                    if ch == "," and depth == 0:
                        pieces.append("".join(buf))
                        buf = []
                    else:
                        buf.append(ch)
                pieces.append("".join(buf))
                forms = tuple(parse_form(p, scope) for p in pieces)
                objective = Objective(MINMAX, forms)
            else:
                objective = Objective(LINEAR, (parse_form(body, scope),))
        else:
            raise ProblemError(f"line {line}: unknown statement {word!r}")

    if objective is None:
        raise ProblemError("problem has no 'minimize' statement")
    # resolve symmetry cycles: names, or 1-based indices into the ground list
    gens: List[SymGen] = []
    for line, cycles in sym_raw:
        resolved: List[Tuple[str, ...]] = []
        for cyc in cycles:
            names = []
            for el in cyc:
                if el.isdigit():
                    idx = int(el) - 1
                    if not 0 <= idx < len(vars):
                        raise ProblemError(
                            f"line {line}: variable index {el} out of range"
                        )
                    names.append(vars.names[idx])
                else:
                    if el not in scope:
                        raise ProblemError(f"line {line}: unknown variable {el!r}")
                    names.append(el)
            resolved.append(tuple(names))
        gens.append(tuple(resolved))
    return Problem(
        name=name,
        ground_vars=vars,
        base_constraints=tuple(base),
        copy_steps=tuple(copies),
        symmetry_gens=tuple(gens),
        normalization=normalization,
        objective=objective,
    )


def emit_problem(problem: Problem) -> str:
    """Deterministic DSL emission; emit(parse(emit(p))) == emit(p)."""
    full_vars, _ = problem.expand()
    lines = [f"# problem: {problem.name}"]
    lines.append("var " + " ".join(problem.ground_vars.names) + ";")
    for gen in problem.symmetry_gens:
        cyc_text = "".join("(" + " ".join(cyc) + ")" for cyc in gen)
        lines.append(f"symmetry {cyc_text};")
    for decl in problem.copy_steps:
        copied = ",".join(
            t[0] if len(t) == 1 else "(" + ",".join(t) + ")" for t in decl.copied
        )
        lhs = (
            decl.new_names[0]
            if len(decl.new_names) == 1
            else "(" + ",".join(decl.new_names) + ")"
        )
        over = ",".join(decl.over)
        ctx = ",".join(decl.context)
        lines.append(f"copy {lhs} := copy({copied} | {over}) given ({ctx});")
    for row in problem.base_constraints:
        lines.append(f"constraint {render_form(row.form, full_vars)} {row.rel} 0;")
    if problem.normalization is not None:
        terms = LinearForm(problem.normalization.form.terms)
        value = -problem.normalization.form.constant
        lines.append(f"normalize {render_form(terms, full_vars)} = {value};")
    if problem.objective.kind == LINEAR:
        lines.append(
            f"minimize {render_form(problem.objective.forms[0], full_vars)};"
        )
    else:
        inner = ", ".join(
            render_form(f, full_vars) for f in problem.objective.forms
        )
        lines.append(f"minimize max({inner});")
    return "\n".join(lines) + "\n"


def load_problem(source: str) -> Problem:
    """Builtin name or path to a DSL file."""
    if source in BUILTINS:
        return BUILTINS[source]()
    try:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ProblemError(f"cannot read problem {source!r}: {exc}") from exc
    import os

    return parse_problem(text, name=os.path.splitext(os.path.basename(source))[0])
