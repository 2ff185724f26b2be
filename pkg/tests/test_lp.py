from fractions import Fraction

import pytest

from entlp.core import EntlpError, MAX_KEY, VarTable, coord
from entlp.lp import (
    LP,
    LPOptions,
    SYM_INVARIANCE,
    SYM_OFF,
    SYM_QUOTIENT,
    build_lp,
    export_lp,
)
from entlp.problem import builtin_ingleton, builtin_vamos_v0, parse_problem
from entlp.shannon import Constraint, REL_EQ, REL_GE


def test_options_token_round_trip():
    for opts in (
        LPOptions(),
        LPOptions(symmetry=SYM_QUOTIENT, merged_independence=True),
        LPOptions(steps=(0, 2)),
        LPOptions(steps=()),
    ):
        assert LPOptions.from_token(opts.token()) == opts
    assert len(LPOptions().digest()) == 12
    with pytest.raises(EntlpError):
        LPOptions(symmetry="bogus")


def test_ingleton_row_counts():
    p = builtin_ingleton()
    lp = build_lp(p)
    assert len(lp.columns) == 255
    # 1800 elemental + 7 symmetry + 55 copy + 1 normalization
    assert len(lp.rows) == 1863
    kinds = {}
    for row in lp.rows:
        kinds[row.label.split(":")[0]] = kinds.get(row.label.split(":")[0], 0) + 1
    assert kinds == {"problem": 7, "norm": 1, "copy1": 13, "copy2": 9,
                     "copy3": 33, "elem": 1800}
    lp_inv = build_lp(p, LPOptions(symmetry=SYM_INVARIANCE))
    assert len(lp_inv.rows) == 1863 + 7
    lp_q = build_lp(p, LPOptions(symmetry=SYM_QUOTIENT))
    assert len(lp_q.columns) == 248  # 255 minus 7 identified ground subsets
    assert lp_q.rep_map is not None
    assert lp_q.notes  # copy rows break the full extension's invariance


def test_ingleton_no_copy_steps():
    lp = build_lp(builtin_ingleton(), LPOptions(steps=()))
    assert len(lp.columns) == 15
    assert len(lp.rows) == 28 + 7 + 1


def test_vamos_row_counts():
    p = builtin_vamos_v0()
    lp = build_lp(p)
    assert len(lp.columns) == 4096  # 4095 subsets + MAX
    assert lp.columns[-1] == MAX_KEY
    # 67596 elemental + 26 recover + 24 indep + 2*(48+1) copy + 7 epi + 1 norm
    assert len(lp.rows) == 67752
    assert sum(1 for r in lp.rows if r.label.startswith("epi:")) == 7


def test_vamos_quotient_counts():
    p = builtin_vamos_v0()
    lp = build_lp(p, LPOptions(symmetry=SYM_QUOTIENT))
    assert len(lp.columns) == 1152  # 1151 orbit representatives + MAX
    assert not lp.notes  # the full row set is invariant
    assert len(lp.rows) < 67752


def test_merged_independence_rows():
    p = builtin_vamos_v0()
    lp = build_lp(p, LPOptions(merged_independence=True))
    labels = {r.label for r in lp.rows}
    assert "copy-merged:indep" in labels
    assert "copy1:indep" not in labels and "copy2:indep" not in labels
    with pytest.raises(EntlpError):
        build_lp(builtin_ingleton(), LPOptions(merged_independence=True))


def test_quotient_requires_generators():
    p = parse_problem("var X Y;\nminimize H(X,Y);\n")
    with pytest.raises(EntlpError):
        build_lp(p, LPOptions(symmetry=SYM_QUOTIENT))
    with pytest.raises(EntlpError):
        build_lp(p, LPOptions(symmetry=SYM_INVARIANCE))


def test_quotient_rejects_asymmetric_objective():
    p = parse_problem(
        "var X Y;\nsymmetry (X Y);\nminimize H(X);\n", "asym"
    )
    with pytest.raises(EntlpError):
        build_lp(p, LPOptions(symmetry=SYM_QUOTIENT))


def test_quotient_rejects_asymmetric_constraint():
    p = parse_problem(
        "var X Y;\nsymmetry (X Y);\nconstraint H(X) >= 1/2;\n"
        "minimize H(X,Y);\n",
        "asym2",
    )
    with pytest.raises(EntlpError):
        build_lp(p, LPOptions(symmetry=SYM_QUOTIENT))


def test_lp_duplicate_labels_rejected():
    vars = VarTable(["X"])
    rows = [
        Constraint(coord(1), REL_GE, "r"),
        Constraint(coord(1), REL_GE, "r"),
    ]
    with pytest.raises(EntlpError):
        LP("t", LPOptions(), vars, [1], rows, coord(1))


def test_lp_unknown_column_rejected():
    vars = VarTable(["X", "Y"])
    rows = [Constraint(coord(2), REL_GE, "r")]
    with pytest.raises(EntlpError):
        LP("t", LPOptions(), vars, [1], rows, coord(1))


def test_export_deterministic_and_complete():
    p = builtin_ingleton()
    lp = build_lp(p)
    a = export_lp(lp)
    b = export_lp(build_lp(p))
    assert a == b
    lines = a.splitlines()
    assert lines[0] == "# entlp lp export"
    assert f"rows: {len(lp.rows)}" in lines
    assert sum(1 for ln in lines if ln.startswith("row ")) == len(lp.rows)
    assert any("norm" in ln and "H(A,B,C,D)" in ln for ln in lines)
