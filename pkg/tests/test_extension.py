import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from entlp.core import ProblemError, VarTable, coord, cond_mutual_info
from entlp.extension import CopyStep, apply_copy_step, merged_independence
from entlp.oracle import copy_extend, entropy_profile, random_dist
from entlp.shannon import REL_EQ


def test_copy_step_validation():
    v = VarTable(["A", "B", "C"])
    CopyStep(copied=(1,), over=2, context=4, new_names=("Ap",)).validate(v)
    with pytest.raises(ProblemError):  # name count mismatch
        CopyStep(copied=(1,), over=2, context=0, new_names=()).validate(v)
    with pytest.raises(ProblemError):  # copied tuples overlap
        CopyStep(copied=(1, 1), over=2, context=0,
                 new_names=("P", "Q")).validate(v)
    with pytest.raises(ProblemError):  # over meets copied
        CopyStep(copied=(1,), over=1, context=0, new_names=("P",)).validate(v)
    with pytest.raises(ProblemError):  # over meets context
        CopyStep(copied=(1,), over=2, context=2, new_names=("P",)).validate(v)
    with pytest.raises(ProblemError):  # unknown variable bit
        CopyStep(copied=(8,), over=1, context=0, new_names=("P",)).validate(v)
    with pytest.raises(ProblemError):  # name clash
        CopyStep(copied=(1,), over=2, context=0, new_names=("B",)).validate(v)
    # context MAY overlap the copied tuples (pair-copy pattern)
    CopyStep(copied=(1, 2), over=4, context=3,
             new_names=("P", "Q")).validate(v)


def test_apply_copy_step_rows():
    v = VarTable(["A", "B", "C"])
    # Bp := C-copy(B | A): over m=1, one copy -> 2^2 - 2^1 = 2 substitutions
    step = CopyStep(copied=(2,), over=1, context=4, new_names=("Bp",))
    out_vars, rows = apply_copy_step(step, v, "copy1")
    assert out_vars.names == ["A", "B", "C", "Bp"]
    assert len(rows) == 3
    labels = [r.label for r in rows]
    assert labels == ["copy1:H(Bp)=H(B)", "copy1:H(A,Bp)=H(A,B)", "copy1:indep"]
    bp = 0b1000
    assert rows[0].form == coord(bp) - coord(0b010)
    assert rows[1].form == coord(bp | 1) - coord(0b011)
    # independence: I(Bp ; C,B | A) = 0
    assert rows[2].form == cond_mutual_info(bp, 0b110, 1)
    assert all(r.rel == REL_EQ for r in rows)


@pytest.mark.parametrize("m,k", [(1, 1), (2, 1), (2, 2), (3, 1)])
def test_substitution_count(m, k):
    names = [f"X{i}" for i in range(m + k)]
    v = VarTable(names)
    over = (1 << m) - 1
    copied = tuple(1 << (m + i) for i in range(k))
    step = CopyStep(copied=copied, over=over, context=0,
                    new_names=tuple(f"C{i}" for i in range(k)))
    _, rows = apply_copy_step(step, v, "copy1")
    assert len(rows) == (1 << (m + k)) - (1 << m) + 1  # + independence row


def test_merged_independence():
    v = VarTable(["A", "B", "X"])
    s1 = CopyStep(copied=(1,), over=4, context=2, new_names=("Ap",))
    v1, _ = apply_copy_step(s1, v, "copy1")
    s2 = CopyStep(copied=(1,), over=4, context=2 | 8, new_names=("App",))
    v2, _ = apply_copy_step(s2, v1, "copy2")
    row = merged_independence(s1, s2, v2, "copy-merged:indep")
    # H(A,B,Ap,App|X) = H(A,B|X) + H(Ap|X) + H(App|X)
    x, ap, app = 4, 8, 16
    expect = (
        (coord(1 | 2 | ap | app | x) - coord(x))
        - (coord(1 | 2 | x) - coord(x))
        - (coord(ap | x) - coord(x))
        - (coord(app | x) - coord(x))
    )
    assert row.form == expect
    with pytest.raises(ProblemError):  # different over-sets
        bad = CopyStep(copied=(1,), over=2, context=4, new_names=("Q",))
        merged_independence(s1, bad, v2, "x")


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_copy_extension_satisfies_emitted_rows(seed):
    rng = random.Random(seed)
    d = random_dist(rng, ["X", "Y", "Z"])
    step = CopyStep(copied=(4,), over=1, context=2, new_names=("Zp",))
    ext = copy_extend(d, step)
    profile = entropy_profile(ext)
    _, rows = apply_copy_step(step, d.vars, "copy1")
    for row in rows:
        assert abs(row.form.evaluate(profile)) < 1e-9, row.label
