import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from entlp.core import VarTable, bits, cond_mutual_info, coord
from entlp.oracle import entropy_profile, random_dist, uniform_bits
from entlp.shannon import (
    REL_GE,
    elemental_count,
    elemental_inequalities,
    is_shannon_feasible,
)
from entlp.simplex import INFEASIBLE, OPTIMAL, _tableau_core


@pytest.mark.parametrize("n,count", [(2, 3), (3, 9), (4, 28), (8, 1800)])
def test_elemental_counts(n, count):
    vars = VarTable([f"X{i}" for i in range(n)])
    rows = elemental_inequalities(vars)
    assert len(rows) == count
    assert elemental_count(n) == count
    assert elemental_count(12) == 67596


def test_elemental_rows_are_inequalities_with_stable_labels():
    vars = VarTable(["A", "B", "C"])
    rows = elemental_inequalities(vars)
    assert all(r.rel == REL_GE for r in rows)
    labels = [r.label for r in rows]
    assert labels == sorted(labels)
    assert len(set(labels)) == len(labels)
    assert "elem:H(A|B,C)" in labels
    assert "elem:I(A;B|{C})" in labels
    assert "elem:I(A;B|{})" in labels


def test_entropy_point_feasible_and_violation_detected():
    vars = VarTable(["X", "Y"])
    # two fair bits, independent
    point = {0b01: 1, 0b10: 1, 0b11: 2}
    assert is_shannon_feasible(point, vars)
    # submodularity violated: I(X;Y) = 1 + 1 - 3 < 0
    bad = {0b01: 1, 0b10: 1, 0b11: 3}
    assert not is_shannon_feasible(bad, vars)
    assert is_shannon_feasible(bad, vars, slack=2)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_random_profiles_shannon_feasible(seed):
    rng = random.Random(seed)
    d = random_dist(rng, ["X", "Y", "Z"])
    assert is_shannon_feasible(entropy_profile(d), d.vars, slack=1e-9)


# ---------------------------------------------------------------------------
# Brute-force correctness of the elemental family at n = 3, 4:
# (a) every basic inequality is a nonnegative combination of elementals,
# (b) no elemental is implied by the others.  Exact cone membership is an
# equality-form LP solved by the exact tableau.
# ---------------------------------------------------------------------------


def _in_cone(generators, target, ncoords):
    """Exact membership of `target` in the conic hull of `generators`."""
    keys = sorted({k for g in generators for k in g.keys()} | set(target.keys()))
    index = {k: i for i, k in enumerate(keys)}
    cols = [{index[k]: c for k, c in g.terms} for g in generators]
    costs = [Fraction(0)] * len(cols)
    rhs = [Fraction(0)] * len(keys)
    for k, c in target.terms:
        rhs[index[k]] = c
    status, _, _, _, _ = _tableau_core(cols, costs, rhs, len(keys))
    return status == OPTIMAL


def _basic_inequalities(vars):
    n = len(vars)
    idx = list(range(n))
    out = []
    for r_v in range(1, n + 1):
        for v in combinations(idx, r_v):
            rest1 = [i for i in idx if i not in v]
            for r_w in range(1, len(rest1) + 1):
                for w in combinations(rest1, r_w):
                    if min(w) < min(v):
                        continue  # I(V;W|U) = I(W;V|U)
                    rest2 = [i for i in rest1 if i not in w]
                    for r_u in range(len(rest2) + 1):
                        for u in combinations(rest2, r_u):
                            vm = sum(1 << i for i in v)
                            wm = sum(1 << i for i in w)
                            um = sum(1 << i for i in u)
                            out.append(cond_mutual_info(vm, wm, um))
    return out


@pytest.mark.parametrize("n", [3, 4])
def test_elemental_family_complete(n):
    vars = VarTable([f"X{i}" for i in range(n)])
    gens = [r.form for r in elemental_inequalities(vars)]
    for target in _basic_inequalities(vars):
        assert _in_cone(gens, target, n), "basic inequality outside the cone"
    # monotonicity H(full) - H(full minus one) is basic-adjacent; check too
    full = vars.full_mask()
    for i in range(n):
        target = coord(full) - coord(full & ~(1 << i)) if n > 1 else None
        if target is not None:
            assert _in_cone(gens, target, n)


@pytest.mark.parametrize("n", [3, 4])
def test_elemental_family_minimal(n):
    vars = VarTable([f"X{i}" for i in range(n)])
    rows = [r.form for r in elemental_inequalities(vars)]
    for i, target in enumerate(rows):
        others = rows[:i] + rows[i + 1:]
        assert not _in_cone(others, target, n), "redundant elemental"
