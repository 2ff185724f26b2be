import pytest
from hypothesis import given, strategies as st

from entlp.core import ProblemError, VarTable, popcount
from entlp.symmetry import Perm, PermGroup, act, invariance_equalities


def test_perm_basics():
    p = Perm.from_cycles([[0, 1]], 4)
    assert p.image == (1, 0, 2, 3)
    q = Perm.from_cycles([[0, 1, 2]], 3)
    assert q.image == (1, 2, 0)
    assert q.compose(q).compose(q).is_identity()
    assert Perm.identity(3).cycles() == []
    assert q.cycles() == [(0, 1, 2)]
    with pytest.raises(ProblemError):
        Perm((0, 0, 1))
    with pytest.raises(ProblemError):
        Perm.from_cycles([[0, 0]], 2)
    assert p.extend(6).image == (1, 0, 2, 3, 4, 5)
    with pytest.raises(ProblemError):
        p.extend(2)


def test_act():
    p = Perm.from_cycles([[0, 1]], 3)
    assert act(p, 0b001) == 0b010
    assert act(p, 0b011) == 0b011
    assert act(p, 0b101) == 0b110


def test_group_closure_sizes():
    g = PermGroup([Perm.from_cycles([[0, 1]], 4),
                   Perm.from_cycles([[2, 3]], 4)], 4)
    assert len(g) == 4
    # share symmetry of the second builtin: order 16
    gens = [
        Perm.from_cycles([[0, 1]], 6),
        Perm.from_cycles([[2, 3]], 6),
        Perm.from_cycles([[4, 5]], 6),
        Perm.from_cycles([[0, 2], [1, 3]], 6),
    ]
    assert len(PermGroup(gens, 6)) == 16
    s3 = PermGroup([Perm.from_cycles([[0, 1]], 3),
                    Perm.from_cycles([[0, 1, 2]], 3)], 3)
    assert len(s3) == 6


def test_orbits_and_representatives():
    g = PermGroup([Perm.from_cycles([[0, 1]], 4),
                   Perm.from_cycles([[2, 3]], 4)], 4)
    assert g.orbit(0b0001) == {0b0001, 0b0010}
    assert g.representative(0b0010) == 0b0001
    # mixed pair orbit has size 4
    assert g.orbit(0b0101) == {0b0101, 0b0110, 0b1001, 0b1010}
    reps = g.rep_map(0b1111)
    assert len(reps) == 15
    assert len(set(reps.values())) == 8  # orbit count
    assert all(reps[reps[m]] == reps[m] for m in reps)


def test_invariance_equalities():
    vars = VarTable(["A", "B", "C", "D"])
    g = PermGroup([Perm.from_cycles([[0, 1]], 4),
                   Perm.from_cycles([[2, 3]], 4)], 4)
    rows = invariance_equalities(g, vars)
    assert len(rows) == 7  # 15 subsets, 8 orbits
    labels = {r.label for r in rows}
    assert "sym:H(B)=H(A)" in labels
    assert "sym:H(B,D)=H(A,C)" in labels


@given(st.integers(min_value=0, max_value=63), st.permutations(list(range(6))))
def test_act_preserves_size_and_composes(mask, image):
    p = Perm(tuple(image))
    assert popcount(act(p, mask)) == popcount(mask)
    q = Perm.from_cycles([[0, 3], [1, 2]], 6)
    assert act(p, act(q, mask)) == act(p.compose(q), mask)
