"""Permutation groups acting on variables and on entropy coordinates.

A permutation of the variable list induces a permutation of the subset
coordinates (`act`).  For a group G the optimum of any G-invariant LP is
attained on the G-invariant subspace, so the LP may either gain explicit
invariance equalities H(V) = H(rep(V)) or be rewritten onto orbit
representatives (`quotient_reduce` in the lp module uses the helpers here).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Set, Tuple

from .core import EntlpError, ProblemError, VarTable, bits, coord
from .shannon import REL_EQ, Constraint


@dataclass(frozen=True)
class Perm:
    """A bijection on variable indices, stored as its image tuple."""

    image: Tuple[int, ...]

    def __post_init__(self):
        if sorted(self.image) != list(range(len(self.image))):
            raise ProblemError(f"not a permutation: {self.image}")

    @staticmethod
    def identity(n: int) -> "Perm":
        return Perm(tuple(range(n)))

    @staticmethod
    def from_cycles(cycles: Sequence[Sequence[int]], n: int) -> "Perm":
        image = list(range(n))
        for cycle in cycles:
            cycle = list(cycle)
            if len(set(cycle)) != len(cycle):
                raise ProblemError(f"repeated element in cycle {cycle}")
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                if not 0 <= a < n:
                    raise ProblemError(f"cycle element {a} out of range")
                image[a] = b
        return Perm(tuple(image))

    def extend(self, n: int) -> "Perm":
        """Extend to n variables, fixing the new ones."""
        if n < len(self.image):
            raise ProblemError("cannot shrink a permutation")
        return Perm(self.image + tuple(range(len(self.image), n)))

    def compose(self, other: "Perm") -> "Perm":
        """self after other: (self*other)(i) = self(other(i))."""
        return Perm(tuple(self.image[j] for j in other.image))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.image))

    def cycles(self) -> List[Tuple[int, ...]]:
        """Non-trivial cycles in canonical order (smallest element first)."""
        seen = set()
        out = []
        for start in range(len(self.image)):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            nxt = self.image[start]
            while nxt != start:
                cyc.append(nxt)
                seen.add(nxt)
                nxt = self.image[nxt]
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out


def act(perm: Perm, mask: int) -> int:
    """Elementwise image of a variable subset."""
    out = 0
    for i in bits(mask):
        out |= 1 << perm.image[i]
    return out


class PermGroup:
    """Finite permutation group given by generators; closure is cached."""

    def __init__(self, generators: Sequence[Perm], n: int):
        self.n = n
        self.generators = [g.extend(n) for g in generators]
        self.elements = self._closure()

    def _closure(self) -> List[Perm]:
        ident = Perm.identity(self.n)
        seen: Set[Tuple[int, ...]] = {ident.image}
        frontier = [ident]
        while frontier:
            nxt = []
            for el in frontier:
                for g in self.generators:
                    prod = g.compose(el)
                    if prod.image not in seen:
                        seen.add(prod.image)
                        nxt.append(prod)
            frontier = sorted(nxt, key=lambda p: p.image)
        return [Perm(img) for img in sorted(seen)]

    def __len__(self) -> int:
        return len(self.elements)

    def is_trivial(self) -> bool:
        return len(self.elements) == 1

    def orbit(self, mask: int) -> Set[int]:
        return {act(g, mask) for g in self.elements}

    def representative(self, mask: int) -> int:
        """Lexicographically minimal bitmask in the orbit."""
        return min(self.orbit(mask))

    def rep_map(self, full_mask: int) -> Dict[int, int]:
        """mask -> orbit representative, for every non-empty subset."""
        reps: Dict[int, int] = {}
        for mask in range(1, full_mask + 1):
            if mask in reps:
                continue
            orb = self.orbit(mask)
            rep = min(orb)
            for m in orb:
                reps[m] = rep
        return reps


def invariance_equalities(group: PermGroup, vars: VarTable) -> List[Constraint]:
    """H(V) - H(rep(V)) = 0 for every non-empty V with rep(V) != V."""
    rows: List[Constraint] = []
    reps = group.rep_map(vars.full_mask())
    for mask in vars.subsets():
        rep = reps[mask]
        if rep != mask:
            label = f"sym:H({vars.render_set(mask)})=H({vars.render_set(rep)})"
            rows.append(Constraint(coord(mask) - coord(rep), REL_EQ, label))
    return rows
