"""Test-support ground truth: explicit joint distributions.

Small distributions with exact rational probabilities give an independent
oracle for everything the LP side asserts: entropy profiles must satisfy the
elemental inequalities, and the constructive copy extension must satisfy the
constraints emitted for the same copy step.  Entropies are in bits.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .core import EntlpError, VarTable, bits
from .extension import CopyStep

Outcome = Tuple[object, ...]


@dataclass
class JointDist:
    """Finitely supported joint distribution with exact probabilities.

    Outcome tuples are aligned with the variable order; probabilities are
    positive rationals summing to exactly 1 (zero-probability outcomes are
    simply omitted).
    """

    vars: VarTable
    probs: Dict[Outcome, Fraction]

    def __post_init__(self):
        total = Fraction(0)
        n = len(self.vars)
        for outcome, p in self.probs.items():
            if len(outcome) != n:
                raise EntlpError(f"outcome {outcome!r} has wrong arity")
            if p < 0:
                raise EntlpError("negative probability")
            total += p
        if total != 1:
            raise EntlpError(f"probabilities sum to {total}, not 1")

    def marginal(self, mask: int) -> Dict[Outcome, Fraction]:
        idx = list(bits(mask))
        out: Dict[Outcome, Fraction] = {}
        for outcome, p in self.probs.items():
            if p == 0:
                continue
            key = tuple(outcome[i] for i in idx)
            out[key] = out.get(key, Fraction(0)) + p
        return out

    def entropy(self, mask: int) -> float:
        """Shannon entropy (bits) of the marginal on a variable subset."""
        acc = 0.0
        for p in self.marginal(mask).values():
            if p > 0:
                fp = float(p)
                acc -= fp * math.log2(fp)
        return acc


def entropy_profile(d: JointDist) -> Dict[int, float]:
    """All 2^n - 1 subset entropies, keyed by variable bitmask."""
    return {mask: d.entropy(mask) for mask in d.vars.subsets()}


def copy_extend(d: JointDist, step: CopyStep) -> JointDist:
    """Constructive Copy Lemma: append the copies of a step.

    Conditioned on the over-tuple's value, the joint copies are drawn from
    the originals' conditional law, independently of everything else.  Each
    copy variable's value is the tuple of its original tuple's values.
    """
    step.validate(d.vars)
    over_idx = list(bits(step.over))
    orig_idx = [list(bits(m)) for m in step.copied]

    new_vars = d.vars.copy()
    for name in step.new_names:
        new_vars.add(name)

    # conditional law of the joint originals given the over-tuple
    over_probs: Dict[Outcome, Fraction] = {}
    joint_probs: Dict[Tuple[Outcome, Tuple[Outcome, ...]], Fraction] = {}
    for outcome, p in d.probs.items():
        if p == 0:
            continue
        x = tuple(outcome[i] for i in over_idx)
        z = tuple(tuple(outcome[i] for i in idx) for idx in orig_idx)
        over_probs[x] = over_probs.get(x, Fraction(0)) + p
        joint_probs[(x, z)] = joint_probs.get((x, z), Fraction(0)) + p

    probs: Dict[Outcome, Fraction] = {}
    for outcome, p in d.probs.items():
        if p == 0:
            continue
        x = tuple(outcome[i] for i in over_idx)
        for (x2, z), pz in joint_probs.items():
            if x2 != x:
                continue
            ext = outcome + z
            probs[ext] = probs.get(ext, Fraction(0)) + p * pz / over_probs[x]
    return JointDist(new_vars, probs)


def product(d1: JointDist, d2: JointDist) -> JointDist:
    """Independent product; variable names must not collide."""
    vars = d1.vars.copy()
    for name in d2.vars.names:
        vars.add(name)
    probs: Dict[Outcome, Fraction] = {}
    for o1, p1 in d1.probs.items():
        for o2, p2 in d2.probs.items():
            if p1 and p2:
                probs[o1 + o2] = p1 * p2
    return JointDist(vars, probs)


def uniform_bits(names: Sequence[str]) -> JointDist:
    """Independent fair bits."""
    vars = VarTable(names)
    n = len(vars)
    p = Fraction(1, 2**n)
    probs = {}
    for code in range(2**n):
        probs[tuple((code >> i) & 1 for i in range(n))] = p
    return JointDist(vars, probs)


def random_dist(
    rng: random.Random,
    names: Sequence[str],
    max_support: int = 3,
    weight_range: int = 8,
) -> JointDist:
    """Random exact-rational distribution with per-variable support <= max."""
    vars = VarTable(names)
    sizes = [rng.randint(1, max_support) for _ in vars.names]
    outcomes: List[Outcome] = [()]
    for size in sizes:
        outcomes = [o + (v,) for o in outcomes for v in range(size)]
    weights = [rng.randint(0, weight_range) for _ in outcomes]
    if not any(weights):
        weights[rng.randrange(len(weights))] = 1
    total = sum(weights)
    probs = {
        o: Fraction(w, total) for o, w in zip(outcomes, weights) if w
    }
    return JointDist(vars, probs)
