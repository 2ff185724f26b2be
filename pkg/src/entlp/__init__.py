"""Provable lower bounds on linear entropy functionals.

Builds LPs from elemental (Shannon-type) inequalities, copy-extension
equalities, and symmetry reductions; solves them in exact rational
arithmetic; and emits dual certificates that verify independently by an
exact weighted sum of the constraint rows.
"""

from .core import (
    EntlpError,
    FormError,
    LinearForm,
    MAX_KEY,
    ProblemError,
    VarTable,
    cond_entropy,
    cond_mutual_info,
    coord,
    ingleton_form,
    parse_form,
    render_form,
)
from .shannon import Constraint, REL_EQ, REL_GE, elemental_inequalities
from .extension import CopyStep, apply_copy_step
from .symmetry import Perm, PermGroup, act
from .problem import Problem, builtin_ingleton, builtin_vamos_v0, load_problem
from .lp import LP, LPOptions, SYM_INVARIANCE, SYM_OFF, SYM_QUOTIENT, build_lp
from .simplex import Solution, solve_exact, solve_float
from .certificate import Certificate, from_dual, parse_certificate, verify

__version__ = "0.1.0"

__all__ = [
    "EntlpError",
    "FormError",
    "ProblemError",
    "LinearForm",
    "MAX_KEY",
    "VarTable",
    "coord",
    "cond_entropy",
    "cond_mutual_info",
    "ingleton_form",
    "parse_form",
    "render_form",
    "Constraint",
    "REL_EQ",
    "REL_GE",
    "elemental_inequalities",
    "CopyStep",
    "apply_copy_step",
    "Perm",
    "PermGroup",
    "act",
    "Problem",
    "builtin_ingleton",
    "builtin_vamos_v0",
    "load_problem",
    "LP",
    "LPOptions",
    "SYM_OFF",
    "SYM_INVARIANCE",
    "SYM_QUOTIENT",
    "build_lp",
    "Solution",
    "solve_exact",
    "solve_float",
    "Certificate",
    "from_dual",
    "parse_certificate",
    "verify",
]
