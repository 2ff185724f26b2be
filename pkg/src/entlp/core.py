"""Exact-rational algebra over the entropy-profile space.

A problem over n random variables lives in R^(2^n - 1): one coordinate per
non-empty subset of the variables.  Subsets are bitmasks over a variable
table, coefficients are `fractions.Fraction`, and `LinearForm` is the sparse
rational combination of coordinates that everything else (constraints,
objectives, certificates) is made of.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Tuple


class EntlpError(Exception):
    """Base class for all errors raised by this package."""


class FormError(EntlpError):
    """Malformed textual linear form."""


class ProblemError(EntlpError):
    """Inconsistent problem definition (bad copy step, duplicate name, ...)."""


# Pseudo-coordinate used for the scalar introduced by the epigraph transform
# of min-max objectives.  It is not a variable subset; rendered as `MAX`.
MAX_KEY = -1

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of a mask, ascending."""
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def popcount(mask: int) -> int:
    return bin(mask).count("1")


class VarTable:
    """Ordered list of variable names with name -> index lookup."""

    def __init__(self, names: Iterable[str] = ()):
        self.names: List[str] = []
        self._index: Dict[str, int] = {}
        for name in names:
            self.add(name)

    def add(self, name: str) -> int:
        if not _NAME_RE.fullmatch(name):
            raise ProblemError(f"invalid variable name {name!r}")
        if name == "MAX":
            raise ProblemError("'MAX' is reserved for the epigraph scalar")
        if name in self._index:
            raise ProblemError(f"duplicate variable name {name!r}")
        self._index[name] = len(self.names)
        self.names.append(name)
        return self._index[name]

    def copy(self) -> "VarTable":
        return VarTable(self.names)

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, VarTable) and self.names == other.names

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ProblemError(f"unknown variable {name!r}") from None

    def mask(self, names: Iterable[str]) -> int:
        m = 0
        for name in names:
            m |= 1 << self.index(name)
        return m

    def full_mask(self) -> int:
        return (1 << len(self.names)) - 1

    def set_names(self, mask: int) -> List[str]:
        return [self.names[i] for i in bits(mask)]

    def render_set(self, mask: int) -> str:
        return ",".join(self.set_names(mask))

    def subsets(self, include_empty: bool = False) -> Iterator[int]:
        """All subsets of the table in ascending bitmask order."""
        start = 0 if include_empty else 1
        for m in range(start, 1 << len(self.names)):
            yield m


@dataclass(frozen=True)
class LinearForm:
    """Sparse rational linear combination of entropy coordinates plus a constant.

    Invariant: no stored zero coefficients, no empty-set key.  The special key
    MAX_KEY (epigraph scalar) is allowed; every other key is a non-empty
    variable bitmask.
    """

    terms: Tuple[Tuple[int, Fraction], ...] = ()
    constant: Fraction = Fraction(0)

    @staticmethod
    def make(terms: Dict[int, Fraction], constant=Fraction(0)) -> "LinearForm":
        clean = []
        for key, coef in terms.items():
            if key == 0:
                raise FormError("empty coordinate")
            coef = Fraction(coef)
            if coef != 0:
                clean.append((key, coef))
        clean.sort()
        return LinearForm(tuple(clean), Fraction(constant))

    def as_dict(self) -> Dict[int, Fraction]:
        return dict(self.terms)

    def __add__(self, other: "LinearForm") -> "LinearForm":
        acc = dict(self.terms)
        for key, coef in other.terms:
            acc[key] = acc.get(key, Fraction(0)) + coef
        return LinearForm.make(acc, self.constant + other.constant)

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + (-other)

    def __neg__(self) -> "LinearForm":
        return self * Fraction(-1)

    def __mul__(self, scalar) -> "LinearForm":
        scalar = Fraction(scalar)
        if scalar == 0:
            return LinearForm()
        return LinearForm(
            tuple((k, c * scalar) for k, c in self.terms), self.constant * scalar
        )

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.terms and self.constant == 0

    def coefficient(self, key: int) -> Fraction:
        for k, c in self.terms:
            if k == key:
                return c
        return Fraction(0)

    def keys(self) -> List[int]:
        return [k for k, _ in self.terms]

    def evaluate(self, point: Dict[int, object]):
        """Evaluate at a coordinate assignment (exact if the point is exact)."""
        total = self.constant
        acc = None
        for key, coef in self.terms:
            if key not in point:
                raise EntlpError(f"missing coordinate for key {key}")
            val = coef * point[key]
            acc = val if acc is None else acc + val
        if acc is None:
            return total
        return acc + total

    def map_keys(self, fn) -> "LinearForm":
        """Rewrite every coordinate key through fn, merging collisions."""
        acc: Dict[int, Fraction] = {}
        for key, coef in self.terms:
            new = key if key == MAX_KEY else fn(key)
            acc[new] = acc.get(new, Fraction(0)) + coef
        return LinearForm.make(acc, self.constant)


def coord(mask: int) -> LinearForm:
    """The form with coefficient 1 on a single entropy coordinate."""
    if mask == 0:
        raise FormError("empty coordinate")
    return LinearForm(((mask, Fraction(1)),))


def max_scalar() -> LinearForm:
    return LinearForm(((MAX_KEY, Fraction(1)),))


def cond_entropy(v: int, w: int) -> LinearForm:
    """H(V|W) = H(V u W) - H(W); plain H(V) when W is empty."""
    if v == 0:
        raise FormError("empty coordinate")
    if w == 0:
        return coord(v)
    if v | w == w:
        return coord(v | w) - coord(w)  # zero when v subset of w
    return coord(v | w) - coord(w)


def cond_mutual_info(v: int, w: int, u: int = 0) -> LinearForm:
    """I(V;W|U) = H(UV) + H(UW) - H(UVW) - H(U), terms merged."""
    if v == 0 or w == 0:
        raise FormError("empty coordinate")
    acc: Dict[int, Fraction] = {}
    for mask, sign in ((u | v, 1), (u | w, 1), (u | v | w, -1), (u, -1)):
        if mask == 0:
            continue
        acc[mask] = acc.get(mask, Fraction(0)) + sign
    return LinearForm.make(acc)


def ingleton_form(a: int, b: int, c: int, d: int) -> LinearForm:
    """I(a;b|c) + I(a;b|d) + I(c;d) - I(a;b) over four disjoint sets."""
    sets = [a, b, c, d]
    if any(s == 0 for s in sets):
        raise FormError("empty coordinate")
    for i in range(4):
        for j in range(i + 1, 4):
            if sets[i] & sets[j]:
                raise FormError("ingleton arguments must be disjoint")
    return (
        cond_mutual_info(a, b, c)
        + cond_mutual_info(a, b, d)
        + cond_mutual_info(c, d)
        - cond_mutual_info(a, b)
    )


# ---------------------------------------------------------------------------
# Textual form syntax.
#
#   3/2*H(A,B) - H(C) + I(A;B|C) + H(A|B) + 5
#
# Whitespace-insensitive; identifiers case-sensitive; H(...|...), I(...;...)
# and I(...;...|...) expand per the standard abbreviations; `MAX` names the
# epigraph scalar.
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[()+\-*;,|]))"
)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise FormError(f"bad character {text[pos]!r} at offset {pos}")
        if m.lastgroup == "num":
            out.append(("num", m.group("num"), pos))
        elif m.lastgroup == "name":
            out.append(("name", m.group("name"), pos))
        else:
            out.append((m.group("op"), m.group("op"), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _FormParser:
    def __init__(self, text: str, vars: VarTable, allow_max: bool = False):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.vars = vars
        self.allow_max = allow_max

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            raise FormError(f"expected {kind!r}, got {tok[1]!r} at offset {tok[2]}")
        self.pos += 1
        return tok

    def parse(self) -> LinearForm:
        form = self.parse_sum()
        tok = self.peek()
        if tok[0] != "end":
            raise FormError(f"unexpected {tok[1]!r} at offset {tok[2]}")
        return form

    def parse_sum(self) -> LinearForm:
        sign = Fraction(1)
        tok = self.peek()
        if tok[0] in "+-":
            self.take()
            sign = Fraction(-1) if tok[0] == "-" else Fraction(1)
        total = self.parse_term() * sign
        while self.peek()[0] in "+-":
            op = self.take()[0]
            term = self.parse_term()
            total = total + (term if op == "+" else -term)
        return total

    def parse_term(self) -> LinearForm:
        tok = self.peek()
        coef = Fraction(1)
        if tok[0] == "num":
            self.take()
            coef = Fraction(tok[1])
            if self.peek()[0] == "*":
                self.take()
            elif self.peek()[0] in ("name",):
                pass  # allow `2 H(A)` style? no: require * or standalone
            else:
                return LinearForm((), coef)
            if self.peek()[0] != "name":
                raise FormError(
                    f"expected H/I/MAX after coefficient at offset {self.peek()[2]}"
                )
        return self.parse_atom() * coef

    def parse_varset(self, stop: str) -> int:
        mask = 0
        while True:
            tok = self.take("name")
            mask |= 1 << self.vars.index(tok[1])
            nxt = self.peek()
            if nxt[0] == ",":
                self.take()
                continue
            return mask

    def parse_atom(self) -> LinearForm:
        tok = self.take("name")
        if tok[1] == "MAX":
            if not self.allow_max:
                raise FormError("MAX is only valid in objective/certificate forms")
            return max_scalar()
        if tok[1] not in ("H", "I"):
            raise FormError(f"expected H(...), I(...) or MAX at offset {tok[2]}")
        self.take("(")
        first = self.parse_varset(")|;")
        if tok[1] == "H":
            cond = 0
            if self.peek()[0] == "|":
                self.take()
                cond = self.parse_varset(")")
            self.take(")")
            return cond_entropy(first, cond)
        self.take(";")
        second = self.parse_varset(")|")
        cond = 0
        if self.peek()[0] == "|":
            self.take()
            cond = self.parse_varset(")")
        self.take(")")
        return cond_mutual_info(first, second, cond)


def parse_form(text: str, vars: VarTable, allow_max: bool = False) -> LinearForm:
    """Parse the textual form syntax into an expanded LinearForm."""
    return _FormParser(text, vars, allow_max=allow_max).parse()


def render_form(form: LinearForm, vars: VarTable) -> str:
    """Deterministic rendering; parse_form(render_form(f)) == f."""
    if form.is_zero():
        return "0"
    parts: List[str] = []
    for key, coef in form.terms:
        atom = "MAX" if key == MAX_KEY else f"H({vars.render_set(key)})"
        mag = abs(coef)
        piece = atom if mag == 1 else f"{mag}*{atom}"
        if not parts:
            parts.append(piece if coef > 0 else f"-{piece}")
        else:
            parts.append(("+ " if coef > 0 else "- ") + piece)
    if form.constant != 0:
        mag = abs(form.constant)
        if not parts:
            parts.append(str(form.constant))
        else:
            parts.append(("+ " if form.constant > 0 else "- ") + str(mag))
    return " ".join(parts)
