"""Multilinear graded *-polynomials in P_{m,l}^G.

Variables ``y1..yl`` are symmetric and ``z(l+1)..zm`` skew-symmetric; each
carries a group degree.  A polynomial is a sparse map from words (permutations
of ``1..m``, as tuples) to nonzero coefficients.

Text form::

    2*y1 z2 - 1/3*z2 y1 + z2 y1

Juxtaposition is product; a missing coefficient means 1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Mapping, Sequence

from .coeffs import Field, QQ, parse_field
from .triangular import (
    GradeSpec,
    Involution,
    StructureSpec,
    TriMatrix,
    in_space,
    parse_degree_tuple,
    space_basis,
)

__all__ = [
    "VarSpec",
    "StarPoly",
    "PolySyntaxError",
    "ArgumentError",
    "parse_star_poly",
    "evaluate",
    "homogeneity",
    "Problem",
    "parse_problem",
]


class PolySyntaxError(ValueError):
    def __init__(self, msg: str, line: int = 1, col: int = 1):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


class ArgumentError(ValueError):
    """An argument lies outside its required (skew-)symmetric homogeneous space."""


@dataclass(frozen=True)
class VarSpec:
    index: int
    sym: bool
    degree: int = 0

    @property
    def name(self) -> str:
        return f"{'y' if self.sym else 'z'}{self.index}"


class StarPoly:
    """f = sum over words w of c_w * x_w(1) ... x_w(m)."""

    __slots__ = ("m", "l", "degrees", "field", "coeffs")

    def __init__(self, m: int, l: int, coeffs: Mapping, field: Field = QQ,
                 degrees: Sequence[int] | None = None):
        if m < 1:
            raise ValueError("a multilinear *-polynomial needs m >= 1 variables")
        if not 0 <= l <= m:
            raise ValueError(f"need 0 <= l <= m, got l={l}, m={m}")
        self.m = m
        self.l = l
        self.field = field
        self.degrees = tuple(degrees) if degrees is not None else (0,) * m
        if len(self.degrees) != m:
            raise ValueError(f"{len(self.degrees)} degrees for {m} variables")
        full = set(range(1, m + 1))
        clean = {}
        for word, c in coeffs.items():
            word = tuple(int(x) for x in word)
            if len(word) != m or set(word) != full:
                raise ValueError(f"word {word} is not a permutation of 1..{m}")
            c = field(c)
            if c != 0:
                clean[word] = field.add(clean.get(word, field.zero), c)
                if clean[word] == 0:
                    del clean[word]
        self.coeffs = clean

    @classmethod
    def monomial(cls, word: Sequence[int], l: int, coeff=1, field: Field = QQ,
                 degrees: Sequence[int] | None = None) -> "StarPoly":
        return cls(len(word), l, {tuple(word): coeff}, field, degrees)

    @property
    def vars(self) -> list:
        return [VarSpec(i, i <= self.l, self.degrees[i - 1]) for i in range(1, self.m + 1)]

    @property
    def eta(self) -> int:
        """Number of skew variables, m - l."""
        return self.m - self.l

    def is_zero(self) -> bool:
        return not self.coeffs

    def words(self):
        return sorted(self.coeffs.items())

    def coefficient_sum(self):
        F = self.field
        total = F.zero
        for c in self.coeffs.values():
            total = F.add(total, c)
        return total

    def _compatible(self, other: "StarPoly"):
        if (self.m, self.l, self.degrees, self.field) != (other.m, other.l, other.degrees, other.field):
            raise ValueError("polynomials live in different spaces P_{m,l}^G")

    def __add__(self, other: "StarPoly") -> "StarPoly":
        self._compatible(other)
        d = dict(self.coeffs)
        for w, c in other.coeffs.items():
            d[w] = self.field.add(d.get(w, self.field.zero), c)
        return StarPoly(self.m, self.l, d, self.field, self.degrees)

    def scale(self, c) -> "StarPoly":
        F = self.field
        c = F(c)
        return StarPoly(self.m, self.l, {w: F.mul(v, c) for w, v in self.coeffs.items()}, F, self.degrees)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, StarPoly):
            return NotImplemented
        return (self.m, self.l, self.degrees, self.field, self.coeffs) == (
            other.m, other.l, other.degrees, other.field, other.coeffs)

    def __hash__(self):
        return hash((self.m, self.l, self.degrees, self.field, frozenset(self.coeffs.items())))

    def with_field(self, field: Field) -> "StarPoly":
        """Coefficients mapped into another field (e.g. Q -> F_p)."""
        return StarPoly(self.m, self.l, {w: field(c) for w, c in self.coeffs.items()}, field, self.degrees)

    def with_degrees(self, degrees: Sequence[int]) -> "StarPoly":
        return StarPoly(self.m, self.l, self.coeffs, self.field, degrees)

    def to_text(self) -> str:
        names = {v.index: v.name for v in self.vars}
        if not self.coeffs:
            # keeps m and l recoverable on reparse
            return "0*" + " ".join(names[i] for i in range(1, self.m + 1))
        out = []
        for k, (word, c) in enumerate(self.words()):
            s = str(c)
            neg = s.startswith("-")
            if neg:
                s = s[1:]
            body = f"{s}*" + " ".join(names[i] for i in word)
            if k == 0:
                out.append(("-" if neg else "") + body)
            else:
                out.append(("- " if neg else "+ ") + body)
        return " ".join(out)

    __str__ = to_text

    def __repr__(self):
        return f"StarPoly(m={self.m}, l={self.l}, {self.to_text()!r}, {self.field.name})"

    def to_json(self) -> dict:
        return {"m": self.m, "l": self.l, "degrees": list(self.degrees), "field": self.field.name,
                "text": self.to_text()}


def all_words(m: int) -> list:
    return list(permutations(range(1, m + 1)))


# --------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>[yz]\d+)|(?P<op>[+\-*]))")


def _tokenize(text: str, line: int, col_offset: int = 0):
    pos = 0
    toks = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise PolySyntaxError(f"unexpected character {text[col - 1]!r}", line, col + col_offset)
        kind = m.lastgroup
        start = m.start(kind) + 1
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    return toks


def parse_star_poly(text: str, field: Field = QQ, degrees: Mapping | Sequence | None = None,
                    *, line: int = 1, col_offset: int = 0) -> StarPoly:
    """Parse a polynomial expression into canonical form.

    ``degrees`` maps variable index to group degree (or is a sequence indexed
    from 1); unspecified degrees are 0.
    """
    toks = _tokenize(text, line, col_offset)
    terms = []  # (coeff, [(letter, index, col)], col)
    k = 0

    def err(msg, col):
        raise PolySyntaxError(msg, line, col + col_offset)

    if not toks:
        err("empty polynomial", 1)
    if len(toks) == 1 and toks[0][0] == "num" and field(toks[0][1]) == 0:
        raise PolySyntaxError("the zero polynomial needs its variables; write e.g. '0*y1 z2'", line, 1)
    sign = 1
    first = True
    while k < len(toks):
        kind, val, col = toks[k]
        if kind == "op" and val in "+-":
            if not first and k + 1 < len(toks) and toks[k + 1][0] == "op" and toks[k + 1][1] in "+-":
                err("doubled sign", toks[k + 1][2])
            sign = -1 if val == "-" else 1
            k += 1
            if k == len(toks):
                err("dangling sign", col)
            kind, val, col = toks[k]
        elif not first:
            err("expected '+' or '-' between terms", col)
        first = False
        term_col = col
        coeff = field(sign)
        if kind == "num":
            coeff = field.mul(coeff, field.parse(val))
            k += 1
            if k < len(toks) and toks[k] == ("op", "*", toks[k][2]):
                k += 1
        variables = []
        while k < len(toks) and toks[k][0] in ("var", "op") and not (toks[k][0] == "op" and toks[k][1] in "+-"):
            kind, val, col = toks[k]
            if kind == "op":  # '*' between variables
                k += 1
                continue
            variables.append((val[0], int(val[1:]), col))
            k += 1
        if not variables:
            err("term has no variables", term_col)
        terms.append((coeff, variables, term_col))
        sign = 1

    # infer m, l from the variables used
    seen = {}
    for _, variables, _ in terms:
        for letter, idx, col in variables:
            if idx < 1:
                err("variable indices start at 1", col)
            if seen.setdefault(idx, letter) != letter:
                err(f"index {idx} used as both y and z", col)
    m = max(seen)
    if sorted(seen) != list(range(1, m + 1)):
        missing = sorted(set(range(1, m + 1)) - set(seen))
        err(f"variables {missing} never occur", 1)
    ys = [i for i, c in seen.items() if c == "y"]
    l = len(ys)
    if sorted(ys) != list(range(1, l + 1)):
        bad = min(i for i in range(1, m + 1) if (seen[i] == "y") != (i <= l))
        col = next(c for _, vs, _ in terms for (_, i, c) in vs if i == bad)
        err(f"symmetric variables must be y1..y{l} and skew variables z{l + 1}..z{m}", col)

    coeffs: dict = {}
    for coeff, variables, term_col in terms:
        word = tuple(i for _, i, _ in variables)
        if len(word) != m or set(word) != set(range(1, m + 1)):
            counts = {i: word.count(i) for i in range(1, m + 1)}
            rep = [i for i, c in counts.items() if c > 1]
            miss = [i for i, c in counts.items() if c == 0]
            what = f"repeats variable {rep[0]}" if rep else f"misses variable {miss[0]}"
            err(f"term is not multilinear: it {what}", term_col)
        coeffs[word] = field.add(coeffs.get(word, field.zero), coeff)

    if degrees is None:
        degs = (0,) * m
    elif isinstance(degrees, Mapping):
        degs = tuple(int(degrees.get(i, 0)) for i in range(1, m + 1))
    else:
        degs = tuple(degrees)
        if len(degs) != m:
            raise PolySyntaxError(f"{len(degs)} degrees given for {m} variables", line, 1)
    return StarPoly(m, l, coeffs, field, degs)


# --------------------------------------------------------------------------
# evaluation


def check_arguments(f: StarPoly, s: StructureSpec, args: Sequence[TriMatrix]) -> None:
    if len(args) != f.m:
        raise ArgumentError(f"expected {f.m} arguments, got {len(args)}")
    for v, a in zip(f.vars, args):
        if a.n != s.n or a.ring != s.field:
            raise ArgumentError(f"argument for {v.name} is not in UT_{s.n} over {s.field}")
        basis = space_basis(s, v.degree, v.sym)
        if not in_space(a, basis, s.field):
            part = "S" if v.sym else "K"
            raise ArgumentError(f"argument for {v.name} is not in {part}_{s.grade.normalize(v.degree)}")


def evaluate(f: StarPoly, s: StructureSpec, args: Sequence[TriMatrix], check: bool = True) -> TriMatrix:
    """f(a_1, ..., a_m) for arguments in the prescribed S_g / K_g spaces."""
    if check:
        check_arguments(f, s, args)
    ring = args[0].ring if args else s.field
    total = TriMatrix.zero(s.n, ring)
    for word, c in f.coeffs.items():
        prod = args[word[0] - 1]
        for i in word[1:]:
            prod = prod * args[i - 1]
        total = total + prod.scale(c)
    return total


def homogeneity(f: StarPoly, s: StructureSpec) -> int:
    """Common degree of every monomial of f, i.e. the component receiving its image."""
    return s.grade.normalize(sum(f.degrees))


# --------------------------------------------------------------------------
# problem files


@dataclass(frozen=True)
class Problem:
    structure: StructureSpec
    poly: StarPoly

    def to_text(self) -> str:
        s, f = self.structure, self.poly
        g = s.grade
        if g.modulus == 1:
            grading = "trivial"
        else:
            grading = f"z{g.modulus} degrees ({','.join(map(str, g.degrees))})"
        vars_line = ", ".join(f"{v.name}:{v.degree}" for v in f.vars)
        return "\n".join([
            f"algebra ut{s.n}",
            f"grading {grading}",
            f"involution {s.involution.value}",
            f"field {s.field.name}",
            f"vars {vars_line}",
            f"poly {f.to_text()}",
        ]) + "\n"


_KEYS = ("algebra", "grading", "involution", "field", "vars", "poly")


def parse_problem(text: str) -> Problem:
    """Parse the line-oriented problem format (see README)."""
    found: dict = {}
    poly_line = 0
    poly_parts: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        head, _, rest = line.strip().partition(" ")
        key = head.lower()
        if key not in _KEYS:
            if "poly" in found and line.strip()[0] in "+-":
                poly_parts.append((lineno, line, len(raw) - len(raw.lstrip())))
                continue
            raise PolySyntaxError(f"unknown directive {head!r}", lineno, 1)
        if key in found:
            raise PolySyntaxError(f"duplicate directive {key!r}", lineno, 1)
        found[key] = (lineno, rest.strip(), raw.index(head) + len(head) + 2)
        if key == "poly":
            poly_line = lineno

    for key in ("algebra", "poly"):
        if key not in found:
            raise PolySyntaxError(f"missing directive {key!r}", 1, 1)

    ln, val, _ = found["algebra"]
    m = re.fullmatch(r"[Uu][Tt](\d+)", val)
    if m is None:
        raise PolySyntaxError(f"expected 'ut<n>', got {val!r}", ln, 1)
    n = int(m.group(1))

    if "grading" in found:
        ln, val, _ = found["grading"]
        if val.lower() == "trivial":
            grade = GradeSpec.trivial(n)
        else:
            m = re.fullmatch(r"[Zz](\d+)\s+degrees\s*(\(.*\))", val)
            if m is None:
                raise PolySyntaxError("expected 'trivial' or 'z<q> degrees (d1,...,dn)'", ln, 1)
            try:
                degs = parse_degree_tuple(m.group(2))
            except ValueError:
                raise PolySyntaxError("degrees must be integers", ln, 1) from None
            if len(degs) != n:
                raise PolySyntaxError(f"{len(degs)} degrees for ut{n}", ln, 1)
            grade = GradeSpec(int(m.group(1)), degs)
    else:
        grade = GradeSpec.trivial(n)

    inv = Involution.REFLEXIVE
    if "involution" in found:
        ln, val, _ = found["involution"]
        try:
            inv = Involution(val.lower())
        except ValueError:
            raise PolySyntaxError(f"unknown involution {val!r}", ln, 1) from None

    field = QQ
    if "field" in found:
        ln, val, _ = found["field"]
        try:
            field = parse_field(val)
        except ValueError as e:
            raise PolySyntaxError(str(e), ln, 1) from None

    structure = StructureSpec(n, grade, inv, field)

    declared = None
    if "vars" in found:
        ln, val, _ = found["vars"]
        declared = {}
        for item in val.split(","):
            item = item.strip()
            m = re.fullmatch(r"([yz])(\d+)(?::\s*(-?\d+))?", item)
            if m is None:
                raise PolySyntaxError(f"bad variable declaration {item!r}", ln, 1)
            declared[int(m.group(2))] = (m.group(1), int(m.group(3) or 0))

    ln, val, col = found["poly"]
    text_expr = " ".join([val] + [p.strip() for _, p, _ in poly_parts])
    degrees = {i: d for i, (_, d) in declared.items()} if declared else None
    f = parse_star_poly(text_expr, field, degrees, line=poly_line, col_offset=col - 1)
    if declared is not None:
        for v in f.vars:
            if v.index not in declared:
                raise PolySyntaxError(f"{v.name} used but not declared in 'vars'", found["vars"][0], 1)
            if (declared[v.index][0] == "y") != v.sym:
                raise PolySyntaxError(f"{v.name} declared as {declared[v.index][0]}{v.index}", found["vars"][0], 1)
        if len(declared) != f.m:
            raise PolySyntaxError("'vars' declares variables the polynomial does not use", found["vars"][0], 1)
    return Problem(structure, f)
