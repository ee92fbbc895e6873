"""Exact scalars over Q and F_p, and the commutative polynomial ring F[W].

Variables of F[W] are doubly indexed: ``w_j^(i)`` is stored as the pair
``(i, j)`` where ``i`` is the variable instance and ``j`` the coordinate
slot.  A monomial is a tuple of ``((i, j), exponent)`` pairs sorted by
``(i, j)``; polynomials are sparse maps monomial -> nonzero coefficient.

Coefficients inside :class:`MPoly` are *raw* field values (``Fraction`` for
Q, ``int`` in ``0..p-1`` for F_p).  :class:`Scalar` wraps a raw value with
its field for the public API.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

__all__ = [
    "Field",
    "QQ",
    "GF",
    "Scalar",
    "field_ops",
    "Monomial",
    "monomial",
    "MPoly",
    "PolyRing",
    "MixedFieldError",
    "MissingAssignment",
    "parse_field",
]


class MixedFieldError(ValueError):
    """Operands live in different fields."""


class MissingAssignment(KeyError):
    """A polynomial variable has no value in the assignment."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    k = 3
    while k * k <= p:
        if p % k == 0:
            return False
        k += 2
    return True


_FRACTION_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


@dataclass(frozen=True)
class Field:
    """The ground field: rationals (``p == 0``) or F_p for an odd prime p."""

    p: int = 0

    def __post_init__(self):
        if self.p == 0:
            return
        if self.p == 2:
            raise ValueError("characteristic 2 is not supported")
        if not _is_prime(self.p):
            raise ValueError(f"{self.p} is not a prime")

    @property
    def is_prime_field(self) -> bool:
        return self.p != 0

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def name(self) -> str:
        return f"F{self.p}" if self.p else "Q"

    def __repr__(self):
        return f"Field({self.name})"

    def __str__(self):
        return self.name

    # raw element arithmetic -------------------------------------------------

    def __call__(self, x) -> Union[int, Fraction]:
        """Canonical raw element for ``x`` (int, Fraction, Scalar or string)."""
        if isinstance(x, Scalar):
            if x.field != self:
                raise MixedFieldError(f"{x.field} element used in {self}")
            return x.value
        if isinstance(x, str):
            return self.parse(x)
        if self.p == 0:
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator of {x} vanishes in {self}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        if isinstance(x, bool) or not isinstance(x, int):
            x = int(x)
        return x % self.p

    @property
    def zero(self):
        return Fraction(0) if self.p == 0 else 0

    @property
    def one(self):
        return Fraction(1) if self.p == 0 else 1

    def add(self, a, b):
        return a + b if self.p == 0 else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.p == 0 else (a - b) % self.p

    def mul(self, a, b):
        return a * b if self.p == 0 else (a * b) % self.p

    def neg(self, a):
        return -a if self.p == 0 else (-a) % self.p

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError(f"inverse of zero in {self}")
        return 1 / a if self.p == 0 else pow(a, -1, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return a == 0

    def elements(self):
        if self.p == 0:
            raise ValueError("Q is infinite")
        return range(self.p)

    def parse(self, text: str):
        m = _FRACTION_RE.match(text)
        if m is None:
            raise ValueError(f"not a rational literal: {text!r}")
        num = int(m.group(1))
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            raise ZeroDivisionError(f"zero denominator in {text!r}")
        return self(Fraction(num, den))

    def to_str(self, a) -> str:
        return str(a)

    def scalar(self, x) -> "Scalar":
        return Scalar(self(x), self)

    def lift(self, a) -> int:
        """Symmetric integer representative of an F_p element (for display)."""
        if self.p == 0:
            raise ValueError("lift is defined for prime fields only")
        return a - self.p if a > self.p // 2 else a


QQ = Field()


@lru_cache(maxsize=None)
def GF(p: int) -> Field:
    return Field(p)


def parse_field(text: str) -> Field:
    """``"Q"`` or ``"F<p>"`` (case-insensitive)."""
    t = text.strip()
    if t.upper() == "Q":
        return QQ
    m = re.fullmatch(r"[Ff](\d+)", t)
    if m is None:
        raise ValueError(f"unknown field {text!r}; expected Q or F<p>")
    return GF(int(m.group(1)))


@dataclass(frozen=True)
class Scalar:
    """A field element tagged with its field."""

    value: object
    field: Field

    def _other(self, other):
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise MixedFieldError(f"{self.field} vs {other.field}")
            return other.value
        return self.field(other)

    def __add__(self, other):
        return Scalar(self.field.add(self.value, self._other(other)), self.field)

    __radd__ = __add__

    def __sub__(self, other):
        return Scalar(self.field.sub(self.value, self._other(other)), self.field)

    def __rsub__(self, other):
        return Scalar(self.field.sub(self._other(other), self.value), self.field)

    def __mul__(self, other):
        return Scalar(self.field.mul(self.value, self._other(other)), self.field)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Scalar(self.field.div(self.value, self._other(other)), self.field)

    def __neg__(self):
        return Scalar(self.field.neg(self.value), self.field)

    def inverse(self) -> "Scalar":
        return Scalar(self.field.inv(self.value), self.field)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        try:
            return self.value == self.field(other)
        except (TypeError, ValueError, ZeroDivisionError):
            return NotImplemented

    def __hash__(self):
        return hash((self.value, self.field))

    def __bool__(self):
        return self.value != 0

    def __str__(self):
        return str(self.value)

    def __repr__(self):
        return f"Scalar({self.value}, {self.field.name})"


def field_ops(a: Scalar, b: Scalar | None, op: str) -> Scalar:
    """Single entry point for ``add``, ``sub``, ``mul``, ``div``, ``neg``, ``inv``.

    ``neg`` acts on ``a``; ``inv`` acts on ``b`` when given, else on ``a``.
    """
    if op == "neg":
        return -a
    if op == "inv":
        return (b if b is not None else a).inverse()
    if b is None:
        raise ValueError(f"{op} needs two operands")
    if a.field != b.field:
        raise MixedFieldError(f"{a.field} vs {b.field}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


# --------------------------------------------------------------------------
# monomials

Monomial = tuple  # ((i, j), exponent) pairs, sorted by (i, j)

_VAR_RE = re.compile(r"w(\d+)_(\d+)(?:\^(\d+))?")


def monomial(exponents: Mapping[tuple[int, int], int] | Iterable = ()) -> Monomial:
    """Canonical monomial from ``{(i, j): e}`` or an iterable of ``(i, j)``.

    Repeated pairs in an iterable accumulate exponents.
    """
    if isinstance(exponents, Mapping):
        items = exponents.items()
    else:
        acc: dict = {}
        for var in exponents:
            acc[var] = acc.get(var, 0) + 1
        items = acc.items()
    out = []
    for var, e in items:
        if e < 0:
            raise ValueError("negative exponent")
        if e:
            out.append(((int(var[0]), int(var[1])), int(e)))
    out.sort()
    return tuple(out)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for var, e in b:
        d[var] = d.get(var, 0) + e
    return tuple(sorted(d.items()))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _mono_key(m: Monomial):
    # degree-lexicographic on the sorted (i, j) pairs
    return (_mono_degree(m), m)


def mono_str(m: Monomial) -> str:
    if not m:
        return "1"
    parts = []
    for (i, j), e in m:
        parts.append(f"w{j}_{i}" + (f"^{e}" if e > 1 else ""))
    return "*".join(parts)


def mono_parse(text: str) -> Monomial:
    text = text.strip()
    if text == "1":
        return ()
    exps: dict = {}
    for part in text.split("*"):
        m = _VAR_RE.fullmatch(part.strip())
        if m is None:
            raise ValueError(f"bad monomial factor {part!r}")
        j, i = int(m.group(1)), int(m.group(2))
        e = int(m.group(3) or 1)
        exps[(i, j)] = exps.get((i, j), 0) + e
    return monomial(exps)


# --------------------------------------------------------------------------
# polynomials


class MPoly:
    """Sparse polynomial in the commuting variables w_j^(i) over a Field."""

    __slots__ = ("field", "terms", "_hash")

    def __init__(self, field: Field, terms: Mapping | None = None):
        self.field = field
        clean = {}
        if terms:
            for m, c in terms.items():
                c = field(c)
                if c != 0:
                    clean[m] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, field: Field, terms: dict) -> "MPoly":
        # trusted constructor: terms already canonical and nonzero
        obj = cls.__new__(cls)
        obj.field = field
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, field: Field) -> "MPoly":
        return cls._raw(field, {})

    @classmethod
    def const(cls, field: Field, c) -> "MPoly":
        c = field(c)
        return cls._raw(field, {(): c} if c != 0 else {})

    @classmethod
    def var(cls, field: Field, i: int, j: int) -> "MPoly":
        return cls._raw(field, {(((i, j), 1),): field.one})

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            if other.field != self.field:
                raise MixedFieldError(f"{self.field} vs {other.field}")
            return other
        return MPoly.const(self.field, other)

    def __add__(self, other):
        other = self._coerce(other)
        if not other.terms:
            return self
        F = self.field
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = F.add(out.get(m, F.zero), c)
            if v == 0:
                out.pop(m, None)
            else:
                out[m] = v
        return MPoly._raw(F, out)

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return MPoly._raw(F, {m: F.neg(c) for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "MPoly":
        F = self.field
        c = F(c)
        if c == 0:
            return MPoly.zero(F)
        return MPoly._raw(F, {m: F.mul(v, c) for m, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            return self.scale(other)
        other = self._coerce(other)
        F = self.field
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                v = F.add(out.get(m, F.zero), F.mul(c1, c2))
                if v == 0:
                    out.pop(m, None)
                else:
                    out[m] = v
        return MPoly._raw(F, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = MPoly.const(self.field, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self.field == other.field and self.terms == other.terms
        try:
            return self.terms == MPoly.const(self.field, other).terms
        except (TypeError, ValueError, ZeroDivisionError):
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- inspection ---------------------------------------------------------

    def coeff_of(self, m: Monomial) -> Scalar:
        return Scalar(self.terms.get(m, self.field.zero), self.field)

    def coeff(self, m: Monomial):
        """Raw coefficient (no Scalar wrapper)."""
        return self.terms.get(m, self.field.zero)

    def monomials(self) -> list:
        return sorted(self.terms, key=_mono_key)

    def variables(self) -> set:
        return {var for m in self.terms for var, _ in m}

    def degree(self) -> int:
        return max((_mono_degree(m) for m in self.terms), default=-1)

    def constant_term(self):
        return self.terms.get((), self.field.zero)

    def normalized(self) -> "MPoly":
        return MPoly(self.field, self.terms)

    # -- substitution -------------------------------------------------------

    def eval(self, assignment: Mapping) -> object:
        """Substitute every variable; returns a raw field value."""
        F = self.field
        vals = {k: F(v) for k, v in assignment.items()}
        total = F.zero
        for m, c in self.terms.items():
            t = c
            for var, e in m:
                if var not in vals:
                    raise MissingAssignment(f"no value for w{var[1]}_{var[0]}")
                t = F.mul(t, pow(vals[var], e) if F.p == 0 else pow(vals[var], e, F.p))
            total = F.add(total, t)
        return total

    def subs(self, assignment: Mapping) -> "MPoly":
        """Partial substitution of scalars; unassigned variables stay symbolic."""
        F = self.field
        vals = {k: F(v) for k, v in assignment.items()}
        out: dict = {}
        for m, c in self.terms.items():
            t = c
            rest = []
            for var, e in m:
                if var in vals:
                    t = F.mul(t, pow(vals[var], e) if F.p == 0 else pow(vals[var], e, F.p))
                else:
                    rest.append((var, e))
            if t == 0:
                continue
            key = tuple(rest)
            v = F.add(out.get(key, F.zero), t)
            if v == 0:
                out.pop(key, None)
            else:
                out[key] = v
        return MPoly._raw(F, out)

    # -- text ---------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in self.monomials():
            c = self.terms[m]
            ms = mono_str(m)
            if m == ():
                parts.append(str(c))
            elif c == 1:
                parts.append(ms)
            else:
                parts.append(f"{c}*{ms}")
        return " + ".join(parts)

    def __repr__(self):
        return f"MPoly({self.field.name}, {self})"


def eval_poly(f: MPoly, assignment: Mapping) -> Scalar:
    return Scalar(f.eval(assignment), f.field)


def coeff_of(f: MPoly, m: Monomial) -> Scalar:
    return f.coeff_of(m)


@dataclass(frozen=True)
class PolyRing:
    """F[W] as a coefficient ring for matrices."""

    field: Field

    @property
    def zero(self) -> MPoly:
        return MPoly.zero(self.field)

    @property
    def one(self) -> MPoly:
        return MPoly.const(self.field, 1)

    def __call__(self, x) -> MPoly:
        if isinstance(x, MPoly):
            if x.field != self.field:
                raise MixedFieldError(f"{x.field} vs {self.field}")
            return x
        return MPoly.const(self.field, x)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def is_zero(self, a) -> bool:
        return not a.terms

    def to_str(self, a) -> str:
        return str(a)

    @property
    def name(self) -> str:
        return f"{self.field.name}[W]"
