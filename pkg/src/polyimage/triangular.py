"""Upper triangular matrices UT_n with reflexive/symplectic involutions and
elementary cyclic gradings.

Gradings are additive: a :class:`GradeSpec` is a modulus ``q`` (``0`` for Z,
``1`` for the trivial group, ``q >= 2`` for Z_q) and a degree sequence
``(g_1, ..., g_n)`` with ``deg(e_ij) = g_j - g_i``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

from .coeffs import Field, MPoly, PolyRing, QQ, parse_field
from .linalg import coordinates, rref

__all__ = [
    "positions",
    "TriMatrix",
    "GradeSpec",
    "Involution",
    "StructureSpec",
    "ComponentBasis",
    "StructureReport",
    "InvalidStructure",
    "apply_involution",
    "component_bases",
    "check_structure",
    "require_valid",
    "space_basis",
    "decompose",
    "unit",
]


class InvalidStructure(ValueError):
    """A StructureSpec violates a validity clause."""


@lru_cache(maxsize=None)
def positions(n: int) -> tuple:
    """Upper triangular positions (i, j), 1-based, row-major."""
    return tuple((i, j) for i in range(1, n + 1) for j in range(i, n + 1))


@lru_cache(maxsize=None)
def _index(n: int) -> dict:
    return {pos: k for k, pos in enumerate(positions(n))}


class TriMatrix:
    """An n x n upper triangular matrix over a Field or a PolyRing.

    Entries are kept as a tuple in :func:`positions` order.  Entries below the
    diagonal do not exist; reading one returns the ring's zero.
    """

    __slots__ = ("n", "ring", "entries")

    def __init__(self, n: int, ring, entries: Sequence | None = None):
        if n < 1:
            raise ValueError("dimension must be >= 1")
        size = n * (n + 1) // 2
        if entries is None:
            entries = (ring.zero,) * size
        elif len(entries) != size:
            raise ValueError(f"expected {size} entries, got {len(entries)}")
        self.n = n
        self.ring = ring
        self.entries = tuple(ring(x) for x in entries)

    @classmethod
    def _raw(cls, n, ring, entries: tuple) -> "TriMatrix":
        obj = cls.__new__(cls)
        obj.n = n
        obj.ring = ring
        obj.entries = entries
        return obj

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n: int, ring=QQ) -> "TriMatrix":
        return cls(n, ring)

    @classmethod
    def identity(cls, n: int, ring=QQ) -> "TriMatrix":
        return cls.from_dict(n, {(i, i): 1 for i in range(1, n + 1)}, ring)

    @classmethod
    def from_dict(cls, n: int, values: dict, ring=QQ) -> "TriMatrix":
        idx = _index(n)
        entries = [ring.zero] * len(idx)
        for (i, j), v in values.items():
            if (i, j) not in idx:
                raise ValueError(f"({i},{j}) is not an upper triangular position of UT_{n}")
            entries[idx[(i, j)]] = ring(v)
        return cls._raw(n, ring, tuple(entries))

    @classmethod
    def from_vector(cls, n: int, vec: Sequence, ring=QQ) -> "TriMatrix":
        return cls(n, ring, vec)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ring=QQ) -> "TriMatrix":
        """From a full square list of rows; strictly lower entries must be zero."""
        n = len(rows)
        vals = {}
        for i in range(n):
            for j in range(n):
                x = rows[i][j]
                if j < i:
                    if x != 0:
                        raise ValueError("matrix is not upper triangular")
                    continue
                vals[(i + 1, j + 1)] = x
        return cls.from_dict(n, vals, ring)

    # -- access -------------------------------------------------------------

    def __getitem__(self, pos):
        i, j = pos
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise IndexError(pos)
        if j < i:
            return self.ring.zero
        return self.entries[_index(self.n)[(i, j)]]

    entry = __getitem__

    def vector(self) -> tuple:
        return self.entries

    def items(self):
        return zip(positions(self.n), self.entries)

    def nonzero(self) -> dict:
        return {pos: v for pos, v in self.items() if v != 0}

    def is_zero(self) -> bool:
        return all(self.ring.is_zero(x) for x in self.entries)

    def is_diagonal(self) -> bool:
        return all(i == j for (i, j), v in self.items() if v != 0)

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "TriMatrix"):
        if not isinstance(other, TriMatrix):
            raise TypeError(f"expected TriMatrix, got {type(other).__name__}")
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")
        if other.ring != self.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")

    def __add__(self, other):
        self._check(other)
        R = self.ring
        return TriMatrix._raw(self.n, R, tuple(R.add(a, b) for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other):
        self._check(other)
        R = self.ring
        return TriMatrix._raw(self.n, R, tuple(R.sub(a, b) for a, b in zip(self.entries, other.entries)))

    def __neg__(self):
        R = self.ring
        return TriMatrix._raw(self.n, R, tuple(R.neg(a) for a in self.entries))

    def scale(self, c) -> "TriMatrix":
        R = self.ring
        c = R(c)
        return TriMatrix._raw(self.n, R, tuple(R.mul(c, a) for a in self.entries))

    def __mul__(self, other):
        if not isinstance(other, TriMatrix):
            return self.scale(other)
        self._check(other)
        n, R = self.n, self.ring
        idx = _index(n)
        A, B = self.entries, other.entries
        out = []
        for i, k in positions(n):
            acc = R.zero
            for j in range(i, k + 1):
                a = A[idx[(i, j)]]
                if R.is_zero(a):
                    continue
                b = B[idx[(j, k)]]
                if R.is_zero(b):
                    continue
                acc = R.add(acc, R.mul(a, b))
            out.append(acc)
        return TriMatrix._raw(n, R, tuple(out))

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, TriMatrix):
            return NotImplemented
        return self.n == other.n and self.ring == other.ring and self.entries == other.entries

    def __hash__(self):
        return hash((self.n, self.entries))

    def map(self, fn, ring=None) -> "TriMatrix":
        """Apply ``fn`` entrywise, landing in ``ring`` (defaults to the same ring)."""
        ring = ring or self.ring
        return TriMatrix(self.n, ring, [fn(x) for x in self.entries])

    def substitute(self, assignment: dict, field: Field | None = None) -> "TriMatrix":
        """Evaluate an MPoly matrix at a full scalar assignment."""
        if not isinstance(self.ring, PolyRing):
            raise TypeError("substitute needs a polynomial matrix")
        F = field or self.ring.field
        return TriMatrix(self.n, F, [x.eval(assignment) for x in self.entries])

    # -- text / json --------------------------------------------------------

    def to_json(self) -> dict:
        R = self.ring
        return {
            "n": self.n,
            "entries": {f"{i},{j}": R.to_str(v) for (i, j), v in self.items() if not R.is_zero(v)},
        }

    @classmethod
    def from_json(cls, data, field: Field = QQ) -> "TriMatrix":
        if isinstance(data, str):
            data = json.loads(data)
        vals = {}
        for key, v in data.get("entries", {}).items():
            i, j = (int(t) for t in key.split(","))
            vals[(i, j)] = field.parse(v) if isinstance(v, str) else field(v)
        return cls.from_dict(int(data["n"]), vals, field)

    def terms_str(self) -> str:
        """Compact sum of matrix units, e.g. ``e11 + e33 - 2*e13``."""
        R = self.ring
        parts = []
        for (i, j), v in self.items():
            if R.is_zero(v):
                continue
            s = R.to_str(v)
            unit_name = f"e{i}{j}" if self.n < 10 else f"e{i},{j}"
            if isinstance(v, MPoly):
                parts.append(f"({s})*{unit_name}")
            elif s == "1":
                parts.append(unit_name)
            elif s == "-1":
                parts.append(f"-{unit_name}")
            else:
                parts.append(f"{s}*{unit_name}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"

    def pretty(self) -> str:
        """Bracketed triangular layout."""
        R = self.ring
        cells = [[R.to_str(self[(i, j)]) if j >= i else "" for j in range(1, self.n + 1)]
                 for i in range(1, self.n + 1)]
        width = max(len(c) for row in cells for c in row) or 1
        lines = []
        for row in cells:
            lines.append("[ " + " ".join(c.rjust(width) for c in row) + " ]")
        return "\n".join(lines)

    def __str__(self):
        return self.terms_str()

    def __repr__(self):
        return f"TriMatrix(n={self.n}, {self.terms_str()})"


def unit(n: int, i: int, j: int, ring=QQ) -> TriMatrix:
    """Matrix unit e_ij in UT_n."""
    return TriMatrix.from_dict(n, {(i, j): 1}, ring)


# --------------------------------------------------------------------------
# gradings and involutions


@dataclass(frozen=True)
class GradeSpec:
    """Elementary grading by Z (modulus 0), trivial (1) or Z_q (q >= 2)."""

    modulus: int
    degrees: tuple

    def __post_init__(self):
        if self.modulus < 0:
            raise ValueError("modulus must be >= 0")
        degs = tuple(int(g) for g in self.degrees)
        if self.modulus >= 1:
            degs = tuple(g % self.modulus for g in degs)
        object.__setattr__(self, "degrees", degs)

    @classmethod
    def trivial(cls, n: int) -> "GradeSpec":
        return cls(1, (0,) * n)

    @classmethod
    def cyclic(cls, q: int, degrees: Iterable[int]) -> "GradeSpec":
        return cls(q, tuple(degrees))

    @classmethod
    def canonical(cls, n: int) -> "GradeSpec":
        """Canonical Z_n grading, degrees (0, 1, ..., n-1)."""
        return cls(n, tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.degrees)

    @property
    def is_trivial(self) -> bool:
        return self.modulus == 1 or len(set(self.degrees)) == 1

    def normalize(self, g: int) -> int:
        return g % self.modulus if self.modulus >= 1 else int(g)

    def add(self, g: int, h: int) -> int:
        return self.normalize(g + h)

    def deg(self, i: int, j: int) -> int:
        return self.normalize(self.degrees[j - 1] - self.degrees[i - 1])

    def support(self) -> list:
        return sorted({self.deg(i, j) for i, j in positions(self.n)})

    def group_name(self) -> str:
        if self.modulus == 0:
            return "Z"
        if self.modulus == 1:
            return "trivial"
        return f"Z{self.modulus}"


class Involution(str, enum.Enum):
    REFLEXIVE = "reflexive"
    SYMPLECTIC = "symplectic"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class StructureSpec:
    """One graded involution (Gamma, *) on UT_n over a field."""

    n: int
    grade: GradeSpec
    involution: Involution = Involution.REFLEXIVE
    field: Field = QQ

    def __post_init__(self):
        object.__setattr__(self, "involution", Involution(self.involution))
        if self.grade.n != self.n:
            raise ValueError(f"degree sequence has length {self.grade.n}, expected {self.n}")

    def with_field(self, field: Field) -> "StructureSpec":
        return StructureSpec(self.n, self.grade, self.involution, field)

    @property
    def ring(self) -> Field:
        return self.field

    def describe(self) -> str:
        g = self.grade
        grading = "trivial" if g.modulus == 1 else f"{g.group_name()} degrees {g.degrees}"
        return f"UT_{self.n}, {grading}, {self.involution.value}, {self.field.name}"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "grading": {"modulus": self.grade.modulus, "degrees": list(self.grade.degrees)},
            "involution": self.involution.value,
            "field": self.field.name,
        }

    @classmethod
    def from_json(cls, data: dict) -> "StructureSpec":
        g = data["grading"]
        return cls(int(data["n"]), GradeSpec(int(g["modulus"]), tuple(g["degrees"])),
                   Involution(data["involution"]), parse_field(data["field"]))


def _partner(n: int, i: int, j: int) -> tuple[int, int]:
    return (n + 1 - j, n + 1 - i)


def _inv_sign(n: int, kind: Involution, i: int, j: int) -> int:
    """Sign picked up by entry (i, j) of A^* (D-conjugation for symplectic)."""
    if kind is Involution.SYMPLECTIC and i <= n // 2 < j:
        return -1
    return 1


def apply_involution(A: TriMatrix, s: "StructureSpec | Involution | str") -> TriMatrix:
    """A^r = J A^t J, or A^s = D A^r D^{-1} for the symplectic involution."""
    n = A.n
    kind = Involution(s.involution if isinstance(s, StructureSpec) else s)
    if isinstance(s, StructureSpec) and s.n != n:
        raise ValueError(f"matrix is {n}x{n}, structure is UT_{s.n}")
    if kind is Involution.SYMPLECTIC and n % 2:
        raise InvalidStructure("symplectic involution needs even n")
    R = A.ring
    out = []
    for i, j in positions(n):
        v = A[_partner(n, i, j)]
        out.append(R.neg(v) if _inv_sign(n, kind, i, j) < 0 else v)
    return TriMatrix._raw(n, R, tuple(out))


# --------------------------------------------------------------------------
# homogeneous components


@dataclass(frozen=True)
class ComponentBasis:
    degree: int
    A: tuple
    S: tuple
    K: tuple

    def space(self, sym: bool) -> tuple:
        return self.S if sym else self.K


def _orbits(n: int) -> list[tuple]:
    seen = set()
    out = []
    for i, j in sorted(positions(n), key=lambda p: (p[1] - p[0], p[0])):
        if (i, j) in seen:
            continue
        q = _partner(n, i, j)
        seen.update({(i, j), q})
        out.append(((i, j), q))
    return out


@lru_cache(maxsize=None)
def component_bases(s: StructureSpec) -> tuple:
    """Bases of A_g, S_g, K_g for every degree g in the support.

    Orbits of matrix units under the involution are visited diagonal first,
    then by superdiagonal; each orbit {e, e*} contributes e + e* to S and
    e - e* to K (a fixed unit goes to S or K alone according to its sign).
    """
    n, F, kind = s.n, s.field, s.involution
    if kind is Involution.SYMPLECTIC and n % 2:
        raise InvalidStructure("symplectic involution needs even n")
    comps: dict = {}
    for g in s.grade.support():
        comps[g] = ([], [], [])
    for (i, j) in positions(n):
        comps[s.grade.deg(i, j)][0].append(unit(n, i, j, F))
    for (a, b) in _orbits(n):
        g = s.grade.deg(*a)
        if s.grade.deg(*b) != g:
            raise InvalidStructure(
                f"involution moves e{a[0]}{a[1]} (degree {g}) to degree {s.grade.deg(*b)}: "
                "compatibility condition fails")
        ea = unit(n, *a, F)
        sign = _inv_sign(n, kind, *b)  # e_a^* = sign * e_b
        if a == b:
            (comps[g][1] if sign > 0 else comps[g][2]).append(ea)
            continue
        eb = unit(n, *b, F)
        if sign > 0:
            comps[g][1].append(ea + eb)
            comps[g][2].append(ea - eb)
        else:
            comps[g][1].append(ea - eb)
            comps[g][2].append(ea + eb)
    return tuple(ComponentBasis(g, tuple(A), tuple(S), tuple(K)) for g, (A, S, K) in sorted(comps.items()))


def space_basis(s: StructureSpec, degree: int, sym: bool) -> tuple:
    """Basis of S_g (``sym=True``) or K_g; empty when g is outside the support."""
    g = s.grade.normalize(degree)
    for comp in component_bases(s):
        if comp.degree == g:
            return comp.space(sym)
    return ()


def component_of(s: StructureSpec, degree: int) -> ComponentBasis | None:
    g = s.grade.normalize(degree)
    for comp in component_bases(s):
        if comp.degree == g:
            return comp
    return None


def in_space(A: TriMatrix, basis: Sequence[TriMatrix], field: Field) -> bool:
    if not basis:
        return A.is_zero()
    rows, piv = rref([b.vector() for b in basis], field)
    return coordinates(A.vector(), rows, piv, field) is not None


def decompose(A: TriMatrix, s: StructureSpec) -> dict:
    """``{g: (sym_part, skew_part)}`` with A = sum of all parts."""
    F = s.field
    half = F.inv(F(2))
    out = {}
    for comp in component_bases(s):
        units = {(i, j) for b in comp.A for (i, j) in b.nonzero()}
        part = TriMatrix.from_dict(s.n, {p: v for p, v in A.items() if p in units}, A.ring)
        ps = apply_involution(part, s)
        out[comp.degree] = ((part + ps).scale(half), (part - ps).scale(half))
    return out


# --------------------------------------------------------------------------
# validation


@dataclass
class StructureReport:
    ok: bool
    clauses: dict = dc_field(default_factory=dict)  # name -> (passed, detail)

    @property
    def failed(self) -> list:
        return [k for k, (passed, _) in self.clauses.items() if not passed]

    def to_json(self) -> dict:
        return {"ok": self.ok,
                "clauses": {k: {"passed": p, "detail": d} for k, (p, d) in self.clauses.items()}}


def check_structure(s: StructureSpec) -> StructureReport:
    """Check characteristic, compatibility, support generation, symplectic
    parity, and multiplicativity of the grading on matrix units."""
    n, g = s.n, s.grade
    clauses = {}

    p = s.field.characteristic
    clauses["characteristic"] = (p != 2, f"char {p}")

    sums = [g.normalize(g.degrees[i] + g.degrees[n - 1 - i]) for i in range(n)]
    compat = len(set(sums)) == 1
    clauses["compatibility"] = (
        compat,
        f"g_i + g_(n+1-i) = {sums[0]} for all i" if compat else f"g_i + g_(n+1-i) takes values {sums}",
    )

    support = g.support()
    if g.modulus == 1:
        generates = True
    elif g.modulus == 0:
        d = 0
        for x in support:
            d = gcd(d, abs(x))
        generates = d == 1
    else:
        d = g.modulus
        for x in support:
            d = gcd(d, x)
        generates = d == 1
    clauses["support_generates"] = (generates, f"support {support} in {g.group_name()}")

    parity = s.involution is Involution.REFLEXIVE or n % 2 == 0
    clauses["symplectic_parity"] = (parity, f"n = {n}")

    bad = []
    for i, j in positions(n):
        for k in range(j, n + 1):
            if g.deg(i, k) != g.add(g.deg(i, j), g.deg(j, k)):
                bad.append((i, j, k))
    clauses["multiplicativity"] = (not bad, "A_g A_h in A_(g+h) on all matrix-unit pairs" if not bad
                                   else f"violated at {bad[:3]}")

    return StructureReport(all(ok for ok, _ in clauses.values()), clauses)


def require_valid(s: StructureSpec) -> StructureSpec:
    rep = check_structure(s)
    if not rep.ok:
        name = rep.failed[0]
        raise InvalidStructure(f"{name}: {rep.clauses[name][1]}")
    return s


def parse_degree_tuple(text: str) -> tuple:
    inner = text.strip().strip("()")
    if not inner.strip():
        return ()
    return tuple(int(t) for t in inner.split(","))

