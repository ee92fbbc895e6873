"""Named subspaces of UT_n and matching of spans against them.

Each structure family carries its own ordered catalog; the first entry whose
resolved basis equals a given span wins.  Families are recognised from the
partition of matrix units into homogeneous components, not from the degree
encoding, so e.g. Z_2 degrees (0, 1) and (1, 0) on UT_2 are the same family.

For the UT_3 / Z_2 family (components {e11, e22, e33, e13} and {e12, e23})
the names follow the neutral-component reading: ``J`` is span{e13} (which is
J^2 of UT_3), ``S∩D`` uses D = span{e11, e33}, and ``K+J`` is K_0 + span{e13}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .coeffs import Field
from .linalg import rref
from .triangular import (
    StructureSpec,
    TriMatrix,
    component_bases,
    positions,
)

__all__ = [
    "SubspaceName",
    "ZERO",
    "SCALARS",
    "S",
    "K",
    "KPLUSJ",
    "SPLUSJ",
    "KCAPD",
    "SCAPD",
    "SCAPDPLUSJ",
    "K1SQ",
    "Jpow",
    "Sg",
    "Kg",
    "Ag",
    "Line",
    "Other",
    "structure_family",
    "catalog",
    "resolve",
    "match_catalog",
    "is_homogeneous",
]


@dataclass(frozen=True)
class SubspaceName:
    kind: str
    params: tuple = ()

    def __str__(self):
        k, p = self.kind, self.params
        if k == "Zero":
            return "{0}"
        if k == "Scalars":
            return "F"
        if k == "Jpow":
            return "J" if p[0] == 1 else f"J^{p[0]}"
        simple = {"S": "S", "K": "K", "KplusJ": "K+J", "SplusJ": "S+J", "KcapD": "K∩D",
                  "ScapD": "S∩D", "ScapDplusJ": "(S∩D)+J", "K1sq": "(K_0)^2"}
        if k in simple:
            return simple[k]
        if k in ("Sg", "Kg", "Ag"):
            return f"{k[0]}_{p[0]}"
        if k == "Line":
            return f"Line({p[0]},{p[1]})"
        if k == "Other":
            return f"Other(dim={len(p)})"
        return k

    def to_json(self) -> dict:
        return {"name": str(self), "kind": self.kind, "params": [str(x) if not isinstance(x, tuple) else
                                                                   [str(y) for y in x] for x in self.params]}

    def reduce(self, p: int) -> "SubspaceName":
        """Same name with rational Line parameters mapped into F_p."""
        if self.kind != "Line":
            return self
        from .coeffs import GF
        F = GF(p)
        return Line(F(self.params[0]), F(self.params[1]), F)


ZERO = SubspaceName("Zero")
SCALARS = SubspaceName("Scalars")
S = SubspaceName("S")
K = SubspaceName("K")
KPLUSJ = SubspaceName("KplusJ")
SPLUSJ = SubspaceName("SplusJ")
KCAPD = SubspaceName("KcapD")
SCAPD = SubspaceName("ScapD")
SCAPDPLUSJ = SubspaceName("ScapDplusJ")
K1SQ = SubspaceName("K1sq")


def Jpow(k: int) -> SubspaceName:
    return SubspaceName("Jpow", (k,))


def Sg(g: int) -> SubspaceName:
    return SubspaceName("Sg", (g,))


def Kg(g: int) -> SubspaceName:
    return SubspaceName("Kg", (g,))


def Ag(g: int) -> SubspaceName:
    return SubspaceName("Ag", (g,))


def Line(alpha, beta, field: Field | None = None) -> SubspaceName:
    """span{alpha*u1 + beta*u2} in a 2-dimensional component with matrix units u1 < u2.

    Stored projectively: the first nonzero parameter is scaled to 1.
    """
    if field is None or field.p == 0:
        a, b = Fraction(alpha), Fraction(beta)
        if a == 0 and b == 0:
            raise ValueError("Line needs a nonzero direction")
        if a != 0:
            a, b = Fraction(1), b / a
        else:
            b = Fraction(1)
        return SubspaceName("Line", (a, b))
    a, b = field(alpha), field(beta)
    if a == 0 and b == 0:
        raise ValueError("Line needs a nonzero direction")
    if a != 0:
        a, b = 1, field.div(b, a)
    else:
        b = 1
    return SubspaceName("Line", (a, b))


def Other(rows: Sequence[Sequence]) -> SubspaceName:
    return SubspaceName("Other", tuple(tuple(r) for r in rows))


# --------------------------------------------------------------------------


def _partition(s: StructureSpec) -> frozenset:
    blocks: dict = {}
    for pos in positions(s.n):
        blocks.setdefault(s.grade.deg(*pos), set()).add(pos)
    return frozenset(frozenset(b) for b in blocks.values())


_D3 = {(1, 1), (2, 2), (3, 3)}
_FAMILIES = {
    (2, frozenset({frozenset({(1, 1), (1, 2), (2, 2)})})): "ut2-trivial",
    (2, frozenset({frozenset({(1, 1), (2, 2)}), frozenset({(1, 2)})})): "ut2-gamma22",
    (3, frozenset({frozenset(_D3 | {(1, 3)}), frozenset({(1, 2), (2, 3)})})): "ut3-gamma23",
    (3, frozenset({frozenset(_D3), frozenset({(1, 2), (2, 3)}), frozenset({(1, 3)})})): "ut3-gamma33",
    (3, frozenset({frozenset(_D3 | {(1, 2), (1, 3), (2, 3)})})): "ut3-trivial",
}


def structure_family(s: StructureSpec) -> str:
    """One of ut2-trivial, ut2-gamma22, ut3-gamma23, ut3-gamma33, ut3-trivial, general."""
    return _FAMILIES.get((s.n, _partition(s)), "general")


def _vecs(mats) -> list:
    return [list(m.vector()) for m in mats]


def _units(s: StructureSpec, pos_list) -> list:
    F = s.field
    out = []
    for pos in pos_list:
        v = [F.zero] * len(positions(s.n))
        v[positions(s.n).index(pos)] = F.one
        out.append(v)
    return out


def _restrict(rows: list, allowed: set, n: int) -> list:
    # exact intersection for orbit bases: every basis vector is supported
    # either inside or outside the coordinate subspace
    pos = positions(n)
    return [r for r in rows if all(x == 0 or pos[k] in allowed for k, x in enumerate(r))]


def _products(a: list, b: list, s: StructureSpec) -> list:
    F = s.field
    out = []
    for x in a:
        for y in b:
            out.append(list((TriMatrix(s.n, F, x) * TriMatrix(s.n, F, y)).vector()))
    return out


def _degree_of(s: StructureSpec, pos) -> int:
    return s.grade.deg(*pos)


@lru_cache(maxsize=None)
def catalog(s: StructureSpec) -> tuple:
    """Ordered ``((name, rref_rows), ...)`` for the structure; duplicate spans keep the first name."""
    n, F = s.n, s.field
    comps = {c.degree: c for c in component_bases(s)}
    S_all = [v for c in comps.values() for v in _vecs(c.S)]
    K_all = [v for c in comps.values() for v in _vecs(c.K)]
    diag = {(i, i) for i in range(1, n + 1)}
    J = _units(s, [(i, j) for i, j in positions(n) if j > i])
    ident = [[F.one if i == j else F.zero for i, j in positions(n)]]

    def comp_entries(g):
        c = comps[g]
        return [(Sg(g), _vecs(c.S)), (Kg(g), _vecs(c.K)), (Ag(g), _vecs(c.A))]

    fam = structure_family(s)
    entries: list = [(ZERO, [])]
    if fam == "ut2-trivial":
        if s.involution.value == "reflexive":
            entries += [(Jpow(1), J), (SCALARS, ident), (K, K_all), (S, S_all), (KPLUSJ, K_all + J)]
        else:
            entries += [(Jpow(1), J), (S, S_all), (K, K_all), (KCAPD, _restrict(K_all, diag, n)),
                        (SPLUSJ, S_all + J)]
    elif fam == "ut2-gamma22":
        g0, g1 = _degree_of(s, (1, 1)), _degree_of(s, (1, 2))
        entries += comp_entries(g0) + comp_entries(g1)
    elif fam == "ut3-gamma23":
        g0, g1 = _degree_of(s, (1, 1)), _degree_of(s, (1, 2))
        S0, K0 = _vecs(comps[g0].S), _vecs(comps[g0].K)
        J13 = _units(s, [(1, 3)])
        sd = _restrict(S0, {(1, 1), (3, 3)}, n)
        entries += [(Jpow(2), J13), (SCAPD, sd), (SCAPDPLUSJ, sd + J13), (Sg(g0), S0), (Kg(g0), K0),
                    (KPLUSJ, K0 + J13), (Ag(g0), _vecs(comps[g0].A))]
        entries += comp_entries(g1)
    elif fam == "ut3-gamma33":
        g0, g1, g2 = (_degree_of(s, p) for p in ((1, 1), (1, 2), (1, 3)))
        K0 = _vecs(comps[g0].K)
        entries += [(Sg(g0), _vecs(comps[g0].S)), (Kg(g0), K0), (K1SQ, _products(K0, K0, s)),
                    (Ag(g0), _vecs(comps[g0].A))]
        entries += comp_entries(g1)
        entries += [(Ag(g2), _vecs(comps[g2].A)), (Sg(g2), _vecs(comps[g2].S)), (Kg(g2), _vecs(comps[g2].K))]

    # generic names, valid for every structure
    entries += [(SCALARS, ident)]
    entries += [(Jpow(k), _units(s, [(i, j) for i, j in positions(n) if j - i >= k])) for k in range(1, n)]
    sd_all = _restrict(S_all, diag, n)
    entries += [(S, S_all), (K, K_all), (KPLUSJ, K_all + J), (SPLUSJ, S_all + J),
                (KCAPD, _restrict(K_all, diag, n)), (SCAPD, sd_all), (SCAPDPLUSJ, sd_all + J)]
    for g in sorted(comps):
        entries += comp_entries(g)

    out = []
    seen_spans = set()
    seen_names = set()
    for name, rows in entries:
        red, _ = rref(rows, F)
        key = tuple(tuple(r) for r in red)
        if key in seen_spans or name in seen_names:
            continue
        seen_spans.add(key)
        seen_names.add(name)
        out.append((name, red))
    return tuple(out)


def _line_component(s: StructureSpec, rows: list):
    """(degree, (u1, u2)) when ``rows`` is 1-dimensional inside a 2-dim component."""
    if len(rows) != 1:
        return None
    pos = positions(s.n)
    support = {pos[k] for k, x in enumerate(rows[0]) if x != 0}
    for c in component_bases(s):
        units = sorted(p for b in c.A for p in b.nonzero())
        if len(units) == 2 and support <= set(units):
            return c.degree, tuple(units)
    return None


def resolve(name: SubspaceName, s: StructureSpec) -> list:
    """RREF basis rows (raw field values) of a named subspace in this structure."""
    F = s.field
    if name.kind == "Line":
        a, b = name.params
        for c in component_bases(s):
            units = sorted(p for m in c.A for p in m.nonzero())
            if len(units) == 2:
                pos = positions(s.n)
                v = [F.zero] * len(pos)
                v[pos.index(units[0])] = F(a)
                v[pos.index(units[1])] = F(b)
                return rref([v], F)[0]
        raise KeyError(f"{name} needs a 2-dimensional homogeneous component")
    if name.kind == "Other":
        return rref([list(r) for r in name.params], F)[0]
    for entry, rows in catalog(s):
        if entry == name:
            return [list(r) for r in rows]
    raise KeyError(f"{name} is not defined for {s.describe()}")


def match_catalog(basis, s: StructureSpec) -> SubspaceName:
    """Name of the span of ``basis`` (TriMatrix list or raw rows)."""
    F = s.field
    rows = [list(b.vector()) if isinstance(b, TriMatrix) else list(b) for b in basis]
    red, _ = rref(rows, F)
    for name, cat_rows in catalog(s):
        if red == [list(r) for r in cat_rows]:
            return name
    lc = _line_component(s, red)
    if lc is not None:
        _, (u1, u2) = lc
        pos = positions(s.n)
        return Line(red[0][pos.index(u1)], red[0][pos.index(u2)], F)
    return Other(red)


def is_homogeneous(basis, s: StructureSpec) -> bool:
    """V = sum over g of (V ∩ A_g): projections onto components stay in V."""
    F = s.field
    rows = [list(b.vector()) if isinstance(b, TriMatrix) else list(b) for b in basis]
    red, _ = rref(rows, F)
    pos = positions(s.n)
    projections = []
    for c in component_bases(s):
        units = {p for m in c.A for p in m.nonzero()}
        for r in red:
            projections.append([x if pos[k] in units else F.zero for k, x in enumerate(r)])
    both, _ = rref(red + projections, F)
    return len(both) == len(red)
