"""The two polynomials whose images are not subspaces.

* ``z1 z2`` on UT_n (n >= 3), trivial grading, reflexive involution: both
  e11 + enn and e1n are attained but their sum is not.
* ``y1 y2`` with degrees (0, 1) on UT_n (n >= 4) with the canonical Z_n
  grading and the reflexive involution: e12 and e23 are attained, e12 + e23 is
  not.

Each report records the preimages of the attained values (re-evaluated
through :func:`evaluate`) and an exhaustive refutation over F_p of the sum.
For odd n the first case also carries a field-free certificate: the forced
vanishing of the first-row entries of A and B, ending in (AB)_1n = 0.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field

from .coeffs import GF, MPoly, QQ
from .image import search_target
from .starpoly import StarPoly, evaluate
from .triangular import (
    GradeSpec,
    Involution,
    StructureSpec,
    TriMatrix,
    space_basis,
    unit,
)

__all__ = [
    "Witness",
    "CounterexampleReport",
    "ConstraintCertificate",
    "skew_product_structure",
    "zn_structure",
    "ut3_trivial_case",
    "ut3_constraint_check",
    "zn_entry_identities",
    "utn_zn_case",
]


@dataclass
class Witness:
    value: TriMatrix
    args: list
    verified: bool

    def to_json(self) -> dict:
        return {"value": self.value.to_json(), "args": [a.to_json() for a in self.args],
                "verified": self.verified}


@dataclass
class CounterexampleReport:
    name: str
    structure: StructureSpec
    poly: StarPoly
    witnesses: list
    target: TriMatrix
    target_attained: bool
    mode: str
    tuple_count: int
    fibers_checked: int
    identities: dict = dc_field(default_factory=dict)
    certificate: "ConstraintCertificate | None" = None
    notes: list = dc_field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        good = all(w.verified for w in self.witnesses) and not self.target_attained
        good = good and all(self.identities.values())
        if self.certificate is not None:
            good = good and self.certificate.contradiction
        return good

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "name": self.name,
            "structure": self.structure.to_json(),
            "polynomial": self.poly.to_json(),
            "witnesses": [w.to_json() for w in self.witnesses],
            "refuted_target": self.target.to_json(),
            "target_attained": self.target_attained,
            "refutation_mode": self.mode,
            "tuple_count": self.tuple_count,
            "fibers_checked": self.fibers_checked,
            "identities": dict(self.identities),
            "certificate": self.certificate.to_json() if self.certificate else None,
            "notes": list(self.notes),
            "ok": self.ok,
        }
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out

    def to_text(self) -> str:
        s = self.structure
        lines = [f"{self.name}: {s.describe()}, f = {self.poly.to_text()}"]
        for w in self.witnesses:
            args = ", ".join(a.terms_str() for a in w.args)
            lines.append(f"  attained {w.value.terms_str()} = f({args})  [{'ok' if w.verified else 'FAILED'}]")
        verdict = "ATTAINED" if self.target_attained else "not attained"
        lines.append(f"  {self.target.terms_str()}: {verdict} ({self.mode}, {self.tuple_count} tuples, "
                     f"{self.fibers_checked} fibers)")
        for k, v in self.identities.items():
            lines.append(f"  identity {k}: {'holds' if v else 'FAILS'}")
        if self.certificate is not None:
            lines.append("  certificate:")
            lines += ["    " + d for d in self.certificate.deductions]
        lines += ["  note: " + n for n in self.notes]
        lines.append(f"  {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines)


def skew_product_structure(n: int, p: int = 0) -> StructureSpec:
    return StructureSpec(n, GradeSpec.trivial(n), Involution.REFLEXIVE, GF(p) if p else QQ)


def zn_structure(n: int, p: int = 0) -> StructureSpec:
    return StructureSpec(n, GradeSpec.canonical(n), Involution.REFLEXIVE, GF(p) if p else QQ)


def _witness(f: StarPoly, s: StructureSpec, args: list, expected: TriMatrix) -> Witness:
    value = evaluate(f, s, args)
    return Witness(value, args, value == expected)


def _run(name, f, s, witness_args, target, budget, start, notes=()):
    F = s.field
    witnesses = []
    for args, expected in witness_args:
        witnesses.append(_witness(f, s, args, expected))
    search = search_target(f, s, target, budget=budget)
    return CounterexampleReport(
        name, s, f, witnesses, target, search.attained, f"exhaustive(F{F.p})", search.tuple_count,
        search.fibers_checked, notes=list(notes), seconds=time.perf_counter() - start)


def ut3_trivial_case(n: int, p: int, budget: int | None = None) -> CounterexampleReport:
    """z1 z2 on (UT_n, reflexive), trivial grading."""
    if n < 3:
        raise ValueError("needs n >= 3")
    start = time.perf_counter()
    s = skew_product_structure(n, p)
    F = s.field
    f = StarPoly(2, 0, {(1, 2): 1}, F)

    def e(i, j):
        return unit(n, i, j, F)

    d = e(1, 1) - e(n, n)
    pairs = [([d, d], e(1, 1) + e(n, n))]
    notes = []
    if n % 2:
        n0 = (n + 1) // 2
        pairs.append(([e(1, n0) - e(n0, n), -e(1, n0) + e(n0, n)], e(1, n)))
    else:
        n0 = n // 2
        pairs.append(([e(1, n0) - e(n0 + 1, n), -e(1, n0 + 1) + e(n0, n)], e(1, n)))
        notes.append("even n: the e1n witness is chosen here and accepted because it re-evaluates to e1n; "
                     "the refutation is computational for this n and p only")
    target = e(1, 1) + e(n, n) + e(1, n)
    rep = _run("skew product z1 z2", f, s, pairs, target, budget, start, notes)
    if n % 2:
        rep.certificate = ut3_constraint_check(n)
    rep.seconds = time.perf_counter() - start
    return rep


# --------------------------------------------------------------------------
# field-free certificate for odd n


@dataclass
class ConstraintCertificate:
    n: int
    deductions: list
    contradiction: bool

    def to_json(self) -> dict:
        return {"n": self.n, "deductions": list(self.deductions), "contradiction": self.contradiction}


def _skew_generic(n: int, which: int) -> TriMatrix:
    from .classifier import generic_matrix
    return generic_matrix(space_basis(skew_product_structure(n), 0, False), which, QQ)


def _zero_out(M: TriMatrix, entries: list) -> dict:
    """Assignment sending the variables behind the given entries of M to 0."""
    sub = {}
    for pos in entries:
        for var in M[pos].variables():
            sub[var] = 0
    return sub


def _subs(x: MPoly, assignment: dict) -> MPoly:
    return x.subs(assignment) if assignment else x


def ut3_constraint_check(n: int) -> ConstraintCertificate:
    """Symbolic cascade showing AB = e11 + enn + e1n has no skew solution (n odd).

    A and B are generic skew-symmetric matrices.  Only two facts about the
    target are used: (AB)_11 = a11 b11 is nonzero and (AB)_jj = a_jj b_jj
    vanishes for 1 < j < n.  For j = 2, ..., n0 the entries (1, j) and
    (n+1-j, n) of AB, once earlier deductions are substituted, form a linear
    system in (a_1j, b_1j) whose determinant is a_jj b_jj - a11 b11 = -a11 b11,
    so a_1j = b_1j = 0.  Substituting everything into (AB)_1n gives 0.
    """
    if n < 3 or n % 2 == 0:
        raise ValueError("the certificate is for odd n >= 3")
    A, B = _skew_generic(n, 1), _skew_generic(n, 2)
    AB = A * B
    n0 = (n + 1) // 2
    a11, b11 = A[(1, 1)], B[(1, 1)]
    deductions = [
        f"(AB)_11 = {AB[(1, 1)]} must equal 1, so a11*b11 != 0",
        f"(AB)_jj = a_jj*b_jj must vanish for 1 < j < {n}",
    ]
    ok = AB[(1, 1)] == a11 * b11
    assignment: dict = {}
    for j in range(2, n0 + 1):
        a1j, b1j, ajj, bjj = A[(1, j)], B[(1, j)], A[(j, j)], B[(j, j)]
        e1 = _subs(AB[(1, j)], assignment)
        e2 = _subs(AB[(n + 1 - j, n)], assignment)
        lhs1 = a11 * b1j + a1j * bjj
        lhs2 = a1j * b11 + ajj * b1j
        step_ok = e1 == lhs1 and (e2 == lhs2 or e2 == -lhs2)
        step_ok = step_ok and AB[(j, j)] == ajj * bjj
        det = ajj * bjj - a11 * b11
        deductions.append(
            f"j={j}: (AB)_1{j} = {e1} = 0 and (AB)_{n + 1 - j},{n} = {e2} = 0; "
            f"determinant in (a_1{j}, b_1{j}) is {det}, which is -a11*b11 != 0 since a_{j}{j}*b_{j}{j} = 0, "
            f"so a_1{j} = b_1{j} = 0"
            + ("" if step_ok else " [MISMATCH]"))
        ok = ok and step_ok
        assignment.update(_zero_out(A, [(1, j)]))
        assignment.update(_zero_out(B, [(1, j)]))
    corner = _subs(AB[(1, n)], assignment)
    deductions.append(f"(AB)_1{n} reduces to {corner or '0'}, but the target requires 1")
    return ConstraintCertificate(n, deductions, ok and corner.is_zero())


# --------------------------------------------------------------------------
# canonical Z_n grading


def zn_entry_identities(n: int) -> dict:
    """(AB)_12 = a11 b12, (AB)_23 = a22 b23, (AB)_{n-1,n} = a22 b12 for A in S_0, B in S_1."""
    from .classifier import generic_matrix
    s = zn_structure(n)
    A = generic_matrix(space_basis(s, 0, True), 1, QQ)
    B = generic_matrix(space_basis(s, 1, True), 2, QQ)
    AB = A * B
    return {
        "(AB)_12 = a11*b12": AB[(1, 2)] == A[(1, 1)] * B[(1, 2)],
        "(AB)_23 = a22*b23": AB[(2, 3)] == A[(2, 2)] * B[(2, 3)],
        f"(AB)_{n - 1},{n} = a22*b12": AB[(n - 1, n)] == A[(2, 2)] * B[(1, 2)],
    }


def utn_zn_case(n: int, p: int, budget: int | None = None) -> CounterexampleReport:
    """y1 y2 with degrees (0, 1) on UT_n, canonical Z_n grading, reflexive involution."""
    if n < 4:
        raise ValueError("needs n >= 4")
    start = time.perf_counter()
    s = zn_structure(n, p)
    F = s.field
    f = StarPoly(2, 2, {(1, 2): 1}, F, (0, 1))

    def e(i, j):
        return unit(n, i, j, F)

    pairs = [([e(1, 1) + e(n, n), e(1, 2) + e(n - 1, n)], e(1, 2))]
    if n == 4:
        pairs.append(([e(2, 2) + e(3, 3), e(2, 3)], e(2, 3)))
    else:
        pairs.append(([e(2, 2) + e(n - 1, n - 1), e(2, 3) + e(n - 2, n - 1)], e(2, 3)))
    target = e(1, 2) + e(2, 3)
    notes = [] if n % 2 == 0 else ["odd n: same witnesses, spaces taken from the component bases"]
    rep = _run("Z_n-graded product y1 y2", f, s, pairs, target, budget, start, notes)
    rep.identities = zn_entry_identities(n)
    rep.seconds = time.perf_counter() - start
    return rep
