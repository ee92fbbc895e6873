"""Symbolic classification of images on UT_2 and on UT_3 with a non-trivial grading.

Every argument is replaced by a fully generic element of its space,
``x_i = sum_k w_k^(i) b_k`` over the basis ``b_1, b_2, ...`` of S_g or K_g.
With the bases from :func:`component_bases` this reproduces the familiar
evaluations on UT_2 (y = w1*I + w2*e12 and z = w1*(e11 - e22) for the
reflexive involution; z = w1*(e11 - e22) + w2*e12 for the symplectic one) and
on the neutral component of UT_3 graded by Z_2
(y = w1*(e11 + e33) + w2*e22 + w3*e13, z = w1*(e11 - e33)).

Because the generic value is multilinear in the argument coordinates, its
coefficient vectors span the same space as the image.  The neutral schemes
then read the reduced coefficients (alpha, lambda_i / mu_i) off the generic
value and branch on them; the remaining supported cases land in a homogeneous
component of dimension at most 2, where a multilinear image is always a
subspace, so the image equals the symbolic span.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .catalog import (
    K,
    K1SQ,
    KCAPD,
    KPLUSJ,
    S,
    SCALARS,
    SCAPD,
    SCAPDPLUSJ,
    SPLUSJ,
    ZERO,
    Jpow,
    Kg,
    Sg,
    SubspaceName,
    is_homogeneous,
    match_catalog,
    resolve,
    structure_family,
)
from .coeffs import GF, MPoly, PolyRing, QQ, Field, monomial
from .image import BudgetExceeded, analyze, enumerate_image
from .linalg import rref
from .starpoly import StarPoly, evaluate
from .triangular import (
    GradeSpec,
    Involution,
    StructureSpec,
    TriMatrix,
    positions,
    space_basis,
)

__all__ = [
    "UnsupportedStructure",
    "OracleDisagreement",
    "GenericEvaluation",
    "ReducedCoefficients",
    "generic_matrix",
    "generic_eval",
    "symbolic_span",
    "scheme_of",
    "verify_row_lemma",
    "verify_zproduct_lemma",
    "verify_corner_lemma",
    "verify_identity",
    "extract_coefficients",
    "classify_symbolic",
    "classify",
    "lemma_suite",
    "identity_certificates",
    "UT2_REFLEXIVE",
    "UT2_SYMPLECTIC",
    "UT2_GAMMA22_REFLEXIVE",
    "UT2_GAMMA22_SYMPLECTIC",
    "UT3_GAMMA23",
    "UT3_GAMMA33",
]

UNSUPPORTED_MESSAGE = "no classification theorem; use counterexample/enumerate"


class UnsupportedStructure(ValueError):
    def __init__(self, s: StructureSpec, detail: str = ""):
        msg = f"{s.describe()}: {UNSUPPORTED_MESSAGE}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class OracleDisagreement(RuntimeError):
    """The symbolic classification and an exhaustive enumeration disagree."""


UT2_REFLEXIVE = StructureSpec(2, GradeSpec.trivial(2), Involution.REFLEXIVE)
UT2_SYMPLECTIC = StructureSpec(2, GradeSpec.trivial(2), Involution.SYMPLECTIC)
UT2_GAMMA22_REFLEXIVE = StructureSpec(2, GradeSpec(2, (0, 1)), Involution.REFLEXIVE)
UT2_GAMMA22_SYMPLECTIC = StructureSpec(2, GradeSpec(2, (0, 1)), Involution.SYMPLECTIC)
UT3_GAMMA23 = StructureSpec(3, GradeSpec(2, (0, 1, 0)), Involution.REFLEXIVE)
UT3_GAMMA33 = StructureSpec(3, GradeSpec(3, (0, 1, 2)), Involution.REFLEXIVE)


# --------------------------------------------------------------------------
# generic evaluation


def generic_matrix(basis: Sequence[TriMatrix], i: int, field: Field) -> TriMatrix:
    """sum_k w_k^(i) * basis[k-1] as a matrix over F[W]."""
    R = PolyRing(field)
    n = basis[0].n if basis else 1
    entries = []
    for pos in positions(n):
        acc = MPoly.zero(field)
        for k, b in enumerate(basis, start=1):
            c = b[pos]
            if c != 0:
                acc = acc + MPoly.var(field, i, k).scale(c)
        entries.append(acc)
    return TriMatrix(n, R, entries)


def scheme_of(f: StarPoly, s: StructureSpec) -> str:
    fam = structure_family(s)
    neutral = all(s.grade.normalize(d) == 0 for d in f.degrees)
    if fam == "ut2-trivial":
        return "Ut2Reflexive" if s.involution is Involution.REFLEXIVE else "Ut2Symplectic"
    if fam == "ut3-gamma23" and neutral:
        return "Ut3NeutralZ2"
    if fam == "ut3-gamma33" and neutral:
        return "Ut3NeutralZ3"
    if fam in ("ut2-gamma22", "ut3-gamma23", "ut3-gamma33"):
        return "Direct"
    return "Generic"


@dataclass
class GenericEvaluation:
    scheme: str
    matrices: list  # per-variable TriMatrix over F[W]
    value: TriMatrix


def generic_eval(f: StarPoly, s: StructureSpec) -> GenericEvaluation:
    """f evaluated at fully generic (skew-)symmetric homogeneous matrices."""
    F = s.field
    if f.field != F:
        f = f.with_field(F)
    mats = []
    for v in f.vars:
        basis = space_basis(s, v.degree, v.sym)
        if basis:
            mats.append(generic_matrix(basis, v.index, F))
        else:
            mats.append(TriMatrix.zero(s.n, PolyRing(F)))
    value = evaluate(f, s, mats, check=False) if mats else TriMatrix.zero(s.n, PolyRing(F))
    if value.ring != PolyRing(F):
        value = TriMatrix.zero(s.n, PolyRing(F))
    return GenericEvaluation(scheme_of(f, s), mats, value)


def symbolic_span(value: TriMatrix, field: Field) -> list:
    """RREF rows spanning the coefficient vectors of every monomial of a generic value."""
    pos = positions(value.n)
    by_mono: dict = {}
    for k, entry in enumerate(value.entries):
        for mono, c in entry.terms.items():
            by_mono.setdefault(mono, [field.zero] * len(pos))[k] = c
    return rref(list(by_mono.values()), field)[0]


# --------------------------------------------------------------------------
# entry-formula lemmas


def _prod(mats):
    out = mats[0]
    for M in mats[1:]:
        out = out * M
    return out


def _w(i: int, j: int, F: Field = QQ) -> MPoly:
    return MPoly.var(F, i, j)


def _hat_product(m: int, skip: int, F: Field = QQ) -> MPoly:
    out = MPoly.const(F, 1)
    for j in range(1, m + 1):
        if j != skip:
            out = out * _w(j, 1, F)
    return out


def verify_row_lemma(l: int) -> bool:
    """(1,2) entry of y_1...y_l with y_i = w1^(i) I + w2^(i) e12."""
    F = QQ
    ys = [generic_matrix(space_basis(UT2_REFLEXIVE, 0, True), i, F) for i in range(1, l + 1)]
    expected = MPoly.zero(F)
    for i in range(1, l + 1):
        expected = expected + _hat_product(l, i) * _w(i, 2)
    return _prod(ys)[(1, 2)] == expected


def verify_zproduct_lemma(m: int) -> bool:
    """Full matrix z_1...z_m with z_i = w1^(i)(e11 - e22) + w2^(i) e12."""
    F = QQ
    R = PolyRing(F)
    zs = [generic_matrix(space_basis(UT2_SYMPLECTIC, 0, False), i, F) for i in range(1, m + 1)]
    top = _hat_product(m, 0)
    corner = MPoly.zero(F)
    for i in range(1, m + 1):
        corner = corner + (_hat_product(m, i) * _w(i, 2)).scale((-1) ** (i + m))
    expected = TriMatrix.from_dict(2, {(1, 1): top, (2, 2): top.scale((-1) ** m), (1, 2): corner}, R)
    return _prod(zs) == expected


def verify_corner_lemma(m: int) -> bool:
    """(1,3) entry of y_1...y_m with y_i = w1^(i)(e11 + e33) + w2^(i) e22 + w3^(i) e13."""
    F = QQ
    ys = [generic_matrix(space_basis(UT3_GAMMA23, 0, True), i, F) for i in range(1, m + 1)]
    expected = MPoly.zero(F)
    for i in range(1, m + 1):
        expected = expected + _hat_product(m, i) * _w(i, 3)
    return _prod(ys)[(1, 3)] == expected


def verify_identity(f: StarPoly, s: StructureSpec) -> bool:
    """True iff f vanishes on generic arguments, i.e. f is a graded *-identity."""
    return all(e.is_zero() for e in generic_eval(f, s).value.entries)


def lemma_suite(max_size: int = 8) -> dict:
    """``{lemma: {size: passed}}`` for the three entry-formula lemmas."""
    return {
        "row": {k: verify_row_lemma(k) for k in range(1, max_size + 1)},
        "zproduct": {k: verify_zproduct_lemma(k) for k in range(1, max_size + 1)},
        "corner": {k: verify_corner_lemma(k) for k in range(1, max_size + 1)},
    }


def _poly(text: str, s: StructureSpec, degrees=None) -> StarPoly:
    from .starpoly import parse_star_poly
    return parse_star_poly(text, s.field, degrees)


def identity_certificates() -> list:
    """``(label, structure, polynomial, expected)`` for the identity statements."""
    g23, g22 = UT3_GAMMA23, UT2_GAMMA22_REFLEXIVE
    return [
        ("UT2 reflexive: [z1, z2]", UT2_REFLEXIVE, _poly("z1 z2 - z2 z1", UT2_REFLEXIVE), True),
        ("UT2 reflexive: [y1, z2] is not an identity", UT2_REFLEXIVE, _poly("y1 z2 - z2 y1", UT2_REFLEXIVE),
         False),
        ("UT2 symplectic: [y1, z2]", UT2_SYMPLECTIC, _poly("y1 z2 - z2 y1", UT2_SYMPLECTIC), True),
        ("UT2 Z2-graded: [z1, z2] on neutral skew elements", g22, _poly("z1 z2 - z2 z1", g22), True),
        ("UT2 Z2-graded: [y1, x] with x neutral skew", g22, _poly("y1 z2 - z2 y1", g22), True),
        ("UT2 Z2-graded: [y1, x] with x of degree 1", g22, _poly("y1 y2 - y2 y1", g22, [0, 1]), True),
        ("UT3 Z2-graded neutral: [y1, y2]", g23, _poly("y1 y2 - y2 y1", g23), True),
        ("UT3 Z2-graded neutral: [z1, z2]", g23, _poly("z1 z2 - z2 z1", g23), True),
        ("UT3 Z2-graded neutral: [y1, z3][y2, z4]", g23,
         _poly("y1 z3 y2 z4 - y1 z3 z4 y2 - z3 y1 y2 z4 + z3 y1 z4 y2", g23), True),
        ("UT3 Z2-graded neutral: z2 y1 z3 - z3 y1 z2", g23, _poly("z2 y1 z3 - z3 y1 z2", g23), True),
        ("UT3 Z2-graded neutral: [y1, z2] is not an identity", g23, _poly("y1 z2 - z2 y1", g23), False),
    ]


# --------------------------------------------------------------------------
# reduced coefficients


@dataclass
class ReducedCoefficients:
    scheme: str
    eta: int
    m: int
    alpha: object  # raw field value
    lam: dict  # variable index -> raw field value (lambda_i or mu_i)
    field: Field

    def any_lambda(self) -> bool:
        return any(v != 0 for v in self.lam.values())

    def rebuild(self) -> TriMatrix:
        """The generic value reconstructed from (alpha, lambda/mu, eta)."""
        F = self.field
        R = PolyRing(F)
        m, eta = self.m, self.eta
        sign = (-1) ** eta
        full = _hat_product(m, 0, F)
        entries: dict = {}
        if self.scheme in ("Ut2Reflexive", "Ut2Symplectic"):
            entries[(1, 1)] = full.scale(self.alpha)
            entries[(2, 2)] = full.scale(F.mul(self.alpha, F(sign)))
            corner = MPoly.zero(F)
            for i, c in self.lam.items():
                corner = corner + (_hat_product(m, i, F) * _w(i, 2, F)).scale(c)
            entries[(1, 2)] = corner
            return TriMatrix.from_dict(2, entries, R)
        entries[(1, 1)] = full.scale(self.alpha)
        entries[(3, 3)] = full.scale(F.mul(self.alpha, F(sign)))
        if eta == 0:
            w2 = MPoly.const(F, 1)
            for j in range(1, m + 1):
                w2 = w2 * _w(j, 2, F)
            entries[(2, 2)] = w2.scale(self.alpha)
        if self.scheme == "Ut3NeutralZ2":
            corner = MPoly.zero(F)
            for i, c in self.lam.items():
                corner = corner + (_hat_product(m, i, F) * _w(i, 3, F)).scale(c)
            entries[(1, 3)] = corner
        return TriMatrix.from_dict(3, entries, R)

    def to_json(self) -> dict:
        F = self.field
        key = "mu" if self.scheme == "Ut2Symplectic" else "lambda"
        return {
            "scheme": self.scheme,
            "eta": self.eta,
            "alpha": F.to_str(self.alpha),
            key: {str(i): F.to_str(c) for i, c in sorted(self.lam.items())},
        }


_NEUTRAL_SCHEMES = ("Ut2Reflexive", "Ut2Symplectic", "Ut3NeutralZ2", "Ut3NeutralZ3")


def extract_coefficients(f: StarPoly, s: StructureSpec, ge: GenericEvaluation | None = None
                         ) -> ReducedCoefficients:
    """alpha and lambda_i / mu_i read from the generic evaluation's monomial coefficients."""
    ge = ge or generic_eval(f, s)
    if ge.scheme not in _NEUTRAL_SCHEMES:
        raise UnsupportedStructure(s, f"no reduced coefficients for scheme {ge.scheme}")
    F = s.field
    m = f.m
    V = ge.value
    diag_mono = monomial([(i, 1) for i in range(1, m + 1)])
    alpha = V[(1, 1)].coeff(diag_mono)
    lam = {}
    if ge.scheme in ("Ut2Reflexive", "Ut3NeutralZ2"):
        idxs, slot = range(1, f.l + 1), (2 if ge.scheme == "Ut2Reflexive" else 3)
    elif ge.scheme == "Ut2Symplectic":
        idxs, slot = range(f.l + 1, m + 1), 2
    else:
        idxs, slot = (), 0
    corner = (1, 2) if s.n == 2 else (1, 3)
    for i in idxs:
        mono = monomial([(j, 1) for j in range(1, m + 1) if j != i] + [(i, slot)])
        lam[i] = V[corner].coeff(mono)
    return ReducedCoefficients(ge.scheme, f.eta, m, alpha, lam, F)


def _branch(rc: ReducedCoefficients) -> SubspaceName:
    a, has_lam, even = rc.alpha != 0, rc.any_lambda(), rc.eta % 2 == 0
    if rc.scheme == "Ut2Reflexive":
        if not a:
            return Jpow(1) if has_lam else ZERO
        if not has_lam:
            return SCALARS if even else K
        return S if even else KPLUSJ
    if rc.scheme == "Ut2Symplectic":
        if not a:
            return Jpow(1) if has_lam else ZERO
        if not has_lam:
            return S if even else KCAPD
        return SPLUSJ if even else K
    if rc.scheme == "Ut3NeutralZ2":
        if rc.eta == 0:
            return Sg(0) if a else ZERO
        if not a:
            return Jpow(2) if has_lam else ZERO
        if not has_lam:
            return SCAPD if even else Kg(0)
        return SCAPDPLUSJ if even else KPLUSJ
    if rc.scheme == "Ut3NeutralZ3":
        if not a:
            return ZERO
        if rc.eta == 0:
            return Sg(0)
        return Kg(0) if not even else K1SQ
    raise ValueError(rc.scheme)


@dataclass
class SymbolicResult:
    name: SubspaceName
    span: list  # RREF rows
    scheme: str
    coefficients: ReducedCoefficients | None
    structure: StructureSpec
    poly: StarPoly

    def coefficients_json(self):
        return self.coefficients.to_json() if self.coefficients else None


def classify_symbolic(f: StarPoly, s: StructureSpec) -> SymbolicResult:
    """Catalog name of f(UT_n) from the generic evaluation alone."""
    fam = structure_family(s)
    if fam in ("general", "ut3-trivial"):
        raise UnsupportedStructure(s)
    if f.field != s.field:
        f = f.with_field(s.field)
    ge = generic_eval(f, s)
    span = symbolic_span(ge.value, s.field)
    if ge.scheme in _NEUTRAL_SCHEMES:
        rc = extract_coefficients(f, s, ge)
        if rc.rebuild() != ge.value:
            raise OracleDisagreement(f"reduced coefficients do not rebuild the generic value of {f}")
        name = _branch(rc)
        if resolve(name, s) != span:
            raise OracleDisagreement(f"branch gives {name} but the generic span is {span}")
        return SymbolicResult(name, span, ge.scheme, rc, s, f)
    # at most 2-dimensional target: the image is the whole span
    if len(span) > 2:
        raise OracleDisagreement(f"generic span of {f} has dimension {len(span)} > 2")
    return SymbolicResult(match_catalog(span, s), span, ge.scheme, None, s, f)


# --------------------------------------------------------------------------
# classification with finite-field cross-check


def _reduce_rows(rows: list, p: int):
    F = GF(p)
    try:
        return rref([[F(x) for x in r] for r in rows], F)[0]
    except ZeroDivisionError:
        return None


@dataclass
class CrossCheck:
    p: int
    symbolic: str | None
    enumerated: str | None
    closure: object
    agrees_with_rational: bool | None
    char_explained: bool
    tuple_count: int = 0
    note: str = ""

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "symbolic": self.symbolic,
            "enumerated": self.enumerated,
            "is_vector_space": self.closure,
            "agrees_with_rational": self.agrees_with_rational,
            "char_explained": self.char_explained,
            "tuple_count": self.tuple_count,
            "note": self.note,
        }


def cross_check(res: SymbolicResult, p: int, budget: int | None = None) -> CrossCheck:
    """Classify over F_p symbolically and by exhaustive enumeration; raise on oracle mismatch."""
    f, s = res.poly, res.structure
    F = GF(p)
    try:
        fp = f.with_field(F)
    except ZeroDivisionError:
        return CrossCheck(p, None, None, None, None, False, note=f"a coefficient denominator vanishes mod {p}")
    sp = s.with_field(F)
    sym = classify_symbolic(fp, sp)
    try:
        img = enumerate_image(fp, sp, budget=budget)
    except BudgetExceeded as e:
        return CrossCheck(p, str(sym.name), None, None, None, False, note=str(e))
    rep = analyze(img)
    if rep.catalog != sym.name or rep.is_vector_space is not True:
        raise OracleDisagreement(
            f"{s.describe()} over F{p}, f = {f}: symbolic {sym.name}, enumeration {rep.catalog} "
            f"(vector space: {rep.is_vector_space})")
    # Q and F_p verdicts are compared as subspaces: a rational line can
    # coincide mod p with a named subspace (2e12 + 3e23 is in K_g over F_5)
    if s.field.p:
        agrees, explained = (res.span == sym.span if s.field.p == p else None), False
    else:
        agrees = _reduce_rows(res.span, p) == sym.span
        explained = not agrees
    note = ""
    if explained:
        note = f"{p} divides a decisive coefficient"
    elif str(res.name.reduce(p)) != str(sym.name):
        note = f"same subspace, named {sym.name} over F{p}"
    return CrossCheck(p, str(sym.name), str(rep.catalog), rep.is_vector_space, agrees, explained,
                      img.tuple_count, note)


def classify(f: StarPoly, s: StructureSpec, primes: Sequence[int] = (3, 5, 7), budget: int | None = None):
    """Symbolic classification plus exhaustive cross-checks; returns an ImageReport."""
    from .image import ImageReport

    res = classify_symbolic(f, s)
    checks = [cross_check(res, p, budget) for p in primes]
    resolved = resolve(res.name, s)
    homogeneous = is_homogeneous(resolved, s)
    span = [TriMatrix(s.n, s.field, row) for row in res.span]
    extra = {
        "method": "symbolic",
        "scheme": res.scheme,
        "coefficients": res.coefficients_json(),
        "homogeneous": homogeneous,
        "cross_checks": [c.to_json() for c in checks],
    }
    return ImageReport(s, res.poly, span, True, res.name, s.field.name, "symbolic", {}, extra)
