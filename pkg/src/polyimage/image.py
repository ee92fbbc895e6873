"""Images of multilinear *-polynomials: exhaustive enumeration over F_p,
sampling over Q, spans, closure verdicts and membership.

Exhaustive enumeration uses the multilinear structure.  With the first m-1
arguments fixed, f is a linear map of the last argument, so the set of values
on that fiber is the row space of a small matrix.  Scaling any of the first
m-1 arguments only scales the fiber's row space, so it suffices to visit one
representative per projective point of each of those argument spaces.  The
image is the union of the fiber row spaces.  ``method="brute"`` evaluates
every tuple literally and serves as an independent oracle.

Image vectors are encoded as integers: coordinates ``c`` with respect to the
RREF basis of the span become ``sum_t c[t] * p**t``.
"""

from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .catalog import SubspaceName, match_catalog
from .coeffs import GF, QQ, Field
from .linalg import coordinates, rref, solve_left
from .starpoly import StarPoly, evaluate
from .triangular import StructureSpec, TriMatrix, positions, space_basis

__all__ = [
    "DEFAULT_BUDGET",
    "BudgetExceeded",
    "ImageSet",
    "ImageReport",
    "argument_bases",
    "enumerate_image",
    "sample_image",
    "span_of",
    "closure_verdict",
    "closure_witness",
    "membership",
    "preimage",
    "TargetSearch",
    "search_target",
    "analyze",
    "budget_from_env",
    "batch_rref",
    "projective_points",
    "all_vectors",
]

DEFAULT_BUDGET = 10 ** 8


class BudgetExceeded(RuntimeError):
    def __init__(self, required: int, budget: int, what: str = "evaluation steps"):
        super().__init__(f"{what}: {required} required, budget is {budget}")
        self.required = required
        self.budget = budget


def budget_from_env(default: int = DEFAULT_BUDGET) -> int:
    raw = os.environ.get("POLYIMAGE_BUDGET")
    if raw is None or not raw.strip():
        return default
    value = int(raw)
    if value <= 0:
        raise ValueError("POLYIMAGE_BUDGET must be positive")
    return value


# --------------------------------------------------------------------------
# numpy helpers over F_p


def _inv_table(p: int) -> np.ndarray:
    t = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        t[a] = pow(a, -1, p)
    return t


def batch_rref(M: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """RREF of a stack of matrices ``M[b]`` over F_p; returns (reduced stack, ranks)."""
    M = np.array(M, dtype=np.int64) % p
    if M.ndim == 2:
        M = M[None]
    B, R, C = M.shape
    inv = _inv_table(p)
    row = np.zeros(B, dtype=np.int64)
    ar = np.arange(R)
    for c in range(C):
        cand = (M[:, :, c] != 0) & (ar[None, :] >= row[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        b = np.nonzero(has)[0]
        piv = cand[b].argmax(axis=1)
        r0 = row[b]
        pr = M[b, piv].copy()
        M[b, piv] = M[b, r0]
        pr = (pr * inv[pr[:, c]][:, None]) % p
        M[b, r0] = pr
        factors = M[b, :, c].copy()
        factors[np.arange(len(b)), r0] = 0
        M[b] = (M[b] - factors[:, :, None] * pr[:, None, :]) % p
        row[b] += 1
    return M, row


def all_vectors(p: int, d: int) -> np.ndarray:
    """Every vector of F_p^d, lexicographic, shape (p**d, d)."""
    if d == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((p,) * d).reshape(d, -1).T
    return grids.astype(np.int64)


def projective_points(p: int, d: int) -> np.ndarray:
    """One vector per line of F_p^d: first nonzero coordinate equal to 1."""
    blocks = []
    for t in range(d):
        tail = all_vectors(p, d - t - 1)
        blk = np.zeros((len(tail), d), dtype=np.int64)
        blk[:, t] = 1
        blk[:, t + 1:] = tail
        blocks.append(blk)
    if not blocks:
        return np.zeros((0, 0), dtype=np.int64)
    return np.concatenate(blocks)


def _dense(n: int, mats: Sequence[TriMatrix]) -> np.ndarray:
    out = np.zeros((len(mats), n, n), dtype=np.int64)
    for k, M in enumerate(mats):
        for (i, j), v in M.items():
            out[k, i - 1, j - 1] = int(v)
    return out


# --------------------------------------------------------------------------
# image sets


def argument_bases(f: StarPoly, s: StructureSpec) -> list:
    """Basis of S_{g_i} or K_{g_i} for each variable of f."""
    return [space_basis(s, v.degree, v.sym) for v in f.vars]


@dataclass
class ImageSet:
    """Image of f on s.

    Exhaustive sets store the image as sorted integer codes relative to the
    RREF span basis; sampled sets store the distinct sampled values.
    """

    structure: StructureSpec
    poly: StarPoly
    mode: str  # "exhaustive" | "sampled"
    span_rows: list
    pivots: list
    codes: np.ndarray | None = None
    sample_values: list | None = None
    tuple_count: int = 0
    steps: int = 0
    method: str = "fiber"
    seed: int | None = None
    _witness: Callable | None = dc_field(default=None, repr=False)

    @property
    def p(self) -> int:
        return self.structure.field.p

    @property
    def field(self) -> Field:
        return self.structure.field

    @property
    def rank(self) -> int:
        return len(self.span_rows)

    @property
    def exhaustive(self) -> bool:
        return self.mode == "exhaustive"

    def __len__(self):
        return len(self.codes) if self.exhaustive else len(self.sample_values)

    # code <-> vector ------------------------------------------------------

    def _powers(self) -> np.ndarray:
        return np.array([self.p ** t for t in range(self.rank)], dtype=np.int64)

    def decode_coords(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        out = np.zeros(codes.shape + (self.rank,), dtype=np.int64)
        rest = codes.copy()
        for t in range(self.rank):
            out[..., t] = rest % self.p
            rest //= self.p
        return out

    def matrix_of(self, coords) -> TriMatrix:
        F = self.field
        vec = [F.zero] * len(positions(self.structure.n))
        for c, row in zip(coords, self.span_rows):
            c = int(c)
            if c:
                vec = [F.add(a, F.mul(c, b)) for a, b in zip(vec, row)]
        return TriMatrix(self.structure.n, F, vec)

    def code_of(self, v: TriMatrix):
        """Code of v, or None if v is outside the span."""
        coords = coordinates(list(v.vector()), self.span_rows, self.pivots, self.field)
        if coords is None:
            return None
        return int(sum(int(c) * self.p ** t for t, c in enumerate(coords)))

    def values(self) -> list:
        if not self.exhaustive:
            return list(self.sample_values)
        return [self.matrix_of(c) for c in self.decode_coords(self.codes)]

    def contains(self, v: TriMatrix) -> bool:
        if not self.exhaustive:
            return v in set(self.sample_values)
        code = self.code_of(v)
        if code is None:
            return False
        k = np.searchsorted(self.codes, code)
        return bool(k < len(self.codes) and self.codes[k] == code)

    def witness(self, v: TriMatrix):
        """A preimage tuple (list of TriMatrix) of v, or None if v is not attained."""
        if not self.contains(v):
            return None
        if self._witness is None:
            return None
        return self._witness(v)


def _check_field(f: StarPoly, s: StructureSpec, p: int | None):
    if p is None:
        p = s.field.p
    if not p:
        raise ValueError("exhaustive enumeration needs a prime field")
    F = GF(p)
    return f.with_field(F), s.with_field(F), F, p


def _span_np(rows: np.ndarray, p: int, N: int):
    if len(rows) == 0:
        return np.zeros((0, N), dtype=np.int64), []
    R, rk = batch_rref(rows.reshape(-1, N), p)
    R = R[0, : rk[0]]
    piv = [int(np.nonzero(r)[0][0]) for r in R]
    return R, piv


def _value_tensor(f: StarPoly, s: StructureSpec, bases: list, p: int) -> np.ndarray:
    """T[k_1, ..., k_m, :] = coordinates of f(b_{k_1}, ..., b_{k_m}) in positions order."""
    n, m = s.n, f.m
    dense = [_dense(n, b) for b in bases]
    dims = tuple(len(b) for b in bases)
    T = np.zeros(dims + (n, n), dtype=np.int64)
    for word, c in f.coeffs.items():
        P = dense[word[0] - 1]
        for i in word[1:]:
            P = np.einsum("...ij,bjk->...bik", P, dense[i - 1]) % p
        axes = [word.index(v + 1) for v in range(m)] + [m, m + 1]
        T = (T + int(c) * P.transpose(axes)) % p
    rows, cols = zip(*positions(n))
    return T[..., np.array(rows) - 1, np.array(cols) - 1]


def enumerate_image(f: StarPoly, s: StructureSpec, p: int | None = None, budget: int | None = None,
                    method: str = "fiber") -> ImageSet:
    """Exhaustive image of f on s over F_p (``p`` defaults to the structure's field)."""
    if budget is None:
        budget = budget_from_env()
    f, s, F, p = _check_field(f, s, p)
    if method == "brute":
        return _enumerate_brute(f, s, F, p, budget)
    if method != "fiber":
        raise ValueError(f"unknown method {method!r}")
    bases = argument_bases(f, s)
    dims = [len(b) for b in bases]
    m = f.m
    N = len(positions(s.n))
    tuple_count = 1
    for d in dims:
        tuple_count *= p ** d

    if f.is_zero() or 0 in dims:
        zero_args = [TriMatrix.zero(s.n, F) for _ in range(m)]
        return ImageSet(s, f, "exhaustive", [], [], np.zeros(1, dtype=np.int64), tuple_count=tuple_count,
                        steps=1, method="fiber", _witness=lambda v: list(zero_args))

    T = _value_tensor(f, s, bases, p)
    span, piv = _span_np(T, p, N)
    r = len(span)
    if r == 0:
        zero_args = [TriMatrix.zero(s.n, F) for _ in range(m)]
        return ImageSet(s, f, "exhaustive", [], [], np.zeros(1, dtype=np.int64), tuple_count=tuple_count,
                        steps=1, method="fiber", _witness=lambda v: list(zero_args))
    Tc = T[..., piv]  # coordinates relative to the RREF span

    reps = [projective_points(p, d) for d in dims[:-1]]
    n_fibers = 1
    for R_ in reps:
        n_fibers *= len(R_)
    steps = n_fibers * m
    if steps > budget:
        raise BudgetExceeded(steps, budget)

    L = _contract(Tc, reps, p)  # (n_fibers, d_m, r)

    Lred, ranks = batch_rref(L, p)
    flat = Lred.reshape(len(Lred), -1)
    _, first = np.unique(flat, axis=0, return_index=True)
    first = np.sort(first)

    pw = np.array([p ** t for t in range(r)], dtype=np.int64)
    total = int(sum(p ** int(ranks[k]) for k in first))
    steps += total
    if steps > budget:
        raise BudgetExceeded(steps, budget)

    all_codes = []
    owners = []
    coeff_cache: dict = {}
    for k in first:
        rk = int(ranks[k])
        if rk not in coeff_cache:
            coeff_cache[rk] = all_vectors(p, rk)
        vecs = (coeff_cache[rk] @ Lred[k, :rk]) % p
        all_codes.append(vecs @ pw)
        owners.append(np.full(len(vecs), k, dtype=np.int64))
    codes_cat = np.concatenate(all_codes)
    owners_cat = np.concatenate(owners)
    codes, idx = np.unique(codes_cat, return_index=True)
    owner = owners_cat[idx]

    rep_shape = [len(R_) for R_ in reps]
    span_rows = [[F(int(x)) for x in row] for row in span]

    def witness(v: TriMatrix):
        img_code = img.code_of(v)
        k = int(owner[np.searchsorted(codes, img_code)])
        idxs = np.unravel_index(k, rep_shape) if rep_shape else ()
        coeff_vecs = [reps[t][idxs[t]] for t in range(len(reps))]
        target = [int(c) for c in img.decode_coords(img_code)]
        last = solve_left([[int(x) for x in row] for row in L[k]], target, F)
        coeff_vecs.append(last)
        return [_combine(bases[t], coeff_vecs[t], s.n, F) for t in range(m)]

    img = ImageSet(s, f, "exhaustive", span_rows, list(piv), codes, tuple_count=tuple_count, steps=steps,
                   method="fiber", _witness=witness)
    return img


@dataclass
class TargetSearch:
    """Outcome of deciding whether a single matrix lies in the image."""

    attained: bool
    args: list | None
    tuple_count: int
    fibers_checked: int
    steps: int


def search_target(f: StarPoly, s: StructureSpec, target: TriMatrix, p: int | None = None,
                  budget: int | None = None) -> TargetSearch:
    """Exhaustively decide ``target in f(UT_n)`` over F_p.

    For each projective representative of the first m-1 arguments, ``target``
    is attained on that fiber iff it lies in the row space of the fiber's
    linear map; this covers every tuple of the finite argument spaces.
    """
    if budget is None:
        budget = budget_from_env()
    f, s, F, p = _check_field(f, s, p)
    bases = argument_bases(f, s)
    dims = [len(b) for b in bases]
    tuple_count = 1
    for d in dims:
        tuple_count *= p ** d
    t = np.array([int(F(x)) for x in target.vector()], dtype=np.int64)
    if not t.any():
        zero_args = [TriMatrix.zero(s.n, F) for _ in range(f.m)]
        return TargetSearch(True, zero_args, tuple_count, 0, 0)
    if f.is_zero() or 0 in dims:
        return TargetSearch(False, None, tuple_count, 0, 1)
    reps = [projective_points(p, d) for d in dims[:-1]]
    n_fibers = 1
    for R_ in reps:
        n_fibers *= len(R_)
    steps = n_fibers * f.m
    if steps > budget:
        raise BudgetExceeded(steps, budget)
    L = _contract(_value_tensor(f, s, bases, p), reps, p)  # (fibers, d_m, N)
    _, r1 = batch_rref(L, p)
    aug = np.concatenate([L, np.broadcast_to(t, (len(L), 1, len(t)))], axis=1)
    _, r2 = batch_rref(aug, p)
    hits = np.nonzero(r1 == r2)[0]
    if len(hits) == 0:
        return TargetSearch(False, None, tuple_count, len(L), steps)
    k = int(hits[0])
    idxs = np.unravel_index(k, [len(R_) for R_ in reps]) if reps else ()
    coeff_vecs = [reps[j][idxs[j]] for j in range(len(reps))]
    coeff_vecs.append(solve_left([[int(x) for x in row] for row in L[k]], [int(x) for x in t], F))
    args = [_combine(bases[j], coeff_vecs[j], s.n, F) for j in range(f.m)]
    return TargetSearch(True, args, tuple_count, k + 1, steps)


def _contract(T: np.ndarray, reps: list, p: int) -> np.ndarray:
    """Fix the first m-1 arguments to every combination of representatives."""
    X = T.reshape((1,) + T.shape)
    for R_ in reps:
        X = np.einsum("ab...,qb->aq...", X, R_) % p
        X = X.reshape((-1,) + X.shape[2:])
    return X


def _combine(basis: Sequence[TriMatrix], coeffs, n: int, F: Field) -> TriMatrix:
    out = TriMatrix.zero(n, F)
    for b, c in zip(basis, coeffs):
        c = F(int(c))
        if c:
            out = out + b.scale(c)
    return out


def _enumerate_brute(f: StarPoly, s: StructureSpec, F: Field, p: int, budget: int) -> ImageSet:
    bases = argument_bases(f, s)
    tuple_count = 1
    for b in bases:
        tuple_count *= p ** len(b)
    steps = tuple_count * f.m
    if steps > budget:
        raise BudgetExceeded(steps, budget)
    spaces = []
    for b in bases:
        spaces.append([_combine(b, c, s.n, F) for c in itertools.product(range(p), repeat=len(b))])
    found: dict = {}
    for args in itertools.product(*spaces):
        v = evaluate(f, s, list(args), check=False)
        if v not in found:
            found[v] = list(args)
    vals = list(found)
    span, piv = rref([list(v.vector()) for v in vals], F)
    img = ImageSet(s, f, "exhaustive", span, piv, None, tuple_count=tuple_count, steps=steps, method="brute")
    img.codes = np.array(sorted(img.code_of(v) for v in vals), dtype=np.int64)
    img._witness = lambda v: list(found[v])
    return img


def sample_image(f: StarPoly, s: StructureSpec, count: int = 200, seed: int = 0, box: int = 5) -> ImageSet:
    """Values of f at ``count`` random argument tuples with basis coordinates in [-box, box]."""
    if s.field.p:
        raise ValueError("sampling is for the rational field; use enumerate_image over F_p")
    rng = random.Random(seed)
    F = QQ
    bases = argument_bases(f, s)
    seen: dict = {}
    for _ in range(count):
        args = [_combine(b, [rng.randint(-box, box) for _ in b], s.n, F) for b in bases]
        v = evaluate(f, s, args, check=False)
        seen.setdefault(v, args)
    vals = list(seen)
    span, piv = rref([list(v.vector()) for v in vals], F)
    return ImageSet(s, f, "sampled", span, piv, sample_values=vals, tuple_count=count, steps=count * f.m,
                    method="sample", seed=seed, _witness=lambda v: list(seen[v]))


# --------------------------------------------------------------------------
# derived facts


def span_of(img: ImageSet) -> list:
    """Echelonized basis of the linear hull, as TriMatrix."""
    return [TriMatrix(img.structure.n, img.field, row) for row in img.span_rows]


def closure_verdict(img: ImageSet):
    """True / False for exhaustive images; "undetermined" for sampled ones."""
    if not img.exhaustive:
        return "undetermined"
    return len(img.codes) == img.p ** img.rank


def closure_witness(img: ImageSet, limit: int = 4000):
    """(u, v) attained with u + v not attained, preferring sparse u and v; None if closed."""
    if not img.exhaustive or closure_verdict(img):
        return None
    p = img.p
    coords = img.decode_coords(img.codes)
    B = np.array([[int(x) for x in row] for row in img.span_rows], dtype=np.int64)
    full = (coords @ B) % p
    weight = (full != 0).sum(axis=1)
    order = np.lexsort((img.codes, weight))
    order = order[weight[order] > 0]
    pw = img._powers()
    cs, ws = coords[order], weight[order]
    for a in range(min(len(order), limit)):
        sums = ((cs[a][None, :] + cs) % p) @ pw
        k = np.searchsorted(img.codes, sums)
        k = np.minimum(k, len(img.codes) - 1)
        missing = img.codes[k] != sums
        if missing.any():
            # smallest combined support among the failures
            cand = np.nonzero(missing)[0]
            b = cand[np.argmin(ws[cand])]
            return img.matrix_of(cs[a]), img.matrix_of(cs[b])
    return None


def membership(v: TriMatrix, img: ImageSet) -> bool:
    return img.contains(v)


def preimage(v: TriMatrix, img: ImageSet):
    return img.witness(v)


# --------------------------------------------------------------------------
# reports


def _scalar_json(F: Field, x) -> str:
    return F.to_str(x)


@dataclass
class ImageReport:
    structure: StructureSpec
    poly: StarPoly
    span: list  # TriMatrix
    is_vector_space: object  # bool | "undetermined"
    catalog: SubspaceName
    field: str
    mode: str
    witnesses: dict = dc_field(default_factory=dict)
    extra: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "structure": self.structure.to_json(),
            "polynomial": self.poly.to_json(),
            "field": self.field,
            "mode": self.mode,
            "span_basis": [m.to_json() for m in self.span],
            "is_vector_space": self.is_vector_space,
            "catalog": str(self.catalog),
            "catalog_kind": self.catalog.kind,
            "witnesses": self.witnesses,
        }
        out.update(self.extra)
        return out

    def to_text(self) -> str:
        lines = [
            f"structure: {self.structure.describe()}",
            f"polynomial: {self.poly.to_text()}",
            f"field: {self.field}   mode: {self.mode}",
            f"catalog: {self.catalog}   vector space: {self.is_vector_space}",
            "span basis:",
        ]
        lines += ["  " + m.terms_str() for m in self.span] or ["  (empty)"]
        F = self.structure.field

        def show(x):
            if isinstance(x, dict) and "entries" in x:
                return TriMatrix.from_json(x, F).terms_str()
            if isinstance(x, list):
                return "(" + ", ".join(show(y) for y in x) + ")"
            return str(x)

        for k, v in self.witnesses.items():
            lines.append(f"witness {k}: {show(v)}")
        for k, v in self.extra.items():
            if k == "cross_checks":
                for c in v:
                    lines.append(f"F{c['p']}: symbolic {c['symbolic']}, enumerated {c['enumerated']}, "
                                 f"vector space {c['is_vector_space']}, agrees with Q {c['agrees_with_rational']}"
                                 + (f" ({c['note']})" if c["note"] else ""))
            elif isinstance(v, dict):
                lines.append(f"{k}: " + ", ".join(f"{a}={b}" for a, b in v.items()))
            elif v is not None:
                lines.append(f"{k}: {v}")
        return "\n".join(lines)


def _args_json(args) -> list:
    return [a.to_json() for a in args]


def analyze(img: ImageSet, witness_limit: int = 4000) -> ImageReport:
    """Span, closure verdict, catalog name and (if not closed) a witness pair."""
    s = img.structure
    span = span_of(img)
    verdict = closure_verdict(img)
    name = match_catalog(span, s)
    witnesses = {}
    if verdict is False:
        pair = closure_witness(img, witness_limit)
        if pair is not None:
            u, v = pair
            witnesses = {
                "u": u.to_json(), "v": v.to_json(), "sum": (u + v).to_json(),
                "u_preimage": _args_json(img.witness(u)), "v_preimage": _args_json(img.witness(v)),
            }
    extra = {"image_size": len(img), "tuple_count": img.tuple_count, "method": img.method}
    if img.mode == "sampled":
        extra["seed"] = img.seed
    return ImageReport(s, img.poly, span, verdict, name, s.field.name, img.mode, witnesses, extra)
