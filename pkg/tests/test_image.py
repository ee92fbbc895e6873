import itertools

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from polyimage.catalog import SCALARS, Line, Sg, match_catalog
from polyimage.classifier import UT2_REFLEXIVE, UT3_GAMMA33
from polyimage.coeffs import GF
from polyimage.image import (
    BudgetExceeded,
    all_vectors,
    analyze,
    batch_rref,
    closure_verdict,
    closure_witness,
    enumerate_image,
    membership,
    preimage,
    projective_points,
    sample_image,
    search_target,
    span_of,
)
from polyimage.linalg import rref
from polyimage.starpoly import evaluate, parse_star_poly
from polyimage.triangular import GradeSpec, Involution, StructureSpec, TriMatrix, space_basis, unit

from conftest import random_poly

UT3 = StructureSpec(3, GradeSpec.trivial(3), Involution.REFLEXIVE)
UT4Z4 = StructureSpec(4, GradeSpec.canonical(4), Involution.REFLEXIVE)


def naive_image(f, s, p):
    """Every argument tuple, evaluated one by one."""
    F = GF(p)
    s = s.with_field(F)
    f = f.with_field(F)
    spaces = []
    for v in f.vars:
        basis = space_basis(s, v.degree, v.sym)
        elems = []
        for cs in itertools.product(range(p), repeat=len(basis)):
            M = TriMatrix.zero(s.n, F)
            for c, b in zip(cs, basis):
                M = M + b.scale(c)
            elems.append(M)
        spaces.append(elems)
    return {evaluate(f, s, list(args), check=False) for args in itertools.product(*spaces)}


def test_helpers():
    assert len(all_vectors(3, 2)) == 9
    assert len(projective_points(5, 2)) == 6
    M = np.array([[[2, 4], [1, 2]]], dtype=np.int64)
    red, ranks = batch_rref(M, 5)
    assert ranks[0] == 1 and list(red[0][0]) == [1, 2]


@pytest.mark.parametrize("text, s, p", [
    ("z1 z2", UT2_REFLEXIVE, 3),
    ("y1 z2", UT2_REFLEXIVE, 5),
    ("z1 z2", UT3, 3),
    ("y1 y2 - 2*y2 y1", UT3, 3),
    ("z1 z2 z3 - z3 z2 z1", UT3, 3),
])
def test_fiber_and_brute_match_naive_oracle(text, s, p):
    f = parse_star_poly(text)
    expected = naive_image(f, s, p)
    for method in ("fiber", "brute"):
        img = enumerate_image(f, s.with_field(GF(p)), method=method)
        assert set(img.values()) == expected
        assert img.tuple_count == p ** sum(len(space_basis(s, v.degree, v.sym)) for v in f.vars)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_fiber_matches_naive_random(seed):
    import random
    rng = random.Random(seed)
    m = rng.randint(1, 3)
    f = random_poly(rng, m, rng.randint(0, m))
    s = rng.choice([UT2_REFLEXIVE, UT3, StructureSpec(2, GradeSpec.trivial(2), Involution.SYMPLECTIC)])
    assume(sum(len(space_basis(s, 0, v.sym)) for v in f.vars) <= 8)
    assert set(enumerate_image(f, s.with_field(GF(3))).values()) == naive_image(f, s, 3)


def test_ut2_examples():
    F5 = UT2_REFLEXIVE.with_field(GF(5))
    img = enumerate_image(parse_star_poly("y1 z2"), F5)
    F = GF(5)
    expected = [(unit(2, 1, 1, F) - unit(2, 2, 2, F)).vector(), unit(2, 1, 2, F).vector()]
    assert img.span_rows == rref(expected, F)[0]
    assert closure_verdict(img) is True
    img = enumerate_image(parse_star_poly("z1 z2"), F5)
    assert closure_verdict(img) is True
    assert match_catalog(span_of(img), F5) == SCALARS


def test_scalar_image_over_f3():
    s = UT2_REFLEXIVE.with_field(GF(3))
    img = enumerate_image(parse_star_poly("z1 z2"), s)
    assert img.tuple_count == 9
    I = unit(2, 1, 1, GF(3)) + unit(2, 2, 2, GF(3))
    assert set(img.values()) == {I.scale(c) for c in range(3)}


def test_skew_product_not_closed_over_f3():
    s = UT3.with_field(GF(3))
    F = s.field
    e = lambda i, j: unit(3, i, j, F)
    img = enumerate_image(parse_star_poly("z1 z2"), s)
    assert closure_verdict(img) is False
    assert membership(e(1, 3), img)
    assert membership(e(1, 1) + e(3, 3), img)
    assert not membership(e(1, 1) + e(3, 3) + e(1, 3), img)
    u, v = closure_witness(img)
    assert membership(u, img) and membership(v, img) and not membership(u + v, img)
    rep = analyze(img)
    assert rep.is_vector_space is False
    for key in ("u", "v"):
        args = [TriMatrix.from_json(a, F) for a in rep.witnesses[key + "_preimage"]]
        assert evaluate(img.poly, s, args) == TriMatrix.from_json(rep.witnesses[key], F)


def test_zn_product_not_closed():
    for p in (3, 5):
        img = enumerate_image(parse_star_poly("y1 y2", degrees=[0, 1]), UT4Z4.with_field(GF(p)))
        assert closure_verdict(img) is False
        F = GF(p)
        assert not membership(unit(4, 1, 2, F) + unit(4, 2, 3, F), img)


def test_preimages_reevaluate(rng):
    s = UT3.with_field(GF(3))
    f = parse_star_poly("y1 z2 - 2*z2 y1")
    img = enumerate_image(f, s)
    for v in rng.sample(img.values(), min(10, len(img))):
        assert evaluate(f, s, preimage(v, img)) == v


def test_scaling_invariance():
    s = UT3.with_field(GF(5))
    img = enumerate_image(parse_star_poly("y1 z2 z3"), s)
    vals = set(img.values())
    assert all(v.scale(c) in vals for v in vals for c in range(5))


def test_search_target_agrees_with_enumeration():
    s = UT3.with_field(GF(3))
    F = s.field
    f = parse_star_poly("z1 z2")
    img = enumerate_image(f, s)
    e = lambda i, j: unit(3, i, j, F)
    for t in (e(1, 3), e(1, 1) + e(3, 3), e(1, 1) + e(3, 3) + e(1, 3), e(1, 2) - e(2, 3)):
        res = search_target(f, s, t)
        assert res.attained == membership(t, img)
        if res.attained:
            assert evaluate(f, s, res.args) == t


def test_budget():
    s = UT4Z4.with_field(GF(5))
    with pytest.raises(BudgetExceeded):
        enumerate_image(parse_star_poly("y1 y2", degrees=[0, 1]), s, budget=10)


def test_line_family_image():
    s = UT3_GAMMA33.with_field(GF(7))
    f = parse_star_poly("2*z2 y1 - 3*y1 z2", degrees=[1, 0])
    img = enumerate_image(f, s)
    assert closure_verdict(img) is True
    assert match_catalog(span_of(img), s) == Line(2, 3, GF(7))
    g = parse_star_poly("y1", degrees=[0])
    assert match_catalog(span_of(enumerate_image(g, s)), s) == Sg(0)


def test_sampling_over_q():
    img = sample_image(parse_star_poly("z1 z2"), UT3, count=200, seed=1)
    assert closure_verdict(img) == "undetermined"
    assert img.seed == 1
    for v in img.values():
        # skew diagonals are (a, 0, -a), so the corner diagonal entries agree
        assert v.is_zero() or v[(1, 1)] == v[(3, 3)]
        args = preimage(v, img)
        assert evaluate(img.poly, UT3, args) == v
    assert sample_image(parse_star_poly("z1 z2"), UT3, count=50, seed=1).values() == \
        sample_image(parse_star_poly("z1 z2"), UT3, count=50, seed=1).values()
    with pytest.raises(ValueError):
        sample_image(parse_star_poly("z1 z2"), UT3.with_field(GF(3)))
