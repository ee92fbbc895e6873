import numpy as np
import pytest
from hypothesis import given, settings

from polyimage.coeffs import GF, QQ
from polyimage.starpoly import (
    ArgumentError,
    PolySyntaxError,
    StarPoly,
    evaluate,
    homogeneity,
    parse_problem,
    parse_star_poly,
)
from polyimage.triangular import GradeSpec, Involution, StructureSpec, TriMatrix, space_basis, unit

from conftest import star_polys

UT2R = StructureSpec(2, GradeSpec.trivial(2), Involution.REFLEXIVE)
UT3 = StructureSpec(3, GradeSpec.trivial(3), Involution.REFLEXIVE)


def test_parse_canonical_form():
    f = parse_star_poly("y1 z2 + 2*z2 y1 - y1 z2")
    assert (f.m, f.l) == (2, 1)
    assert f.coeffs == {(2, 1): 2}
    assert parse_star_poly(f.to_text()) == f


@given(star_polys())
def test_text_roundtrip(f):
    assert parse_star_poly(f.to_text()) == f


@pytest.mark.parametrize("text, col", [
    ("y1 y1", 1),
    ("y1 z2 +", 7),
    ("y1 & z2", 4),
    ("z1 y2", 1),
    ("y1 z2 + + z2 y1", 9),
    ("y1 z3", 1),
])
def test_syntax_errors_have_positions(text, col):
    with pytest.raises(PolySyntaxError) as ei:
        parse_star_poly(text)
    assert ei.value.line == 1
    assert ei.value.col == col


def test_zero_polynomial_keeps_variables():
    f = parse_star_poly("0*y1 z2")
    assert f.is_zero() and (f.m, f.l) == (2, 1)
    with pytest.raises(PolySyntaxError):
        parse_star_poly("0")


def _dense(A):
    M = np.zeros((A.n, A.n), dtype=object)
    for (i, j), v in A.items():
        M[i - 1, j - 1] = v
    return M


def _rand_arg(rng, s, v):
    F = s.field
    out = TriMatrix.zero(s.n, F)
    for b in space_basis(s, v.degree, v.sym):
        out = out + b.scale(rng.randint(-3, 3))
    return out


@settings(max_examples=40)
@given(star_polys(max_m=3))
def test_evaluate_matches_dense_products(f):
    import random
    rng = random.Random(f.m * 100 + len(f.coeffs))
    args = [_rand_arg(rng, UT3, v) for v in f.vars]
    expected = np.zeros((3, 3), dtype=object)
    for word, c in f.coeffs.items():
        prod = np.eye(3, dtype=int).astype(object)
        for i in word:
            prod = prod @ _dense(args[i - 1])
        expected = expected + c * prod
    assert (_dense(evaluate(f, UT3, args)) == expected).all()


def test_evaluate_rejects_wrong_spaces():
    f = parse_star_poly("y1 z2")
    with pytest.raises(ArgumentError, match="y1"):
        evaluate(f, UT2R, [unit(2, 1, 1), unit(2, 1, 1) - unit(2, 2, 2)])
    with pytest.raises(ArgumentError, match="expected 2"):
        evaluate(f, UT2R, [unit(2, 1, 2)])


def test_evaluation_examples():
    n = 3
    e = lambda i, j: unit(n, i, j)
    f = parse_star_poly("z1 z2")
    d = e(1, 1) - e(3, 3)
    assert evaluate(f, UT3, [d, d]) == e(1, 1) + e(3, 3)
    assert evaluate(f, UT3, [e(1, 2) - e(2, 3), -e(1, 2) + e(2, 3)]) == e(1, 3)
    z4 = StructureSpec(4, GradeSpec.canonical(4), Involution.REFLEXIVE)
    g = parse_star_poly("y1 y2", degrees=[0, 1])
    E = lambda i, j: unit(4, i, j)
    assert evaluate(g, z4, [E(1, 1) + E(4, 4), E(1, 2) + E(3, 4)]) == E(1, 2)
    assert homogeneity(g, z4) == 1


def test_problem_file():
    text = """# comment
algebra ut3
grading z2 degrees (0,1,0)
involution reflexive
field F5
vars z1:0, z2:1
poly 2*z1 z2
  + 3*z2 z1
"""
    prob = parse_problem(text)
    assert prob.structure.n == 3 and prob.structure.field == GF(5)
    assert prob.poly.degrees == (0, 1)
    assert prob.poly.coeffs == {(1, 2): 2, (2, 1): 3}
    assert parse_problem(prob.to_text()) == prob


def test_problem_errors():
    with pytest.raises(PolySyntaxError) as ei:
        parse_problem("algebra ut2\npoly y1 ? z2\n")
    assert (ei.value.line, ei.value.col) == (2, 9)
    with pytest.raises(PolySyntaxError, match="missing directive 'poly'"):
        parse_problem("algebra ut2\n")
    with pytest.raises(PolySyntaxError) as ei:
        parse_problem("algebra ut2\nfoo bar\npoly y1\n")
    assert ei.value.line == 2


def test_with_field_reduces():
    f = StarPoly(2, 0, {(1, 2): 7, (2, 1): 3}, QQ)
    assert f.with_field(GF(7)).coeffs == {(2, 1): 3}
