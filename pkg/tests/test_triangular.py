import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polyimage.coeffs import GF, QQ
from polyimage.linalg import same_span
from polyimage.triangular import (
    GradeSpec,
    InvalidStructure,
    Involution,
    StructureSpec,
    TriMatrix,
    apply_involution,
    check_structure,
    component_bases,
    decompose,
    in_space,
    parse_degree_tuple,
    positions,
    require_valid,
    space_basis,
    unit,
)


def e(n, i, j, F=QQ):
    return unit(n, i, j, F)


def dense(A):
    M = np.zeros((A.n, A.n), dtype=object)
    for (i, j), v in A.items():
        M[i - 1, j - 1] = v
    return M


def involution_oracle(A, kind):
    n = A.n
    J = np.fliplr(np.eye(n, dtype=int)).astype(object)
    out = J @ dense(A).T @ J
    if kind == "symplectic":
        D = np.diag([1] * (n // 2) + [-1] * (n // 2)).astype(object)
        out = D @ out @ D
    return out


tri = st.integers(2, 5).flatmap(
    lambda n: st.lists(st.integers(-4, 4), min_size=n * (n + 1) // 2, max_size=n * (n + 1) // 2)
    .map(lambda xs: TriMatrix(n, QQ, [QQ(x) for x in xs])))


def test_matrix_unit_products():
    n = 3
    assert (e(n, 1, 1) - e(n, 3, 3)) * (e(n, 1, 2) - e(n, 2, 3)) == e(n, 1, 2)
    assert e(n, 1, 2) * e(n, 2, 3) == e(n, 1, 3)
    assert (e(n, 2, 3) * e(n, 1, 2)).is_zero()


@given(tri, st.sampled_from(["reflexive", "symplectic"]))
def test_involution_matches_dense_oracle(A, kind):
    if kind == "symplectic" and A.n % 2:
        with pytest.raises(InvalidStructure):
            apply_involution(A, kind)
        return
    assert (dense(apply_involution(A, kind)) == involution_oracle(A, kind)).all()


@settings(max_examples=50)
@given(st.integers(2, 5).flatmap(lambda n: st.tuples(
    *[st.lists(st.integers(-3, 3), min_size=n * (n + 1) // 2, max_size=n * (n + 1) // 2)] * 2)),
    st.sampled_from(["reflexive", "symplectic"]))
def test_involution_is_anti_automorphism(pair, kind):
    k = len(pair[0])
    n = int((np.sqrt(8 * k + 1) - 1) / 2)
    if kind == "symplectic" and n % 2:
        return
    A, B = (TriMatrix(n, QQ, [QQ(x) for x in xs]) for xs in pair)
    star = lambda M: apply_involution(M, kind)
    assert star(A * B) == star(B) * star(A)
    assert star(star(A)) == A


def test_reflexive_examples():
    n = 3
    assert apply_involution(e(n, 1, 1), "reflexive") == e(n, 3, 3)
    assert apply_involution(e(n, 1, 2), "reflexive") == e(n, 2, 3)
    assert apply_involution(e(n, 1, 3), "reflexive") == e(n, 1, 3)
    A = TriMatrix.from_rows([[1, 2], [0, 3]])
    assert apply_involution(A, "reflexive") == TriMatrix.from_rows([[3, 2], [0, 1]])


def test_symplectic_example():
    assert apply_involution(e(2, 1, 2), "symplectic") == -e(2, 1, 2)
    assert apply_involution(e(2, 1, 1), "symplectic") == e(2, 2, 2)


def _span(mats):
    return [m.vector() for m in mats]


def test_ut2_bases():
    refl = StructureSpec(2, GradeSpec.trivial(2), Involution.REFLEXIVE)
    (c,) = component_bases(refl)
    assert same_span(_span(c.S), _span([e(2, 1, 1) + e(2, 2, 2), e(2, 1, 2)]), QQ)
    assert same_span(_span(c.K), _span([e(2, 1, 1) - e(2, 2, 2)]), QQ)
    symp = StructureSpec(2, GradeSpec.trivial(2), Involution.SYMPLECTIC)
    (c,) = component_bases(symp)
    assert same_span(_span(c.S), _span([e(2, 1, 1) + e(2, 2, 2)]), QQ)
    assert same_span(_span(c.K), _span([e(2, 1, 1) - e(2, 2, 2), e(2, 1, 2)]), QQ)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_reflexive_skew_basis(n):
    s = StructureSpec(n, GradeSpec.trivial(n), Involution.REFLEXIVE)
    expected = [(e(n, i, j) - e(n, n + 1 - j, n + 1 - i)).vector() for i, j in positions(n)]
    assert same_span(_span(space_basis(s, 0, False)), expected, QQ)


def test_gamma33_top_component():
    s = StructureSpec(3, GradeSpec(3, (0, 1, 2)), Involution.REFLEXIVE)
    assert same_span(_span(space_basis(s, 2, True)), _span([e(3, 1, 3)]), QQ)
    assert space_basis(s, 2, False) == ()


def test_gamma23_neutral_component():
    s = StructureSpec(3, GradeSpec(2, (0, 1, 0)), Involution.REFLEXIVE)
    assert check_structure(s).ok
    A0 = [c for c in component_bases(s) if c.degree == 0][0].A
    assert same_span(_span(A0), _span([e(3, 1, 1), e(3, 2, 2), e(3, 3, 3), e(3, 1, 3)]), QQ)


@pytest.mark.parametrize("n", range(1, 9))
def test_canonical_zn_compatible(n):
    g = GradeSpec.canonical(n)
    assert all((g.degrees[i] + g.degrees[n - 1 - i]) % max(n, 1) == (n - 1) % max(n, 1) for i in range(n))
    assert check_structure(StructureSpec(n, g, Involution.REFLEXIVE)).ok


def test_incompatible_grading_names_clause():
    rep = check_structure(StructureSpec(3, GradeSpec(3, (0, 1, 1)), Involution.REFLEXIVE))
    assert not rep.ok
    assert "compatibility" in rep.failed
    with pytest.raises(InvalidStructure, match="compatibility"):
        require_valid(StructureSpec(3, GradeSpec(3, (0, 1, 1)), Involution.REFLEXIVE))


def test_other_clauses():
    rep = check_structure(StructureSpec(3, GradeSpec.trivial(3), Involution.SYMPLECTIC))
    assert rep.failed == ["symplectic_parity"]
    rep = check_structure(StructureSpec(3, GradeSpec(4, (0, 2, 0)), Involution.REFLEXIVE))
    assert "support_generates" in rep.failed


@pytest.mark.parametrize("s", [
    StructureSpec(4, GradeSpec.canonical(4), Involution.REFLEXIVE),
    StructureSpec(4, GradeSpec.trivial(4), Involution.SYMPLECTIC),
    StructureSpec(3, GradeSpec(2, (0, 1, 0)), Involution.REFLEXIVE, GF(5)),
])
def test_components_are_homogeneous_and_split(s, rng):
    F = s.field
    for comp in component_bases(s):
        for b in comp.S:
            assert apply_involution(b, s) == b
            assert all(s.grade.deg(i, j) == comp.degree for (i, j) in b.nonzero())
        for b in comp.K:
            assert apply_involution(b, s) == -b
        assert len(comp.S) + len(comp.K) == len(comp.A)
    A = TriMatrix(s.n, F, [F(rng.randint(-4, 4)) for _ in positions(s.n)])
    total = TriMatrix.zero(s.n, F)
    for g, (sym, skew) in decompose(A, s).items():
        assert in_space(sym, space_basis(s, g, True), F)
        assert in_space(skew, space_basis(s, g, False), F)
        total = total + sym + skew
    assert total == A


def test_json_roundtrip():
    A = TriMatrix.from_rows([[1, 2, 0], [0, 3, -1], [0, 0, 5]], GF(7))
    assert TriMatrix.from_json(A.to_json(), GF(7)) == A
    assert parse_degree_tuple("(0, 1, 2)") == (0, 1, 2)
