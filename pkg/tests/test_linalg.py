import numpy as np
from hypothesis import given, settings, strategies as st

from polyimage.coeffs import GF, QQ
from polyimage.image import batch_rref
from polyimage.linalg import coordinates, in_span, rank, rref, same_span, solve_left

small = st.integers(-3, 3)
matrices = st.integers(1, 5).flatmap(
    lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=1, max_size=5))


@given(matrices)
def test_rank_over_q_matches_float_rank(rows):
    assert rank(rows, QQ) == np.linalg.matrix_rank(np.array(rows, dtype=float))


@settings(max_examples=60)
@given(matrices, st.sampled_from([3, 5, 7]))
def test_rref_mod_p_matches_vectorized(rows, p):
    F = GF(p)
    red, piv = rref([[F(x) for x in r] for r in rows], F)
    M = np.array(rows, dtype=np.int64)[None] % p
    vred, ranks = batch_rref(M, p)
    assert ranks[0] == len(red)
    assert [list(map(int, r)) for r in vred[0][: len(red)]] == red


def test_rref_shape():
    red, piv = rref([[0, 2, 4], [0, 1, 2], [1, 0, 1]], QQ)
    assert piv == [0, 1]
    assert red == [[1, 0, 1], [0, 1, 2]]


def test_membership_and_coordinates():
    F = QQ
    basis, piv = rref([[1, 1, 0], [0, 1, 1]], F)
    assert in_span([2, 3, 1], basis, piv, F)
    assert not in_span([0, 0, 1], basis, piv, F)
    assert basis == [[1, 0, -1], [0, 1, 1]]
    assert coordinates([2, 3, 1], basis, piv, F) == [2, 3]


@given(matrices, st.lists(small, min_size=5, max_size=5))
def test_solve_left_reconstructs(rows, coeffs):
    F = GF(7)
    rows = [[F(x) for x in r] for r in rows]
    c = [F(x) for x in coeffs[: len(rows)]]
    target = [sum(ci * r[j] for ci, r in zip(c, rows)) % 7 for j in range(len(rows[0]))]
    sol = solve_left(rows, target, F)
    assert sol is not None
    assert [sum(si * r[j] for si, r in zip(sol, rows)) % 7 for j in range(len(rows[0]))] == target


def test_same_span_ignores_generators():
    assert same_span([[1, 2], [2, 4]], [[3, 6]], QQ)
    assert not same_span([[1, 2]], [[1, 0]], QQ)
