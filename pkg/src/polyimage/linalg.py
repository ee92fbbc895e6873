"""Row echelon forms over Q and F_p (raw field values, dense rows)."""

from __future__ import annotations

from typing import Sequence

from .coeffs import Field


def rref(rows: Sequence[Sequence], field: Field) -> tuple[list[list], list[int]]:
    """Reduced row echelon form of ``rows``; returns (nonzero rows, pivot columns)."""
    F = field
    m = [list(r) for r in rows if any(x != 0 for x in r)]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = F.inv(m[r][c])
        m[r] = [F.mul(x, inv) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [F.sub(a, F.mul(f, b)) for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence], field: Field) -> int:
    return len(rref(rows, field)[0])


def coordinates(v: Sequence, basis: list[list], pivots: list[int], field: Field):
    """Coordinates of ``v`` in an RREF basis, or ``None`` if ``v`` is outside the span."""
    F = field
    coords = [v[p] for p in pivots]
    rebuilt = [F.zero] * len(v)
    for c, row in zip(coords, basis):
        if c != 0:
            rebuilt = [F.add(a, F.mul(c, b)) for a, b in zip(rebuilt, row)]
    if any(a != F(b) for a, b in zip(rebuilt, v)):
        return None
    return coords


def in_span(v: Sequence, basis: list[list], pivots: list[int], field: Field) -> bool:
    return coordinates(v, basis, pivots, field) is not None


def solve_left(x_rows: list[list], target: Sequence, field: Field):
    """Find coefficients ``c`` with ``sum_k c[k] * x_rows[k] == target``, or ``None``.

    Plain Gaussian elimination on the transposed system.
    """
    F = field
    k = len(x_rows)
    n = len(target)
    if k == 0:
        return [] if all(t == 0 for t in target) else None
    # augmented system: columns are unknowns c_0..c_{k-1}, rows are coordinates
    aug = [[x_rows[j][i] for j in range(k)] + [F(target[i])] for i in range(n)]
    red, piv = rref(aug, F)
    if k in piv:
        return None
    sol = [F.zero] * k
    for row, c in zip(red, piv):
        sol[c] = row[k]
    return sol


def same_span(a: list[list], b: list[list], field: Field) -> bool:
    ra, _ = rref(a, field)
    rb, _ = rref(b, field)
    return ra == rb
