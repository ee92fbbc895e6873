from fractions import Fraction

import pytest

from polyimage.catalog import (
    K,
    SCALARS,
    Ag,
    Jpow,
    Kg,
    Line,
    Other,
    Sg,
    catalog,
    is_homogeneous,
    match_catalog,
    resolve,
    structure_family,
)
from polyimage.classifier import (
    UT2_GAMMA22_REFLEXIVE,
    UT2_REFLEXIVE,
    UT2_SYMPLECTIC,
    UT3_GAMMA23,
    UT3_GAMMA33,
)
from polyimage.coeffs import GF
from polyimage.linalg import rref
from polyimage.triangular import GradeSpec, Involution, StructureSpec, positions, unit


def test_families():
    assert structure_family(UT2_REFLEXIVE) == "ut2-trivial"
    assert structure_family(UT2_GAMMA22_REFLEXIVE) == "ut2-gamma22"
    assert structure_family(UT3_GAMMA23) == "ut3-gamma23"
    assert structure_family(UT3_GAMMA33) == "ut3-gamma33"
    assert structure_family(StructureSpec(3, GradeSpec.trivial(3), Involution.REFLEXIVE)) == "ut3-trivial"
    # relabelled degrees give the same family
    assert structure_family(StructureSpec(3, GradeSpec(2, (1, 0, 1)), Involution.REFLEXIVE)) == "ut3-gamma23"


def test_named_examples():
    e2 = lambda i, j: unit(2, i, j)
    e3 = lambda i, j: unit(3, i, j)
    assert match_catalog([e2(1, 1) - e2(2, 2)], UT2_REFLEXIVE) == K
    assert match_catalog([e3(1, 1) + e3(3, 3), e3(2, 2), e3(1, 3)], UT3_GAMMA23) == Sg(0)
    assert match_catalog([e3(1, 2).scale(2) + e3(2, 3).scale(3)], UT3_GAMMA33) == Line(2, 3)
    assert match_catalog([e2(1, 1) + e2(2, 2)], UT2_REFLEXIVE) == SCALARS
    assert match_catalog([e3(1, 2), e3(2, 3)], UT3_GAMMA33) == Ag(1)


def test_names_render():
    assert str(Jpow(1)) == "J" and str(Jpow(2)) == "J^2"
    assert str(Line(2, 3)) == "Line(1,3/2)"
    assert Line(0, 5) == Line(0, 1)
    assert str(Kg(0)) == "K_0"
    with pytest.raises(ValueError):
        Line(0, 0)


def test_line_reduction_mod_p():
    assert Line(2, 3).reduce(5) == Line(1, 4, GF(5))


@pytest.mark.parametrize("s", [UT2_REFLEXIVE, UT2_SYMPLECTIC, UT2_GAMMA22_REFLEXIVE, UT3_GAMMA23, UT3_GAMMA33])
def test_catalog_entries_resolve_to_themselves(s):
    spans = set()
    for name, rows in catalog(s):
        assert resolve(name, s) == [list(r) for r in rows]
        assert match_catalog(rows, s) == name
        key = tuple(tuple(r) for r in rows)
        assert key not in spans
        spans.add(key)


def test_ut2_catalog_names():
    refl = {str(n) for n, _ in catalog(UT2_REFLEXIVE)}
    assert {"{0}", "J", "F", "K", "S", "K+J"} <= refl
    symp = {str(n) for n, _ in catalog(UT2_SYMPLECTIC)}
    assert {"{0}", "J", "S", "K", "K∩D", "S+J"} <= symp


def test_resolve_line():
    s = UT3_GAMMA33
    pos = positions(3)
    (row,) = resolve(Line(2, 3), s)
    assert row[pos.index((1, 2))] == 1 and row[pos.index((2, 3))] == Fraction(3, 2)


def test_other_and_homogeneity():
    e3 = lambda i, j: unit(3, i, j)
    mixed = [e3(1, 1) + e3(1, 2)]
    assert match_catalog(mixed, UT3_GAMMA33).kind == "Other"
    assert not is_homogeneous(mixed, UT3_GAMMA33)
    assert is_homogeneous([e3(1, 1), e3(1, 2)], UT3_GAMMA33)
    rows, _ = rref([m.vector() for m in mixed], UT3_GAMMA33.field)
    assert resolve(Other(rows), UT3_GAMMA33) == rows
