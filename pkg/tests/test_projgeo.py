from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from wreathplane.projgeo import (
    ChordalContext, DegenerateInput, ProjLine, ProjMap, ProjPoint, apply, chordal_distance,
    distance_to_line, enumerate_points, format_matrix, format_point, intersect_lines,
    line_point_incidence, lines_through, parse_matrix, parse_point, points_on_line, span_line,
)
from wreathplane.scalar import CertifiedReal, FiniteField, Place

REAL = ChordalContext(Place.real())
coord = st.integers(-6, 6).map(Fraction)
points = st.tuples(coord, coord, coord).filter(any).map(ProjPoint)
P = lambda *c: ProjPoint([Fraction(x) for x in c])


def test_apply_examples():
    assert apply(ProjMap.identity(), P(1, 2, 1)) == P(1, 2, 1)
    assert apply(ProjMap.diag(4, 2, 1), P(1, 1, 1)) == P(1, Fraction(1, 2), Fraction(1, 4))
    u = ProjMap([[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    assert apply(u, P(0, 1, 0)) == P(1, 1, 0)


def test_chordal_examples():
    e1, e2 = P(1, 0, 0), P(0, 1, 0)
    assert chordal_distance(e1, e1, REAL) == 0
    assert chordal_distance(e1, e2, REAL) == 1
    assert chordal_distance(e1, P(1, 1, 0), REAL) == CertifiedReal(Fraction(1, 2))
    for q in (2, 3, 5):
        assert chordal_distance(e1, P(q, 1, 0), ChordalContext(Place.padic(q))) == 1


def test_distance_to_line_examples():
    z0 = ProjLine([0, 0, 1])
    assert distance_to_line(P(0, 1, 0), z0, REAL) == 0
    assert distance_to_line(P(0, 0, 1), z0, REAL) == 1
    assert distance_to_line(P(1, 0, 1), z0, REAL) == CertifiedReal(Fraction(1, 2))


def test_incidence_examples():
    assert span_line(P(1, 0, 0), P(0, 1, 0)) == ProjLine([0, 0, 1])
    assert intersect_lines(ProjLine([0, 0, 1]), ProjLine([0, 1, 0])) == P(1, 0, 0)
    assert line_point_incidence(ProjLine([0, 0, 1]), P(1, 1, 0))
    with pytest.raises(DegenerateInput):
        span_line(P(1, 0, 0), P(2, 0, 0))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_enumeration_counts(p):
    F = FiniteField(p)
    pts = enumerate_points(F)
    assert len(pts) == p * p + p + 1 == len(set(pts))
    u = pts[0]
    pencil = lines_through(u, F)
    assert len(pencil) == p + 1
    # the pencil through u covers every other point exactly once
    covered = [x for l in pencil for x in points_on_line(l, F) if x != u]
    assert sorted(covered) == sorted(x for x in pts if x != u)


def test_projective_normalization():
    assert P(2, 4, 6) == P(1, 2, 3) == P(-1, -2, -3)
    assert ProjMap.diag(2, 2, 2).is_identity()
    with pytest.raises(ValueError):
        ProjMap([[1, 0, 0], [0, 0, 0], [0, 0, 1]])


def test_literal_round_trip():
    m = parse_matrix("[[1,2,0],[0,1/2,0],[0,0,1]]")
    assert parse_matrix(format_matrix(m)) == m
    x = parse_point("[1:-2:3/4]")
    assert parse_point(format_point(x)) == x


# -- metric invariants (also exercised at scale by the metric suite) ------

@given(points, points)
def test_chordal_symmetric_and_bounded(x, y):
    for ctx in (REAL, ChordalContext(Place.padic(2)), ChordalContext(Place.padic(3))):
        d = chordal_distance(x, y, ctx)
        assert d == chordal_distance(y, x, ctx)
        assert d <= 1
        assert (d == 0) == (x == y)


@given(points, points, points)
def test_chordal_triangle(x, y, z):
    assert chordal_distance(x, z, REAL).le_sum(chordal_distance(x, y, REAL),
                                               chordal_distance(y, z, REAL))
    c = ChordalContext(Place.padic(2))
    assert chordal_distance(x, z, c) <= max(chordal_distance(x, y, c), chordal_distance(y, z, c))


@given(points, points)
def test_span_contains_both_points(x, y):
    if x == y:
        return
    l = span_line(x, y)
    assert l.contains(x) and l.contains(y)


@given(st.lists(coord, min_size=9, max_size=9), points)
def test_apply_is_a_group_action(entries, x):
    rows = [entries[0:3], entries[3:6], entries[6:9]]
    try:
        m = ProjMap(rows)
    except ValueError:
        return
    assert m.inverse()(m(x)) == x
    assert (m @ m)(x) == m(m(x))
