import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from wreathplane import linalg
from wreathplane.projgeo import ChordalContext, ProjLine, ProjMap, ProjPoint, chordal_distance
from wreathplane.scalar import Place, QuadExt
from wreathplane.spectral import (
    UNRESOLVED, AffineMap, Answer, Proximality, affine_chart_reduction,
    all_eigenvalues_roots_of_unity, classify_proximality, common_eigenvector,
    common_invariant_line, sl2_hyperbolic_witness, spectrum,
)

F = Fraction
P = lambda *c: ProjPoint([F(x) for x in c])
D421 = ProjMap.diag(4, 2, 1)
CYCLE = ProjMap([[0, 0, 1], [1, 0, 0], [0, 1, 0]])


def test_spectrum_examples():
    rep = spectrum(D421)
    assert rep.resolved_fully
    # eigenvalues of the normalized representative: {4, 2, 1} up to one scalar
    vals = sorted(v for v, _ in rep.eigenvalues)
    assert [v / vals[0] for v in vals] == [1, 2, 4]
    assert all(k == 1 for _, k in rep.eigenvalues)
    ident = spectrum(ProjMap.identity())
    assert ident.eigenvalues == ((1, 3),)
    comp = spectrum(ProjMap([[0, 0, 1], [1, 0, 1], [0, 1, 1]]))  # x^3 - x^2 - x - 1
    assert not comp.resolved_fully
    assert any(v is UNRESOLVED for v, _ in comp.eigenvalues)


def test_quadratic_eigenvalues_resolve():
    # x^2 - 2 splits over Q(sqrt 2)
    rep = spectrum(ProjMap([[0, 2, 0], [1, 0, 0], [0, 0, 1]]))
    vals = {v for v, _ in rep.resolved()}
    r2 = [v for v in vals if isinstance(v, QuadExt)]
    assert len(r2) == 2 and r2[0] == -r2[1] and r2[0] * r2[0] == 2 * (vals - set(r2)).pop() ** 2


def test_proximality_examples():
    r = classify_proximality(ProjMap.diag(2, 1, 1), Place.real())
    assert r.kind is Proximality.PROXIMAL
    r = classify_proximality(D421, Place.real())
    assert r.kind is Proximality.VERY_PROXIMAL
    a = r.attractor
    assert (a.p_plus, a.p_minus, a.p_mid) == (P(1, 0, 0), P(0, 0, 1), P(0, 1, 0))
    # P_- is the attracting eigenline complement: it contains p_mid and p_minus
    assert a.P_minus.contains(a.p_mid) and a.P_minus.contains(a.p_minus)
    assert a.P_plus.contains(a.p_mid) and a.P_plus.contains(a.p_plus)
    r = classify_proximality(D421, Place.padic(2))
    assert r.kind is Proximality.VERY_PROXIMAL
    assert (r.attractor.p_plus, r.attractor.p_minus) == (P(0, 0, 1), P(1, 0, 0))
    assert classify_proximality(ProjMap.identity(), Place.real()).kind is Proximality.NOT_PROXIMAL


def test_roots_of_unity_examples():
    assert all_eigenvalues_roots_of_unity(ProjMap.identity()).answer is Answer.YES
    block = ProjMap([[0, -1, 0], [1, -1, 0], [0, 0, 1]])  # x^2 + x + 1 with 1
    assert all_eigenvalues_roots_of_unity(block).answer is Answer.YES
    assert all_eigenvalues_roots_of_unity(ProjMap.diag(2, 1, F(1, 2))).answer is Answer.NO
    res = all_eigenvalues_roots_of_unity(CYCLE)
    assert res.answer is Answer.YES and res.order == 3


def test_common_eigenvector_examples():
    u1 = ProjMap([[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    u2 = ProjMap([[2, 3, 5], [0, 1, 7], [0, 0, 3]])
    assert common_eigenvector([u1, u2]).point == P(1, 0, 0)
    assert common_eigenvector([D421, CYCLE]).point is None
    assert common_eigenvector([D421]).point == P(1, 0, 0)


def test_affine_chart_examples():
    z0 = ProjLine([0, 0, 1])
    (aff,) = affine_chart_reduction([ProjMap.identity()], z0)
    assert aff.linear == ((1, 0), (0, 1)) and aff.translation == (0, 0)
    (aff,) = affine_chart_reduction([ProjMap([[2, 0, 1], [0, 2, 0], [0, 0, 1]])], z0)
    assert aff.linear == ((2, 0), (0, 2)) and aff.translation == (1, 0)


def test_affine_chart_is_multiplicative():
    rng = random.Random(3)
    line = ProjLine([0, 0, 1])
    for _ in range(30):
        mats = []
        while len(mats) < 2:
            m = [[F(rng.randint(-3, 3)) for _ in range(3)] for _ in range(2)] + \
                [[F(0), F(0), F(rng.choice([1, 2, -1]))]]
            if linalg.det(m) != 0:
                mats.append(ProjMap(m))
        g, h = mats
        ag, ah, agh = affine_chart_reduction([g, h, g @ h], line)
        assert (ag @ ah) == agh


def test_sl2_examples():
    w = sl2_hyperbolic_witness([((F(2), F(0)), (F(0), F(1, 2)))], 4)
    assert len(w.word) == 1 and w.eigenvalue == 2
    rot = ((F(0), F(-1)), (F(1), F(0)))
    assert sl2_hyperbolic_witness([rot], 4) is None
    a = ((F(1), F(1)), (F(0), F(1)))
    b = ((F(1), F(0)), (F(1), F(1)))
    w = sl2_hyperbolic_witness([a, b], 4)
    assert w is not None


coef = st.integers(-4, 4).map(Fraction)


@given(st.lists(coef, min_size=9, max_size=9))
def test_eigenvalues_are_roots_of_char_poly(entries):
    rows = [entries[0:3], entries[3:6], entries[6:9]]
    if linalg.det(rows) == 0:
        return
    m = ProjMap(rows)
    rep = spectrum(m)
    assert sum(k for _, k in rep.eigenvalues) == 3
    for v, _ in rep.resolved():
        shifted = [[m.matrix[i][j] - (v if i == j else 0) for j in range(3)] for i in range(3)]
        assert linalg.det(shifted) == 0


@given(st.lists(coef, min_size=9, max_size=9))
def test_very_proximal_points_are_attracting(entries):
    rows = [entries[0:3], entries[3:6], entries[6:9]]
    if linalg.det(rows) == 0:
        return
    m = ProjMap(rows)
    r = classify_proximality(m, Place.real())
    if r.kind is not Proximality.VERY_PROXIMAL:
        return
    a = r.attractor
    assert m(a.p_plus) == a.p_plus and m(a.p_minus) == a.p_minus
    assert m.apply_line(a.P_minus) == a.P_minus and m.apply_line(a.P_plus) == a.P_plus
    assert not a.P_minus.contains(a.p_plus) and not a.P_plus.contains(a.p_minus)


@given(st.lists(coef, min_size=6, max_size=6))
def test_invariant_line_is_invariant(entries):
    m = [entries[0:3], entries[3:6], [F(0), F(0), F(1)]]
    if linalg.det(m) == 0:
        return
    l = common_invariant_line([ProjMap(m)])
    assert l is not None and ProjMap(m).apply_line(l) == l
