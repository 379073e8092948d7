from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from wreathplane.orbits import (
    PERIOD_BOUND_RATIONAL, OrbitUnresolved, iterate, locate_on_orbit, orbit_index, orbit_walk,
    period_bound,
)
from wreathplane.projgeo import ProjMap, ProjPoint
from wreathplane.resprod import Ambient
from wreathplane.scalar import QuadExt
from wreathplane.words import Word, commutator, enumerate_words, evaluate, generator

F = Fraction
P = lambda *c: ProjPoint([F(x) for x in c])
D421 = ProjMap.diag(4, 2, 1)
U = ProjMap([[1, 1, 0], [0, 1, 0], [0, 0, 1]])
ROT = ProjMap([[0, -1, 0], [1, 0, 0], [0, 0, 1]])


def test_word_enumeration_counts():
    # reduced words of length n in a free group of rank k: 2k (2k-1)^(n-1)
    for k, n in ((1, 3), (2, 3)):
        words = list(enumerate_words(k, n))
        for length in range(1, n + 1):
            assert sum(len(w) == length for w in words) == 2 * k * (2 * k - 1) ** (length - 1)
    names = ["t", "f"]
    w = Word.parse("t*f^-1*t", names)
    assert w.format(names) == "t*f^-1*t" and Word.parse("1", names) == Word()
    assert commutator(generator(0), generator(1)).format(names) == "t*f*t^-1*f^-1"


def test_evaluate_matches_matrix_products():
    w = Word.parse("a*b^-1*a", ["a", "b"])
    got = evaluate(w, [D421, U], lambda x, y: x @ y, lambda x: x.inverse(), ProjMap.identity())
    assert got == D421 @ U.inverse() @ D421


def test_walk_status():
    walk = orbit_walk(ROT, P(1, 0, 1))
    assert walk.period == 4 and walk.status == "Periodic(4)"
    walk = orbit_walk(D421, P(1, 1, 1), max_steps=5)
    assert walk.is_infinite and walk.certified_steps == PERIOD_BOUND_RATIONAL
    assert len(walk.points) == 6
    assert period_bound(Ambient.gf(3).coerce_map(U)) is None
    assert period_bound(ProjMap([[QuadExt.sqrt(2), 0, 0], [0, 1, 0], [0, 0, 1]])) == 546


def test_walk_over_finite_field_closes():
    amb = Ambient.gf(5)
    h = amb.coerce_map(ProjMap([[1, 1, 0], [0, 1, 1], [0, 0, 1]]))
    for p in amb.points()[:10]:
        walk = orbit_walk(h, p)
        assert walk.period is not None and iterate(h, p, walk.period) == p


def test_orbit_index_examples():
    p = P(1, 1, 1)
    assert orbit_index(D421, p, iterate(D421, p, 7)) == 7
    assert orbit_index(D421, p, iterate(D421, p, -3)) == -3
    assert orbit_index(D421, p, P(1, 2, 1)) is None
    assert orbit_index(U, P(0, 1, 1), iterate(U, P(0, 1, 1), 12)) == 12
    with pytest.raises(OrbitUnresolved):
        orbit_index(ProjMap([[0, 0, 1], [1, 0, 1], [0, 1, 1]]), P(1, 0, 0), P(0, 1, 0))


def test_locate_on_orbit():
    p = P(1, 1, 1)
    pts = {iterate(D421, p, 2), iterate(D421, p, -1), P(3, 1, 1)}
    assert locate_on_orbit(D421, p, pts) == {iterate(D421, p, 2): 2, iterate(D421, p, -1): -1}


@given(st.integers(-40, 40), st.integers(-3, 3), st.integers(-3, 3), st.integers(1, 3))
def test_discrete_log_recovers_exponent(n, a, b, c):
    p = P(a, b, c)
    for h in (D421, U, ProjMap([[2, 1, 0], [0, 2, 0], [0, 0, 1]]), ProjMap.diag(3, -1, 1)):
        if orbit_walk(h, p).period is not None:
            continue
        assert orbit_index(h, p, iterate(h, p, n)) == n
