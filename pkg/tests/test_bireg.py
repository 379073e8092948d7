import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from wreathplane.bireg import (
    Certified, Coords, Evidence, NoFixedPoint, RefutedUpTo, build_fixed_point,
    compose_biregularity, finite_orbit_fixed_coords, infinite_orbit_fixed_coords, is_biregular,
    persistent_fibre, singular_set,
)
from wreathplane.finite import element_has_fixed_point
from wreathplane.orbits import iterate, orbit_walk
from wreathplane.projgeo import ProjMap, ProjPoint
from wreathplane.resprod import Ambient, BasedSpace, Config, Perm, WreathElement, act, invert

F = Fraction
P = lambda *c: ProjPoint([F(x) for x in c])
SWAP = Perm((1, 0))
X2 = BasedSpace(("a", "b"), "a", (SWAP,))
S3 = BasedSpace(("a", "b", "c"), "a", (Perm((1, 2, 0)), Perm((1, 0, 2))))
QQ = Ambient.rational()
U = ProjMap([[1, 1, 0], [0, 1, 0], [0, 0, 1]])
D421 = ProjMap.diag(4, 2, 1)
I3 = ProjMap.identity()
BASE = Config.basepoint(X2, QQ)


def elem(h, cof, space=X2, amb=QQ):
    return WreathElement(space, amb, h, cof)


def test_is_biregular_examples():
    q = P(1, 1, 0)
    f = elem(I3, {q: SWAP})
    assert not is_biregular(f, q, BASE)
    for p in (P(1, 0, 0), P(0, 1, 0), P(3, 1, 7)):
        assert is_biregular(f, p, BASE)
    g = elem(U, {q: SWAP, U(q): SWAP})
    z = build_fixed_point(g)
    assert z == Config(X2, QQ, {q: 1})
    for p in (q, U(q), P(0, 1, 1), P(1, 0, 0)):
        assert is_biregular(g, p, z)


def test_singular_set_examples():
    q = P(1, 1, 0)
    f = elem(I3, {q: SWAP})
    assert singular_set(f, BASE).singular_points == {q}
    assert len(singular_set(f, Config(X2, QQ, {q: 1}))) == 1
    g = elem(ProjMap.identity(), {})
    assert len(singular_set(g, BASE)) == 0


def _random_element(rng, space=S3):
    h = rng.choice([U, D421, ProjMap([[0, 0, 1], [1, 0, 0], [0, 1, 0]]), I3])
    pts = [P(1, 0, 0), P(0, 1, 0), P(1, 1, 0), P(1, 1, 1), P(0, 1, 1), P(2, 1, 1)]
    group = sorted(space.group)
    return elem(h, {rng.choice(pts): rng.choice(group) for _ in range(rng.randint(0, 3))}, space)


def test_singular_set_symmetric_under_inverse():
    rng = random.Random(1)
    for _ in range(50):
        f = _random_element(rng)
        z = Config(S3, QQ, {P(1, 1, 0): rng.randrange(3)})
        assert singular_set(f, z).singular_points == singular_set(invert(f), z).singular_points


def test_compose_biregularity_brute_force():
    rng = random.Random(2)
    pts = [P(1, 0, 0), P(0, 1, 0), P(1, 1, 0), P(1, 1, 1), P(5, 1, 2)]
    seen = 0
    for _ in range(100):
        f1, f2 = _random_element(rng), _random_element(rng)
        z = Config(S3, QQ, {rng.choice(pts): rng.randrange(3)})
        p = rng.choice(pts)
        e1 = Evidence.of(f1, p, z)
        e2 = Evidence.of(f2, f1.h(p), z)
        comp = compose_biregularity(e1, e2)
        if e1.biregular and e2.biregular:
            seen += 1
            assert comp.biregular and is_biregular(f2 * f1, p, z)
        if e1.biregular:
            assert is_biregular(invert(f1), f1.h(p), z)
    assert seen > 20
    ident = WreathElement.identity(S3, QQ)
    assert all(is_biregular(ident, p, Config(S3, QQ, {p: 2})) for p in pts)


def test_persistent_fibre_examples():
    shift = elem(U, {P(1, 1, 0): SWAP})
    res = persistent_fibre(shift, P(0, 1, 0), BASE)
    assert isinstance(res, Certified) and res.l == 1
    z = build_fixed_point(elem(U, {P(1, 1, 0): SWAP, P(2, 1, 0): SWAP}))
    f = elem(U, {P(1, 1, 0): SWAP, P(2, 1, 0): SWAP})
    for p in (P(0, 1, 0), P(1, 1, 0), P(1, 0, 0)):
        assert isinstance(persistent_fibre(f, p, z), RefutedUpTo)
    with pytest.raises(ValueError):
        persistent_fibre(shift, P(0, 1, 0), BASE, horizon=0)


def test_persistent_fibre_on_finite_orbit():
    rot = ProjMap([[0, -1, 0], [1, 0, 0], [0, 0, 1]])
    f = elem(rot, {P(1, 0, 1): SWAP})  # first-return element is the swap
    assert isinstance(persistent_fibre(f, P(1, 0, 1), BASE), RefutedUpTo)


def test_infinite_orbit_coords_examples():
    start = P(0, 1, 0)
    walk = orbit_walk(U, start)
    q1, q2 = iterate(U, start, 1), iterate(U, start, 2)
    assert infinite_orbit_fixed_coords(elem(U, {}), start, walk) == Coords({})
    two = infinite_orbit_fixed_coords(elem(U, {q1: SWAP, q2: SWAP}), start, walk)
    assert two == Coords({q1: 1})
    one = infinite_orbit_fixed_coords(elem(U, {q1: SWAP}), start, walk)
    assert isinstance(one, NoFixedPoint)


def test_finite_orbit_coords_examples():
    rot2 = ProjMap([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
    orbit = [P(1, 0, 1), P(0, 1, 1)]
    assert finite_orbit_fixed_coords(elem(rot2, {}), orbit) == Coords({})
    c3 = Perm((1, 2, 0))
    t = elem(rot2, {orbit[0]: c3, orbit[1]: c3.inverse()}, S3)
    res = finite_orbit_fixed_coords(t, orbit)
    assert res == Coords({orbit[1]: c3.inverse()(0)})
    z = Config(S3, QQ, res.values)
    assert act(t, z) == z
    fp = P(0, 0, 1)
    assert isinstance(finite_orbit_fixed_coords(elem(rot2, {fp: SWAP}), [fp]), NoFixedPoint)


def test_build_fixed_point_examples():
    assert build_fixed_point(WreathElement.identity(X2, QQ)) == BASE
    # eigenpoints are fixed: each becomes a one-point cycle
    t = elem(D421, {P(1, 0, 0): SWAP, P(0, 0, 1): SWAP})
    assert isinstance(build_fixed_point(t), NoFixedPoint)
    t = elem(D421, {P(1, 1, 1): SWAP, P(4, 2, 1): SWAP})
    z = build_fixed_point(t)
    assert z == Config(X2, QQ, {P(4, 2, 1): 1}) or act(t, z) == z
    assert isinstance(build_fixed_point(elem(D421, {P(1, 1, 1): SWAP})), NoFixedPoint)


GF3 = Ambient.gf(3)
GF3_PTS = GF3.points()
gf3_maps = st.sampled_from([
    GF3.coerce_map(ProjMap(m)) for m in (
        [[1, 1, 0], [0, 1, 0], [0, 0, 1]], [[0, 0, 1], [1, 0, 0], [0, 1, 0]],
        [[2, 0, 0], [0, 1, 0], [0, 0, 1]], [[1, 1, 0], [0, 1, 1], [0, 0, 1]], [[1, 0, 0], [0, 1, 0], [0, 0, 1]])])


@given(gf3_maps, st.lists(st.tuples(st.sampled_from(GF3_PTS), st.sampled_from(sorted(S3.group))),
                          max_size=4))
def test_build_fixed_point_agrees_with_exhaustion(h, cof):
    t = WreathElement(S3, GF3, h, dict(cof))
    res = build_fixed_point(t)
    if isinstance(res, Config):
        assert act(t, res) == res
    else:
        assert isinstance(res, NoFixedPoint)
    assert isinstance(res, Config) == element_has_fixed_point(t, GF3_PTS)
