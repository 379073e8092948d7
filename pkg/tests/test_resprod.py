from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from wreathplane.projgeo import ProjMap, ProjPoint
from wreathplane.resprod import (
    Ambient, BasedSpace, Config, Perm, WreathElement, act, extend_config, extend_element, invert,
    multiply, point_stabilizer_projection, projection_to_H,
)

F = Fraction
P = lambda *c: ProjPoint([F(x) for x in c])
SWAP = Perm((1, 0, 2))
CYC = Perm((1, 2, 0))
S3 = BasedSpace(("a", "b", "c"), "a", (CYC, SWAP))
QQ = Ambient.rational()
GF2, GF4 = Ambient.gf(2), Ambient.gf(4)
U = ProjMap([[1, 1, 0], [0, 1, 0], [0, 0, 1]])


def test_based_space_group():
    assert len(S3.group) == 6
    assert len(BasedSpace(("a", "b"), "a").group) == 1
    assert S3.parse_perm("(a b c)") == CYC
    assert S3.format_perm(SWAP) == "(a b)"
    with pytest.raises(ValueError):
        BasedSpace(("a", "b"), "z")


def test_act_examples():
    x = Config(S3, QQ, {P(1, 2, 3): 1})
    assert act(WreathElement.identity(S3, QQ), x) == x
    moved = act(WreathElement.pure(S3, QQ, U), x)
    assert moved.support == {U(P(1, 2, 3))} and moved[U(P(1, 2, 3))] == 1
    q = P(1, 1, 0)
    s = WreathElement(S3, QQ, ProjMap.identity(), {q: SWAP})
    out = act(s, Config.basepoint(S3, QQ))
    assert out.support == {q} and out[q] == SWAP(S3.x0)


def test_multiply_examples():
    w = WreathElement(S3, QQ, U, {P(0, 1, 0): CYC})
    assert w * WreathElement.identity(S3, QQ) == w
    a = WreathElement(S3, QQ, ProjMap.identity(), {P(1, 0, 0): CYC, P(0, 1, 0): SWAP})
    b = WreathElement(S3, QQ, ProjMap.identity(), {P(1, 0, 0): SWAP})
    ab = a * b
    assert ab.g(P(1, 0, 0)) == CYC * SWAP and ab.g(P(0, 1, 0)) == SWAP
    assert (w * invert(w)).is_identity()


def test_projection_and_stabilizer():
    w = WreathElement(S3, QQ, ProjMap.identity(), {P(1, 0, 0): CYC})
    assert projection_to_H(w).is_identity()
    w = WreathElement(S3, QQ, U, {P(1, 0, 0): CYC})
    assert point_stabilizer_projection([w], P(1, 0, 0)) == [CYC]
    with pytest.raises(ValueError):
        point_stabilizer_projection([w], P(0, 1, 0))


def test_extend_config_examples():
    assert extend_config(Config.basepoint(S3, GF2), GF4) == Config.basepoint(S3, GF4)
    p = GF2.coerce_point(P(1, 1, 0))
    x = extend_config(Config(S3, GF2, {p: 2}), GF4)
    assert len(x.support) == 1 and x[GF4.coerce_point(P(1, 1, 0))] == 2


def test_cofactor_outside_g0_rejected():
    space = BasedSpace(("a", "b", "c"), "a", (Perm((1, 0, 2)),))
    with pytest.raises(ValueError):
        WreathElement(space, QQ, U, {P(1, 0, 0): CYC})


# -- hypothesis: group axioms and action compatibility --------------------

small = st.integers(-2, 2).map(Fraction)
pt = st.tuples(small, small, small).filter(any).map(ProjPoint)
perm = st.sampled_from(sorted(S3.group))
unipotents = st.tuples(small, small, small).map(
    lambda t: ProjMap([[1, t[0], t[1]], [0, 1, t[2]], [0, 0, 1]]))
diagonals = st.tuples(st.sampled_from([1, 2, -1, F(1, 2)]), st.sampled_from([1, 3, -1])).map(
    lambda t: ProjMap.diag(t[0], t[1], 1))
maps = st.one_of(unipotents, diagonals, st.just(ProjMap([[0, 0, 1], [1, 0, 0], [0, 1, 0]])))
elements = st.builds(lambda h, cof: WreathElement(S3, QQ, h, dict(cof)),
                     maps, st.lists(st.tuples(pt, perm), max_size=3))
configs = st.builds(lambda vals: Config(S3, QQ, dict(vals)),
                    st.lists(st.tuples(pt, st.integers(0, 2)), max_size=3))


@given(elements, elements, elements)
def test_associativity(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(elements, configs)
def test_inverse_and_identity(w, x):
    e = WreathElement.identity(S3, QQ)
    assert w * e == w == e * w
    assert (w * invert(w)).is_identity() and (invert(w) * w).is_identity()
    assert act(w * invert(w), x) == x


@given(elements, elements, configs)
def test_action_compatibility(a, b, x):
    assert act(a * b, x) == act(a, act(b, x))


@given(elements, elements)
def test_projection_is_multiplicative(a, b):
    assert projection_to_H(a * b) == projection_to_H(a) @ projection_to_H(b)


@given(st.lists(st.tuples(st.sampled_from([(0, 1, 0), (1, 1, 0), (1, 0, 1)]), perm), max_size=3),
       st.lists(st.tuples(st.sampled_from([(1, 0, 0), (0, 1, 1)]), st.integers(0, 2)), max_size=2))
def test_extension_is_equivariant(cof, vals):
    h = GF2.coerce_map(U)
    w = WreathElement(S3, GF2, h, {GF2.coerce_point(P(*p)): g for p, g in cof})
    x = Config(S3, GF2, {GF2.coerce_point(P(*p)): v for p, v in vals})
    assert extend_config(act(w, x), GF4) == act(extend_element(w, GF4), extend_config(x, GF4))
