import itertools
import random

import pytest

from hypothesis import given, strategies as st

from wreathplane.finite import (
    FiniteGen, brute_force_fixed_point_elements, closure, closure_codes, code_has_fixed_point,
    code_multiply, element_has_fixed_point, encode, solve_fixed_point,
)
from wreathplane.projgeo import ProjMap
from wreathplane.resprod import Ambient, ClosureCapExceeded, BasedSpace, Config, Perm, WreathElement, act

SWAP, ID2 = Perm((1, 0)), Perm((0, 1))
X2 = BasedSpace(("a", "b"), "a", (SWAP,))
S3 = BasedSpace(("a", "b", "c"), "a", (Perm((1, 2, 0)), Perm((1, 0, 2))))
GF2 = Ambient.gf(2)
PTS = GF2.points()
MAPS = [GF2.coerce_map(ProjMap(m)) for m in (
    [[1, 0, 0], [0, 1, 0], [0, 0, 1]], [[1, 1, 0], [0, 1, 0], [0, 0, 1]],
    [[0, 0, 1], [1, 0, 0], [0, 1, 0]], [[0, 1, 0], [1, 0, 0], [0, 0, 1]])]


def _exhaustive(ws, space):
    """Oracle: try every configuration of the (finite) restricted product."""
    for vals in itertools.product(range(space.size), repeat=len(PTS)):
        z = Config(space, GF2, dict(zip(PTS, vals)))
        if all(act(w, z) == z for w in ws):
            return z
    return None


def test_solve_on_a_cycle():
    # 3-cycle of indices with cofactors whose product is the swap: no solution
    gens = [FiniteGen({0: 1, 1: 2, 2: 0}, {1: SWAP})]
    assert solve_fixed_point([0, 1, 2], gens, 0, 2, ID2) is None
    gens = [FiniteGen({0: 1, 1: 2, 2: 0}, {1: SWAP, 2: SWAP})]
    sol = solve_fixed_point([0, 1, 2], gens, 0, 2, ID2)
    assert sol == {0: 0, 1: 1, 2: 0}


elements = st.builds(
    lambda h, cof: WreathElement(X2, GF2, h, dict(cof)),
    st.sampled_from(MAPS), st.lists(st.tuples(st.sampled_from(PTS), st.just(SWAP)), max_size=3))


@given(st.lists(elements, min_size=1, max_size=2))
def test_brute_force_matches_exhaustion(ws):
    got = brute_force_fixed_point_elements(ws, PTS)
    oracle = _exhaustive(ws, X2)
    assert (got is None) == (oracle is None)
    if got is not None:
        assert all(act(w, got) == got for w in ws)


@given(elements)
def test_element_fixed_point_matches_exhaustion(w):
    assert element_has_fixed_point(w, PTS) == (_exhaustive([w], X2) is not None)
    assert code_has_fixed_point(encode(w, PTS)) == element_has_fixed_point(w, PTS)


@given(elements, elements)
def test_encoding_is_a_homomorphism(a, b):
    assert code_multiply(encode(a, PTS), encode(b, PTS)) == encode(a * b, PTS)


def test_closure_codes_match_closure():
    rng = random.Random(0)
    for _ in range(10):
        ws = [WreathElement(X2, GF2, rng.choice(MAPS), {rng.choice(PTS): SWAP})
              for _ in range(2)]
        try:
            slow = closure(ws, cap=600)
        except ClosureCapExceeded:
            with pytest.raises(ClosureCapExceeded):
                closure_codes(ws, PTS, cap=600)
            continue
        fast = closure_codes(ws, PTS)
        assert len(slow) == len(fast)
        assert {encode(e, PTS) for e in slow} == set(fast)
        # shortest words agree in length
        assert sorted(len(w) for w in slow.values()) == sorted(len(w) for w in fast.values())
