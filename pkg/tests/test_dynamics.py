from fractions import Fraction

import pytest

from wreathplane.bireg import NoFixedPoint, build_fixed_point, persistent_fibre, Certified
from wreathplane.dynamics import (
    AdjustInconclusive, NSDError, adjust_fixed_point, nsd_constant, search_persistent_fibre_word,
)
from wreathplane.orbits import iterate
from wreathplane.projgeo import (
    ChordalContext, ProjMap, ProjPoint, chordal_distance, distance_to_line,
)
from wreathplane.resprod import Ambient, BasedSpace, Config, Perm, WreathElement, act
from wreathplane.scalar import Place
from wreathplane.spectral import classify_proximality

F = Fraction
P = lambda *c: ProjPoint([F(x) for x in c])
QQ = Ambient.rational()
SWAP = Perm((1, 0))
X2 = BasedSpace(("a", "b"), "a", (SWAP,))
S3 = BasedSpace(("a", "b", "c"), "a", (Perm((1, 0, 2)),))
D421 = ProjMap.diag(4, 2, 1)
ATT = classify_proximality(D421, Place.real()).attractor
INVOLUTION = ProjMap([[1, 0, 0], [0, 1, 0], [1, 0, -1]])  # swaps [1:1:1] and [1:1:0]


def test_nsd_real_place():
    eps = F(1, 4)
    res = nsd_constant(D421, Place.real(), eps)
    assert res.ok and 1 <= res.N <= 500
    assert res.forward_samples > 1000 and res.backward_samples > 1000
    # independent re-check of the window on explicit points far from P_-
    ctx = ChordalContext(Place.real())
    checked = 0
    for x in (P(1, 1, 1), P(-3, 7, 2), P(1, 50, 1), P(9, -9, 1)):
        if distance_to_line(x, ATT.P_minus, ctx) < eps:
            continue
        checked += 1
        for n in range(res.N, res.N + 5):
            assert chordal_distance(iterate(D421, x, n), ATT.p_plus, ctx) < eps
    assert checked >= 2


def test_nsd_rejects_bad_epsilon():
    for eps in (F(1), F(2), F(0)):
        with pytest.raises(NSDError):
            nsd_constant(D421, Place.real(), eps)
    with pytest.raises(NSDError):
        nsd_constant(ProjMap.diag(2, 1, 1), Place.real(), F(1, 4))


@pytest.mark.parametrize("q", [2, 3])
def test_nsd_padic(q):
    res = nsd_constant(ProjMap.diag(q * q, q, 1), Place.padic(q), F(1, q))
    assert res.ok and res.N <= 500


def test_template_search_finds_case_one_witness():
    t = WreathElement.pure(X2, QQ, D421)
    r = P(1, 1, 1)
    f = WreathElement(X2, QQ, ProjMap.identity(), {r: SWAP})
    z = Config.basepoint(X2, QQ)
    wit = search_persistent_fibre_word(t, f, r, z, ATT)
    assert wit is not None and wit.template == "t^n f" and wit.case == "1"
    assert not wit.used_symmetry
    assert isinstance(persistent_fibre(wit.element, wit.point, z), Certified)
    assert isinstance(build_fixed_point(wit.element), NoFixedPoint)


def test_template_search_none_when_biregular():
    t = WreathElement.pure(X2, QQ, D421)
    f = WreathElement.identity(X2, QQ)
    z = Config.basepoint(X2, QQ)
    assert search_persistent_fibre_word(t, f, P(1, 1, 1), z, ATT, max_exp=3) is None


def test_template_search_rejects_points_of_E():
    t = WreathElement.pure(X2, QQ, D421)
    f = WreathElement(X2, QQ, ProjMap.identity(), {P(0, 1, 1): SWAP})
    with pytest.raises(ValueError):
        search_persistent_fibre_word(t, f, P(0, 1, 1), Config.basepoint(X2, QQ), ATT)


def test_adjust_no_support_on_E():
    r = P(1, 1, 1)
    f = WreathElement(S3, QQ, ProjMap.identity(), {r: Perm((1, 0, 2))})
    z = Config(S3, QQ, {r: 2})
    t = WreathElement.identity(S3, QQ)
    assert adjust_fixed_point([f], t, ATT, z) == z


def test_adjust_copies_value_into_E():
    r, q = P(1, 1, 1), P(1, 1, 0)
    assert INVOLUTION(r) == q and ATT.in_E(q) and not ATT.in_E(r)
    f = WreathElement(X2, QQ, INVOLUTION, {q: SWAP, r: SWAP})
    t = WreathElement.identity(X2, QQ)
    z = Config.basepoint(X2, QQ)
    z2 = adjust_fixed_point([f], t, ATT, z, word_bound=1)
    assert z2[q] == SWAP(z[r]) and act(f, z2) == z2


def test_adjust_reports_conflicts():
    q = P(1, 1, 0)
    f1 = WreathElement(X2, QQ, INVOLUTION, {q: SWAP})
    f2 = WreathElement.pure(X2, QQ, INVOLUTION)
    t = WreathElement.identity(X2, QQ)
    res = adjust_fixed_point([f1, f2], t, ATT, Config.basepoint(X2, QQ), word_bound=1)
    assert isinstance(res, AdjustInconclusive) and len(res.conflict) == 2
    with pytest.raises(ValueError):
        adjust_fixed_point([f1], WreathElement(X2, QQ, ProjMap.identity(), {q: SWAP}), ATT,
                           Config.basepoint(X2, QQ))
