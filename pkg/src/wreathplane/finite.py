"""Exact fixed-point solving for finitely indexed wreath actions.

A generator is a bijection sigma of a finite index set together with
cofactors; it acts by (g x)_{sigma(i)} = g_{sigma(i)} x_i.  A common fixed
point is found orbit by orbit: the value at one index of a <sigma>-orbit
determines all others, so trying each value of X0 is exhaustive.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Optional, Sequence

from .resprod import (
    CLOSURE_CAP, ClosureCapExceeded, Config, Perm, WreathElement, invert, multiply,
)
from .words import Word, generator


@dataclass(frozen=True)
class FiniteGen:
    """sigma as a dict index -> index, cofactor as dict index -> Perm
    (identity where missing)."""

    sigma: dict
    cofactor: dict


def solve_fixed_point(indices: Sequence[Hashable], gens: Sequence[FiniteGen], x0: int,
                      size: int, identity: Perm) -> Optional[dict]:
    """A map index -> X0 fixed by every generator (values preferring x0 per
    orbit), or None if no fixed point exists."""
    adj: dict = {i: [] for i in indices}
    for gen in gens:
        for i in indices:
            j = gen.sigma[i]
            g = gen.cofactor.get(j, identity)
            adj[i].append((j, g))             # z_j = g(z_i)
            adj[j].append((i, g.inverse()))   # z_i = g^-1(z_j)
    values: dict = {}
    for root in indices:
        if root in values:
            continue
        order = [x0] + [v for v in range(size) if v != x0]
        for v in order:
            trial = {root: v}
            queue = deque([root])
            ok = True
            while queue and ok:
                i = queue.popleft()
                for j, g in adj[i]:
                    want = g(trial[i])
                    if j in trial:
                        if trial[j] != want:
                            ok = False
                            break
                    else:
                        trial[j] = want
                        queue.append(j)
            if ok:
                values.update(trial)
                break
        else:
            return None
    return values


def wreath_to_finite(w: WreathElement, points: Sequence) -> FiniteGen:
    return FiniteGen({p: w.h(p) for p in points}, dict(w.items()))


def brute_force_fixed_point_elements(ws: Sequence[WreathElement], points: Sequence
                                     ) -> Optional[Config]:
    if not ws:
        raise ValueError("need the based space; pass at least one element")
    space, ambient = ws[0].space, ws[0].ambient
    sol = solve_fixed_point(points, [wreath_to_finite(w, points) for w in ws],
                            space.x0, space.size, space.identity())
    if sol is None:
        return None
    return Config(space, ambient, sol)


def element_has_fixed_point(w: WreathElement, points: Sequence) -> bool:
    return brute_force_fixed_point_elements([w], points) is not None


def closure(gens: Sequence[WreathElement], cap: int = CLOSURE_CAP) -> dict:
    """Every element of <gens> mapped to a shortest word (BFS in the
    generator order, inverses included)."""
    if not gens:
        return {}
    ident = multiply(gens[0], invert(gens[0]))
    words = {ident: Word()}
    gen_list = []
    for i, g in enumerate(gens):
        gen_list.append((generator(i), g))
        gen_list.append((generator(i).inverse(), invert(g)))
    frontier = [ident]
    while frontier:
        nxt = []
        for e in frontier:
            for wd, g in gen_list:
                prod = multiply(e, g)
                if prod not in words:
                    words[prod] = words[e] * wd
                    nxt.append(prod)
                    if len(words) > cap:
                        raise ClosureCapExceeded(f"generated subgroup exceeds {cap} elements")
        frontier = nxt
    return words


# ---------------------------------------------------------------------------
# compact encoding for closure enumeration
# ---------------------------------------------------------------------------
# An element over an enumerated plane is (sigma, cof): sigma[i] is the index
# of h(p_i) and cof[k] the image tuple of g at p_k.

def encode(w: WreathElement, points: Sequence, index: Optional[dict] = None) -> tuple:
    index = index or {p: i for i, p in enumerate(points)}
    return (tuple(index[w.h(p)] for p in points), tuple(w.g(p).images for p in points))


def _compose(a: tuple, b: tuple) -> tuple:
    return tuple(a[x] for x in b)


def code_multiply(a: tuple, b: tuple) -> tuple:
    """(a b): sigma_a sigma_b, cofactor g_a[k] after g_b[sigma_a^-1 k]."""
    sa, ga = a
    sb, gb = b
    n = len(sa)
    inv_a = [0] * n
    for i, j in enumerate(sa):
        inv_a[j] = i
    sigma = tuple(sa[sb[i]] for i in range(n))
    cof = tuple(_compose(ga[k], gb[inv_a[k]]) for k in range(n))
    return sigma, cof


def code_has_fixed_point(code: tuple) -> bool:
    """Each sigma-cycle needs a fixed point of its first-return cofactor."""
    sigma, cof = code
    seen = [False] * len(sigma)
    for i0 in range(len(sigma)):
        if seen[i0]:
            continue
        r = tuple(range(len(cof[i0])))
        i = i0
        while True:
            seen[i] = True
            i = sigma[i]
            r = _compose(cof[i], r)
            if i == i0:
                break
        if not any(r[x] == x for x in range(len(r))):
            return False
    return True


def iter_closure_codes(gens: Sequence[WreathElement], points: Sequence, cap: int = CLOSURE_CAP):
    """Yield (encoded element, shortest word) for <gens> in BFS order
    (inverses included, generator order); raise ClosureCapExceeded once more
    than ``cap`` elements have been produced."""
    if not gens:
        return
    index = {p: i for i, p in enumerate(points)}
    gen_list = []
    for i, g in enumerate(gens):
        gen_list.append((generator(i), encode(g, points, index)))
        gen_list.append((generator(i).inverse(), encode(invert(g), points, index)))
    n = len(points)
    size = gens[0].space.size
    ident = (tuple(range(n)), tuple(tuple(range(size)) for _ in range(n)))
    words = {ident: Word()}
    yield ident, Word()
    frontier = [ident]
    while frontier:
        nxt = []
        for e in frontier:
            for wd, g in gen_list:
                prod = code_multiply(e, g)
                if prod not in words:
                    if len(words) >= cap:
                        raise ClosureCapExceeded(f"generated subgroup exceeds {cap} elements")
                    words[prod] = words[e] * wd
                    nxt.append(prod)
                    yield prod, words[prod]
        frontier = nxt


def closure_codes(gens: Sequence[WreathElement], points: Sequence, cap: int = CLOSURE_CAP
                  ) -> dict:
    """Encoded elements of <gens> mapped to a shortest word."""
    return dict(iter_closure_codes(gens, points, cap))
