"""Small exact linear algebra over any field whose elements support
``+ - * /`` and equality (Fraction, QuadExt, FFElem).

Matrices are tuples of row tuples; vectors are tuples.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = tuple  # tuple[tuple[scalar, ...], ...]
Vector = tuple


def zero_like(x):
    return x * 0


def one_like(x):
    return x * 0 + 1


def identity(n: int, one, zero=None) -> Matrix:
    zero = one * 0 if zero is None else zero
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    cols = list(zip(*b))
    return tuple(tuple(_dot(row, col) for col in cols) for row in a)


def matvec(a: Matrix, v: Sequence) -> Vector:
    return tuple(_dot(row, v) for row in a)


def _dot(u, v):
    acc = u[0] * v[0]
    for x, y in zip(u[1:], v[1:]):
        acc = acc + x * y
    return acc


dot = _dot


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def scale(a: Matrix, c) -> Matrix:
    return tuple(tuple(x * c for x in row) for row in a)


def sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def det(a: Matrix):
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    if n == 3:
        return (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))
    raise ValueError("det implemented for n <= 3")


def adjugate(a: Matrix) -> Matrix:
    n = len(a)
    if n == 2:
        return ((a[1][1], -a[0][1]), (-a[1][0], a[0][0]))
    if n == 3:
        cof = [[None] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(3):
                rows = [r for r in range(3) if r != i]
                cols = [c for c in range(3) if c != j]
                minor = (a[rows[0]][cols[0]] * a[rows[1]][cols[1]]
                         - a[rows[0]][cols[1]] * a[rows[1]][cols[0]])
                cof[i][j] = minor if (i + j) % 2 == 0 else -minor
        return tuple(tuple(cof[j][i] for j in range(3)) for i in range(3))
    raise ValueError("adjugate implemented for n in (2, 3)")


def inverse(a: Matrix) -> Matrix:
    d = det(a)
    if d == 0:
        raise ZeroDivisionError("singular matrix")
    return tuple(tuple(x / d for x in row) for row in adjugate(a))


def power(a: Matrix, n: int) -> Matrix:
    if n < 0:
        return power(inverse(a), -n)
    one = one_like(a[0][0])
    result = identity(len(a), one)
    base = a
    while n:
        if n & 1:
            result = matmul(result, base)
        n >>= 1
        if n:
            base = matmul(base, base)
    return result


def cross(u: Sequence, v: Sequence) -> Vector:
    return (u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0])


def _inv(x):
    if isinstance(x, int):
        return Fraction(1, x)
    return 1 / x


def rref(a: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(r) for r in a]
    rows, cols = len(m), len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = _inv(m[r][c])
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(a: Sequence[Sequence]) -> int:
    if not a:
        return 0
    return len(rref(a)[1])


def nullspace(a: Sequence[Sequence], one) -> list[Vector]:
    """Basis of {v : a v = 0}, one vector per free column, in column order."""
    m, pivots = rref(a)
    cols = len(a[0])
    zero = one * 0
    basis = []
    for free in range(cols):
        if free in pivots:
            continue
        v = [zero] * cols
        v[free] = one
        for row, pc in enumerate(pivots):
            v[pc] = -m[row][free]
        basis.append(tuple(v))
    return basis


def span_intersection(basis_u: list, basis_v: list, one) -> list[Vector]:
    """Basis of span(U) ∩ span(V) for lists of vectors."""
    if not basis_u or not basis_v:
        return []
    # solve sum a_i u_i - sum b_j v_j = 0
    n = len(basis_u[0])
    cols = [list(u) for u in basis_u] + [[-x for x in v] for v in basis_v]
    a = [[cols[c][r] for c in range(len(cols))] for r in range(n)]
    out = []
    for sol in nullspace(a, one):
        coeffs = sol[:len(basis_u)]
        vec = tuple(_dot(coeffs, [u[i] for u in basis_u]) for i in range(n))
        out.append(vec)
    # reduce to an independent set
    if not out:
        return []
    m, piv = rref(out)
    return [tuple(r) for r in m[:len(piv)]]


def char_poly(a: Matrix) -> list:
    """Coefficients c_0..c_n (low to high) of det(xI - a); monic."""
    n = len(a)
    one = one_like(a[0][0])
    if n == 2:
        tr = a[0][0] + a[1][1]
        return [det(a), -tr, one]
    if n == 3:
        tr = a[0][0] + a[1][1] + a[2][2]
        m2 = (a[0][0] * a[1][1] - a[0][1] * a[1][0]
              + a[0][0] * a[2][2] - a[0][2] * a[2][0]
              + a[1][1] * a[2][2] - a[1][2] * a[2][1])
        return [-det(a), m2, -tr, one]
    raise ValueError("char_poly implemented for n in (2, 3)")


def is_scalar_matrix(a: Matrix) -> bool:
    n = len(a)
    return all(a[i][j] == 0 for i in range(n) for j in range(n) if i != j) and \
        all(a[i][i] == a[0][0] for i in range(n))
