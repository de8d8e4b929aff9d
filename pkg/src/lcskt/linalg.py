"""Exact dense linear algebra over any field whose elements support
``+ - * /`` and comparison with ``0`` (Fraction, Scalar, QSqrt2)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list  # list of rows


class SingularMatrix(ValueError):
    pass


def _inv(x):
    if isinstance(x, int):
        return Fraction(1, x)
    if hasattr(x, "inverse"):
        return x.inverse()
    return 1 / x


def zeros(rows: int, cols: int, zero=0) -> Matrix:
    return [[zero] * cols for _ in range(rows)]


def identity(n: int, one=1, zero=0) -> Matrix:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def transpose(m: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*m)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = transpose(b)
    out = []
    for row in a:
        out_row = []
        for col in bt:
            acc = 0
            for x, y in zip(row, col):
                if x != 0 and y != 0:
                    acc = acc + x * y
            out_row.append(acc)
        out.append(out_row)
    return out


def matvec(m: Sequence[Sequence], v: Sequence) -> list:
    out = []
    for row in m:
        acc = 0
        for x, y in zip(row, v):
            if x != 0 and y != 0:
                acc = acc + x * y
        out.append(acc)
    return out


def madd(a, b) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def msub(a, b) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mscale(c, a) -> Matrix:
    return [[c * x for x in row] for row in a]


def is_zero_matrix(m) -> bool:
    return all(x == 0 for row in m for x in row)


def rref(m: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    a = [list(row) for row in m]
    if not a:
        return a, []
    n_rows, n_cols = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        p = next((i for i in range(r, n_rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = _inv(a[r][c])
        a[r] = [x * inv for x in a[r]]
        for i in range(n_rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m) -> int:
    return len(rref(m)[1]) if m else 0


def nullspace(m: Sequence[Sequence], n_cols: int | None = None) -> list[list]:
    """Basis of ``{x : m x = 0}``, one vector per free column."""
    if not m:
        if n_cols is None:
            raise ValueError("n_cols is required for an empty matrix")
        return [[1 if i == j else 0 for i in range(n_cols)] for j in range(n_cols)]
    r, pivots = rref(m)
    n = len(m[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        x = [0] * n
        x[f] = 1
        for row, pc in zip(r, pivots):
            if row[f] != 0:
                x[pc] = -row[f]
        basis.append(x)
    return basis


def solve_affine(m: Sequence[Sequence], b: Sequence, n_cols: int | None = None):
    """Solve ``m x = b``.

    Returns ``(particular, homogeneous_basis)``; ``particular`` is ``None``
    when the system is inconsistent.
    """
    if not m:
        n = n_cols or 0
        return [0] * n, nullspace([], n)
    n = len(m[0])
    aug = [list(row) + [bi] for row, bi in zip(m, b)]
    r, pivots = rref(aug)
    if n in pivots:
        return None, nullspace(m)
    x = [0] * n
    for row, pc in zip(r, pivots):
        x[pc] = row[n]
    return x, nullspace(m)


def det(m: Sequence[Sequence]):
    a = [list(row) for row in m]
    n = len(a)
    out = 1
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return 0 * out
        if p != c:
            a[c], a[p] = a[p], a[c]
            out = -out
        piv = a[c][c]
        out = out * piv
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] * _inv(piv)
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return out


def inverse(m: Sequence[Sequence]) -> Matrix:
    n = len(m)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(m)]
    r, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrix("matrix is not invertible")
    return [row[n:] for row in r]


def leading_minors(m: Sequence[Sequence]) -> list:
    return [det([row[:k] for row in m[:k]]) for k in range(1, len(m) + 1)]


def commutator(a, b) -> Matrix:
    return msub(matmul(a, b), matmul(b, a))


def trace(m):
    acc = 0
    for i in range(len(m)):
        acc = acc + m[i][i]
    return acc
