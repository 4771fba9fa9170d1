"""Small exact matrix helpers over the rationals."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .series import as_fraction

Matrix = tuple  # tuple of row tuples of Fractions
Vector = tuple


class MatrixError(ValueError):
    pass


def matrix(rows) -> Matrix:
    rows = tuple(tuple(as_fraction(x) for x in row) for row in rows)
    if not rows or any(len(r) != len(rows) for r in rows):
        raise MatrixError("expected a nonempty square matrix")
    return rows


def vector(xs) -> Vector:
    return tuple(as_fraction(x) for x in xs)


def is_symmetric(M: Matrix) -> bool:
    n = len(M)
    return all(M[i][j] == M[j][i] for i in range(n) for j in range(i + 1, n))


def leading_minors(M: Matrix) -> list[Fraction]:
    """Leading principal minors by fraction-free (Bareiss) elimination."""
    n = len(M)
    a = [list(row) for row in M]
    minors = []
    prev = Fraction(1)
    for k in range(n):
        pivot = a[k][k]
        minors.append(pivot)
        if pivot == 0:
            # remaining minors are not needed once one vanishes
            minors.extend([Fraction(0)] * (n - k - 1))
            break
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) / prev
        prev = pivot
    return minors


def check_posdef(M) -> bool:
    """True iff the symmetric rational matrix ``M`` is positive definite."""
    M = matrix(M)
    if not is_symmetric(M):
        raise MatrixError("matrix is not symmetric")
    return all(m > 0 for m in leading_minors(M))


def inverse(M) -> Matrix:
    M = matrix(M)
    n = len(M)
    a = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise MatrixError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[n:]) for row in a)


def matmul(A: Matrix, B: Matrix) -> Matrix:
    return tuple(
        tuple(sum((A[i][k] * B[k][j] for k in range(len(B))), Fraction(0)) for j in range(len(B[0])))
        for i in range(len(A))
    )


def matvec(A: Matrix, x: Sequence) -> Vector:
    return tuple(sum((a * b for a, b in zip(row, x)), Fraction(0)) for row in A)


def dot(x: Sequence, y: Sequence) -> Fraction:
    return sum((a * b for a, b in zip(x, y)), Fraction(0))


def diag(ds) -> Matrix:
    n = len(ds)
    return tuple(tuple(as_fraction(ds[i]) if i == j else Fraction(0) for j in range(n)) for i in range(n))


def permute(M: Matrix, perm: Sequence[int]) -> Matrix:
    return tuple(tuple(M[i][j] for j in perm) for i in perm)
