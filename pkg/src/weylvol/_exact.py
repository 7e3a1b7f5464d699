"""Small exact linear algebra over ``fractions.Fraction``."""

from __future__ import annotations

import numbers
from fractions import Fraction


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    return Fraction(x)


def to_str(q: Fraction) -> str:
    """Serialize as ``"p/q"`` (``"p"`` when integral)."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def matmul(a, b):
    cols = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols] for row in a]


def inverse(a):
    n = len(a)
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [v - f * w for v, w in zip(aug[i], aug[col])]
    return [row[n:] for row in aug]


def det(a) -> Fraction:
    m = [[Fraction(v) for v in row] for row in a]
    n = len(m)
    result = Fraction(1)
    for col in range(n):
        pivot = next((i for i in range(col, n) if m[i][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            result = -result
        p = m[col][col]
        result *= p
        for i in range(col + 1, n):
            if m[i][col] != 0:
                f = m[i][col] / p
                m[i] = [v - f * w for v, w in zip(m[i], m[col])]
    return result


def ldl(a):
    """``A = L D L^T`` with unit lower-triangular ``L``; ``A`` symmetric positive definite."""
    n = len(a)
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    D = [Fraction(0)] * n
    for j in range(n):
        D[j] = Fraction(a[j][j]) - sum((L[j][k] ** 2 * D[k] for k in range(j)), Fraction(0))
        if D[j] <= 0:
            raise ValueError("matrix is not positive definite")
        for i in range(j + 1, n):
            L[i][j] = (Fraction(a[i][j]) - sum((L[i][k] * L[j][k] * D[k] for k in range(j)), Fraction(0))) / D[j]
    return L, D


def is_positive_definite(a) -> bool:
    if any(a[i][j] != a[j][i] for i in range(len(a)) for j in range(len(a))):
        return False
    try:
        ldl(a)
    except ValueError:
        return False
    return True
