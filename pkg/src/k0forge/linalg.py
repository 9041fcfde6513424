"""Matrices over GF(p) (numpy-backed) and exact integer matrix invariants."""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def _dtype(p: int, n: int = 1):
    # int64 is safe while n * (p-1)^2 stays below 2^63
    return np.int64 if n * (p - 1) ** 2 < 2**62 else object


def as_matrix(rows, p: int) -> np.ndarray:
    a = np.array(rows, dtype=object) % p
    return a.astype(_dtype(p, max(a.shape) if a.ndim else 1))


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return (a @ b) % p


def matpow(a: np.ndarray, e: int, p: int) -> np.ndarray:
    result = np.eye(a.shape[0], dtype=a.dtype)
    base = a % p
    while e:
        if e & 1:
            result = matmul(result, base, p)
        e >>= 1
        if e:
            base = matmul(base, base, p)
    return result


def rref(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(p) and the pivot columns."""
    m = np.array(a, dtype=a.dtype if a.size else np.int64) % p
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            m[[r, k]] = m[[k, r]]
        m[r] = (m[r] * pow(int(m[r, c]), -1, p)) % p
        col = m[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            m[nzr] = (m[nzr] - np.outer(col[nzr], m[r])) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: np.ndarray, p: int) -> int:
    if a.size == 0:
        return 0
    return len(rref(a, p)[1])


def nullspace(a: np.ndarray, p: int) -> np.ndarray:
    """Basis of {x : a x = 0} as rows of the returned array."""
    rows, cols = a.shape
    m, pivots = rref(a, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=m.dtype)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, pc in enumerate(pivots):
            basis[i, pc] = (-m[r, f]) % p
    return basis


def solve(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """One solution x of a x = b over GF(p), or None if inconsistent."""
    rows, cols = a.shape
    aug = np.concatenate([a % p, (np.asarray(b) % p).reshape(rows, 1).astype(a.dtype)], axis=1)
    m, pivots = rref(aug, p)
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=m.dtype)
    for r, pc in enumerate(pivots):
        x[pc] = m[r, cols]
    return x


class RowSpace:
    """Row space over GF(p) kept in reduced echelon form for fast membership tests."""

    def __init__(self, vectors: np.ndarray, p: int):
        self.p = p
        if vectors.size:
            m, pivots = rref(vectors, p)
            self.basis = m[: len(pivots)]
            self.pivots = pivots
        else:
            self.basis = vectors.reshape(0, vectors.shape[-1] if vectors.ndim > 1 else 0)
            self.pivots = []

    @property
    def dimension(self) -> int:
        return len(self.pivots)

    def reduce(self, v: np.ndarray) -> np.ndarray:
        v = np.array(v) % self.p
        for row, c in zip(self.basis, self.pivots):
            if v[c]:
                v = (v - v[c] * row) % self.p
        return v

    def contains(self, v: np.ndarray) -> bool:
        return not self.reduce(v).any()


def integer_determinant(rows) -> int:
    """Exact determinant of an integer matrix (Bareiss fraction-free elimination)."""
    m = [list(map(int, r)) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def rational_rank(rows) -> int:
    """Rank over Q by exact Fraction elimination."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return 0
    rk, cols = 0, len(m[0])
    for c in range(cols):
        piv = next((i for i in range(rk, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rk], m[piv] = m[piv], m[rk]
        for i in range(len(m)):
            if i != rk and m[i][c] != 0:
                f = m[i][c] / m[rk][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[rk])]
        rk += 1
    return rk


def integer_solve_unimodular(rows, rhs) -> list[int]:
    """Solve rows * x = rhs for a square integer matrix with determinant +-1."""
    n = len(rows)
    m = [[Fraction(x) for x in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    for c in range(n):
        piv = next(i for i in range(c, n) if m[i][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    sol = [row[n] for row in m]
    if any(x.denominator != 1 for x in sol):
        raise ValueError("solution is not integral")
    return [int(x) for x in sol]
