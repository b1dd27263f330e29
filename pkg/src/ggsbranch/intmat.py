"""Exact integer matrices: Bareiss determinant, Smith normal form, text export.

Entries are Python integers, so nothing overflows.  Matrices act on row
vectors from the right (``v -> v M``), which is the convention of the
companion-matrix model in :mod:`ggsbranch.constant`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

__all__ = ['IntegerMatrix', 'companion_matrix', 'elementary_divisors']


@dataclass(frozen=True)
class IntegerMatrix:
    rows: tuple[tuple[int, ...], ...]

    def __init__(self, rows: Sequence[Sequence[int]]):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError('ragged matrix')
        object.__setattr__(self, 'rows', rows)

    @classmethod
    def identity(cls, size: int) -> IntegerMatrix:
        return cls([[int(i == j) for j in range(size)] for i in range(size)])

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __matmul__(self, other: IntegerMatrix) -> IntegerMatrix:
        if self.ncols != other.nrows:
            raise ValueError('dimension mismatch')
        cols = list(zip(*other.rows)) if other.rows else []
        return IntegerMatrix([[sum(x * y for x, y in zip(r, c)) for c in cols] for r in self.rows])

    def __add__(self, other: IntegerMatrix) -> IntegerMatrix:
        return IntegerMatrix([[x + y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: IntegerMatrix) -> IntegerMatrix:
        return IntegerMatrix([[x - y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __pow__(self, k: int) -> IntegerMatrix:
        if not self.is_square():
            raise ValueError('power of a non-square matrix')
        if k < 0:
            raise ValueError('negative powers are not supported')
        out = IntegerMatrix.identity(self.nrows)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def act(self, v: Sequence[int]) -> tuple[int, ...]:
        """Right action on a row vector: ``v M``."""
        return tuple(sum(v[i] * self.rows[i][j] for i in range(self.nrows)) for j in range(self.ncols))

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        if not self.is_square():
            raise ValueError('determinant of a non-square matrix')
        size = self.nrows
        if size == 0:
            return 1
        a = [list(r) for r in self.rows]
        sign = 1
        prev = 1
        for k in range(size - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, size) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, size):
                for j in range(k + 1, size):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[-1][-1]

    def smith_diagonal(self) -> list[int]:
        """Invariant factors d1 | d2 | ... (non-negative), one per min(rows, cols)."""
        a = [list(r) for r in self.rows]
        nr, nc = self.nrows, self.ncols
        diag = []
        for t in range(min(nr, nc)):
            # bring a smallest non-zero entry of the remaining block to (t, t)
            while True:
                best = None
                for i in range(t, nr):
                    for j in range(t, nc):
                        if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                            best = (i, j)
                if best is None:
                    diag.extend([0] * (min(nr, nc) - t))
                    return _fix_divisibility(diag)
                i, j = best
                a[t], a[i] = a[i], a[t]
                for r in a:
                    r[t], r[j] = r[j], r[t]
                piv = a[t][t]
                dirty = False
                for i in range(t + 1, nr):
                    q = a[i][t] // piv
                    if q:
                        a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    dirty |= a[i][t] != 0
                for j in range(t + 1, nc):
                    q = a[t][j] // piv
                    if q:
                        for r in a:
                            r[j] -= q * r[t]
                    dirty |= a[t][j] != 0
                if dirty:
                    continue
                # pivot must divide the rest of the block
                bad = next(((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc)
                            if a[i][j] % piv), None)
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
            diag.append(abs(a[t][t]))
        return _fix_divisibility(diag)

    def to_text(self) -> str:
        """Row-major, space-separated, one row per line."""
        return '\n'.join(' '.join(str(x) for x in r) for r in self.rows)

    @classmethod
    def from_text(cls, text: str) -> IntegerMatrix:
        return cls([[int(x) for x in line.split()] for line in text.strip().splitlines()])


def _fix_divisibility(diag: list[int]) -> list[int]:
    # The elimination above already yields a divisibility chain; this only
    # normalises the order of zeros (which go last).
    nonzero = [d for d in diag if d]
    return nonzero + [0] * (len(diag) - len(nonzero))


def companion_matrix(size: int) -> IntegerMatrix:
    """Companion matrix of ``X^size + ... + X + 1`` for the right action.

    Row ``i`` is the image of basis vector ``v_{i+1}``: ``v_i M = v_{i+1}``
    for ``i < size`` and ``v_size M = -(v_1 + ... + v_size)``.
    """
    if size < 1:
        raise ValueError('size must be positive')
    rows = [[int(j == i + 1) for j in range(size)] for i in range(size - 1)]
    rows.append([-1] * size)
    return IntegerMatrix(rows)


def elementary_divisors(invariants: Sequence[int]) -> list[int]:
    """Split invariant factors into prime powers, sorted descending; 1s are dropped."""
    out = []
    for d in invariants:
        if d == 0:
            raise ValueError('infinite cyclic factor has no elementary divisor')
        q = 2
        while d > 1:
            if q * q > d:
                out.append(d)
                break
            if d % q == 0:
                pp = 1
                while d % q == 0:
                    d //= q
                    pp *= q
                out.append(pp)
            q += 1
    return sorted(out, reverse=True)
