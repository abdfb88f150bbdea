"""Exact dense integer matrices: products, determinants, inverses, row HNF.

All arithmetic uses arbitrary-precision Python ints; numpy only appears at the
boundary when numerical code asks for a float copy.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import NotUnimodularError, SingularBasisError


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and x*a + y*b = g."""
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        t = g // ng
        x, nx = nx, x - t * nx
        y, ny = ny, y - t * ny
        g, ng = ng, g - t * ng
    if g < 0:
        g, x, y = -g, -x, -y
    return g, x, y


def xgcd_list(values: Sequence[int]) -> tuple[int, list[int]]:
    """Extended gcd of a list: (g, coeffs) with sum(c*v for c, v) = g >= 0."""
    if not values:
        raise ValueError("xgcd_list needs at least one value")
    g = values[0]
    coeffs = [1]
    for v in values[1:]:
        g2, x, y = xgcd(g, v)
        coeffs = [c * x for c in coeffs]
        coeffs.append(y)
        g = g2
    return g, coeffs


class IntMatrix:
    """Immutable integer matrix with an exact, lazily cached determinant."""

    __slots__ = ("rows", "_det")

    def __init__(self, rows: Iterable[Iterable[int]]):
        rs = tuple(tuple(int(v) for v in row) for row in rows)
        if not rs or not rs[0] or any(len(r) != len(rs[0]) for r in rs):
            raise ValueError("matrix must be non-empty and rectangular")
        self.rows = rs
        self._det = None

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, entries: Sequence[int]) -> "IntMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    def __getitem__(self, i: int) -> tuple[int, ...]:
        return self.rows[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"IntMatrix({[list(r) for r in self.rows]!r})"

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in matrix product")
        bt = list(zip(*other.rows))
        return IntMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in bt] for row in self.rows]
        )

    def transpose(self) -> "IntMatrix":
        return IntMatrix(list(zip(*self.rows)))

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def to_numpy(self, dtype=float) -> np.ndarray:
        return np.array(self.rows, dtype=dtype)

    def det(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination; cached."""
        if self._det is None:
            if self.nrows != self.ncols:
                raise ValueError("determinant of a non-square matrix")
            self._det = _bareiss_det([list(r) for r in self.rows])
        return self._det

    def inverse_unimodular(self) -> "IntMatrix":
        """Exact inverse for det +-1 matrices (the inverse is again integral)."""
        d = self.det()
        if d not in (1, -1):
            raise NotUnimodularError(f"matrix has determinant {d}, expected +-1")
        n = self.nrows
        aug = [
            [Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
            for i, row in enumerate(self.rows)
        ]
        for col in range(n):
            piv = next(i for i in range(col, n) if aug[i][col] != 0)
            aug[col], aug[piv] = aug[piv], aug[col]
            inv = 1 / aug[col][col]
            aug[col] = [v * inv for v in aug[col]]
            for i in range(n):
                if i != col and aug[i][col]:
                    f = aug[i][col]
                    aug[i] = [v - f * w for v, w in zip(aug[i], aug[col])]
        out = [[int(aug[i][n + j]) for j in range(n)] for i in range(n)]
        return IntMatrix(out)


def _bareiss_det(m: list[list[int]]) -> int:
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def vecmat(v: Sequence[int], m: IntMatrix) -> tuple[int, ...]:
    """Row vector times matrix, exact."""
    if len(v) != m.nrows:
        raise ValueError("shape mismatch in vector-matrix product")
    return tuple(sum(v[i] * m.rows[i][j] for i in range(m.nrows)) for j in range(m.ncols))


def hnf(rows: Iterable[Sequence[int]]) -> IntMatrix:
    """Row-style Hermite normal form of a full-column-rank generating set.

    Convention: H[i][j] = 0 for j > i, H[i][i] > 0, and 0 <= H[i][j] < H[j][j]
    for i > j.  H is the unique such basis of the integer row span, so equal
    row lattices give identical H.
    """
    work = [list(r) for r in rows]
    if not work:
        raise SingularBasisError("empty generating set")
    d = len(work[0])
    work = [r for r in work if any(r)]
    placed: list[list[int]] = []
    for col in range(d - 1, -1, -1):
        while True:
            nz = [r for r in work if r[col] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            for r in nz[1:]:
                t = r[col] // piv[col]
                for j in range(d):
                    r[j] -= t * piv[j]
            work = [r for r in work if any(r)]
        nz = [r for r in work if r[col] != 0]
        if not nz:
            raise SingularBasisError(f"generating set is rank-deficient at column {col}")
        piv = nz[0]
        work.remove(piv)
        if piv[col] < 0:
            piv = [-v for v in piv]
        placed.append(piv)
    placed.reverse()
    for i in range(1, d):
        for j in range(i - 1, -1, -1):
            t = placed[i][j] // placed[j][j]
            if t:
                for k in range(d):
                    placed[i][k] -= t * placed[j][k]
    return IntMatrix(placed)
