"""Exact dense linear algebra over Q.

Entries are Fractions; forward elimination is fraction-free (rows are
cleared to integers, then eliminated Bareiss-style) so coefficient growth
stays polynomial, and the reduced form is normalized at the end.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .errors import DimensionMismatch


@dataclass(frozen=True)
class RatMatrix:
    rows: int
    cols: int
    entries: tuple[Fraction, ...]  # row-major

    def __post_init__(self) -> None:
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatch(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries"
            )

    @staticmethod
    def from_rows(rows: Sequence[Sequence[Fraction | int]]) -> "RatMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        flat: list[Fraction] = []
        for row in rows:
            if len(row) != c:
                raise DimensionMismatch("ragged rows")
            flat.extend(Fraction(x) for x in row)
        return RatMatrix(r, c, tuple(flat))

    @staticmethod
    def identity(n: int) -> "RatMatrix":
        return RatMatrix.from_rows(
            [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        )

    def at(self, i: int, j: int) -> Fraction:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]


def _int_rows(m: RatMatrix) -> list[list[int]]:
    out = []
    for i in range(m.rows):
        row = m.row(i)
        lcm = 1
        for x in row:
            d = x.denominator
            lcm = lcm // gcd(lcm, d) * d
        out.append([int(x * lcm) for x in row])
    return out


def rref(m: RatMatrix) -> tuple[RatMatrix, list[int], int]:
    """Reduced row echelon form; returns (rref, pivot columns, rank)."""
    rows = _int_rows(m)
    nr, nc = m.rows, m.cols
    pivots: list[int] = []
    prev_pivot = 1
    r = 0
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        for i in range(r + 1, nr):
            xi = rows[i][c]
            # Bareiss step: exact integer division by the previous pivot
            rows[i] = [
                (pv * rows[i][j] - xi * rows[r][j]) // prev_pivot for j in range(nc)
            ]
        prev_pivot = pv
        pivots.append(c)
        r += 1
        if r == nr:
            break
    rank = len(pivots)

    # Back-substitution with exact rationals on the echelon rows.
    frac_rows: list[list[Fraction]] = [
        [Fraction(x) for x in rows[i]] for i in range(rank)
    ]
    for i in range(rank - 1, -1, -1):
        c = pivots[i]
        pivval = frac_rows[i][c]
        frac_rows[i] = [x / pivval for x in frac_rows[i]]
        for k in range(i):
            f = frac_rows[k][c]
            if f:
                frac_rows[k] = [
                    a - f * b for a, b in zip(frac_rows[k], frac_rows[i])
                ]
    zero_row = [Fraction(0)] * nc
    full = frac_rows + [list(zero_row) for _ in range(nr - rank)]
    flat = tuple(x for row in full for x in row)
    return RatMatrix(nr, nc, flat), pivots, rank


def kernel_basis(m: RatMatrix) -> list[tuple[Fraction, ...]]:
    """Basis of the right null space; empty when the rank equals cols."""
    red, pivots, rank = rref(m)
    free = [c for c in range(m.cols) if c not in pivots]
    basis: list[tuple[Fraction, ...]] = []
    for fc in free:
        v = [Fraction(0)] * m.cols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -red.at(i, fc)
        basis.append(tuple(v))
    return basis


def solve(m: RatMatrix, rhs: Sequence[Fraction | int]) -> tuple[Fraction, ...] | None:
    """One exact solution of m x = rhs, free variables set to zero.

    Returns None when the system is inconsistent.
    """
    if len(rhs) != m.rows:
        raise DimensionMismatch(f"rhs length {len(rhs)} != rows {m.rows}")
    aug = RatMatrix.from_rows(
        [list(m.row(i)) + [Fraction(rhs[i])] for i in range(m.rows)]
    )
    red, pivots, rank = rref(aug)
    if m.cols in pivots:
        return None
    x = [Fraction(0)] * m.cols
    for i, pc in enumerate(pivots):
        x[pc] = red.at(i, m.cols)
    return tuple(x)
