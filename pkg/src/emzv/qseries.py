"""Truncated expansions in q with polynomial dependence on T = log q.

A :class:`QTSeries` models a holomorphic function near the cusp as

    sum_{m < order, j >= 0}  c_{m,j} * q^m * T^j,

with exact coefficients.  Since q = e^T, the derivative d/dT (which is the
normalized tau-derivative) acts by

    d/dT (q^m T^j) = m q^m T^j + j q^m T^{j-1},

and :func:`qt_antider` inverts it under the normalization that the primitive
has zero (q^0, T^0) coefficient.  That normalization is the regularization
convention used everywhere in this package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping

from .coeffring import CoeffElem, MzvTable, coeff_mul, merge_tables
from .errors import FourierViolation


@dataclass(frozen=True)
class QTSeries:
    """Coefficients live on keys (m, j): the q^m T^j term."""

    order: int
    coeffs: Mapping[tuple[int, int], CoeffElem]
    table: MzvTable | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        clean = {
            k: v for k, v in self.coeffs.items() if not v.is_zero() and k[0] < self.order
        }
        object.__setattr__(self, "coeffs", clean)

    @staticmethod
    def zero(order: int, table: MzvTable | None = None) -> "QTSeries":
        return QTSeries(order, {}, table)

    @staticmethod
    def constant(
        c: CoeffElem | Fraction | int, order: int, table: MzvTable | None = None
    ) -> "QTSeries":
        if not isinstance(c, CoeffElem):
            c = CoeffElem.from_rational(c)
        return QTSeries(order, {(0, 0): c}, table)

    # -- queries ------------------------------------------------------

    def tdeg(self) -> int:
        return max((j for (_, j) in self.coeffs), default=0)

    def coefficient(self, m: int, j: int) -> CoeffElem:
        return self.coeffs.get((m, j), CoeffElem.zero())

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_t_free(self) -> bool:
        return all(j == 0 for (_, j) in self.coeffs)

    def terms(self) -> Iterator[tuple[int, int, CoeffElem]]:
        for (m, j) in sorted(self.coeffs):
            yield m, j, self.coeffs[(m, j)]

    def require_t_free(self) -> "QTSeries":
        if not self.is_t_free():
            bad = sorted(k for k in self.coeffs if k[1] > 0)[0]
            raise FourierViolation(f"T term survives at q^{bad[0]} T^{bad[1]}")
        return self

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for m, j, c in self.terms():
            mono = "".join(
                [f"q^{m}" if m > 1 else "q" * m, f" T^{j}" if j > 1 else " T" * j]
            ).strip()
            parts.append(f"({c})" + (f" {mono}" if mono else ""))
        return " + ".join(parts)

    # -- arithmetic ---------------------------------------------------

    def _merge_table(self, other: "QTSeries") -> MzvTable | None:
        return merge_tables(self.table, other.table)

    def __add__(self, other: "QTSeries") -> "QTSeries":
        order = min(self.order, other.order)
        d: dict[tuple[int, int], CoeffElem] = {
            k: v for k, v in self.coeffs.items() if k[0] < order
        }
        for k, v in other.coeffs.items():
            if k[0] < order:
                s = d.get(k, CoeffElem.zero()) + v
                if s.is_zero():
                    d.pop(k, None)
                else:
                    d[k] = s
        return QTSeries(order, d, self._merge_table(other))

    def __neg__(self) -> "QTSeries":
        return QTSeries(self.order, {k: -v for k, v in self.coeffs.items()}, self.table)

    def __sub__(self, other: "QTSeries") -> "QTSeries":
        return self + (-other)

    def scale(self, c: CoeffElem | Fraction | int) -> "QTSeries":
        if isinstance(c, CoeffElem):
            d = {k: coeff_mul(v, c, self.table) for k, v in self.coeffs.items()}
        else:
            d = {k: v.scale(c) for k, v in self.coeffs.items()}
        return QTSeries(self.order, d, self.table)


def qt_mul(f: QTSeries, g: QTSeries) -> QTSeries:
    """Product truncated at the smaller order; T degrees add."""
    order = min(f.order, g.order)
    table = f._merge_table(g)
    acc: dict[tuple[int, int], CoeffElem] = {}
    for (m1, j1), c1 in f.coeffs.items():
        if m1 >= order:
            continue
        for (m2, j2), c2 in g.coeffs.items():
            m = m1 + m2
            if m >= order:
                continue
            k = (m, j1 + j2)
            p = coeff_mul(c1, c2, table)
            s = acc.get(k, CoeffElem.zero()) + p
            if s.is_zero():
                acc.pop(k, None)
            else:
                acc[k] = s
    return QTSeries(order, acc, table)


def qt_ddT(f: QTSeries) -> QTSeries:
    """Exact derivative d/dT, same truncation order."""
    acc: dict[tuple[int, int], CoeffElem] = {}

    def add(k: tuple[int, int], c: CoeffElem) -> None:
        s = acc.get(k, CoeffElem.zero()) + c
        if s.is_zero():
            acc.pop(k, None)
        else:
            acc[k] = s

    for (m, j), c in f.coeffs.items():
        if m:
            add((m, j), c.scale(m))
        if j:
            add((m, j - 1), c.scale(j))
    return QTSeries(f.order, acc, f.table)


def qt_antider(f: QTSeries) -> QTSeries:
    """The unique primitive with zero (q^0, T^0) coefficient.

    For m = 0 the T-profile integrates termwise; for m >= 1 the triangular
    system m p_j + (j+1) p_{j+1} = f_j is solved by back-substitution from
    the top T degree.
    """
    acc: dict[tuple[int, int], CoeffElem] = {}
    by_m: dict[int, dict[int, CoeffElem]] = {}
    for (m, j), c in f.coeffs.items():
        by_m.setdefault(m, {})[j] = c
    for m, prof in by_m.items():
        if m == 0:
            for j, c in prof.items():
                acc[(0, j + 1)] = c.scale(Fraction(1, j + 1))
            continue
        top = max(prof)
        p_next = CoeffElem.zero()  # p_{j+1} during the descent
        for j in range(top, -1, -1):
            f_j = prof.get(j, CoeffElem.zero())
            p_j = (f_j - p_next.scale(j + 1)).scale(Fraction(1, m))
            if not p_j.is_zero():
                acc[(m, j)] = p_j
            p_next = p_j
    return QTSeries(f.order, acc, f.table)
