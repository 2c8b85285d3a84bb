"""Eisenstein series, their iterated integrals, and the e-word shuffle algebra.

The Hecke-normalized Eisenstein series of weight 2k has q-expansion

    E_{2k} = -B_{2k}/(4k) + sum_{n>=1} sigma_{2k-1}(n) q^n      (k >= 1),

with the conventions E_0 = -1 and E_k = 0 for odd k.  The iterated integral
``iei_qexp((k_1, ..., k_n))`` is defined recursively as the zero-constant
primitive of -E_{k_1} times the tail integral, so that

    d/dT iei(k_1 w) = -E_{k_1} * iei(w),

and the empty word gives 1.  Words in the letters e_0, e_2, e_4, ... form a
shuffle algebra; :class:`EPoly` carries finite combinations of such words
with exact coefficients, and ``epoly_to_qexp`` realizes a word combination
as the corresponding combination of iterated integrals.  Words containing an
odd letter represent the zero function and are dropped at the boundary.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .coeffring import CoeffElem, MzvTable, bernoulli, coeff_mul, merge_tables
from .qseries import QTSeries, qt_antider, qt_mul
from .words import deconcatenations, shuffle_multiset

EWord = tuple[int, ...]


def make_eword(letters: Iterable[int]) -> EWord:
    w = tuple(int(k) for k in letters)
    if any(k < 0 for k in w):
        raise ValueError("e-word letters must be nonnegative")
    return w


def has_odd_letter(w: EWord) -> bool:
    return any(k % 2 for k in w)


def sigma(m: int, n: int) -> int:
    """Divisor power sum sum_{d | n} d^m."""
    return sum(d**m for d in range(1, n + 1) if n % d == 0)


def eisenstein_qexp(k: int, order: int, table: MzvTable | None = None) -> QTSeries:
    """q-expansion of E_k to the given order (constant -1 for k = 0)."""
    if order < 1:
        raise ValueError("order must be >= 1")
    if k == 0:
        return QTSeries.constant(-1, order, table)
    if k % 2:
        return QTSeries.zero(order, table)
    coeffs: dict[tuple[int, int], CoeffElem] = {
        (0, 0): CoeffElem.from_rational(-bernoulli(k) / (2 * k))
    }
    for n in range(1, order):
        coeffs[(n, 0)] = CoeffElem.from_rational(sigma(k - 1, n))
    return QTSeries(order, coeffs, table)


_iei_cache: dict[tuple[EWord, int], QTSeries] = {}
_iei_lock = threading.Lock()


def iei_qexp(w: Iterable[int], order: int) -> QTSeries:
    """Iterated Eisenstein integral of the word, as a QTSeries.

    Memoized on (word, order); coefficients are rational, so the result
    carries no table.
    """
    word = make_eword(w)
    if order < 1:
        raise ValueError("order must be >= 1")
    key = (word, order)
    hit = _iei_cache.get(key)
    if hit is not None:
        return hit
    if not word:
        res = QTSeries.constant(1, order)
    elif has_odd_letter(word):
        res = QTSeries.zero(order)
    else:
        head, tail = word[0], word[1:]
        res = qt_antider(
            qt_mul(-eisenstein_qexp(head, order), iei_qexp(tail, order))
        )
    with _iei_lock:
        _iei_cache.setdefault(key, res)
    return res


def clear_iei_cache() -> None:
    with _iei_lock:
        _iei_cache.clear()


class EPoly:
    """Finite CoeffElem-linear combination of even e-words."""

    __slots__ = ("coeffs", "table")

    def __init__(
        self,
        coeffs: Mapping[EWord, CoeffElem] | None = None,
        table: MzvTable | None = None,
    ):
        d: dict[EWord, CoeffElem] = {}
        if coeffs:
            for w, c in coeffs.items():
                word = make_eword(w)
                if has_odd_letter(word) or c.is_zero():
                    continue
                d[word] = c
        self.coeffs = d
        self.table = table

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero(table: MzvTable | None = None) -> "EPoly":
        return EPoly({}, table)

    @staticmethod
    def word(
        w: Iterable[int],
        coeff: CoeffElem | Fraction | int = 1,
        table: MzvTable | None = None,
    ) -> "EPoly":
        if not isinstance(coeff, CoeffElem):
            coeff = CoeffElem.from_rational(coeff)
        return EPoly({make_eword(w): coeff}, table)

    @staticmethod
    def constant(
        c: CoeffElem | Fraction | int, table: MzvTable | None = None
    ) -> "EPoly":
        return EPoly.word((), c, table)

    # -- queries ----------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(frozenset(self.coeffs.items()))

    def items(self) -> Iterator[tuple[EWord, CoeffElem]]:
        return iter(self.coeffs.items())

    def coefficient(self, w: Iterable[int]) -> CoeffElem:
        return self.coeffs.get(make_eword(w), CoeffElem.zero())

    def constant_term(self) -> CoeffElem:
        return self.coefficient(())

    def without_constant(self) -> "EPoly":
        return EPoly({w: c for w, c in self.coeffs.items() if w}, self.table)

    def words(self) -> list[EWord]:
        return sorted(self.coeffs, key=lambda w: (len(w), w))

    def __repr__(self) -> str:
        return f"EPoly({self})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for w in self.words():
            name = "1" if not w else "".join(f"e{k}" for k in w)
            parts.append(f"({self.coeffs[w]}) {name}")
        return " + ".join(parts)

    # -- linear structure ---------------------------------------------

    def _merged_table(self, other: "EPoly") -> MzvTable | None:
        return merge_tables(self.table, other.table)

    def __add__(self, other: "EPoly") -> "EPoly":
        d = dict(self.coeffs)
        for w, c in other.coeffs.items():
            s = d.get(w, CoeffElem.zero()) + c
            if s.is_zero():
                d.pop(w, None)
            else:
                d[w] = s
        return EPoly(d, self._merged_table(other))

    def __neg__(self) -> "EPoly":
        return EPoly({w: -c for w, c in self.coeffs.items()}, self.table)

    def __sub__(self, other: "EPoly") -> "EPoly":
        return self + (-other)

    def scale(self, c: CoeffElem | Fraction | int) -> "EPoly":
        if isinstance(c, CoeffElem):
            return EPoly(
                {w: coeff_mul(v, c, self.table) for w, v in self.coeffs.items()},
                self.table,
            )
        return EPoly({w: v.scale(c) for w, v in self.coeffs.items()}, self.table)

    def prepend(self, letter: int) -> "EPoly":
        """Left-concatenate one letter onto every word."""
        if letter % 2:
            return EPoly.zero(self.table)
        return EPoly(
            {(letter,) + w: c for w, c in self.coeffs.items()}, self.table
        )


def shuffle_words(u: Iterable[int], v: Iterable[int]) -> EPoly:
    """Shuffle product of two words, unit coefficients with multiplicity."""
    wu, wv = make_eword(u), make_eword(v)
    out: dict[EWord, CoeffElem] = {}
    for w, mult in shuffle_multiset(wu, wv).items():
        out[w] = CoeffElem.from_rational(mult)
    return EPoly(out)


def epoly_mul(x: EPoly, y: EPoly) -> EPoly:
    """Bilinear extension of the shuffle product."""
    table = x._merged_table(y)
    acc = EPoly.zero(table)
    for wx, cx in x.items():
        for wy, cy in y.items():
            c = coeff_mul(cx, cy, table)
            acc = acc + shuffle_words(wx, wy).scale(c)
    return acc


def epoly_to_qexp(x: EPoly, order: int) -> QTSeries:
    """Realize the word combination as a q-expansion to the given order."""
    acc = QTSeries.zero(order, x.table)
    for w, c in x.items():
        acc = acc + iei_qexp(w, order).scale(c)
    return acc


def deconcat(x: EPoly) -> dict[tuple[EWord, EWord], CoeffElem]:
    """Deconcatenation coproduct: all splits of each word, coefficients kept."""
    out: dict[tuple[EWord, EWord], CoeffElem] = {}
    for w, c in x.items():
        for u, v in deconcatenations(w):
            key = (u, v)
            s = out.get(key, CoeffElem.zero()) + c
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
    return out
