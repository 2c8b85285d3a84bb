"""The decomposition engine.

A nonnegative index (k_1, ..., k_n) labels a holomorphic function on the
upper half-plane whose normalized tau-derivative satisfies a recursion in
the length: it is a finite combination of terms

    alpha * E_w(tau) * (length n-1 index),

with alpha_0 = -1, alpha_1 = 0 and alpha_m = 2/(m-2)! for m >= 2, produced
by :func:`diffeq_expand`.  Integrating against the zero-constant-term
primitive turns each term into a one-letter prepend on e-words, and the
constant of integration is the coefficient extraction from the limit
series; :func:`decompose` assembles the value of the decomposition map as
an :class:`~emzv.eisalg.EPoly`.

:func:`gseries_decompose` recomputes the same data along an independent
route: it applies the normalized derivation words to the limit series and
re-extracts index coefficients, exercising the derivation algebra and the
associator instead of the length recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .coeffring import CoeffElem, MzvTable, bernoulli, parse_coeff, render_coeff
from .derlie import eps_tilde_nc
from .eisalg import EPoly, EWord, eisenstein_qexp, epoly_to_qexp
from .errors import ParseError
from .linalg import RatMatrix, kernel_basis
from .ncalg import canonical_ainf, extract_gamma, triangular_index_solve
from .qseries import QTSeries, qt_mul

EmzvIndex = tuple[int, ...]


def make_index(entries: Iterable[int]) -> EmzvIndex:
    idx = tuple(int(k) for k in entries)
    if any(k < 0 for k in idx):
        raise ValueError("index entries must be nonnegative")
    return idx


def index_weight(idx: EmzvIndex) -> int:
    return sum(idx)


def parse_index(text: str) -> EmzvIndex:
    text = text.strip()
    if not text:
        return ()
    try:
        return make_index(int(part) for part in text.split(","))
    except ValueError as exc:
        raise ParseError(f"bad index {text!r}") from exc


def format_index(idx: EmzvIndex) -> str:
    return ",".join(str(k) for k in idx)


def indices_upto(max_len: int, max_wt: int) -> list[EmzvIndex]:
    """All indices with length <= max_len and weight <= max_wt."""
    out: list[EmzvIndex] = [()]
    frontier: list[EmzvIndex] = [()]
    for _ in range(max_len):
        frontier = [
            idx + (k,) for idx in frontier for k in range(max_wt - sum(idx) + 1)
        ]
        out.extend(frontier)
    return out


# ---------------------------------------------------------------------------
# The differential recursion


@dataclass(frozen=True)
class DiffTerm:
    eis_weight: int
    sub_index: EmzvIndex
    coeff: Fraction


def _alpha(n: int) -> Fraction:
    if n == 0:
        return Fraction(-1)
    if n == 1:
        return Fraction(0)
    return Fraction(2, math.factorial(n - 2))


def _binom(n: int, k: int) -> int:
    if k < 0:
        return 0
    if n >= 0:
        return math.comb(n, k)
    return (-1) ** k * math.comb(k - n - 1, k)


def diffeq_expand(idx: Iterable[int]) -> list[DiffTerm]:
    """Terms of the normalized tau-derivative, like terms combined.

    Terms with vanishing alpha coefficient or an odd Eisenstein weight are
    dropped; weight-0 factors are kept as explicit bookkeeping (the weight-0
    series is the constant -1).
    """
    k = make_index(idx)
    n = len(k)
    if n < 1:
        raise ValueError("the recursion needs length >= 1")
    acc: dict[tuple[int, EmzvIndex], Fraction] = {}

    def add(eis: int, sub: EmzvIndex, q: Fraction | int) -> None:
        if not q:
            return
        key = (eis, sub)
        s = acc.get(key, Fraction(0)) + q
        if s:
            acc[key] = s
        else:
            acc.pop(key, None)

    add(k[0] + 1, k[1:], _alpha(k[0] + 1))
    add(k[-1] + 1, k[:-1], -_alpha(k[-1] + 1))
    for i in range(2, n + 1):  # position of k_i, 1-based as in the recursion
        prev, cur = k[i - 2], k[i - 1]
        head, tail = k[: i - 2], k[i:]
        add(
            prev + cur + 1,
            head + (0,) + tail,
            (-1) ** cur * _alpha(prev + cur + 1),
        )
        for m in range(prev + 2):
            q = _binom(cur + m - 1, m) * _alpha(prev - m + 1)
            add(prev - m + 1, head + (m + cur,) + tail, -q)
        for m in range(cur + 2):
            q = _binom(prev + m - 1, m) * _alpha(cur - m + 1)
            add(cur - m + 1, head + (m + prev,) + tail, q)

    return [
        DiffTerm(eis, sub, q)
        for (eis, sub), q in sorted(acc.items())
        if eis % 2 == 0
    ]


# ---------------------------------------------------------------------------
# Decomposition


@dataclass(frozen=True)
class Decomposition:
    """Image of an index under the decomposition map."""

    index: EmzvIndex
    epoly: EPoly
    gamma: CoeffElem
    nc_degree: int = 0  # limit-series degree consumed (0: base case)

    def to_doc(self) -> dict:
        return {
            "schema": "emzv.decomposition/1",
            "index": list(self.index),
            "gamma": render_coeff(self.gamma),
            "terms": [
                [format_index(w), render_coeff(c)]
                for w, c in sorted(self.epoly.items(), key=lambda t: (len(t[0]), t[0]))
            ],
            "params": {"nc_degree": self.nc_degree},
        }

    @staticmethod
    def from_doc(doc: Mapping, table: MzvTable) -> "Decomposition":
        if doc.get("schema") != "emzv.decomposition/1":
            raise ParseError(f"unsupported schema {doc.get('schema')!r}")
        coeffs = {
            parse_index(w): parse_coeff(c, table.symbols) for w, c in doc["terms"]
        }
        return Decomposition(
            index=make_index(doc["index"]),
            epoly=EPoly(coeffs, table),
            gamma=parse_coeff(doc["gamma"], table.symbols),
            nc_degree=int(doc.get("params", {}).get("nc_degree", 0)),
        )


def decompose(idx: Iterable[int], table: MzvTable) -> Decomposition:
    """Value of the decomposition map on the index, with its constant term.

    Lengths 0 and 1 are closed-form; longer indices integrate the
    differential recursion, the constant of integration coming from the
    limit series at word degree weight + length.
    """
    index = make_index(idx)
    memo: dict[EmzvIndex, Decomposition] = table.caches.setdefault("decomp", {})
    hit = memo.get(index)
    if hit is not None:
        return hit

    n = len(index)
    if n == 0:
        dec = Decomposition((), EPoly.constant(1, table), CoeffElem.one())
    elif n == 1:
        k = index[0]
        if k % 2:
            gamma = CoeffElem.zero()
        else:
            gamma = CoeffElem.pi_pow(1, bernoulli(k) / math.factorial(k))
        dec = Decomposition(index, EPoly.constant(gamma, table), gamma)
    else:
        degree = index_weight(index) + n
        ainf = canonical_ainf(table, degree)
        gamma = extract_gamma(index, ainf)
        acc = EPoly.constant(gamma, table)
        for term in diffeq_expand(index):
            sub = decompose(term.sub_index, table)
            acc = acc + sub.epoly.prepend(term.eis_weight).scale(-term.coeff)
        dec = Decomposition(index, acc, gamma, nc_degree=degree)

    with table.cache_lock:
        return memo.setdefault(index, dec)


def emzv_qexp(idx: Iterable[int], order: int, table: MzvTable) -> QTSeries:
    """Fourier expansion of the index; raises FourierViolation on T terms."""
    dec = decompose(idx, table)
    return epoly_to_qexp(dec.epoly, order).require_t_free()


def diffeq_rhs_qexp(idx: Iterable[int], order: int, table: MzvTable) -> QTSeries:
    """q-expansion of the right side of the recursion, assembled termwise."""
    acc = QTSeries.zero(order, table)
    for term in diffeq_expand(idx):
        piece = qt_mul(
            eisenstein_qexp(term.eis_weight, order, table),
            emzv_qexp(term.sub_index, order, table),
        )
        acc = acc + piece.scale(term.coeff)
    return acc


# ---------------------------------------------------------------------------
# Generating-series route


def gseries_decompose(
    max_len: int, max_wt: int, table: MzvTable
) -> dict[EmzvIndex, EPoly]:
    """Decompositions of all indices in range along the derivation route.

    Computes sum_w e_w (x) eps~_w(limit series) degree by degree and solves
    for the index coefficients; entirely independent of diffeq_expand and
    of the per-index constant extraction, so it serves as a cross-check of
    the length recursion.
    """
    indices = indices_upto(max_len, max_wt)
    degrees = sorted({index_weight(i) + len(i) for i in indices if i})
    out: dict[EmzvIndex, EPoly] = {(): EPoly.constant(1, table)}
    if not degrees:
        return out
    ainf = canonical_ainf(table, max(degrees))
    wanted = set(indices)
    for d in degrees:
        solved = _gseries_solve_degree(ainf, d, table)
        for idx in wanted:
            if idx and index_weight(idx) + len(idx) == d:
                val = solved.get(idx)
                if val is None:
                    val = EPoly.zero(table)
                out[idx] = val if len(idx) % 2 == 0 else -val
    return out


def _gseries_solve_degree(ainf, d: int, table: MzvTable) -> dict[EmzvIndex, EPoly]:
    ops = {k2: eps_tilde_nc(k2) for k2 in range(0, max(d, 1), 2)}
    accum: dict[str, dict[EWord, CoeffElem]] = {}

    base = ainf.truncate(d)
    stack = [((), base)]
    while stack:
        eword, series = stack.pop()
        for ncw, c in series.component(d).items():
            accum.setdefault(ncw, {})[eword] = c
        for k2, op in ops.items():
            image = op.apply(series)
            if image.is_zero():
                continue
            # the newest application is outermost: it leads the word
            stack.append(((k2,) + eword, image))

    component = {ncw: EPoly(coeffs, table) for ncw, coeffs in accum.items()}
    solved = triangular_index_solve(component, d)
    return {
        j: (v if v is not None else EPoly.zero(table)) for j, v in solved.items()
    }


# ---------------------------------------------------------------------------
# Relation discovery


def find_emzv_relations(
    indices: Sequence[Iterable[int]],
    table: MzvTable,
    adjoin: Sequence[CoeffElem] = (),
) -> list[tuple[Fraction, ...]]:
    """Kernel of the decompositions in common (word, monomial) coordinates.

    Extra constants can be adjoined as additional rows; kernel vectors then
    have one trailing entry per adjoined constant.
    """
    polys = [decompose(i, table).epoly for i in indices]
    polys.extend(EPoly.constant(c, table) for c in adjoin)
    coords = sorted(
        {(w, mono) for p in polys for w, c in p.items() for mono, _ in c.items()}
    )
    pos = {c: i for i, c in enumerate(coords)}
    nrows = max(len(coords), 1)
    cols = []
    for p in polys:
        col = [Fraction(0)] * nrows
        for w, c in p.items():
            for mono, q in c.items():
                col[pos[(w, mono)]] = q
        cols.append(col)
    mat = RatMatrix.from_rows(
        [[cols[j][i] for j in range(len(cols))] for i in range(nrows)]
    )
    return kernel_basis(mat)
