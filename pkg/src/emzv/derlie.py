"""The derivation algebra on the free Lie algebra over x, y.

For every k >= 0 there is a derivation raising degree by 2k,

    eps_{2k}(x) = ad^{2k}(x)(y),
    eps_{2k}(y) = sum_{0 <= j < k} (-1)^j [ad^j(x)(y), ad^{2k-1-j}(x)(y)],

so eps_0 = y d/dx and eps_2 = -ad([x, y]).  Lie elements are stored in the
Lyndon-word basis (letters ordered x < y); derivations are evaluated on the
free associative algebra, where a derivation is determined exactly by its
generator values, so relation discovery among bracket words of the eps's
needs no truncation at all.  The truncation degree only bounds the sizes of
operator matrices and of applied vectors.

The last part of the module deals with the image constraints on e-word
polynomials: the dual-ideal membership test against the discovered
relations, the change of basis into the combinations

    E0(w, 2k) = e_w e_{2k} - B_{2k}/(4k) * e_w e_0      (k != 0)

whose q-expansions are free of T terms, and the derivation annihilating the
constant-term data.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .coeffring import CoeffElem, bernoulli
from .eisalg import EPoly, EWord, epoly_to_qexp, make_eword
from .errors import TruncationOverflow
from .linalg import RatMatrix, kernel_basis
from .ncalg import NCSeries

Assoc = dict[str, Fraction]  # sparse free-associative element


# ---------------------------------------------------------------------------
# Lyndon words and the basis of the free Lie algebra


def lyndon_words(max_len: int, alphabet: str = "xy") -> list[str]:
    """All Lyndon words of length <= max_len (Duval's generation)."""
    k = len(alphabet)
    out: list[str] = []
    w = [0]
    while True:
        out.append("".join(alphabet[i] for i in w))
        m = len(w)
        w = [w[i % m] for i in range(max_len)]
        while w and w[-1] == k - 1:
            w.pop()
        if not w:
            break
        w[-1] += 1
    out.sort(key=lambda s: (len(s), s))
    return out


def standard_factorization(w: str) -> tuple[str, str]:
    """Split a Lyndon word as u.v with v its smallest proper suffix."""
    assert len(w) >= 2
    v = min(w[i:] for i in range(1, len(w)))
    return w[: len(w) - len(v)], v


def _assoc_add(acc: Assoc, other: Mapping[str, Fraction], scale: Fraction = Fraction(1)) -> None:
    for w, q in other.items():
        s = acc.get(w, Fraction(0)) + q * scale
        if s:
            acc[w] = s
        else:
            acc.pop(w, None)


def assoc_concat(x: Mapping[str, Fraction], y: Mapping[str, Fraction]) -> Assoc:
    out: Assoc = {}
    for w1, q1 in x.items():
        for w2, q2 in y.items():
            w = w1 + w2
            s = out.get(w, Fraction(0)) + q1 * q2
            if s:
                out[w] = s
            else:
                out.pop(w, None)
    return out


def assoc_bracket(x: Mapping[str, Fraction], y: Mapping[str, Fraction]) -> Assoc:
    out = assoc_concat(x, y)
    _assoc_add(out, assoc_concat(y, x), Fraction(-1))
    return out


_expand_cache: dict[str, Assoc] = {}
_expand_lock = threading.Lock()


def expand_lyndon(w: str) -> Assoc:
    """Word expansion of the standard bracketing of a Lyndon word.

    Triangular: the expansion is the word itself plus lexicographically
    larger rearrangements, which the greedy coordinate conversion relies on;
    asserted here at build time.
    """
    hit = _expand_cache.get(w)
    if hit is not None:
        return hit
    if len(w) == 1:
        res: Assoc = {w: Fraction(1)}
    else:
        u, v = standard_factorization(w)
        res = assoc_bracket(expand_lyndon(u), expand_lyndon(v))
        assert min(res) == w and res[w] == 1
    with _expand_lock:
        _expand_cache.setdefault(w, res)
    return res


def to_lie_coords(elem: Mapping[str, Fraction]) -> dict[str, Fraction]:
    """Lyndon-basis coordinates of a Lie element given by its word expansion."""
    work = dict(elem)
    coords: dict[str, Fraction] = {}
    while work:
        w = min(work)
        c = work[w]
        expansion = expand_lyndon(w)  # raises/fails if w is not Lyndon
        if min(expansion) != w:
            raise ValueError(f"element is not Lie: stray word {w!r}")
        coords[w] = coords.get(w, Fraction(0)) + c
        _assoc_add(work, expansion, -c)
    return {w: q for w, q in coords.items() if q}


def lie_dimension(d: int) -> int:
    return sum(1 for w in lyndon_words(d) if len(w) == d)


@dataclass(frozen=True)
class LieVec:
    """Element of the free Lie algebra in Lyndon coordinates, degree-capped."""

    coords: Mapping[str, Fraction]
    maxdeg: int

    def __post_init__(self) -> None:
        bad = [w for w in self.coords if len(w) > self.maxdeg]
        if bad:
            raise TruncationOverflow(f"coordinates beyond degree {self.maxdeg}: {bad}")
        object.__setattr__(
            self, "coords", {w: q for w, q in self.coords.items() if q}
        )

    @staticmethod
    def from_assoc(elem: Mapping[str, Fraction], maxdeg: int) -> "LieVec":
        return LieVec(to_lie_coords(elem), maxdeg)

    def to_assoc(self) -> Assoc:
        acc: Assoc = {}
        for w, q in self.coords.items():
            _assoc_add(acc, expand_lyndon(w), q)
        return acc

    def is_zero(self) -> bool:
        return not self.coords

    def degrees(self) -> set[int]:
        return {len(w) for w in self.coords}


# ---------------------------------------------------------------------------
# The derivations


def _ad_x_pow(k: int) -> Assoc:
    return {
        "x" * (k - j) + "y" + "x" * j: Fraction((-1) ** j * math.comb(k, j))
        for j in range(k + 1)
    }


class LieDerivation:
    """Derivation of the free associative algebra fixed by generator values."""

    __slots__ = ("val_x", "val_y", "degree_shift")

    def __init__(self, val_x: Assoc, val_y: Assoc, degree_shift: int):
        self.val_x = val_x
        self.val_y = val_y
        self.degree_shift = degree_shift

    def apply(self, elem: Mapping[str, Fraction]) -> Assoc:
        out: Assoc = {}
        for w, q in elem.items():
            for i, ch in enumerate(w):
                val = self.val_x if ch == "x" else self.val_y
                pre, post = w[:i], w[i + 1 :]
                for sub, qs in val.items():
                    ww = pre + sub + post
                    s = out.get(ww, Fraction(0)) + q * qs
                    if s:
                        out[ww] = s
                    else:
                        out.pop(ww, None)
        return out

    def bracket(self, other: "LieDerivation") -> "LieDerivation":
        vx = self.apply(other.val_x)
        _assoc_add(vx, other.apply(self.val_x), Fraction(-1))
        vy = self.apply(other.val_y)
        _assoc_add(vy, other.apply(self.val_y), Fraction(-1))
        return LieDerivation(vx, vy, self.degree_shift + other.degree_shift)

    def scale(self, q: Fraction) -> "LieDerivation":
        return LieDerivation(
            {w: c * q for w, c in self.val_x.items()},
            {w: c * q for w, c in self.val_y.items()},
            self.degree_shift,
        )

    def is_zero(self) -> bool:
        return not self.val_x and not self.val_y


def eps_derivation(k2: int, tilde: bool = False) -> LieDerivation:
    """The derivation for the even index k2 = 2k (normalized when tilde)."""
    if k2 < 0 or k2 % 2:
        raise ValueError("eps index must be even and nonnegative")
    k = k2 // 2
    val_x = _ad_x_pow(k2)
    val_y: Assoc = {}
    for j in range(k):
        term = assoc_bracket(_ad_x_pow(j), _ad_x_pow(k2 - 1 - j))
        _assoc_add(val_y, term, Fraction((-1) ** j))
    der = LieDerivation(val_x, val_y, k2)
    if tilde:
        if k == 0:
            return der.scale(Fraction(-1))
        return der.scale(Fraction(2, math.factorial(k2 - 2)))
    return der


def eps_apply(k2: int, v: LieVec) -> LieVec:
    """Apply eps_{k2}; raises TruncationOverflow if the image leaves the cap."""
    if any(d + k2 > v.maxdeg for d in v.degrees()):
        raise TruncationOverflow(
            f"eps_{k2} image exceeds the truncation degree {v.maxdeg}"
        )
    der = eps_derivation(k2)
    return LieVec.from_assoc(der.apply(v.to_assoc()), v.maxdeg)


class EpsOperator:
    """Composition of eps derivations, with lazily built matrix blocks."""

    def __init__(self, word: EWord, maxdeg: int, tilde: bool = False):
        self.word = make_eword(word)
        self.maxdeg = maxdeg
        self.tilde = tilde
        self.degree_shift = sum(self.word)
        self._ders = [eps_derivation(k, tilde) for k in self.word]
        self._blocks: dict[int, RatMatrix] = {}

    def apply_assoc(self, elem: Mapping[str, Fraction]) -> Assoc:
        acc: Assoc = dict(elem)
        for der in reversed(self._ders):
            acc = der.apply(acc)
        return acc

    def apply(self, v: LieVec) -> LieVec:
        if any(d + self.degree_shift > self.maxdeg for d in v.degrees()):
            raise TruncationOverflow(
                f"operator image exceeds the truncation degree {self.maxdeg}"
            )
        return LieVec.from_assoc(self.apply_assoc(v.to_assoc()), self.maxdeg)

    def matrix(self, d: int) -> RatMatrix:
        """Block sending the degree-d basis into degree d + shift."""
        if d + self.degree_shift > self.maxdeg:
            raise TruncationOverflow(
                f"block at degree {d} exceeds the truncation degree {self.maxdeg}"
            )
        if d not in self._blocks:
            src = [w for w in lyndon_words(d) if len(w) == d]
            tgt_deg = d + self.degree_shift
            tgt = [w for w in lyndon_words(tgt_deg) if len(w) == tgt_deg]
            tgt_pos = {w: i for i, w in enumerate(tgt)}
            cols = []
            for w in src:
                coords = to_lie_coords(self.apply_assoc(expand_lyndon(w)))
                col = [Fraction(0)] * len(tgt)
                for ww, q in coords.items():
                    col[tgt_pos[ww]] = q
                cols.append(col)
            rows = [[cols[j][i] for j in range(len(src))] for i in range(len(tgt))]
            self._blocks[d] = (
                RatMatrix.from_rows(rows)
                if rows
                else RatMatrix(0, len(src), ())
            )
        return self._blocks[d]


def word_operator(w: Iterable[int], maxdeg: int, tilde: bool = False) -> EpsOperator:
    return EpsOperator(make_eword(w), maxdeg, tilde)


# ---------------------------------------------------------------------------
# Relations between bracket words of the derivations


@dataclass(frozen=True)
class RelationSet:
    weight: int
    depth: int
    candidates: tuple[str, ...]
    vectors: tuple[tuple[Fraction, ...], ...]
    lie_degrees: str = "exact"  # evaluated on generators, no truncation

    def to_doc(self) -> dict:
        return {
            "schema": "emzv.lie-relations/1",
            "weight": self.weight,
            "depth": self.depth,
            "candidates": list(self.candidates),
            "kernel": [[str(q) for q in v] for v in self.vectors],
            "lie_degrees": self.lie_degrees,
        }


def _eps_lyndon_candidates(weight: int, depth: int) -> list[tuple[int, ...]]:
    """Lyndon words over the even alphabet with given length and letter sum."""
    letters = list(range(0, weight + 1, 2))

    def is_lyndon(w: tuple[int, ...]) -> bool:
        return all(w < w[i:] + w[:i] for i in range(1, len(w)))

    out = []

    def rec(prefix: tuple[int, ...], remaining: int) -> None:
        if len(prefix) == depth:
            if remaining == 0 and is_lyndon(prefix):
                out.append(prefix)
            return
        for l in letters:
            if l <= remaining:
                rec(prefix + (l,), remaining - l)

    rec((), weight)
    return out


def _candidate_derivation(word: tuple[int, ...]) -> LieDerivation:
    if len(word) == 1:
        return eps_derivation(word[0])
    w = "".join(chr(65 + k // 2) for k in word)  # any injective letter coding
    # standard factorization on the coded word, mapped back to indices
    v = min(w[i:] for i in range(1, len(w)))
    cut = len(w) - len(v)
    left = _candidate_derivation(word[:cut])
    right = _candidate_derivation(word[cut:])
    return left.bracket(right)


def candidate_label(word: tuple[int, ...]) -> str:
    if len(word) == 1:
        return f"eps{word[0]}"
    w = "".join(chr(65 + k // 2) for k in word)
    v = min(w[i:] for i in range(1, len(w)))
    cut = len(w) - len(v)
    return f"[{candidate_label(word[:cut])},{candidate_label(word[cut:])}]"


_relations_cache: dict[tuple, RelationSet] = {}
_relations_lock = threading.Lock()


def find_lie_relations(
    weight: int,
    depth: int,
    maxdeg: int = 16,
    candidates: Sequence[tuple[int, ...]] | None = None,
) -> RelationSet:
    """Kernel of the evaluation of formal bracket words in the derivations.

    A bracket word evaluates to a derivation, and a derivation vanishes if
    and only if it kills both generators, so the kernel computed from the
    generator values is exact; maxdeg plays no role in the result and is
    kept for interface parity with the operator constructors.
    """
    key = (weight, depth, tuple(candidates) if candidates is not None else None)
    with _relations_lock:
        if key in _relations_cache:
            return _relations_cache[key]
    cand = (
        [tuple(c) for c in candidates]
        if candidates is not None
        else _eps_lyndon_candidates(weight, depth)
    )
    for c in cand:
        if sum(c) != weight or len(c) != depth:
            raise ValueError(f"candidate {c} does not match (weight, depth)")
    ders = [_candidate_derivation(c) for c in cand]
    coords: list[tuple[int, str]] = sorted(
        {(g, w) for d in ders for g, side in ((0, d.val_x), (1, d.val_y)) for w in side}
    )
    pos = {c: i for i, c in enumerate(coords)}
    rows = [[Fraction(0)] * len(cand) for _ in coords]
    for j, d in enumerate(ders):
        for g, side in ((0, d.val_x), (1, d.val_y)):
            for w, q in side.items():
                rows[pos[(g, w)]][j] = q
    if not rows:
        rows = [[Fraction(0)] * len(cand)]
    vectors = tuple(kernel_basis(RatMatrix.from_rows(rows)))
    rel = RelationSet(
        weight=weight,
        depth=depth,
        candidates=tuple(candidate_label(c) for c in cand),
        vectors=vectors,
    )
    with _relations_lock:
        _relations_cache.setdefault(key, rel)
    return rel


def relation_tensor_elements(weight: int, depth: int) -> list[dict[EWord, Fraction]]:
    """Relations expanded in the tensor algebra on the e-letters."""
    cand = _eps_lyndon_candidates(weight, depth)
    rel = find_lie_relations(weight, depth, candidates=cand)

    def bracket_expand(word: tuple[int, ...]) -> dict[EWord, Fraction]:
        if len(word) == 1:
            return {word: Fraction(1)}
        w = "".join(chr(65 + k // 2) for k in word)
        v = min(w[i:] for i in range(1, len(w)))
        cut = len(w) - len(v)
        left = bracket_expand(word[:cut])
        right = bracket_expand(word[cut:])
        out: dict[EWord, Fraction] = {}
        for u, qu in left.items():
            for vv, qv in right.items():
                for ww, sign in ((u + vv, 1), (vv + u, -1)):
                    s = out.get(ww, Fraction(0)) + qu * qv * sign
                    if s:
                        out[ww] = s
                    else:
                        out.pop(ww, None)
        return out

    out = []
    for vec in rel.vectors:
        elem: dict[EWord, Fraction] = {}
        for c, q in zip(cand, vec):
            if q:
                for w, qq in bracket_expand(c).items():
                    s = elem.get(w, Fraction(0)) + q * qq
                    if s:
                        elem[w] = s
                    else:
                        elem.pop(w, None)
        out.append(elem)
    return out


def even_words(length: int, total: int) -> Iterator[EWord]:
    """All words over the even letters with given length and letter sum."""
    if length == 0:
        if total == 0:
            yield ()
        return
    for first in range(0, total + 1, 2):
        for rest in even_words(length - 1, total - first):
            yield (first,) + rest


def uu_dual_membership(
    x: EPoly, bounds: tuple[int, int] | None = None
) -> dict[tuple[int, int], bool]:
    """Per homogeneous component: does the functional kill the relation ideal?

    Components are indexed by (word length, letter sum).  The ideal is
    generated, within the given bounds, by the relations found among the
    bracket words of the derivations; bounds default to the componentwise
    maxima present in x.
    """
    comps: dict[tuple[int, int], dict[EWord, CoeffElem]] = {}
    for w, c in x.items():
        comps.setdefault((len(w), sum(w)), {})[w] = c
    need = (
        max((l for l, _ in comps), default=0),
        max((s for _, s in comps), default=0),
    )
    if bounds is None:
        bounds = need
    if bounds[0] < need[0] or bounds[1] < need[1]:
        raise TruncationOverflow(f"bounds {bounds} below component degrees {need}")

    out: dict[tuple[int, int], bool] = {}
    for (length, letter_sum), comp in comps.items():
        ok = True
        for depth in range(2, length + 1):
            for w_rel in range(0, letter_sum + 1, 2):
                rels = relation_tensor_elements(w_rel, depth)
                if not rels:
                    continue
                rest_len = length - depth
                rest_sum = letter_sum - w_rel
                for len_u in range(rest_len + 1):
                    for sum_u in range(0, rest_sum + 1, 2):
                        for u in even_words(len_u, sum_u):
                            for v in even_words(rest_len - len_u, rest_sum - sum_u):
                                for rel in rels:
                                    acc = CoeffElem.zero()
                                    for wr, q in rel.items():
                                        c = comp.get(u + wr + v)
                                        if c is not None:
                                            acc = acc + c.scale(q)
                                    if not acc.is_zero():
                                        ok = False
                                        break
                                if not ok:
                                    break
                            if not ok:
                                break
                        if not ok:
                            break
                    if not ok:
                        break
                if not ok:
                    break
            if not ok:
                break
        out[(length, letter_sum)] = ok
    return out


# ---------------------------------------------------------------------------
# Fourier subspace


def to_E0_basis(x: EPoly) -> tuple[dict[EWord, CoeffElem], EPoly]:
    """Rewrite in E0 combinations; membership holds iff the residual vanishes.

    The combination maps a word ending in a nonzero letter 2k to the
    coefficient of E0(..., 2k) = e_...2k - B_{2k}/(4k) e_...0, and the empty
    word to the constant.  The residual collects what remains on words
    ending in the letter 0.
    """
    combination: dict[EWord, CoeffElem] = {}
    residual: dict[EWord, CoeffElem] = {}
    for w, c in x.items():
        if not w:
            combination[w] = c
        elif w[-1] != 0:
            combination[w] = c
        else:
            residual[w] = residual.get(w, CoeffElem.zero()) + c
    for w, c in combination.items():
        if not w:
            continue
        k2 = w[-1]
        corr = c.scale(-bernoulli(k2) / (2 * k2))
        w0 = w[:-1] + (0,)
        s = residual.get(w0, CoeffElem.zero()) - corr
        if s.is_zero():
            residual.pop(w0, None)
        else:
            residual[w0] = s
    return combination, EPoly(residual, x.table)


def fourier_membership(x: EPoly, order: int = 20) -> bool:
    """True iff the q-expansion of x carries no T = log q terms."""
    return epoly_to_qexp(x, order).is_t_free()


# ---------------------------------------------------------------------------
# Derivations acting on the two-letter series of the constant-term data


class NCDerivation:
    """Derivation of the a, b word algebra with rational generator values."""

    __slots__ = ("val_a", "val_b")

    def __init__(self, val_a: Mapping[str, Fraction], val_b: Mapping[str, Fraction]):
        self.val_a = dict(val_a)
        self.val_b = dict(val_b)

    def apply(self, s: NCSeries) -> NCSeries:
        D = s.maxdeg
        acc: dict[str, CoeffElem] = {}
        for w, c in s.items():
            for i, ch in enumerate(w):
                val = self.val_a if ch == "a" else self.val_b
                pre, post = w[:i], w[i + 1 :]
                room = D - len(pre) - len(post)
                for sub, q in val.items():
                    if len(sub) > room:
                        continue
                    ww = pre + sub + post
                    piece = c.scale(q)
                    s2 = acc.get(ww, CoeffElem.zero()) + piece
                    if s2.is_zero():
                        acc.pop(ww, None)
                    else:
                        acc[ww] = s2
        return NCSeries(D, acc, s.table)


def _to_ab(elem: Assoc) -> dict[str, Fraction]:
    return {w.replace("x", "a").replace("y", "b"): q for w, q in elem.items()}


def eps_tilde_nc(k2: int) -> NCDerivation:
    """The normalized derivation acting on a, b series (x -> a, y -> b)."""
    der = eps_derivation(k2, tilde=True)
    return NCDerivation(_to_ab(der.val_x), _to_ab(der.val_y))


def build_D_derivation(maxdeg: int) -> NCDerivation:
    """eps~_0 + sum_{k >= 1} B_{2k}/(4k) eps~_{2k}, truncated at maxdeg.

    Annihilates t = -[a, b], ytilde and the constant-term series.
    """
    val_a: dict[str, Fraction] = {}
    val_b: dict[str, Fraction] = {}
    k = 0
    while 2 * k + 1 <= maxdeg or k == 0:
        der = eps_derivation(2 * k, tilde=True)
        coeff = Fraction(1) if k == 0 else bernoulli(2 * k) / (4 * k)
        _assoc_add(val_a, _to_ab(der.val_x), coeff)
        _assoc_add(val_b, _to_ab(der.val_y), coeff)
        k += 1
        if 2 * k + 1 > maxdeg:
            break
    return NCDerivation(val_a, val_b)
