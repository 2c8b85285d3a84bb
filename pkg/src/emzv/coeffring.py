"""Exact coefficient arithmetic.

The coefficient ring is a polynomial ring over Q in one formal symbol ``pi``
together with a finite list of multiple-zeta generators supplied by a data
table.  Throughout the package ``pi`` denotes 2*pi*i, so that for even s

    zeta(s) = -B_s / (2 * s!) * pi**s,

and even single zetas never appear as generators: they are eliminated in
favor of powers of ``pi``.  Odd zeta values and irreducible higher-depth
zetas are opaque symbols (``z3``, ``z5``, ``z7``, ``z35``, ...) whose
products are free; the table certifies this basis up to its weight cap and
records the reduction of every convergent iterated-integral word into it.

A :class:`CoeffElem` is a finite Q-linear combination of monomials
``pi**a * z3**b * ...``.  Addition is table-free; multiplication goes
through :func:`coeff_mul`, which enforces the weight cap of the table
whenever two symbol-bearing monomials meet.

Table documents are versioned structured text; see :func:`load_mzv_table`
for the grammar.
"""

from __future__ import annotations

import math
import re
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Iterable, Iterator, Mapping, NamedTuple

from .errors import ConsistencyError, ParseError, TableOverflow

Rational = Fraction

PI_SYMBOL = "pi"

_bernoulli_cache: list[Fraction] = [Fraction(1)]
_bernoulli_lock = threading.Lock()


def bernoulli(m: int) -> Fraction:
    """Return B_m for the generating function t/(e^t - 1), so B_1 = -1/2.

    Memoized; safe under concurrent readers.
    """
    if m < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    if m >= len(_bernoulli_cache):
        with _bernoulli_lock:
            while len(_bernoulli_cache) <= m:
                n = len(_bernoulli_cache)
                acc = Fraction(0)
                for j in range(n):
                    acc += math.comb(n + 1, j) * _bernoulli_cache[j]
                _bernoulli_cache.append(-acc / (n + 1))
    return _bernoulli_cache[m]


class MzvMonomial(NamedTuple):
    """Commutative monomial pi**pi_power * (product of basis symbols).

    ``symbols`` is sorted and may contain repeats (powers).
    """

    pi_power: int
    symbols: tuple[str, ...]

    def weight(self, symbol_weights: Mapping[str, int]) -> int:
        return self.pi_power + sum(symbol_weights[s] for s in self.symbols)

    def symbol_weight(self, symbol_weights: Mapping[str, int]) -> int:
        return sum(symbol_weights[s] for s in self.symbols)


MONOMIAL_ONE = MzvMonomial(0, ())


class CoeffElem:
    """Finite map MzvMonomial -> Fraction with no zero values stored."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[MzvMonomial, Fraction] | None = None):
        d: dict[MzvMonomial, Fraction] = {}
        if terms:
            for mono, q in terms.items():
                if q:
                    d[mono] = Fraction(q)
        self._terms = d

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "CoeffElem":
        return CoeffElem()

    @staticmethod
    def one() -> "CoeffElem":
        return CoeffElem({MONOMIAL_ONE: Fraction(1)})

    @staticmethod
    def from_rational(q: Fraction | int) -> "CoeffElem":
        return CoeffElem({MONOMIAL_ONE: Fraction(q)})

    @staticmethod
    def pi_pow(k: int, coeff: Fraction | int = 1) -> "CoeffElem":
        return CoeffElem({MzvMonomial(k, ()): Fraction(coeff)})

    @staticmethod
    def symbol(name: str, coeff: Fraction | int = 1) -> "CoeffElem":
        return CoeffElem({MzvMonomial(0, (name,)): Fraction(coeff)})

    # -- queries ------------------------------------------------------

    def items(self) -> Iterator[tuple[MzvMonomial, Fraction]]:
        return iter(self._terms.items())

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def coefficient(self, mono: MzvMonomial) -> Fraction:
        return self._terms.get(mono, Fraction(0))

    def is_rational(self) -> bool:
        return all(m == MONOMIAL_ONE for m in self._terms)

    def rational_part(self) -> Fraction:
        return self._terms.get(MONOMIAL_ONE, Fraction(0))

    def has_symbols(self) -> bool:
        return any(m.symbols for m in self._terms)

    def weights(self, symbol_weights: Mapping[str, int]) -> set[int]:
        return {m.weight(symbol_weights) for m in self._terms}

    def weight_split(
        self, symbol_weights: Mapping[str, int]
    ) -> dict[int, "CoeffElem"]:
        """Split into weight-homogeneous pieces (pi counts weight one)."""
        out: dict[int, dict[MzvMonomial, Fraction]] = {}
        for mono, q in self._terms.items():
            out.setdefault(mono.weight(symbol_weights), {})[mono] = q
        return {w: CoeffElem(d) for w, d in out.items()}

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: "CoeffElem") -> "CoeffElem":
        if not isinstance(other, CoeffElem):
            return NotImplemented
        d = dict(self._terms)
        for mono, q in other._terms.items():
            s = d.get(mono, Fraction(0)) + q
            if s:
                d[mono] = s
            else:
                d.pop(mono, None)
        out = CoeffElem()
        out._terms = d
        return out

    def __neg__(self) -> "CoeffElem":
        out = CoeffElem()
        out._terms = {m: -q for m, q in self._terms.items()}
        return out

    def __sub__(self, other: "CoeffElem") -> "CoeffElem":
        if not isinstance(other, CoeffElem):
            return NotImplemented
        return self + (-other)

    def scale(self, q: Fraction | int) -> "CoeffElem":
        q = Fraction(q)
        if not q:
            return CoeffElem()
        out = CoeffElem()
        out._terms = {m: c * q for m, c in self._terms.items()}
        return out

    def mul_pi(self, k: int) -> "CoeffElem":
        """Multiply by pi**k (always within bounds: pi is a free variable)."""
        out = CoeffElem()
        out._terms = {
            MzvMonomial(m.pi_power + k, m.symbols): q for m, q in self._terms.items()
        }
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoeffElem):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        return f"CoeffElem({render_coeff(self)!r})"

    def __str__(self) -> str:
        return render_coeff(self)


ZERO = CoeffElem.zero()
ONE = CoeffElem.one()


def reduce_even_zeta(s: int) -> CoeffElem:
    """zeta(s) for even s >= 2 as a rational multiple of pi**s."""
    if s < 2 or s % 2:
        raise ValueError("reduce_even_zeta needs an even integer >= 2")
    return CoeffElem.pi_pow(s, -bernoulli(s) / (2 * math.factorial(s)))


# ---------------------------------------------------------------------------
# The reduction table


@dataclass
class MzvTable:
    """Certified zeta data up to a weight cap.

    ``products`` declares closure of the basis under multiplication; format
    version 1 requires every entry to equal the free product of its pair, so
    the basis is a polynomial basis.  ``convergent_words`` maps every
    admissible word over the letters A, B (first letter integrated first,
    A carrying dt/(1-t), B carrying dt/t, admissible = starts with A and
    ends with B) to its value in the basis.  ``pi`` denotes 2*pi*i, hence
    single_zeta[2] = -1/24 * pi^2.
    """

    max_weight: int
    symbols: dict[str, int]
    products: dict[tuple[str, str], CoeffElem]
    single_zeta: dict[int, CoeffElem]
    convergent_words: dict[str, CoeffElem]
    caches: dict = field(default_factory=dict, repr=False, compare=False)
    cache_lock: threading.Lock = field(
        default_factory=threading.Lock, repr=False, compare=False
    )

    def monomial_weight(self, mono: MzvMonomial) -> int:
        return mono.weight(self.symbols)

    def mul(self, x: CoeffElem, y: CoeffElem) -> CoeffElem:
        return coeff_mul(x, y, self)


def coeff_mul(x: CoeffElem, y: CoeffElem, table: MzvTable | None) -> CoeffElem:
    """Bilinear product; pi powers add, symbol products go through the table.

    Raises TableOverflow when two symbol-bearing monomials meet whose symbol
    weights sum beyond the table's cap (or when there is no table at all):
    beyond the cap the data cannot certify that the basis stays free.
    """
    acc: dict[MzvMonomial, Fraction] = {}
    for mx, qx in x.items():
        for my, qy in y.items():
            if mx.symbols and my.symbols:
                if table is None:
                    raise TableOverflow(
                        "symbol product requires a table: "
                        f"{mx.symbols} * {my.symbols}"
                    )
                sw = mx.symbol_weight(table.symbols) + my.symbol_weight(table.symbols)
                if sw > table.max_weight:
                    raise TableOverflow(
                        f"symbol product of weight {sw} exceeds table cap "
                        f"{table.max_weight}"
                    )
            mono = MzvMonomial(
                mx.pi_power + my.pi_power, tuple(sorted(mx.symbols + my.symbols))
            )
            q = qx * qy
            s = acc.get(mono, Fraction(0)) + q
            if s:
                acc[mono] = s
            else:
                acc.pop(mono, None)
    return CoeffElem(acc)


def merge_tables(a: MzvTable | None, b: MzvTable | None) -> MzvTable | None:
    """Shared table of two operands; mixing distinct tables is an error."""
    if a is not None and b is not None and a is not b:
        raise ConsistencyError("operands carry different coefficient tables")
    return a or b


# ---------------------------------------------------------------------------
# Rendering and parsing of coefficient expressions
#
# coeff     := "0" | term (" + " term)*
# term      := rational " * " monomial
# monomial  := "1" | factor (" " factor)*
# factor    := name | name "^" posint          (name is "pi" or a symbol)
# rational  := ["-"] int ["/" posint]


def render_monomial(mono: MzvMonomial) -> str:
    factors: list[str] = []
    if mono.pi_power:
        factors.append(
            PI_SYMBOL if mono.pi_power == 1 else f"{PI_SYMBOL}^{mono.pi_power}"
        )
    run: list[str] = list(mono.symbols)
    i = 0
    while i < len(run):
        j = i
        while j < len(run) and run[j] == run[i]:
            j += 1
        factors.append(run[i] if j - i == 1 else f"{run[i]}^{j - i}")
        i = j
    return " ".join(factors) if factors else "1"


def render_coeff(c: CoeffElem) -> str:
    if c.is_zero():
        return "0"
    terms = sorted(c.items(), key=lambda kv: (kv[0].symbols, kv[0].pi_power))
    return " + ".join(f"{q} * {render_monomial(m)}" for m, q in terms)


_FACTOR_RE = re.compile(r"^([A-Za-z][A-Za-z0-9]*)(?:\^(\d+))?$")


def parse_coeff(text: str, known_symbols: Iterable[str]) -> CoeffElem:
    """Inverse of render_coeff over the given symbol alphabet."""
    known = set(known_symbols)
    text = text.strip()
    if text == "0":
        return CoeffElem.zero()
    acc = CoeffElem.zero()
    for chunk in text.split("+"):
        chunk = chunk.strip()
        if "*" not in chunk:
            raise ParseError(f"term without '*': {chunk!r}")
        qs, ms = chunk.split("*", 1)
        try:
            q = Fraction(qs.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational {qs.strip()!r}") from exc
        ms = ms.strip()
        pi_power = 0
        syms: list[str] = []
        if ms != "1":
            for factor in ms.split():
                m = _FACTOR_RE.match(factor)
                if not m:
                    raise ParseError(f"bad monomial factor {factor!r}")
                name, exp = m.group(1), int(m.group(2) or 1)
                if name == PI_SYMBOL:
                    pi_power += exp
                elif name in known:
                    syms.extend([name] * exp)
                else:
                    raise ParseError(f"unknown symbol {name!r}")
        acc = acc + CoeffElem({MzvMonomial(pi_power, tuple(sorted(syms))): q})
    return acc


# ---------------------------------------------------------------------------
# Table documents
#
# Line-based, '#' comments, blank lines ignored:
#
#   format emzv-mzv-table 1
#   max_weight 8
#   symbol z3 3
#   single_zeta 2 = -1/24 * pi^2
#   product z3 z5 = 1 * z3 z5
#   convergent AB = -1/24 * pi^2

FORMAT_NAME = "emzv-mzv-table"
FORMAT_VERSION = 1


def admissible_words(weight: int) -> list[str]:
    """All A...B words of the given length (the convergent words)."""
    if weight < 2:
        return []
    return ["A" + "".join(mid) + "B" for mid in _all_ab(weight - 2)]


def _all_ab(n: int) -> Iterator[tuple[str, ...]]:
    if n == 0:
        yield ()
        return
    for rest in _all_ab(n - 1):
        yield ("A",) + rest
        yield ("B",) + rest


def load_mzv_table(source: IO[str] | IO[bytes]) -> MzvTable:
    """Parse and validate a table document from a readable stream."""
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return loads_mzv_table(data)


def loads_mzv_table(text: str) -> MzvTable:
    max_weight: int | None = None
    symbols: dict[str, int] = {}
    products: dict[tuple[str, str], CoeffElem] = {}
    single_zeta: dict[int, CoeffElem] = {}
    convergent: dict[str, CoeffElem] = {}
    saw_format = False

    def split_entry(rest: str, lineno: int) -> tuple[str, str]:
        if "=" not in rest:
            raise ParseError(f"line {lineno}: missing '='")
        lhs, rhs = rest.split("=", 1)
        return lhs.strip(), rhs.strip()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "format":
            parts = rest.split()
            if len(parts) != 2 or parts[0] != FORMAT_NAME:
                raise ParseError(f"line {lineno}: unrecognized format line")
            if int(parts[1]) != FORMAT_VERSION:
                raise ParseError(f"line {lineno}: unsupported version {parts[1]}")
            saw_format = True
        elif head == "max_weight":
            max_weight = int(rest)
        elif head == "symbol":
            parts = rest.split()
            if len(parts) != 2:
                raise ParseError(f"line {lineno}: expected 'symbol NAME WEIGHT'")
            name, w = parts[0], int(parts[1])
            if name == PI_SYMBOL or name in symbols:
                raise ParseError(f"line {lineno}: bad or duplicate symbol {name!r}")
            symbols[name] = w
        elif head == "single_zeta":
            lhs, rhs = split_entry(rest, lineno)
            s = int(lhs)
            if s in single_zeta:
                raise ParseError(f"line {lineno}: duplicate single_zeta {s}")
            single_zeta[s] = parse_coeff(rhs, symbols)
        elif head == "product":
            lhs, rhs = split_entry(rest, lineno)
            pair = tuple(sorted(lhs.split()))
            if len(pair) != 2:
                raise ParseError(f"line {lineno}: expected 'product S T = ...'")
            if pair in products:
                raise ParseError(f"line {lineno}: duplicate product {pair}")
            products[pair] = parse_coeff(rhs, symbols)  # type: ignore[index]
        elif head == "convergent":
            lhs, rhs = split_entry(rest, lineno)
            if not lhs or set(lhs) - {"A", "B"}:
                raise ParseError(f"line {lineno}: bad word {lhs!r}")
            if lhs in convergent:
                raise ParseError(f"line {lineno}: duplicate word {lhs!r}")
            convergent[lhs] = parse_coeff(rhs, symbols)
        else:
            raise ParseError(f"line {lineno}: unknown directive {head!r}")

    if not saw_format:
        raise ParseError("missing format line")
    if max_weight is None:
        raise ParseError("missing max_weight")

    table = MzvTable(
        max_weight=max_weight,
        symbols=symbols,
        products=products,  # type: ignore[arg-type]
        single_zeta=single_zeta,
        convergent_words=convergent,
    )
    _validate_table(table)
    return table


def _validate_table(t: MzvTable) -> None:
    for name, w in t.symbols.items():
        if not 1 <= w <= t.max_weight:
            raise ConsistencyError(f"symbol {name} has weight {w} outside 1..cap")

    def check_homogeneous(c: CoeffElem, w: int, what: str) -> None:
        ws = c.weights(t.symbols)
        if ws and ws != {w}:
            raise ConsistencyError(f"{what}: weight {ws} != {w}")

    for s in range(2, t.max_weight + 1):
        if s not in t.single_zeta:
            raise ConsistencyError(f"missing single_zeta({s})")
    for s, c in t.single_zeta.items():
        check_homogeneous(c, s, f"single_zeta({s})")
        if s % 2 == 0 and c != reduce_even_zeta(s):
            raise ConsistencyError(
                f"single_zeta({s}) must equal the Bernoulli value "
                f"{render_coeff(reduce_even_zeta(s))}"
            )

    names = sorted(t.symbols)
    for i, a in enumerate(names):
        for b in names[i:]:
            if t.symbols[a] + t.symbols[b] <= t.max_weight:
                if (a, b) not in t.products:
                    raise ConsistencyError(f"missing product entry for ({a}, {b})")
    for (a, b), c in t.products.items():
        if a not in t.symbols or b not in t.symbols:
            raise ConsistencyError(f"product over unknown symbols ({a}, {b})")
        w = t.symbols[a] + t.symbols[b]
        check_homogeneous(c, w, f"product ({a}, {b})")
        free = CoeffElem({MzvMonomial(0, tuple(sorted((a, b)))): Fraction(1)})
        if c != free:
            raise ConsistencyError(
                f"format v1 requires free products; ({a}, {b}) is reduced"
            )

    for w, c in t.convergent_words.items():
        if not (w.startswith("A") and w.endswith("B")):
            raise ConsistencyError(f"word {w!r} is not admissible")
        if len(w) > t.max_weight:
            raise ConsistencyError(f"word {w!r} exceeds the weight cap")
        check_homogeneous(c, len(w), f"convergent {w}")
    for weight in range(2, t.max_weight + 1):
        for w in admissible_words(weight):
            if w not in t.convergent_words:
                raise ConsistencyError(f"missing convergent word {w}")


def dump_mzv_table(t: MzvTable) -> str:
    lines = [
        "# zeta reduction table; pi denotes 2*pi*i",
        f"format {FORMAT_NAME} {FORMAT_VERSION}",
        f"max_weight {t.max_weight}",
    ]
    for name in sorted(t.symbols, key=lambda n: (t.symbols[n], n)):
        lines.append(f"symbol {name} {t.symbols[name]}")
    for s in sorted(t.single_zeta):
        lines.append(f"single_zeta {s} = {render_coeff(t.single_zeta[s])}")
    for a, b in sorted(t.products):
        lines.append(f"product {a} {b} = {render_coeff(t.products[(a, b)])}")
    for w in sorted(t.convergent_words, key=lambda w: (len(w), w)):
        lines.append(f"convergent {w} = {render_coeff(t.convergent_words[w])}")
    return "\n".join(lines) + "\n"


_shipped: dict[str, MzvTable] = {}
_shipped_lock = threading.Lock()

SHIPPED_TABLE_RESOURCE = "mzv_table_w8.txt"


def shipped_table() -> MzvTable:
    """The table packaged with the distribution (weight cap 8)."""
    with _shipped_lock:
        if SHIPPED_TABLE_RESOURCE not in _shipped:
            from importlib.resources import files

            text = (
                files("emzv.data").joinpath(SHIPPED_TABLE_RESOURCE).read_text("utf-8")
            )
            _shipped[SHIPPED_TABLE_RESOURCE] = loads_mzv_table(text)
        return _shipped[SHIPPED_TABLE_RESOURCE]
