import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emzv.coeffring import (
    CoeffElem,
    MzvMonomial,
    bernoulli,
    coeff_mul,
    dump_mzv_table,
    loads_mzv_table,
    parse_coeff,
    reduce_even_zeta,
    render_coeff,
)
from emzv.errors import ConsistencyError, ParseError, TableOverflow

F = Fraction


MINIMAL_TABLE = """
format emzv-mzv-table 1
max_weight 3
symbol z3 3
single_zeta 2 = -1/24 * pi^2
single_zeta 3 = 1 * z3
convergent AB = -1/24 * pi^2
convergent ABB = 1 * z3
convergent AAB = 1 * z3
"""


def test_bernoulli_small_values():
    assert bernoulli(0) == 1
    assert bernoulli(1) == F(-1, 2)
    assert bernoulli(2) == F(1, 6)
    assert bernoulli(3) == 0
    assert bernoulli(4) == F(-1, 30)
    assert bernoulli(12) == F(-691, 2730)


def test_bernoulli_recurrence():
    # sum_{j<m} C(m, j) B_j = 0 for m >= 2
    for m in range(2, 21):
        assert sum(math.comb(m, j) * bernoulli(j) for j in range(m)) == 0


def test_bernoulli_thread_safety():
    from concurrent.futures import ThreadPoolExecutor

    import emzv.coeffring as cr

    cr._bernoulli_cache[:] = [F(1)]
    with ThreadPoolExecutor(max_workers=8) as ex:
        vals = list(ex.map(bernoulli, [40] * 16))
    assert len(set(vals)) == 1
    assert vals[0] == bernoulli(40)


def test_reduce_even_zeta():
    assert reduce_even_zeta(2) == CoeffElem.pi_pow(2, F(-1, 24))
    assert reduce_even_zeta(4) == CoeffElem.pi_pow(4, F(1, 1440))
    assert reduce_even_zeta(6) == CoeffElem.pi_pow(6, F(-1, 60480))


def test_coeff_mul_examples():
    table = loads_mzv_table(MINIMAL_TABLE.replace("max_weight 3", "max_weight 8")
                            + "\n".join(
        [
            "symbol z5 5",
            "single_zeta 4 = 1/1440 * pi^4",
            "single_zeta 5 = 1 * z5",
            "single_zeta 6 = -1/60480 * pi^6",
            "single_zeta 7 = 0",
            "single_zeta 8 = 1/2419200 * pi^8",
            "product z3 z3 = 1 * z3^2",
            "product z3 z5 = 1 * z3 z5",
        ]
        + [
            f"convergent {w} = 0"
            for w in _admissible_range(4, 8)
            if w not in ("AB", "ABB", "AAB")
        ]
    ))
    z3 = CoeffElem.symbol("z3")
    z5 = CoeffElem.symbol("z5")
    assert coeff_mul(z3, z3, table) == CoeffElem({MzvMonomial(0, ("z3", "z3")): F(1)})
    pi2 = CoeffElem.pi_pow(2)
    assert coeff_mul(pi2, pi2, table) == CoeffElem.pi_pow(4)
    assert coeff_mul(z3, z5, table) == CoeffElem(
        {MzvMonomial(0, ("z3", "z5")): F(1)}
    )
    with pytest.raises(TableOverflow):
        coeff_mul(z5, z5, table)
    with pytest.raises(TableOverflow):
        coeff_mul(z3, z3, None)
    # pi powers never overflow
    assert coeff_mul(CoeffElem.pi_pow(6), CoeffElem.pi_pow(6), table) == (
        CoeffElem.pi_pow(12)
    )


def _admissible_range(lo, hi):
    from emzv.coeffring import admissible_words

    out = []
    for w in range(lo, hi + 1):
        out.extend(admissible_words(w))
    return out


def _random_coeffs(max_terms=4):
    monos = st.tuples(
        st.integers(min_value=0, max_value=3),
        st.sampled_from([(), ("z3",), ("z3", "z3")]),
    ).map(lambda t: MzvMonomial(*t))
    rats = st.fractions(
        min_value=-5, max_value=5, max_denominator=12
    )
    return st.dictionaries(monos, rats, max_size=max_terms).map(CoeffElem)


@pytest.fixture(scope="module")
def small_table():
    # Direct construction: a roomy cap so random products stay in bounds.
    from emzv.coeffring import MzvTable

    free = CoeffElem({MzvMonomial(0, ("z3", "z3")): F(1)})
    return MzvTable(
        max_weight=18,
        symbols={"z3": 3},
        products={("z3", "z3"): free},
        single_zeta={},
        convergent_words={},
    )


@settings(max_examples=60, deadline=None)
@given(x=_random_coeffs(), y=_random_coeffs(), z=_random_coeffs())
def test_ring_laws(small_table, x, y, z):
    t = small_table
    assert coeff_mul(x, y, t) == coeff_mul(y, x, t)
    assert coeff_mul(coeff_mul(x, y, t), z, t) == coeff_mul(x, coeff_mul(y, z, t), t)
    assert coeff_mul(x, y + z, t) == coeff_mul(x, y, t) + coeff_mul(x, z, t)


@settings(max_examples=40, deadline=None)
@given(x=_random_coeffs(), y=_random_coeffs())
def test_weight_grading(small_table, x, y):
    t = small_table
    p = coeff_mul(x, y, t)
    split_x = x.weight_split(t.symbols)
    split_y = y.weight_split(t.symbols)
    recompose = CoeffElem.zero()
    by_weight = {}
    for wx, cx in split_x.items():
        for wy, cy in split_y.items():
            piece = coeff_mul(cx, cy, t)
            by_weight[wx + wy] = by_weight.get(wx + wy, CoeffElem.zero()) + piece
    for w, piece in by_weight.items():
        for got_w in piece.weights(t.symbols):
            assert got_w == w
        recompose = recompose + piece
    assert recompose == p


def test_mixed_tables_rejected(small_table):
    from emzv.coeffring import MzvTable, merge_tables
    from emzv.qseries import QTSeries, qt_mul

    other = MzvTable(
        max_weight=4, symbols={}, products={}, single_zeta={}, convergent_words={}
    )
    assert merge_tables(None, small_table) is small_table
    assert merge_tables(small_table, small_table) is small_table
    with pytest.raises(ConsistencyError):
        merge_tables(small_table, other)
    with pytest.raises(ConsistencyError):
        qt_mul(
            QTSeries.constant(1, 4, small_table), QTSeries.constant(1, 4, other)
        )


def test_even_zeta_products_stay_pure():
    for s in (2, 4, 6):
        for t in (2, 4):
            p = coeff_mul(reduce_even_zeta(s), reduce_even_zeta(t), None)
            assert len(p) == 1
            ((mono, _),) = list(p.items())
            assert mono.symbols == () and mono.pi_power == s + t


def test_render_parse_roundtrip():
    c = CoeffElem(
        {
            MzvMonomial(3, ()): F(1, 72),
            MzvMonomial(1, ("z3",)): F(-3),
            MzvMonomial(0, ("z3", "z3")): F(5, 2),
        }
    )
    s = render_coeff(c)
    assert parse_coeff(s, ["z3"]) == c
    assert parse_coeff("0", []) == CoeffElem.zero()
    assert render_coeff(CoeffElem.zero()) == "0"
    with pytest.raises(ParseError):
        parse_coeff("1 * zz9", ["z3"])
    with pytest.raises(ParseError):
        parse_coeff("nonsense", ["z3"])


def test_load_minimal_table():
    t = loads_mzv_table(MINIMAL_TABLE)
    assert t.max_weight == 3
    assert t.symbols == {"z3": 3}
    assert t.single_zeta[2] == reduce_even_zeta(2)
    # round trip through the writer
    again = loads_mzv_table(dump_mzv_table(t))
    assert again.convergent_words == t.convergent_words
    assert again.single_zeta == t.single_zeta


def test_load_empty_table():
    t = loads_mzv_table("format emzv-mzv-table 1\nmax_weight 0\n")
    assert t.max_weight == 0
    assert not t.symbols
    # the ring still contains 1
    assert coeff_mul(CoeffElem.one(), CoeffElem.one(), t) == CoeffElem.one()


def test_missing_zeta2_rejected():
    text = "format emzv-mzv-table 1\nmax_weight 2\n"
    with pytest.raises(ConsistencyError):
        loads_mzv_table(text)


def test_wrong_zeta2_rejected():
    text = (
        "format emzv-mzv-table 1\nmax_weight 2\n"
        "single_zeta 2 = 1/6 * pi^2\nconvergent AB = 1/6 * pi^2\n"
    )
    with pytest.raises(ConsistencyError):
        loads_mzv_table(text)


def test_weight_mismatch_rejected():
    text = MINIMAL_TABLE.replace(
        "convergent AAB = 1 * z3", "convergent AAB = -1/24 * pi^2"
    )
    with pytest.raises(ConsistencyError):
        loads_mzv_table(text)


def test_missing_convergent_word_rejected():
    text = MINIMAL_TABLE.replace("convergent AAB = 1 * z3\n", "")
    with pytest.raises(ConsistencyError):
        loads_mzv_table(text)


def test_parse_errors():
    with pytest.raises(ParseError):
        loads_mzv_table("max_weight 2\n")  # no format line
    with pytest.raises(ParseError):
        loads_mzv_table("format emzv-mzv-table 99\nmax_weight 0\n")
    with pytest.raises(ParseError):
        loads_mzv_table(
            "format emzv-mzv-table 1\nmax_weight 0\nfrobnicate 1\n"
        )
