from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emzv.coeffring import CoeffElem
from emzv.errors import FourierViolation
from emzv.qseries import QTSeries, qt_antider, qt_ddT, qt_mul

F = Fraction


def series(order, **terms):
    """terms like m0_j0=Fraction: keys 'c<m>_<j>'."""
    coeffs = {}
    for key, val in terms.items():
        m, j = key[1:].split("_")
        coeffs[(int(m), int(j))] = CoeffElem.from_rational(val)
    return QTSeries(order, coeffs)


def test_mul_examples():
    one_plus_q = series(3, c0_0=1, c1_0=1)
    one_minus_q = series(3, c0_0=1, c1_0=-1)
    assert qt_mul(one_plus_q, one_minus_q) == series(3, c0_0=1, c2_0=-1)

    t = series(5, c0_1=1)
    assert qt_mul(t, t) == series(5, c0_2=1)
    q = series(5, c1_0=1)
    assert qt_mul(q, t) == series(5, c1_1=1)


def test_mul_truncates_to_smaller_order():
    f = series(3, c2_0=1)
    g = series(10, c2_0=1)
    p = qt_mul(f, g)
    assert p.order == 3
    assert p.is_zero()


def test_ddT_examples():
    assert qt_ddT(series(4, c0_1=1)) == series(4, c0_0=1)  # T -> 1
    assert qt_ddT(series(4, c1_0=1)) == series(4, c1_0=1)  # q -> q
    # qT -> qT + q
    assert qt_ddT(series(4, c1_1=1)) == series(4, c1_1=1, c1_0=1)


def test_antider_examples():
    assert qt_antider(series(4, c0_0=1)) == series(4, c0_1=1)  # 1 -> T
    assert qt_antider(series(4, c1_0=1)) == series(4, c1_0=1)  # q -> q
    # qT -> qT - q, checked below against the derivative as well
    got = qt_antider(series(4, c1_1=1))
    assert got == series(4, c1_1=1, c1_0=-1)
    assert qt_ddT(got) == series(4, c1_1=1)


def _random_series(max_order=6, max_t=3):
    keys = st.tuples(st.integers(0, max_order - 1), st.integers(0, max_t))
    vals = st.fractions(min_value=-6, max_value=6, max_denominator=8)
    return st.dictionaries(keys, vals, max_size=6).map(
        lambda d: QTSeries(
            max_order, {k: CoeffElem.from_rational(v) for k, v in d.items()}
        )
    )


@settings(max_examples=80, deadline=None)
@given(_random_series())
def test_ddT_then_antider_is_identity(f):
    assert qt_ddT(qt_antider(f)) == f


@settings(max_examples=80, deadline=None)
@given(_random_series())
def test_antider_kills_constant(f):
    p = qt_antider(f)
    assert p.coefficient(0, 0).is_zero()


@settings(max_examples=50, deadline=None)
@given(_random_series(), _random_series())
def test_leibniz(f, g):
    lhs = qt_ddT(qt_mul(f, g))
    rhs = qt_mul(qt_ddT(f), g) + qt_mul(f, qt_ddT(g))
    assert lhs == rhs


def test_t_free_guard():
    ok = series(4, c1_0=2)
    assert ok.is_t_free()
    ok.require_t_free()
    bad = series(4, c1_1=1)
    assert not bad.is_t_free()
    with pytest.raises(FourierViolation):
        bad.require_t_free()


def test_rendering_sorted():
    f = series(4, c1_1=1, c0_0=3, c1_0=2)
    assert str(f) == "(3 * 1) + (2 * 1) q + (1 * 1) q T"
