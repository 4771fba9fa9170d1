from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from qnahm.products import PochSpec, poch, theta_psi
from qnahm.series import INF, QExp, SeriesError, agrees, first_difference, monomial

import oracles


def series(d, order=INF):
    return QExp.from_dict(d, order=order)


# -- construction ------------------------------------------------------------


def test_monomial_one():
    assert monomial(1, 0) == QExp.one()


def test_monomial_half_exponent():
    m = monomial(-7, F(1, 2))
    assert list(m.items()) == [(F(1, 2), -7)]
    assert m.denom == 2


def test_monomial_zero_is_canonical():
    z = monomial(0, 3)
    assert z.is_zero() and len(z.coeffs) == 0 and z.lo == 0 and z.denom == 1


# -- arithmetic ----------------------------------------------------------------


def test_add_aligns_lattices():
    s = monomial(1, 1) + monomial(1, F(1, 2))
    assert s.denom == 2
    assert list(s.items()) == [(F(1, 2), 1), (F(1), 1)]


def test_telescoping_product():
    geo = QExp([1] * 11, order=10)
    assert agrees(QExp([1, -1]) * geo, QExp.one(), 10)


def test_square_of_two_plus_two_q():
    assert QExp([2, 2]) * QExp([2, 2]) == QExp([4, 8, 4])


def test_invert_geometric():
    assert QExp([1, -1]).invert(3) == QExp([1, 1, 1, 1], order=3)


def test_invert_monomial():
    inv = QExp([0, 2]).invert(5)
    assert list(inv.items()) == [(F(-1), F(1, 2))]


def test_invert_euler_product_gives_partitions():
    T = 7
    inv = poch(PochSpec(1, 1, 1, None), T).invert(T)
    assert [inv[n] for n in range(T + 1)] == oracles.partition_numbers(T)


def test_invert_zero_raises():
    with pytest.raises(SeriesError):
        QExp().invert(3)


def test_order_of_product_with_negative_valuation():
    a = QExp([1, 1], lo=-1, order=5)  # q^-1 + 1 + O(q^6)
    b = QExp([1, 2], order=4)
    assert (a * b).order == 3


# -- log / exp -----------------------------------------------------------------


def test_log_one():
    assert QExp.one().log(5).is_zero()


def test_log_geometric():
    lg = QExp([1, -1]).invert(3).log(3)
    assert [lg[n] for n in range(4)] == [0, 1, F(1, 2), F(1, 3)]


def test_log_euler_product_is_divisor_sum():
    T = 12
    lg = poch(PochSpec(1, 1, 1, None), T).log(T)
    assert [lg[n] for n in range(1, T + 1)] == [-F(oracles.sigma1(n), n) for n in range(1, T + 1)]


def test_log_needs_unit_constant():
    with pytest.raises(SeriesError):
        QExp([2, 1]).log(4)


# -- rescaling -----------------------------------------------------------------


def test_rescale_integer():
    assert QExp([1, 1]).rescale(2) == series({0: 1, 2: 1})


def test_rescale_collapses_lattice():
    r = monomial(1, F(1, 2)).rescale(2)
    assert r == monomial(1, 1) and r.denom == 1


def test_negate_q_of_psi():
    got = theta_psi(6).negate_q()
    assert got == series({0: 1, 1: -1, 3: -1, 6: 1}, order=6)


# -- comparison ----------------------------------------------------------------


def test_equal_to_equal():
    assert first_difference(QExp([1, 1]), QExp([1, 1]), 10) is None


def test_equal_to_first_difference():
    d = first_difference(QExp([1, 1]), QExp([1, 1, 1]), 2)
    assert (d.exponent, d.left, d.right) == (2, 0, 1)


def test_compare_beyond_order_raises():
    with pytest.raises(SeriesError):
        first_difference(QExp([1, 1], order=3), QExp([1, 1]), 5)


def test_json_round_trip():
    f = series({F(-1, 2): 3, 2: F(-5, 7)}, order=F(9, 2))
    data = f.to_json()
    assert data["order"] == "9/2"
    assert QExp.from_json(data) == f


def test_format_on_own_lattice():
    f = series({F(-1, 2): 4, 0: 8, 1: -1})
    assert f.format() == "4q^{-1/2} + 8 - q"


# -- properties ------------------------------------------------------------------

ORDER = 8
small = st.integers(-4, 4)


@st.composite
def qexps(draw, denom=None):
    d = denom or draw(st.sampled_from([1, 2]))
    lo = draw(st.integers(-2, 2))
    coeffs = draw(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=3), max_size=6))
    return QExp(coeffs, lo, d, order=ORDER)


@st.composite
def units(draw):
    rest = draw(st.lists(small, max_size=6))
    return QExp([1] + rest, order=ORDER)


@settings(max_examples=200, deadline=None)
@given(qexps(), qexps(), qexps())
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    T = min((a * (b + c)).order, (a * b + a * c).order)
    assert agrees(a * (b + c), a * b + a * c, T)


@settings(max_examples=100, deadline=None)
@given(units())
def test_invert_round_trip(a):
    assert agrees(a * a.invert(ORDER), QExp.one(), ORDER)


@settings(max_examples=60, deadline=None)
@given(units(), units())
def test_log_is_additive(a, b):
    assert agrees((a * b).log(ORDER), a.log(ORDER) + b.log(ORDER), ORDER)


@settings(max_examples=60, deadline=None)
@given(units())
def test_exp_inverts_log(a):
    assert agrees(a.log(ORDER).exp(ORDER), a, ORDER)


@settings(max_examples=100, deadline=None)
@given(qexps(), st.sampled_from([F(1, 2), F(2), F(3), F(2, 3)]))
def test_rescale_round_trip(a, s):
    assert a.rescale(s).rescale(1 / s) == a
    assert a.rescale(1) == a


@settings(max_examples=100, deadline=None)
@given(qexps(denom=1))
def test_negate_q_involution(a):
    assert a.negate_q().negate_q() == a


@settings(max_examples=100, deadline=None)
@given(qexps(), qexps())
def test_product_matches_dict_oracle(a, b):
    p = a * b
    if p.order == INF:
        T = 20
    else:
        T = p.order
    assert oracles.as_dict(p, T) == oracles.mul(oracles.as_dict(a, 99), oracles.as_dict(b, 99), T)
