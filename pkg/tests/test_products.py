from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from qnahm.products import (
    EtaQuotient,
    PochSpec,
    eta_expand,
    jacobi_cube,
    jacobi_triple,
    phi_product,
    poch,
    psi_product,
    theta_phi,
    theta_psi,
)
from qnahm.series import QExp, SeriesError, agrees, monomial

import oracles


def coeffs(f, T):
    return [f[n] for n in range(T + 1)]


def test_poch_finite_qq2():
    assert poch(PochSpec(1, 1, 1, 2)) == QExp([1, -1, -1, 1])


def test_poch_minus_one():
    assert poch(PochSpec(-1, 0, 1, 2)) == QExp([2, 2])


def test_poch_infinite_is_pentagonal():
    f = poch(PochSpec(1, 1, 1, None), 7)
    assert coeffs(f, 7) == [1, -1, -1, 0, 0, 1, 0, 1]


def test_poch_infinite_against_oracle():
    T = 15
    f = poch(PochSpec(-1, F(1, 2), 1, None), T)
    assert oracles.as_dict(f, T) == oracles.poch_infinite(-1, F(1, 2), 1, T)


def test_poch_bad_length():
    with pytest.raises(SeriesError):
        PochSpec(1, 1, 1, -2)


def test_theta_phi():
    assert theta_phi(9) == QExp.from_dict({0: 1, 1: 2, 4: 2, 9: 2}, order=9)


def test_theta_psi():
    assert theta_psi(10) == QExp.from_dict({0: 1, 1: 1, 3: 1, 6: 1, 10: 1}, order=10)


def test_theta_phi_order_zero():
    assert theta_phi(0) == QExp.one().truncate(0)


def test_triple_product_half():
    lhs, rhs = jacobi_triple(1, F(1, 2), 10)
    assert agrees(lhs, rhs, 10)


def test_triple_product_at_q_vanishes():
    lhs, rhs = jacobi_triple(1, 1, 10)
    assert lhs.truncate(10).is_zero() and rhs.truncate(10).is_zero()


def test_triple_product_minus_q():
    lhs, rhs = jacobi_triple(-1, 1, 10)
    assert agrees(lhs, rhs, 10)
    assert not lhs.is_zero()


def test_triple_product_z_zero():
    with pytest.raises(SeriesError):
        jacobi_triple(0, 1, 5)


def test_jacobi_cube_small():
    lhs, rhs = jacobi_cube(6)
    expected = QExp.from_dict({0: 1, 1: -3, 3: 5, 6: -7}, order=6)
    assert lhs == expected and rhs == expected


def test_jacobi_cube_zero():
    lhs, rhs = jacobi_cube(0)
    assert lhs == rhs == QExp.one().truncate(0)


def test_jacobi_cube_next_terms():
    lhs, rhs = jacobi_cube(15)
    assert agrees(lhs, rhs, 15)
    assert (lhs[10], lhs[15]) == (9, -11)


def test_eta_psi():
    f = eta_expand(EtaQuotient(1, 0, {1: -1, 2: 2}), 6)
    assert f == QExp.from_dict({0: 1, 1: 1, 3: 1, 6: 1}, order=6)


def test_eta_cube_ratio():
    f = eta_expand(EtaQuotient(3, 0, {1: -3, 2: 3}), 3)
    assert coeffs(f, 3) == [3, 9, 18, 39]


def test_eta_empty():
    assert eta_expand(EtaQuotient(), 5) == QExp.one().truncate(5)


def test_eta_against_oracle():
    E = {1: 2, 4: 2, 2: -1}
    T = 20
    assert oracles.as_dict(eta_expand(EtaQuotient(F(1, 3), -1, E), T), T) == oracles.eta_dict(F(1, 3), -1, E, T)


def test_eta_half_modulus():
    T = 10
    f = eta_expand(EtaQuotient(1, 0, {F(1, 2): -1}), T)
    assert oracles.as_dict(f, T) == oracles.poch_infinite_inverse(1, F(1, 2), F(1, 2), T)


def test_eta_convention_shift():
    # eta(tau)^3 / eta(2 tau) carries q^{(3 - 2)/24}
    E = EtaQuotient(1, 0, {1: 3, 2: -1})
    assert eta_expand(E, 5, eta=True) == eta_expand(EtaQuotient(1, F(1, 24), {1: 3, 2: -1}), 5)


def test_weight_is_derived():
    assert EtaQuotient(1, 0, {1: -3, 2: 3}).weight == 0
    assert EtaQuotient(1, 0, {1: 3, 2: -1}).weight == 1
    assert EtaQuotient().weight == 0


def test_eta_json_round_trip():
    E = EtaQuotient(F(-1, 4), F(-25, 24), {F(1, 2): -1, 2: 1})
    assert E.to_json() == {"scalar": "-1/4", "vshift": "-25/24", "exps": {"1/2": -1, "2": 1}}
    assert EtaQuotient.from_json(E.to_json()) == E


# -- properties ------------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(
    st.sampled_from([1, -1, 2, F(1, 2)]),
    st.sampled_from([0, F(1, 2), 1, 2]),
    st.sampled_from([F(1, 2), 1, 2]),
    st.integers(0, 20),
)
def test_poch_recurrence(c, e, s, n):
    step = poch(PochSpec(c, e, s, n)) * (QExp.one() - monomial(c, F(e) + n * F(s)))
    assert step == poch(PochSpec(c, e, s, n + 1))


def test_theta_sides_agree():
    assert agrees(theta_phi(40), phi_product(40), 40)
    assert agrees(theta_psi(40), psi_product(40), 40)


@pytest.mark.parametrize("a", [F(1, 2), 1, 2])
def test_euler_identities(a):
    T = 30
    # sum z^n / (q;q)_n = 1/(z;q)_oo and sum q^{n(n-1)/2} z^n / (q;q)_n = (-z;q)_oo
    one = QExp(order=T)
    two = QExp(order=T)
    n = 0
    while n * a <= T:
        d = poch(PochSpec(1, 1, 1, n)).invert(T)
        one = one + monomial(1, n * F(a)) * d
        two = two + monomial(1, F(n * (n - 1), 2) + n * F(a)) * d
        n += 1
    assert agrees(one, poch(PochSpec(1, a, 1, None), T).invert(T), T)
    assert agrees(two, poch(PochSpec(-1, a, 1, None), T), T)


def _bilateral(weight, quad, lin, T):
    out = {}
    for n in range(-20, 21):
        e = quad * n * n + lin * n
        if e <= T:
            out[F(e)] = out.get(F(e), 0) + weight(n)
    return oracles.clean(out)


def test_pentagonal_weighted_sum():
    # sum (6n+1) q^{(3n^2+n)/2} = J1^5 / J2^2
    T = 40
    lhs = _bilateral(lambda n: 6 * n + 1, F(3, 2), F(1, 2), T)
    assert lhs == oracles.as_dict(eta_expand(EtaQuotient(1, 0, {1: 5, 2: -2}), T), T)


def test_cubic_weighted_sum():
    # sum (3n+1) q^{3n^2+2n} = J1^2 J4^2 / J2
    T = 40
    lhs = _bilateral(lambda n: 3 * n + 1, 3, 2, T)
    assert lhs == oracles.as_dict(eta_expand(EtaQuotient(1, 0, {1: 2, 4: 2, 2: -1}), T), T)


moduli = st.sampled_from([F(1, 2), 1, 2, 3, 4])
quotients = st.builds(
    EtaQuotient,
    st.sampled_from([1, -2, F(3, 4)]),
    st.sampled_from([0, F(1, 2), -1]),
    st.dictionaries(moduli, st.integers(-3, 3), max_size=3),
)


@settings(max_examples=50, deadline=None)
@given(quotients, quotients)
def test_eta_expand_multiplicative(E1, E2):
    T = 10
    prod = eta_expand(E1, T) * eta_expand(E2, T)
    assert agrees(prod, eta_expand(E1 * E2, T), min(prod.order, T))
