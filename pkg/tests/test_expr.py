import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from qnahm.expr import (
    Add,
    Eta,
    Factor,
    Inv,
    Mul,
    NahmRef,
    Neg,
    Poch,
    QPow,
    Rescale,
    Scalar,
    SumSpec,
    Theta,
    eval_expr,
    expr_from_json,
)
from qnahm.nahm import ModularQuadruple, gnahm_expand
from qnahm.products import EtaQuotient, PochSpec
from qnahm.series import QExp, SeriesError, agrees

import oracles
from test_nahm import quadruples


def qq(step, length):
    return Factor(1, step, step, length)


def test_scalar_times_eta():
    e = Scalar(3) * Eta(EtaQuotient(1, 0, {1: -3, 2: 3}))
    f = eval_expr(e, 2)
    assert [f[n] for n in range(3)] == [3, 9, 18]


def test_rogers_ramanujan_sum():
    f = eval_expr(SumSpec([[2]], [0], den=(qq(1, (0, 1)),)), 6)
    assert [f[n] for n in range(7)] == [1, 1, 1, 1, 2, 2, 3]


def test_inverse_euler_product():
    f = eval_expr(Inv(Poch(PochSpec(1, 1, 1, None))), 4)
    assert [f[n] for n in range(5)] == oracles.partition_numbers(4)


def test_result_has_requested_order():
    # factors with negative valuation must not cost precision
    e = Mul([Add([Scalar(1), QPow(F(-1, 2))]), Inv(Poch(PochSpec(1, F(1, 2), F(1, 2), None)))])
    f = eval_expr(e, 7)
    assert f.order == 7
    assert f[F(-1, 2)] == 1


def test_rescale_and_neg():
    e = Neg(Rescale(Theta("psi"), 2))
    f = eval_expr(e, 6)
    assert f == QExp.from_dict({0: -1, 2: -1, 6: -1}, order=6)


def test_theta_negated():
    f = eval_expr(Theta("phi", negate=True), 4)
    assert f == QExp.from_dict({0: 1, 1: -2, 4: 2}, order=4)


def test_eta_flag_adds_shift():
    f = eval_expr(Eta(EtaQuotient(1, 0, {1: 1}), True), 2)
    assert f.valuation == F(1, 24)


def test_negative_length_names_indices():
    s = SumSpec([[2]], [0], num=(Factor(1, 1, 1, (1, -1)),), names=("k",))
    with pytest.raises(SeriesError, match="k=2"):
        eval_expr(s, 10)


def test_sum_rejects_indefinite_form():
    with pytest.raises(SeriesError):
        SumSpec([[1, 2], [2, 1]], [0, 0])


def test_sum_rejects_bad_length_arity():
    with pytest.raises(SeriesError):
        SumSpec([[2]], [0], den=(qq(1, (0, 1, 0)),))


def test_linear_rank_one_sum():
    # sum_n q^n = 1/(1-q)
    f = eval_expr(SumSpec([[0]], [1]), 5)
    assert f == QExp([1] * 6, order=5)


def test_bilateral_signed_sum():
    # sum_{n in Z} (-1)^n q^{n^2} = phi(-q)
    f = eval_expr(SumSpec([[2]], [0], ranges=("all",), base=(-1,)), 9)
    assert f == QExp.from_dict({0: 1, 1: -2, 4: 2, 9: -2}, order=9)


def test_weighted_sum():
    f = eval_expr(SumSpec([[1]], [F(1, 2)], weight=(1, 2), base=(-1,)), 6)
    assert f == QExp.from_dict({0: 1, 1: -3, 3: 5, 6: -7}, order=6)


def test_json_round_trip_all_tags():
    Q = ModularQuadruple(((2, 2, 2), (2, 4, 4), (1, 2, 3)), (1, 0, F(1, 2)), 0, (2, 2, 1))
    e = Add([
        Mul([Scalar(F(3, 4)), QPow(F(-1, 2)), Poch(PochSpec(-1, F(1, 2), 1, None))]),
        Neg(Inv(Theta("psi", True))),
        Rescale(NahmRef(Q, (0, 1, 0)), 2),
        Eta(EtaQuotient(F(1, 4), F(-25, 24), {1: 3, 2: -1}), True),
        SumSpec([[2]], [1], ranges=("all",), base=(-1,), weight=(1, 3)),
        SumSpec([[2]], [1], num=(Factor(-1, 0, 1, (0, 2)),), den=(qq(2, (0, 2)),)),
    ])
    data = json.loads(json.dumps(e.to_json()))
    back = expr_from_json(data)
    assert back.to_json() == e.to_json()
    assert agrees(eval_expr(back, 6), eval_expr(e, 6), 6)


def test_unknown_tag():
    with pytest.raises(SeriesError):
        expr_from_json({"tag": "bogus"})


def _sum_for(Q):
    r = Q.rank
    S = Q.AD
    den = tuple(qq(Q.D[i], tuple(1 if j == i + 1 else 0 for j in range(r + 1))) for i in range(r))
    return SumSpec(S, Q.B, Q.C, den=den)


@settings(max_examples=10, deadline=None)
@given(quadruples())
def test_sum_spec_agrees_with_nahm_engine(Q):
    T = 8
    assert agrees(eval_expr(_sum_for(Q), T), gnahm_expand(Q, T), T)
