import json
import random
from fractions import Fraction as F
from importlib import resources

import pytest

from qnahm.catalog import (
    IdentityRecord,
    builtin_catalog,
    dump_catalog,
    load_catalog,
    q_gauss_check,
    run_catalog,
    verify_identity,
)
from qnahm.expr import Add, Factor, Mul, QPow, Scalar, SumSpec, eval_expr
from qnahm.series import SeriesError, agrees

import oracles

CATALOG = builtin_catalog()
BY_NAME = {r.name: r for r in CATALOG}
h = F(1, 2)


def test_shipped_file_matches_builtin():
    shipped = resources.files("qnahm").joinpath("data/catalog.json").read_text()
    assert json.loads(shipped) == json.loads(dump_catalog(CATALOG))


def test_load_round_trip():
    loaded = load_catalog()
    assert [r.to_json() for r in loaded] == [r.to_json() for r in CATALOG]


def test_catalog_size_and_names():
    names = [r.name for r in CATALOG]
    assert len(names) == len(set(names))
    assert 40 <= len(names) <= 60
    for needed in ("RR-1", "RR-2", "thm-id-0", "key-id-4", "cor-id-4", "id-transform", "R-exp", "B0-star-probe"):
        assert needed in BY_NAME


@pytest.mark.parametrize("rec", CATALOG, ids=lambda r: r.name)
def test_record_at_default_order(rec):
    assert verify_identity(rec).ok


@pytest.mark.parametrize("rec", CATALOG, ids=lambda r: r.name)
def test_record_at_default_plus_ten(rec):
    assert verify_identity(rec, rec.order + 10).ok


def test_theorem_two_leading_coefficients():
    rep = BY_NAME["thm-id-2"]
    f = eval_expr(rep.lhs, 3)
    assert [f[n] for n in range(4)] == [1, 3, 6, 13]
    assert verify_identity(rep).status == "pass"


def test_theorem_zero_starts_on_half_lattice():
    f = eval_expr(BY_NAME["thm-id-0"].lhs, 1)
    assert f.valuation == -h
    assert (f[-h], f[0]) == (4, 8)


# the displayed triple sums in their own (i, j, k) order: bases q, q^2, q^2
THM_M = [[1, 0, -1], [0, 2, -1], [-1, -1, 2]]
THM_LIN = {0: (-h, -h, 0), 1: (h, 1, -1), 2: (h, 1, 0)}


def _literal(which):
    den = (Factor(1, 1, 1, (0, 1, 0, 0)), Factor(1, 2, 2, (0, 0, 1, 0)), Factor(1, 2, 2, (0, 0, 0, 1)))
    return SumSpec(THM_M, THM_LIN[which], den=den, names=("i", "j", "k"))


@pytest.mark.parametrize("which", [0, 1, 2])
def test_literal_triple_sum_matches_permuted_quadruple(which):
    T = 12
    rec = BY_NAME[f"thm-id-{which}"]
    assert rec.permutation == (2, 0, 1)
    permuted = rec.lhs.form.permuted(rec.permutation)
    assert permuted.AD == tuple(tuple(F(x) for x in row) for row in THM_M)
    assert agrees(eval_expr(_literal(which), T), eval_expr(rec.lhs, T), T)


def test_theorem_two_against_brute_force():
    T = 6
    A = [[F(THM_M[i][j], (1, 2, 2)[j]) for j in range(3)] for i in range(3)]
    want = oracles.brute_gnahm(A, THM_LIN[2], 0, (1, 2, 2), T)
    assert oracles.as_dict(eval_expr(BY_NAME["thm-id-2"].rhs, T), T) == want


def test_injected_fault_is_located():
    rec = BY_NAME["thm-id-2"]
    bad = IdentityRecord("bad", rec.lhs, Mul([rec.rhs, Add([Scalar(1), QPow(1)])]), rec.order)
    rep = verify_identity(bad)
    assert rep.status == "fail"
    assert rep.difference.exponent == 1
    assert (rep.difference.left, rep.difference.right) == (3, 4)


def test_probe_is_expected_fail():
    rep = verify_identity(BY_NAME["B0-star-probe"])
    assert rep.status == "expected-fail" and rep.ok
    assert rep.difference.exponent == -h


def test_display_probes_fail_as_expected():
    for name in ("phi-defn-single-factor", "Jacobi-cor-2-weight-3n+2"):
        assert verify_identity(BY_NAME[name]).status == "expected-fail"


def test_unexpected_pass_is_not_ok():
    rec = BY_NAME["RR-1"]
    flipped = IdentityRecord("flipped", rec.lhs, rec.rhs, 10, expect="fail")
    rep = verify_identity(flipped)
    assert rep.status == "unexpected-pass" and not rep.ok


def test_q_gauss():
    assert q_gauss_check(1, 2, 5, 20) is None
    assert q_gauss_check(h, 1, 3, 20) is None


def test_q_gauss_rejects_divergent_case():
    with pytest.raises(SeriesError):
        q_gauss_check(1, 2, 3, 10)


def test_record_validation():
    with pytest.raises(SeriesError):
        IdentityRecord("x", None, None)
    with pytest.raises(SeriesError):
        IdentityRecord("x", Scalar(1), Scalar(1), expect="maybe")
    with pytest.raises(SeriesError):
        IdentityRecord("x", check={"kind": "nope"})


def test_parse_error_names_record(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps([{"name": "broken", "lhs": {"tag": "scalar"}, "rhs": {"tag": "scalar", "value": "1"}}]))
    with pytest.raises(SeriesError, match="broken"):
        load_catalog(p)


def test_empty_catalog(tmp_path):
    p = tmp_path / "empty.json"
    p.write_text("[]")
    s = run_catalog(str(p))
    assert s.ok and s.text().endswith("0 records")


def test_filter_by_tag():
    s = run_catalog(CATALOG, pattern="thm-id", parallel=1)
    assert [r.name for r in s.reports] == ["thm-id-0", "thm-id-1", "thm-id-2"]


def test_parallel_run_keeps_order():
    subset = CATALOG[:8]
    s = run_catalog(subset, parallel=2)
    assert [r.name for r in s.reports] == [r.name for r in subset]
    assert s.ok


# -- rearrangements ----------------------------------------------------------------


def _rearranged(e, rng):
    """Shuffle products and sums, and distribute a product over a sum."""
    if isinstance(e, Mul):
        fs = [_rearranged(f, rng) for f in e.factors]
        rng.shuffle(fs)
        for i, f in enumerate(fs):
            if isinstance(f, Add) and rng.random() < 0.5:
                rest = fs[:i] + fs[i + 1:]
                return Add([Mul([t] + rest) for t in f.terms])
        return Mul(fs)
    if isinstance(e, Add):
        ts = [_rearranged(t, rng) for t in e.terms]
        rng.shuffle(ts)
        return Add(ts)
    return e


REARRANGE = [r for r in CATALOG if r.check is None and isinstance(r.rhs, (Mul, Add))]


@pytest.mark.parametrize("rec", REARRANGE, ids=lambda r: r.name)
def test_rearranged_right_side_agrees(rec):
    rng = random.Random(rec.name)
    T = F(12)
    base = eval_expr(rec.rhs, T)
    for _ in range(3):
        assert agrees(eval_expr(_rearranged(rec.rhs, rng), T), base, T)
