"""Identity records, their verification, and the built-in catalog.

A record either compares two expressions (``lhs`` and ``rhs``) or delegates
to one of the structural checks of :mod:`qnahm.nahm` (``check``).  Records
marked ``expect="fail"`` document a known mismatch: they count as green when
the two sides differ and as a failure if they unexpectedly agree.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Optional, Sequence

from . import linalg
from .expr import (
    Add,
    Eta,
    Expr,
    Factor,
    Inv,
    Mul,
    NahmRef,
    Poch,
    QPow,
    Rescale,
    Scalar,
    SumSpec,
    Theta,
    eval_expr,
    expr_from_json,
)
from .nahm import (
    EXAM_A,
    ModularQuadruple,
    ModularTriple,
    dual_quadruple,
    reindex_rank4,
    splitting_check,
)
from .products import EtaQuotient, PochSpec
from .series import Difference, QExp, SeriesError, as_fraction, first_difference, format_rational

__all__ = [
    "IdentityRecord",
    "Report",
    "Summary",
    "verify_identity",
    "q_gauss_check",
    "builtin_catalog",
    "load_catalog",
    "dump_catalog",
    "run_catalog",
    "DEFAULT_ORDER",
]

DEFAULT_ORDER = Fraction(25)
CHECK_KINDS = ("reindex", "splitting")


@dataclass(frozen=True, eq=False)
class IdentityRecord:
    name: str
    lhs: Optional[Expr] = None
    rhs: Optional[Expr] = None
    order: Fraction = DEFAULT_ORDER
    tags: tuple = ()
    permutation: Optional[tuple] = None
    expect: str = "pass"
    check: Optional[dict] = None
    note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "order", as_fraction(self.order))
        object.__setattr__(self, "tags", tuple(self.tags))
        if self.permutation is not None:
            object.__setattr__(self, "permutation", tuple(int(i) for i in self.permutation))
        if self.order <= 0:
            raise SeriesError(f"record {self.name}: order must be positive")
        if self.expect not in ("pass", "fail"):
            raise SeriesError(f"record {self.name}: expect must be 'pass' or 'fail'")
        if self.check is None:
            if self.lhs is None or self.rhs is None:
                raise SeriesError(f"record {self.name}: needs lhs and rhs, or a check")
        elif self.check.get("kind") not in CHECK_KINDS:
            raise SeriesError(f"record {self.name}: unknown check {self.check.get('kind')!r}")

    def matches(self, pattern: str) -> bool:
        return pattern in self.name or any(pattern in t for t in self.tags)

    def to_json(self) -> dict:
        d = {"name": self.name, "order": format_rational(self.order), "tags": list(self.tags),
             "expect": self.expect}
        if self.permutation is not None:
            d["permutation"] = list(self.permutation)
        if self.note:
            d["note"] = self.note
        if self.check is not None:
            d["check"] = dict(self.check)
        else:
            d["lhs"] = self.lhs.to_json()
            d["rhs"] = self.rhs.to_json()
        return d

    @classmethod
    def from_json(cls, d: dict) -> "IdentityRecord":
        if not isinstance(d, dict) or "name" not in d:
            raise SeriesError("record must be an object with a name")
        name = d["name"]
        try:
            check = d.get("check")
            return cls(
                name,
                None if check else expr_from_json(d["lhs"]),
                None if check else expr_from_json(d["rhs"]),
                as_fraction(d.get("order", "25")),
                tuple(d.get("tags", ())),
                tuple(d["permutation"]) if d.get("permutation") is not None else None,
                d.get("expect", "pass"),
                check,
                d.get("note", ""),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SeriesError(f"record {name}: {exc}") from None


@dataclass(frozen=True)
class Report:
    name: str
    expect: str
    difference: Optional[Difference]
    order: Fraction
    lhs_terms: int = 0
    rhs_terms: int = 0
    elapsed: float = 0.0
    error: Optional[str] = None

    @property
    def agreed(self) -> bool:
        return self.error is None and self.difference is None

    @property
    def status(self) -> str:
        if self.error is not None:
            return "error"
        if self.expect == "fail":
            return "expected-fail" if self.difference is not None else "unexpected-pass"
        return "pass" if self.difference is None else "fail"

    @property
    def ok(self) -> bool:
        return self.status in ("pass", "expected-fail")

    def line(self) -> str:
        s = f"{self.status.upper():16s} {self.name} (order {format_rational(self.order)})"
        if self.error is not None:
            s += f": {self.error}"
        elif self.difference is not None:
            s += f": first difference at {self.difference}"
        return s

    def to_json(self) -> dict:
        d = {"name": self.name, "status": self.status, "order": format_rational(self.order),
             "lhs_terms": self.lhs_terms, "rhs_terms": self.rhs_terms}
        if self.difference is not None:
            d["difference"] = {
                "exponent": format_rational(self.difference.exponent),
                "lhs": format_rational(self.difference.left),
                "rhs": format_rational(self.difference.right),
            }
        if self.error is not None:
            d["error"] = self.error
        return d


def _run_check(check: dict, T) -> tuple[Optional[Difference], int, int]:
    kind = check["kind"]
    if kind == "reindex":
        lhs, rhs = reindex_rank4(tuple(as_fraction(x) for x in check["b"]), check["side"], T)
        return first_difference(lhs, rhs, T), lhs.term_count(), rhs.term_count()
    res = splitting_check(int(check["nmax"]), T)
    return (None if res is None else res[1]), 0, 0


def verify_identity(rec: IdentityRecord, order=None) -> Report:
    """Evaluate both sides to the record's order (or ``order``) and compare exactly."""
    T = rec.order if order is None else as_fraction(order)
    t0 = time.perf_counter()
    if rec.check is not None:
        d, nl, nr = _run_check(rec.check, T)
    else:
        lhs = eval_expr(rec.lhs, T)
        rhs = eval_expr(rec.rhs, T)
        d, nl, nr = first_difference(lhs, rhs, T), lhs.term_count(), rhs.term_count()
    return Report(rec.name, rec.expect, d, T, nl, nr, time.perf_counter() - t0)


def _safe_verify(args) -> Report:
    rec, order = args
    try:
        return verify_identity(rec, order)
    except SeriesError as exc:
        return Report(rec.name, rec.expect, None, rec.order if order is None else as_fraction(order),
                      error=str(exc))


# -- q-Gauss ---------------------------------------------------------------


def q_gauss_sides(a_exp, b_exp, c_exp) -> tuple[Expr, Expr]:
    """Both sides of the q-Gauss sum at ``a, b, c = q^a_exp, q^b_exp, q^c_exp``."""
    a, b, c = as_fraction(a_exp), as_fraction(b_exp), as_fraction(c_exp)
    rate = c - a - b
    if rate <= 0:
        raise SeriesError("q-Gauss needs c/ab = q^t with t > 0")
    if c <= 0 and c.denominator == 1:
        raise SeriesError("(c;q)_n vanishes for this c")
    lhs = SumSpec(
        [[0]], [rate],
        num=(_f(1, a, 1, (0, 1)), _f(1, b, 1, (0, 1))),
        den=(_f(1, 1, 1, (0, 1)), _f(1, c, 1, (0, 1))),
    )
    rhs = Mul([P(1, c - a), P(1, c - b), Inv(Mul([P(1, c), P(1, rate)]))])
    return lhs, rhs


def q_gauss_check(a_exp, b_exp, c_exp, T) -> Optional[Difference]:
    lhs, rhs = q_gauss_sides(a_exp, b_exp, c_exp)
    T = as_fraction(T)
    return first_difference(eval_expr(lhs, T), eval_expr(rhs, T), T)


# -- building blocks for the catalog -----------------------------------------

h = Fraction(1, 2)


def P(c, e, s=1, n=None) -> Poch:
    return Poch(PochSpec(c, e, s, n))


def _f(c, e, s, length) -> Factor:
    return Factor(c, e, s, length)


def J(exps: dict, scalar=1, vshift=0, eta=False) -> Eta:
    return Eta(EtaQuotient(scalar, vshift, exps), eta)


def _qq(step=1, length=(0, 1)) -> Factor:
    """``(q^step; q^step)_L``."""
    return _f(1, step, step, length)


DUAL_A = ((1, -h, 0), (-h, 1, -1), (0, -h, 1))
SYM_D = (2, 2, 1)
NONMOD_A = ((2, 2, 2), (2, 4, 4), (1, 2, 3))
B0_DISPLAYED = (-h, 0, -h)
# quadruple coordinates (x1, x2, x3) appear in the triple sums as (i, j, k) = (x3, x1, x2)
TRIPLE_ORDER = (2, 0, 1)
EXAM_A_DUAL = ((2, 1, 1, 2), (1, 2, 1, 2), (1, 1, 2, 2), (2, 2, 2, 4))


def _key_sum(which: int) -> SumSpec:
    """The single sums with (-1;q)_{2k} (resp. _{2k+1}) numerators."""
    if which in (1, 2):
        return SumSpec(
            [[2]], [0 if which == 1 else 2],
            num=(_f(-1, 0, 1, (0, 2)), _f(-1, 0, 2, (0, 1))),
            den=(_qq(2, (0, 2)),), names=("k",),
        )
    lin, const = (1, 0) if which == 3 else (3, 1)
    return SumSpec(
        [[2]], [lin], const,
        num=(_f(-1, 0, 1, (1, 2)), _f(-1, 1, 2, (0, 1))),
        den=(_qq(2, (1, 2)),), names=("k",),
    )


def _cor_sum(which: int) -> SumSpec:
    if which in (1, 2):
        return SumSpec([[2]], [which - 1], num=(_f(-1, 0, 1, (0, 1)),) * 2, den=(_qq(1, (0, 2)),))
    return SumSpec([[4]], [2 if which == 3 else 4], num=(_f(-1, 1, 2, (0, 1)),) * 2, den=(_qq(2, (1, 2)),))


def _r_sum() -> SumSpec:
    return SumSpec(
        [[6, 4, 8], [4, 8, 8], [8, 8, 16]], [-4, -4, -6],
        den=(_qq(2, (0, 1, 0, 0)), _qq(4, (0, 0, 1, 0)), _qq(4, (0, 0, 0, 1))), names=("n", "k", "l"),
    )


J2_OVER_J1_SQ = {2: 2, 1: -2}
PSI_QUOT = {1: -1, 2: 2}
CUBE_QUOT = {1: -3, 2: 3}
RAT3 = {2: 1, 3: 2, 1: -2, 6: -1}
RAT4 = {1: 4, 2: -2}
RAT_A = {1: 2, 4: 2, 2: -2}
RAT_B = {2: 1, 3: 1, 12: 1, 1: -1, 4: -1, 6: -1}


def _thm_rhs(which: int) -> Expr:
    if which == 0:
        return Mul([Scalar(4), Add([Scalar(1), QPow(-h)]), J({2: 1, h: -1})])
    return J(CUBE_QUOT, 3 if which == 1 else 1)


def builtin_catalog() -> list[IdentityRecord]:
    R: list[IdentityRecord] = []

    def add(name, lhs, rhs, tags=(), order=DEFAULT_ORDER, **kw):
        R.append(IdentityRecord(name, lhs, rhs, order, (name,) + tuple(tags), **kw))

    # Rogers-Ramanujan
    add("RR-1", SumSpec([[2]], [0], den=(_qq(),)), Inv(Mul([P(1, 1, 5), P(1, 4, 5)])), ("RR",), 40)
    add("RR-2", SumSpec([[2]], [1], den=(_qq(),)), Inv(Mul([P(1, 2, 5), P(1, 3, 5)])), ("RR",), 40)

    # Euler at z = q^a
    for a in (h, 1, 2):
        s = format_rational(a)
        add(f"Euler-1[z=q^{s}]", SumSpec([[0]], [a], den=(_qq(),)), Inv(P(1, a)), ("Euler-1",))
        add(f"Euler-2[z=q^{s}]", SumSpec([[1]], [a - h], den=(_qq(),)), P(-1, a), ("Euler-2",))

    # theta functions and the triple product
    add("phi-defn", Theta("phi"), Mul([P(-1, 1, 2), P(-1, 1, 2), P(1, 2, 2)]),
        note="the product needs (-q;q^2) squared")
    add("phi-defn-single-factor", Theta("phi"), Mul([P(-1, 1, 2), P(1, 2, 2)]), ("phi-probe",),
        expect="fail", note="with (-q;q^2) to the first power the product is not phi")
    add("psi-defn", Theta("psi"), J(PSI_QUOT))
    add("JTP[z=q^1/2]", Mul([P(1, 1), P(1, h), P(1, h)]),
        SumSpec([[1]], [0], ranges=("all",), base=(-1,)), ("JTP",))
    add("JTP[z=-q]", Mul([P(1, 1), P(-1, 1), P(-1, 0)]),
        SumSpec([[1]], [h], ranges=("all",)), ("JTP",))
    add("eq-Jacobi-id", J({1: 3}), SumSpec([[1]], [h], base=(-1,), weight=(1, 2)))
    add("Jacobi-cor-1", SumSpec([[3]], [h], ranges=("all",), weight=(1, 6)), J({1: 5, 2: -2}))
    add("Jacobi-cor-2", SumSpec([[6]], [2], ranges=("all",), weight=(1, 3)), J({1: 2, 4: 2, 2: -1}),
        note="weight 3n+1; this is the form used for the third and fourth corollary identities")
    add("Jacobi-cor-2-weight-3n+2", SumSpec([[6]], [2], ranges=("all",), weight=(2, 3)), J({1: 2, 4: 2, 2: -1}),
        ("Jacobi-cor-2-probe",), expect="fail", note="weight 3n+2 gives constant term 2")

    # single-sum identities with two eta-quotient terms
    add("key-id-1", _key_sum(1), J({2: 3, 1: -2, 4: -1}, Fraction(3, 2)) + J({1: 2, 2: 1, 4: -1}, -h),
        order=30)
    add("key-id-2", _key_sum(2), J({2: 3, 1: -2, 4: -1}, h) + J({1: 2, 2: 1, 4: -1}, h), order=30)
    add("key-id-3", _key_sum(3), J({4: 1, 1: -1}, Fraction(3, 2)) + J({1: 3, 4: 1, 2: -2}, h), order=30)
    add("key-id-4", _key_sum(4), J({4: 1, 1: -1}, h) + J({1: 3, 4: 1, 2: -2}, -h), order=30)
    third = Fraction(1, 3)
    add("cor-id-1", _cor_sum(1), J(RAT3, 4 * third) + J(RAT4, -third), order=30)
    add("cor-id-2", _cor_sum(2), J(RAT4, third) + J(RAT3, 2 * third), order=30)
    add("cor-id-3", _cor_sum(3), J(RAT_A, third) + J(RAT_B, 2 * third), order=30)
    add("cor-id-4", _cor_sum(4), J(RAT_A, -third, -1) + J(RAT_B, third, -1), order=30)

    # the dual generalized Nahm sums, and the sums they are dual to
    for i, B in enumerate((B0_DISPLAYED, (1, -1, h), (1, 0, h))):
        add(f"thm-id-{i}", NahmRef(ModularQuadruple(DUAL_A, B, 0, SYM_D)), _thm_rhs(i), ("thm-id",),
            order=20, permutation=TRIPLE_ORDER)
    add("id-exam5-3", NahmRef(ModularQuadruple(NONMOD_A, (0, -1, -1), Fraction(-1, 48), SYM_D)),
        Mul([QPow(Fraction(-1, 48)), P(-1, h)]), permutation=TRIPLE_ORDER)
    add("WW-id-1", NahmRef(ModularQuadruple(NONMOD_A, (1, 0, h), 0, SYM_D)),
        J({2: 1, 1: -1}, Fraction(3, 4)) + J({1: 3, 2: -1}, Fraction(1, 4)), permutation=TRIPLE_ORDER)
    add("WW-id-2", NahmRef(ModularQuadruple(NONMOD_A, (3, 4, Fraction(5, 2)), 0, SYM_D)),
        J({2: 1, 1: -1}, Fraction(1, 4), -1) + J({1: 3, 2: -1}, Fraction(-1, 4), -1),
        permutation=TRIPLE_ORDER)

    # the even/odd parts of the proof
    s_lhs = (1 + QPow(-h)) * Inv(P(1, h))
    add("0-S0-result",
        Mul([P(-1, h, 2), SumSpec([[2]], [Fraction(-3, 2)], num=(_f(-1, Fraction(3, 2), 2, (0, 1)),),
                                  den=(_qq(1, (0, 2)),), names=("k",))]), s_lhs)
    add("0-S1-result",
        Mul([P(-1, -h, 2), SumSpec([[2]], [-h], num=(_f(-1, Fraction(5, 2), 2, (0, 1)),),
                                   den=(_qq(1, (1, 2)),), names=("k",))]), s_lhs)
    add("S0-result", Mul([P(-1, 2, 2), _key_sum(1)]), J(J2_OVER_J1_SQ, Fraction(3, 2)) + J({1: 2}, -h))
    add("S1-result", Mul([P(-1, 1, 2), _key_sum(3)]), J(J2_OVER_J1_SQ, Fraction(3, 2)) + J({1: 2}, h))
    add("T0-result", Mul([P(-1, 2, 2), _key_sum(2)]), J(J2_OVER_J1_SQ, h) + J({1: 2}, h))
    add("T1-result", Mul([P(-1, 1, 2), _key_sum(4)]), J(J2_OVER_J1_SQ, h) + J({1: 2}, -h))

    # rank 3 -> rank 4 rewriting and the splitting identity (delegated)
    for name, b, side in (
        ("122-f[B1]", (h, 1, -1), "identity-side"),
        ("122-f[B2]", (h, 1, 0), "identity-side"),
        ("122-f[B0]", (-h, -h, 0), "identity-side"),
        ("M-f[-1,0,-1]", (-1, 0, -1), "mizuno-side"),
    ):
        R.append(IdentityRecord(name, order=16, tags=(name, name.split("[")[0], "reindex"),
                                check={"kind": "reindex", "b": [format_rational(as_fraction(x)) for x in b],
                                       "side": side}))
    R.append(IdentityRecord("id-transform", order=30, tags=("id-transform",),
                            check={"kind": "splitting", "nmax": 25}))

    # the dual rank 4 sums as two-weight eta combinations (C' = 0)
    add("dual-exp-1", Rescale(NahmRef(ModularTriple(EXAM_A_DUAL, (0, h, h, 0), 0)), 2),
        J({2: 1, 1: -1}, Fraction(3, 4), Fraction(-1, 24), True)
        + J({1: 3, 2: -1}, Fraction(1, 4), Fraction(-1, 24), True))
    add("dual-exp-2", Rescale(NahmRef(ModularTriple(EXAM_A_DUAL, (1, Fraction(3, 2), Fraction(3, 2), 2), 0)), 2),
        J({2: 1, 1: -1}, Fraction(1, 4), Fraction(-25, 24), True)
        + J({1: 3, 2: -1}, Fraction(-1, 4), Fraction(-25, 24), True),
        note="labelled with the first dual vector in the source; the data are those of the second")

    # the non-counterexample of the closing remarks
    b_star = (Fraction(-5, 4), Fraction(-3, 4), -1, Fraction(-3, 2))
    add("false-dual", Rescale(NahmRef(ModularTriple(EXAM_A_DUAL, b_star, 0)), 4), _r_sum())
    add("R-exp", _r_sum(), Mul([Add([Scalar(1), QPow(-1)]), P(-1, 1, 2)]))
    for u, lin, rhs in ((-h, (Fraction(-3, 2), -2), P(-1, -h)), (1, (0, 1), P(-1, 1))):
        add(f"eq-Cao-Wang[u=q^{format_rational(as_fraction(u))}]",
            SumSpec([[2, 2], [2, 4]], lin, den=(_qq(1, (0, 1, 0)), _qq(2, (0, 0, 1))), names=("i", "j")), rhs, ("eq-Cao-Wang",))

    # q-Gauss at two specializations
    for a, b, c in ((1, 2, 5), (h, 1, 3)):
        lhs, rhs = q_gauss_sides(a, b, c)
        label = ",".join(format_rational(as_fraction(x)) for x in (a, b, c))
        add(f"eq-Gauss[{label}]", lhs, rhs, ("eq-Gauss",))

    # the displayed dual vector B0* against the computed one
    computed = dual_quadruple(ModularQuadruple(NONMOD_A, (0, -1, -1), Fraction(-1, 48), SYM_D))
    add("B0-star-probe", NahmRef(ModularQuadruple(computed.A, computed.B, 0, SYM_D)), _thm_rhs(0),
        ("dual-vector-probe",), order=20, expect="fail", permutation=TRIPLE_ORDER,
        note="computed A^-1 B0 = (1/2, 0, -1/2) does not reproduce the closed form; the displayed (-1/2, 0, -1/2) does")
    return R


# -- files and running -----------------------------------------------------


def dump_catalog(records: Sequence[IdentityRecord]) -> str:
    return json.dumps([r.to_json() for r in records], indent=1) + "\n"


def load_catalog(path=None) -> list[IdentityRecord]:
    """Parse a catalog file; ``None`` loads the shipped copy of the built-in catalog."""
    if path is None:
        text = resources.files("qnahm").joinpath("data/catalog.json").read_text()
        where = "built-in catalog"
    else:
        with open(path) as fh:
            text = fh.read()
        where = str(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SeriesError(f"{where}: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(data, list):
        raise SeriesError(f"{where}: expected a JSON array of records")
    out = []
    for i, d in enumerate(data):
        try:
            out.append(IdentityRecord.from_json(d))
        except SeriesError as exc:
            raise SeriesError(f"{where}: record {i}: {exc}") from None
    return out


@dataclass
class Summary:
    reports: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports)

    def counts(self) -> dict:
        c: dict = {}
        for r in self.reports:
            c[r.status] = c.get(r.status, 0) + 1
        return c

    def text(self) -> str:
        lines = [r.line() for r in self.reports]
        n = len(self.reports)
        parts = ", ".join(f"{v} {k}" for k, v in sorted(self.counts().items()))
        lines.append(f"{n} record{'s' if n != 1 else ''}" + (f": {parts}" if parts else ""))
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {"records": [r.to_json() for r in self.reports], "ok": self.ok, "counts": self.counts()}


def run_catalog(records=None, order_override=None, pattern: Optional[str] = None,
                parallel: Optional[int] = None) -> Summary:
    """Verify every record (optionally filtered); reports keep catalog order.

    ``order_override`` replaces each record's order; ``parallel`` caps the
    worker count (1 runs in-process).
    """
    if records is None or isinstance(records, (str, os.PathLike)):
        records = load_catalog(records)
    if pattern:
        records = [r for r in records if r.matches(pattern)]
    jobs = [(r, order_override) for r in records]
    workers = parallel if parallel is not None else (os.cpu_count() or 1)
    if workers <= 1 or len(jobs) <= 1:
        return Summary([_safe_verify(j) for j in jobs])
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return Summary(list(pool.map(_safe_verify, jobs)))
