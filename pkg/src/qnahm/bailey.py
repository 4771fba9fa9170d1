"""Bailey pairs as term generators, and the transformations that consume them.

A pair relative to ``a`` satisfies

    beta_n = sum_{k<=n} alpha_k / ((q;q)_{n-k} (aq;q)_{n+k}).

Only the two relative parameters ``a = 1`` and ``a = q`` occur, so ``a`` is
an enum; ``scale`` instantiates the pair at base ``q^scale``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .products import PochSpec, poch, theta_phi, theta_psi
from .series import Difference, QExp, SeriesError, as_fraction, first_difference, monomial

__all__ = [
    "AClass",
    "BaileyPair",
    "PairFailure",
    "builtin_pair",
    "verify_pair",
    "finite_identity_check",
    "apply_transform",
    "PAIRS",
    "TRANSFORMS",
]


class AClass(enum.Enum):
    ONE = "1"
    Q = "q"


Generator = Callable[[int, Fraction], QExp]


@dataclass(frozen=True)
class BaileyPair:
    name: str
    a_class: AClass
    scale: Fraction
    alpha: Generator
    beta: Generator

    def a_power(self) -> Fraction:
        """Exponent of ``a`` at base ``q^scale`` (``a = 1`` or ``a = q^scale``)."""
        return Fraction(0) if self.a_class is AClass.ONE else self.scale


@dataclass(frozen=True)
class PairFailure:
    n: int
    difference: Difference

    def __str__(self) -> str:
        return f"n={self.n}: {self.difference}"


def _p(c, e, s, n, T=None) -> QExp:
    return poch(PochSpec(c, e, s, n), T)


def _bp1(s):
    def alpha(n, T=None):
        if n == 0:
            return QExp.one()
        return monomial(2 * n + 1, s * n * (n - 1) / 2) - monomial(2 * n - 1, s * n * (n + 1) / 2)

    def beta(n, T):
        return (_p(-1, 0, s, n) ** 2 * _p(1, s, s, 2 * n).invert(T)).truncate(T)

    return AClass.ONE, alpha, beta


def _bp2(s):
    def alpha(n, T=None):
        if n == 0:
            return QExp.one()
        return monomial(2 * n + 1, s * n * (n + 1) / 2) - monomial(2 * n - 1, s * n * (n - 1) / 2)

    def beta(n, T):
        if n == 0:
            return QExp.one().truncate(T)
        return (monomial(1, s * n) * _p(-1, 0, s, n) ** 2 * _p(1, s, s, 2 * n).invert(T)).truncate(T)

    return AClass.ONE, alpha, beta


def _bp3(s):
    def alpha(n, T=None):
        if n == 0:
            return QExp.one()
        return monomial(n + 1, s * n * n / 2) - monomial(n, s * (n + 1) ** 2 / 2)

    def beta(n, T):
        return (_p(-1, s / 2, s, n) ** 2 * _p(1, 2 * s, s, 2 * n).invert(T)).truncate(T)

    return AClass.Q, alpha, beta


def _bp4(s):
    # the general formulas hold from n = 0, giving alpha_0 = beta_0 = q^{s/2};
    # the normalization alpha_0 = beta_0 = 1 would break the relation at n = 1
    def alpha(n, T=None):
        return monomial(n + 1, s * (n + 1) ** 2 / 2) - monomial(n, s * n * n / 2)

    def beta(n, T):
        num = monomial(1, s * (n + Fraction(1, 2))) * _p(-1, s / 2, s, n) ** 2
        return (num * _p(1, 2 * s, s, 2 * n).invert(T)).truncate(T)

    return AClass.Q, alpha, beta


PAIRS = {"BP1": _bp1, "BP2": _bp2, "BP3": _bp3, "BP4": _bp4}


def builtin_pair(which: str, scale=1) -> BaileyPair:
    """One of the four pairs ``BP1``..``BP4`` at base ``q^scale``.

    BP1/BP2 are relative to ``a = 1``, BP3/BP4 relative to ``a = q``.
    BP1..BP3 have ``alpha_0 = beta_0 = 1``; BP4 has ``alpha_0 = beta_0 = q^{scale/2}``.
    """
    try:
        make = PAIRS[which.upper()]
    except KeyError:
        raise SeriesError(f"unknown Bailey pair {which!r}") from None
    s = as_fraction(scale)
    if s <= 0:
        raise SeriesError("scale must be positive")
    a_class, alpha, beta = make(s)
    return BaileyPair(which.upper(), a_class, s, alpha, beta)


def bailey_rhs(p: BaileyPair, n: int, T) -> QExp:
    """``sum_{k<=n} alpha_k / ((q^s;q^s)_{n-k} (a q^s; q^s)_{n+k})``."""
    s = p.scale
    aq = p.a_power() + s
    out = QExp(order=T)
    for k in range(n + 1):
        den = _p(1, s, s, n - k) * _p(1, aq, s, n + k)
        out = out + p.alpha(k, T) * den.invert(T)
    return out.truncate(T)


def verify_pair(p: BaileyPair, n_max: int, T) -> Optional[PairFailure]:
    """Check the defining relation for every ``n <= n_max``; None means all agree."""
    T = as_fraction(T)
    for n in range(n_max + 1):
        lhs = p.beta(n, T)
        rhs = bailey_rhs(p, n, T)
        d = first_difference(lhs, rhs, T)
        if d is not None:
            return PairFailure(n, d)
    return None


def _x(coeff, e, k: int) -> QExp:
    """``x^k`` for ``x = coeff * q^e``."""
    return monomial(Fraction(coeff) ** k, e * k)


def finite_identity_check(which: str, x_exp, n_max: int, T, x_coeff=1) -> Optional[PairFailure]:
    """Check one of the two finite identities at ``x = x_coeff * q^x_exp``.

    ``even-finite``:
        (-1/x;q)_n (-xq;q)_n / (q;q)_{2n}
            = 1/(q;q)_n^2 + sum_{r=1}^n (q^{r(r+1)/2} x^r + q^{r(r-1)/2} x^{-r}) / ((q;q)_{n-r} (q;q)_{n+r})
    ``odd-finite``:
        (-q^{1/2}/x;q)_n (-x q^{1/2};q)_{n+1} / (q^2;q)_{2n}
            = sum_{r=0}^n (q^{r^2/2} x^{-r} + q^{(r+1)^2/2} x^{r+1}) / ((q;q)_{n-r} (q^2;q)_{n+r})
    """
    c = as_fraction(x_coeff)
    a = as_fraction(x_exp)
    T = as_fraction(T)
    if c == 0:
        raise SeriesError("x = 0: the factor (-x^{-1}; q)_n is undefined")
    half = Fraction(1, 2)
    for n in range(n_max + 1):
        # negative powers of x shift terms down; invert far enough to cover them
        T_ = T + n * abs(a) + 1
        if which == "even-finite":
            lhs = _p(-1 / c, -a, 1, n) * _p(-c, a + 1, 1, n) * _p(1, 1, 1, 2 * n).invert(T_)
            rhs = (_p(1, 1, 1, n) ** 2).invert(T_)
            for r in range(1, n + 1):
                num = monomial(1, Fraction(r * (r + 1), 2)) * _x(c, a, r) + monomial(1, Fraction(r * (r - 1), 2)) * _x(c, a, -r)
                rhs = rhs + num * (_p(1, 1, 1, n - r) * _p(1, 1, 1, n + r)).invert(T_)
        elif which == "odd-finite":
            lhs = _p(-1 / c, half - a, 1, n) * _p(-c, a + half, 1, n + 1) * _p(1, 2, 1, 2 * n).invert(T_)
            rhs = QExp(order=T_)
            for r in range(n + 1):
                num = monomial(1, Fraction(r * r, 2)) * _x(c, a, -r) + monomial(1, Fraction((r + 1) ** 2, 2)) * _x(c, a, r + 1)
                rhs = rhs + num * (_p(1, 1, 1, n - r) * _p(1, 2, 1, n + r)).invert(T_)
        else:
            raise SeriesError(f"unknown finite identity {which!r}")
        d = first_difference(lhs, rhs, T)
        if d is not None:
            return PairFailure(n, d)
    return None


# -- transformations ---------------------------------------------------------

TRANSFORMS = ("TBL", "S2BL", "T128")


def _weighted_sum(weight_exp: Callable[[int], Fraction], term: Callable[[int], QExp], T) -> QExp:
    """``sum_n q^{weight_exp(n)} * term(n)`` until the prefactor passes ``T``."""
    out = QExp(order=T)
    n = 0
    while weight_exp(n) <= T:
        t = term(n)
        if t.valuation is not None and t.valuation < 0:
            raise SeriesError("term with negative valuation in a Bailey sum")
        out = out + monomial(1, weight_exp(n)) * t
        n += 1
    return out.truncate(T)


def apply_transform(p: BaileyPair, which: str, T) -> tuple[QExp, QExp]:
    """Both sides of one of the Bailey-lemma consequences.

    ``TBL``  (a=1, base q^2): sum q^{n^2} (-q;q^2)_n beta_n = 1/psi(-q) sum q^{r^2} alpha_r
    ``S2BL`` (a=q, base q):  sum q^{n(n+1)/2} (-q;q)_n beta_n = (1-q)/phi(-q) sum q^{r(r+1)/2} alpha_r
    ``T128`` (any):          sum a^n q^{n^2} beta_n = 1/(aq;q)_oo sum a^r q^{r^2} alpha_r, at base q^scale
    """
    T = as_fraction(T)
    which = which.upper()
    if which == "TBL":
        if p.a_class is not AClass.ONE or p.scale != 2:
            raise SeriesError("TBL needs a pair relative to a=1 at scale 2")
        lhs = _weighted_sum(
            lambda n: Fraction(n * n), lambda n: _p(-1, 1, 2, n) * p.beta(n, T), T
        )
        alpha_sum = _weighted_sum(lambda r: Fraction(r * r), lambda r: p.alpha(r, T), T)
        rhs = (theta_psi(T).negate_q().invert(T) * alpha_sum).truncate(T)
    elif which == "S2BL":
        if p.a_class is not AClass.Q or p.scale != 1:
            raise SeriesError("S2BL needs a pair relative to a=q at scale 1")
        lhs = _weighted_sum(
            lambda n: Fraction(n * (n + 1), 2), lambda n: _p(-1, 1, 1, n) * p.beta(n, T), T
        )
        alpha_sum = _weighted_sum(lambda r: Fraction(r * (r + 1), 2), lambda r: p.alpha(r, T), T)
        rhs = (QExp([1, -1]) * theta_phi(T).negate_q().invert(T) * alpha_sum).truncate(T)
    elif which == "T128":
        s, ap = p.scale, p.a_power()
        lhs = _weighted_sum(lambda n: ap * n + s * n * n, lambda n: p.beta(n, T), T)
        alpha_sum = _weighted_sum(lambda r: ap * r + s * r * r, lambda r: p.alpha(r, T), T)
        rhs = (_p(1, ap + s, s, None, T).invert(T) * alpha_sum).truncate(T)
    else:
        raise SeriesError(f"unknown transform {which!r}")
    return lhs, rhs
