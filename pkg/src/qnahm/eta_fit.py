"""Recognize a series as a single eta quotient, and sort sums of quotients by weight.

The logarithm of ``prod_m (q^m;q^m)_oo^{e_m}`` has coefficient
``-sum_m e_m sigma(N/m)/(N/m)`` at ``q^N``, where the sum runs over the moduli
dividing ``N``.  At ``N = m`` the modulus ``m`` enters for the first time with
coefficient ``-1``, so the exponents come out of a triangular system in
increasing order of the moduli.  Every fit is re-expanded and compared with
the input before it is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .products import EtaQuotient, eta_expand
from .series import InsufficientOrder, QExp, SeriesError, as_fraction, first_difference, format_rational

__all__ = [
    "NotQuotient",
    "SingleQuotient",
    "MixedWeights",
    "Unrecognized",
    "fit_eta",
    "weight",
    "classify",
    "default_moduli",
]

MIN_EXTRA = 5


@dataclass(frozen=True)
class NotQuotient:
    """The series is not one eta quotient over the given moduli; ``exponent`` is the first witness."""

    exponent: Fraction

    def __str__(self) -> str:
        return f"not an eta quotient (first residual at q^{format_rational(self.exponent)})"


def weight(E: EtaQuotient) -> Fraction:
    return E.weight


def default_moduli(f: Optional[QExp] = None, T=None) -> list[Fraction]:
    """Divisors of 12, plus 1/2 when ``f`` lives on the half lattice.

    With ``f`` and ``T`` given, moduli beyond the available range ``T - v(f)``
    are dropped, since their exponents could not be determined.
    """
    ms = [Fraction(d) for d in (1, 2, 3, 4, 6, 12)]
    if f is not None and f.denom % 2 == 0:
        ms.insert(0, Fraction(1, 2))
    if f is not None and T is not None and not f.is_zero():
        W = as_fraction(T) - f.valuation
        ms = [m for m in ms if m <= W]
    return ms


def _sigma_over(k: int) -> Fraction:
    s = 0
    d = 1
    while d * d <= k:
        if k % d == 0:
            s += d
            if d * d != k:
                s += k // d
        d += 1
    return Fraction(s, k)


def _log_coeff(m: Fraction, N: Fraction) -> Fraction:
    """Coefficient of ``q^N`` in ``log (q^m; q^m)_oo``."""
    k = N / m
    if k.denominator != 1 or k <= 0:
        return Fraction(0)
    return -_sigma_over(int(k))


def _usable(moduli, W) -> int:
    """How many positive exponents ``<= W`` are multiples of some modulus."""
    if W <= 0:
        return 0
    L = 1
    for m in moduli:
        L = math.lcm(L, m.denominator)
    seen = 0
    for n in range(1, math.floor(W * L) + 1):
        N = Fraction(n, L)
        if any((N / m).denominator == 1 for m in moduli):
            seen += 1
    return seen


def fit_eta(f: QExp, moduli: Optional[Sequence] = None, T=None) -> Union[EtaQuotient, NotQuotient]:
    """Fit ``f = c q^v prod_m (q^m;q^m)_oo^{e_m}`` exactly up to ``q^T``.

    Raises :class:`InsufficientOrder` when ``T`` leaves fewer than
    ``len(moduli) + 5`` usable coefficients, and :class:`SeriesError` for the
    zero series.
    """
    if f.is_zero():
        raise SeriesError("cannot fit the zero series")
    T = f.order if T is None else as_fraction(T)
    if T > f.order:
        raise InsufficientOrder(f"insufficient truncation: asked for {T}, have {f.order}")
    ms = sorted(set(as_fraction(m) for m in (moduli if moduli is not None else default_moduli(f, T))))
    if not ms or ms[0] <= 0:
        raise SeriesError("moduli must be positive")
    c = f.leading_coefficient
    v = f.valuation
    W = T - v
    if W < ms[-1] or _usable(ms, W) < len(ms) + MIN_EXTRA:
        raise InsufficientOrder(
            f"order {format_rational(T)} leaves too few coefficients for {len(ms)} moduli"
        )
    unit = f.truncate(T).shift(-v).scale(1 / c)
    g = unit.log(W)
    exps: dict = {}
    for m in ms:
        r = g[m] - sum((e * _log_coeff(mm, m) for mm, e in exps.items()), Fraction(0))
        e = -r
        if e.denominator != 1:
            return NotQuotient(m + v)
        if e:
            exps[m] = int(e)
    E = EtaQuotient(c, v, exps)
    d = first_difference(eta_expand(E, T), f.truncate(T), T)
    if d is not None:
        return NotQuotient(d.exponent)
    return E


# -- classification of sums ---------------------------------------------------


@dataclass(frozen=True)
class SingleQuotient:
    quotient: EtaQuotient

    @property
    def weight(self) -> Fraction:
        return self.quotient.weight

    def __str__(self) -> str:
        return f"single eta quotient {self.quotient}, weight {format_rational(self.weight)}"


@dataclass(frozen=True)
class MixedWeights:
    terms: tuple  # of (EtaQuotient, weight)

    @property
    def weights(self) -> tuple:
        return tuple(sorted(set(w for _, w in self.terms)))

    @property
    def mixed(self) -> bool:
        """True when the weights differ: a mixed-weight eta combination."""
        return len(self.weights) > 1

    def __str__(self) -> str:
        body = "; ".join(f"{E} (weight {format_rational(w)})" for E, w in self.terms)
        kind = "mixed-weight eta combination" if self.mixed else "sum of equal-weight eta quotients"
        return f"{kind}: {body}"


@dataclass(frozen=True)
class Unrecognized:
    reason: str

    def __str__(self) -> str:
        return f"unrecognized: {self.reason}"


def classify(terms, moduli=None, T=None):
    """Classify ``sum c_i f_i`` given as ``[(c_i, f_i), ...]``.

    A single fit of the whole sum wins; otherwise each term is fitted on its
    own and the weights are reported.
    """
    terms = [(as_fraction(c), f) for c, f in terms]
    if not terms:
        raise SeriesError("nothing to classify")
    total = QExp()
    for c, f in terms:
        total = total + f.scale(c)
    if T is None:
        T = min(f.order for _, f in terms)
    if not total.truncate(T).is_zero():
        whole = fit_eta(total, moduli, T)
        if isinstance(whole, EtaQuotient):
            return SingleQuotient(whole)
    fitted = []
    for c, f in terms:
        r = fit_eta(f.scale(c), moduli, T)
        if not isinstance(r, EtaQuotient):
            return Unrecognized(f"term {len(fitted) + 1}: {r}")
        fitted.append((r, r.weight))
    return MixedWeights(tuple(fitted))
