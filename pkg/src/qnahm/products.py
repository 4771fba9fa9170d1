"""Pochhammer symbols, theta functions and eta quotients as truncated series."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .series import INF, QExp, SeriesError, as_fraction, format_rational, monomial

__all__ = [
    "PochSpec",
    "EtaQuotient",
    "poch",
    "poch_multi",
    "J",
    "theta_phi",
    "theta_psi",
    "phi_product",
    "psi_product",
    "jacobi_triple",
    "jacobi_cube",
    "eta_expand",
]


@dataclass(frozen=True)
class PochSpec:
    """``(coeff * q^arg_exp; q^step)_length``; ``length=None`` is infinite."""

    coeff: Fraction = Fraction(1)
    arg_exp: Fraction = Fraction(0)
    step: Fraction = Fraction(1)
    length: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "coeff", as_fraction(self.coeff))
        object.__setattr__(self, "arg_exp", as_fraction(self.arg_exp))
        object.__setattr__(self, "step", as_fraction(self.step))
        if self.step <= 0:
            raise SeriesError("Pochhammer step must be positive")
        if self.length is not None:
            if int(self.length) != self.length or self.length < 0:
                raise SeriesError(f"Pochhammer length must be a nonnegative integer, got {self.length}")
            object.__setattr__(self, "length", int(self.length))

    @property
    def infinite(self) -> bool:
        return self.length is None

    def to_json(self) -> dict:
        return {
            "coeff": format_rational(self.coeff),
            "arg_exp": format_rational(self.arg_exp),
            "step": format_rational(self.step),
            "length": "inf" if self.length is None else self.length,
        }

    @classmethod
    def from_json(cls, d: dict) -> "PochSpec":
        length = d.get("length", "inf")
        return cls(
            as_fraction(d.get("coeff", "1")),
            as_fraction(d.get("arg_exp", "0")),
            as_fraction(d.get("step", "1")),
            None if length == "inf" else int(length),
        )


def _times_binomial(x: QExp, c: Fraction, f: Fraction) -> QExp:
    # x * (1 - c q^f)
    return x - x.shift(f).scale(c)


def poch(spec: PochSpec, T=None) -> QExp:
    """Expand ``(c q^e; q^s)_n``.

    Finite products are exact (then truncated at ``T`` when given).  Infinite
    products keep factors until the first one whose lowest exponent can no
    longer reach ``T``; the result then has order ``T``.
    """
    c, e, s = spec.coeff, spec.arg_exp, spec.step
    if spec.length is not None:
        return _finite_poch(c, e, s, spec.length, T)
    if T is None:
        raise SeriesError("infinite Pochhammer symbol needs a truncation order")
    T = as_fraction(T)
    if c == 0:
        return QExp.one()
    # head: factors with exponent <= 0, multiplied exactly
    head = QExp.one()
    k = 0
    while e + k * s <= 0:
        f = e + k * s
        if f == 0 and c == 1:
            return QExp()
        head = _times_binomial(head, c, f)
        k += 1
    W = T - head.valuation
    tail = QExp.one()
    while e + k * s <= W:
        tail = _times_binomial(tail, c, e + k * s).truncate(W)
        k += 1
    return (head * tail.truncate(W)).truncate(T)


@lru_cache(maxsize=4096)
def _finite_poch_cached(c: Fraction, e: Fraction, s: Fraction, n: int) -> QExp:
    x = QExp.one()
    for k in range(n):
        x = _times_binomial(x, c, e + k * s)
    return x


def _finite_poch(c, e, s, n, T=None) -> QExp:
    x = _finite_poch_cached(c, e, s, n)
    return x if T is None else x.truncate(T)


def poch_multi(args, step, length, T=None) -> QExp:
    """``(a_1, ..., a_k; q^step)_length`` for monomial arguments ``(coeff, exp)``."""
    out = QExp.one()
    for c, e in args:
        out = out * poch(PochSpec(c, e, step, length), T)
    return out if T is None else out.truncate(T)


def J(m, T) -> QExp:
    """``(q^m; q^m)_oo`` to order ``T`` (``m`` may be rational)."""
    m = as_fraction(m)
    T = as_fraction(T)
    base = poch(PochSpec(1, 1, 1, None), T / m)
    return base.rescale(m).truncate(T)


def theta_phi(T) -> QExp:
    """``sum_{n in Z} q^{n^2}``."""
    T = as_fraction(T)
    terms = {0: 1}
    n = 1
    while n * n <= T:
        terms[n * n] = 2
        n += 1
    return QExp.from_dict(terms, order=T)


def theta_psi(T) -> QExp:
    """``sum_{n >= 0} q^{n(n+1)/2}``."""
    T = as_fraction(T)
    terms = {}
    n = 0
    while n * (n + 1) // 2 <= T:
        terms[n * (n + 1) // 2] = 1
        n += 1
    return QExp.from_dict(terms, order=T)


def phi_product(T) -> QExp:
    """``(-q; q^2)_oo^2 (q^2; q^2)_oo``."""
    return (poch(PochSpec(-1, 1, 2, None), T) ** 2 * J(2, T)).truncate(T)


def psi_product(T) -> QExp:
    """``(q^2; q^2)_oo^2 / (q; q)_oo``."""
    return (J(2, T) ** 2 * J(1, T).invert(T)).truncate(T)


def _bilateral(weight, T, a, b, zc: Fraction = Fraction(1), za: Fraction = Fraction(0), lower=None) -> QExp:
    """``sum_n weight(n) zc^n q^{a n^2 + (b + za) n}`` over ``n >= lower`` (or all of Z)."""
    a, b = as_fraction(a), as_fraction(b) + as_fraction(za)
    if a <= 0:
        raise SeriesError("quadratic exponent must have positive leading coefficient")
    terms: dict[Fraction, Fraction] = {}
    vertex = -b / (2 * a)
    start = math.floor(vertex)
    if lower is not None:
        start = max(start, lower)

    def visit(n):
        ex = a * n * n + b * n
        if ex > T:
            return False
        w = weight(n) * zc**n
        if w:
            terms[ex] = terms.get(ex, 0) + w
        return True

    n = start
    while visit(n) or n < vertex:
        n += 1
    n = start - 1
    while (lower is None or n >= lower) and (visit(n) or n > vertex):
        n -= 1
    return QExp.from_dict(terms, order=T)


def jacobi_triple(z_coeff, z_exp, T) -> tuple[QExp, QExp]:
    """Both sides of ``(q, z, q/z; q)_oo = sum (-1)^n q^{n(n-1)/2} z^n`` at ``z = c q^a``."""
    c, a, T = as_fraction(z_coeff), as_fraction(z_exp), as_fraction(T)
    if c == 0:
        raise SeriesError("z = 0 makes q/z undefined")
    # the product can have negative valuation; widen the factor orders to cover it
    lo = sum((f for f in _factor_exponents(a) if f < 0), Fraction(0))
    lo += sum((f for f in _factor_exponents(1 - a) if f < 0), Fraction(0))
    W = T - lo
    lhs = J(1, W) * poch(PochSpec(c, a, 1, None), W) * poch(PochSpec(1 / c, 1 - a, 1, None), W)
    lhs = lhs.truncate(T)
    rhs = _bilateral(lambda n: (-1) ** (n % 2), T, Fraction(1, 2), Fraction(-1, 2), c, a)
    return lhs, rhs


def _factor_exponents(e):
    k = 0
    while e + k < 0:
        yield e + k
        k += 1


def jacobi_cube(T) -> tuple[QExp, QExp]:
    """``(q;q)_oo^3`` against ``sum_{n>=0} (-1)^n (2n+1) q^{n(n+1)/2}``."""
    T = as_fraction(T)
    lhs = (J(1, T) ** 3).truncate(T)
    rhs = _bilateral(lambda n: (-1) ** (n % 2) * (2 * n + 1), T, Fraction(1, 2), Fraction(1, 2), lower=0)
    return lhs, rhs


@dataclass(frozen=True)
class EtaQuotient:
    """``scalar * q^vshift * prod_m (q^m; q^m)_oo^{e_m}``.

    ``exps`` maps a (possibly rational) modulus to a nonzero integer exponent.
    The weight is derived from the exponents.
    """

    scalar: Fraction = Fraction(1)
    vshift: Fraction = Fraction(0)
    exps: tuple = field(default_factory=tuple)

    def __init__(self, scalar=1, vshift=0, exps=None):
        object.__setattr__(self, "scalar", as_fraction(scalar))
        object.__setattr__(self, "vshift", as_fraction(vshift))
        items = {}
        for m, e in dict(exps or {}).items():
            m = as_fraction(m)
            if m <= 0:
                raise SeriesError("eta quotient moduli must be positive")
            if int(e) != e:
                raise SeriesError("eta quotient exponents must be integers")
            items[m] = items.get(m, 0) + int(e)
        object.__setattr__(self, "exps", tuple(sorted((m, e) for m, e in items.items() if e)))

    @property
    def exponents(self) -> dict:
        return dict(self.exps)

    @property
    def weight(self) -> Fraction:
        return Fraction(sum(e for _, e in self.exps), 2)

    @property
    def eta_shift(self) -> Fraction:
        """Power of q separating this product from the matching eta quotient."""
        return sum((m * e for m, e in self.exps), Fraction(0)) / 24

    def __mul__(self, other: "EtaQuotient") -> "EtaQuotient":
        exps = self.exponents
        for m, e in other.exps:
            exps[m] = exps.get(m, 0) + e
        return EtaQuotient(self.scalar * other.scalar, self.vshift + other.vshift, exps)

    def scaled(self, c) -> "EtaQuotient":
        return EtaQuotient(self.scalar * as_fraction(c), self.vshift, self.exponents)

    def __str__(self) -> str:
        body = ", ".join(f"{format_rational(m)}:{e}" for m, e in self.exps)
        head = format_rational(self.scalar)
        if self.vshift:
            head += f"*q^{format_rational(self.vshift)}"
        return f"{head}*{{{body}}}"

    def to_json(self) -> dict:
        return {
            "scalar": format_rational(self.scalar),
            "vshift": format_rational(self.vshift),
            "exps": {format_rational(m): e for m, e in self.exps},
        }

    @classmethod
    def from_json(cls, d: dict) -> "EtaQuotient":
        return cls(as_fraction(d.get("scalar", "1")), as_fraction(d.get("vshift", "0")),
                   {as_fraction(m): int(e) for m, e in d.get("exps", {}).items()})

    @classmethod
    def from_eta(cls, scalar=1, vshift=0, exps=None) -> "EtaQuotient":
        """Build from Dedekind-eta exponents: each ``eta(m tau)`` carries ``q^{m/24}``."""
        E = cls(scalar, vshift, exps)
        return cls(E.scalar, E.vshift + E.eta_shift, E.exponents)


def eta_expand(E: EtaQuotient, T, eta: bool = False) -> QExp:
    """q-expansion of an eta quotient to order ``T``.

    With ``eta=True`` the factors are read as ``eta(m tau)`` and the usual
    ``q^{m/24}`` prefactors are added to the shift.
    """
    T = as_fraction(T)
    v = E.vshift + (E.eta_shift if eta else 0)
    W = T - v
    out = QExp.one()
    for m, e in E.exps:
        f = J(m, W)
        out = out * (f ** e if e > 0 else f.invert(W) ** (-e))
        out = out.truncate(W)
    if not E.exps:
        out = QExp.one()
    return out.shift(v).scale(E.scalar).truncate(T)
