"""Truncated Laurent-Puiseux series in q with exact rational coefficients.

A :class:`QExp` stores the coefficients of ``q^((lo + i) / denom)`` densely,
together with an explicit validity horizon ``order``: every coefficient with
exponent ``<= order`` is exact, everything above is unknown.  Arithmetic
propagates that horizon conservatively, so products of series with negative
leading exponents stay sound.

Coefficients are held as ``int`` whenever they are integral and as
:class:`fractions.Fraction` otherwise; both are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Union

Rational = Union[int, Fraction]

INF = math.inf

__all__ = [
    "INF",
    "QExp",
    "Difference",
    "SeriesError",
    "InsufficientOrder",
    "as_fraction",
    "monomial",
    "first_difference",
    "agrees",
    "format_rational",
]


class SeriesError(ValueError):
    pass


class InsufficientOrder(SeriesError):
    pass


def as_fraction(x) -> Fraction:
    """Parse ints, Fractions and strings like ``"-3/4"`` into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"not an exact rational: {x!r}")


def _exact(x) -> Rational:
    if type(x) is int:
        return x
    if type(x) is Fraction:
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(x, (int, Fraction, str)):
        return _exact(as_fraction(x))
    raise TypeError(f"inexact coefficient {x!r}")


def _order(x):
    if x is None or x == INF:
        return INF
    return as_fraction(x)


def format_rational(x) -> str:
    x = as_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


# -- integer convolution kernels ------------------------------------------

_SCHOOLBOOK = 24


def _school(a: list, b: list, n: int) -> list:
    out = [0] * n
    for i, x in enumerate(a):
        if not x or i >= n:
            continue
        for j, y in enumerate(b[: n - i]):
            if y:
                out[i + j] += x * y
    return out


def _pack(a: list, k: int) -> int:
    x = 0
    for c in reversed(a):
        x = (x << k) + c
    return x


def _unpack(p: int, k: int, n: int) -> list:
    mask = (1 << k) - 1
    half = 1 << (k - 1)
    full = 1 << k
    out = []
    for _ in range(n):
        r = p & mask
        if r >= half:
            r -= full
        out.append(r)
        p = (p - r) >> k
    return out


def int_convolve(a: list, b: list, n: Optional[int] = None) -> list:
    """First ``n`` coefficients of the product of two integer lists.

    Long inputs go through Kronecker substitution: both polynomials are
    packed into single big integers, multiplied once, and unpacked with
    signed digits.
    """
    if n is None:
        n = len(a) + len(b) - 1
    a = a[:n]
    b = b[:n]
    if not a or not b or n <= 0:
        return [0] * max(n, 0)
    if min(len(a), len(b)) < _SCHOOLBOOK:
        return _school(a, b, n)
    ma = max(abs(x) for x in a)
    mb = max(abs(x) for x in b)
    if not ma or not mb:
        return [0] * n
    k = (ma * mb * min(len(a), len(b))).bit_length() + 2
    out = _unpack(_pack(a, k) * _pack(b, k), k, min(n, len(a) + len(b) - 1))
    out.extend([0] * (n - len(out)))
    return out


def _integerize(coeffs: list) -> tuple[list, int]:
    den = 1
    for c in coeffs:
        if type(c) is Fraction:
            den = den * c.denominator // math.gcd(den, c.denominator)
    if den == 1:
        return list(coeffs), 1
    return [int(c * den) for c in coeffs], den


def _convolve(a: list, b: list, n: int) -> list:
    ia, da = _integerize(a)
    ib, db = _integerize(b)
    raw = int_convolve(ia, ib, n)
    d = da * db
    if d == 1:
        return raw
    return [_exact(Fraction(c, d)) for c in raw]


# -- the series type -------------------------------------------------------


class QExp:
    """Immutable truncated series ``sum coeffs[i] * q^((lo + i)/denom)``."""

    __slots__ = ("denom", "lo", "coeffs", "order")

    def __init__(self, coeffs: Iterable = (), lo: int = 0, denom: int = 1, order=INF):
        denom = int(denom)
        if denom <= 0:
            raise SeriesError("lattice denominator must be positive")
        order = _order(order)
        cs = [_exact(c) for c in coeffs]
        if order != INF:
            top = math.floor(order * denom)
            if lo + len(cs) - 1 > top:
                cs = cs[: max(0, top - lo + 1)]
        start = 0
        while start < len(cs) and not cs[start]:
            start += 1
        end = len(cs)
        while end > start and not cs[end - 1]:
            end -= 1
        cs = cs[start:end]
        lo += start
        if not cs:
            lo, denom = 0, 1
        elif denom > 1:
            g = denom
            for i, c in enumerate(cs):
                if c:
                    g = math.gcd(g, lo + i)
                    if g == 1:
                        break
            if g > 1:
                lo //= g
                denom //= g
                cs = cs[::g]
        self.denom = denom
        self.lo = lo
        self.coeffs = tuple(cs)
        self.order = order

    # -- construction helpers
    @classmethod
    def from_dict(cls, terms: dict, order=INF) -> "QExp":
        """Build from ``{exponent: coefficient}``."""
        terms = {as_fraction(e): c for e, c in terms.items() if c}
        if not terms:
            return cls(order=order)
        denom = 1
        for e in terms:
            denom = math.lcm(denom, e.denominator)
        nums = {int(e * denom): c for e, c in terms.items()}
        lo, hi = min(nums), max(nums)
        cs = [0] * (hi - lo + 1)
        for k, c in nums.items():
            cs[k - lo] = c
        return cls(cs, lo, denom, order)

    @classmethod
    def one(cls) -> "QExp":
        return cls([1])

    @classmethod
    def zero(cls, order=INF) -> "QExp":
        return cls(order=order)

    # -- inspection
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def valuation(self) -> Optional[Fraction]:
        """Leading exponent, or None for the zero series."""
        if not self.coeffs:
            return None
        return Fraction(self.lo, self.denom)

    @property
    def leading_coefficient(self) -> Fraction:
        if not self.coeffs:
            raise SeriesError("zero series has no leading coefficient")
        return Fraction(self.coeffs[0])

    @property
    def exact(self) -> bool:
        return self.order == INF

    def _floor_val(self):
        # lower bound for the exponents of the unknown/known part
        if self.coeffs:
            return Fraction(self.lo, self.denom)
        return self.order

    def __getitem__(self, e) -> Fraction:
        e = as_fraction(e)
        if self.order != INF and e > self.order:
            raise InsufficientOrder(f"coefficient of q^{format_rational(e)} beyond order {self.order}")
        k = e * self.denom
        if k.denominator != 1:
            return Fraction(0)
        i = int(k) - self.lo
        if 0 <= i < len(self.coeffs):
            return Fraction(self.coeffs[i])
        return Fraction(0)

    def items(self) -> Iterator[tuple[Fraction, Fraction]]:
        """Nonzero ``(exponent, coefficient)`` pairs in increasing order."""
        for i, c in enumerate(self.coeffs):
            if c:
                yield Fraction(self.lo + i, self.denom), Fraction(c)

    def term_count(self) -> int:
        return sum(1 for c in self.coeffs if c)

    def on_lattice(self, denom: int) -> tuple[int, list]:
        """Return ``(lo, dense list)`` with the exponents on ``(1/denom)Z``."""
        if denom % self.denom:
            raise SeriesError(f"lattice 1/{self.denom} does not embed in 1/{denom}")
        step = denom // self.denom
        if step == 1 or not self.coeffs:
            return self.lo * step, list(self.coeffs)
        out = [0] * ((len(self.coeffs) - 1) * step + 1)
        out[::step] = self.coeffs
        return self.lo * step, out

    # -- equality / hashing: structural, including the order
    def __eq__(self, other) -> bool:
        if not isinstance(other, QExp):
            return NotImplemented
        return (
            self.coeffs == other.coeffs
            and self.lo == other.lo
            and self.denom == other.denom
            and self.order == other.order
        )

    def __hash__(self):
        return hash((self.coeffs, self.lo, self.denom, self.order))

    # -- ring operations
    def truncate(self, order) -> "QExp":
        order = _order(order)
        return QExp(self.coeffs, self.lo, self.denom, min(self.order, order))

    def __neg__(self) -> "QExp":
        return QExp([-c for c in self.coeffs], self.lo, self.denom, self.order)

    def __add__(self, other) -> "QExp":
        if not isinstance(other, QExp):
            other = QExp([_exact(other)])
        order = min(self.order, other.order)
        if not other.coeffs:
            return self.truncate(order)
        if not self.coeffs:
            return other.truncate(order)
        d = math.lcm(self.denom, other.denom)
        la, a = self.on_lattice(d)
        lb, b = other.on_lattice(d)
        lo = min(la, lb)
        hi = max(la + len(a), lb + len(b))
        if order != INF:
            hi = min(hi, math.floor(order * d) + 1)
        out = [0] * max(hi - lo, 0)
        for i, c in enumerate(a):
            k = la - lo + i
            if k < len(out):
                out[k] = c
        for i, c in enumerate(b):
            k = lb - lo + i
            if k < len(out):
                out[k] += c
        return QExp(out, lo, d, order)

    __radd__ = __add__

    def __sub__(self, other) -> "QExp":
        if not isinstance(other, QExp):
            other = QExp([_exact(other)])
        return self + (-other)

    def __rsub__(self, other) -> "QExp":
        return (-self) + other

    def scale(self, c) -> "QExp":
        c = _exact(c)
        if not c:
            return QExp(order=self.order if self.order == INF else self.order)
        return QExp([c * x for x in self.coeffs], self.lo, self.denom, self.order)

    def shift(self, e) -> "QExp":
        """Multiply by ``q^e``."""
        e = as_fraction(e)
        d = math.lcm(self.denom, e.denominator)
        lo, cs = self.on_lattice(d)
        return QExp(cs, lo + int(e * d), d, self.order + e)

    def __mul__(self, other) -> "QExp":
        if not isinstance(other, QExp):
            return self.scale(other)
        va, vb = self._floor_val(), other._floor_val()
        order = min(self.order + vb, other.order + va)
        if not self.coeffs or not other.coeffs:
            return QExp(order=order)
        d = math.lcm(self.denom, other.denom)
        la, a = self.on_lattice(d)
        lb, b = other.on_lattice(d)
        n = len(a) + len(b) - 1
        if order != INF:
            n = min(n, math.floor(order * d) - la - lb + 1)
        if n <= 0:
            return QExp(order=order)
        return QExp(_convolve(a, b, n), la + lb, d, order)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "QExp":
        if not isinstance(k, int):
            raise TypeError("only integer powers")
        if k < 0:
            return self.invert() ** (-k)
        result = QExp.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def invert(self, T=None) -> "QExp":
        """Multiplicative inverse, exact up to ``T`` (default: as far as known)."""
        if not self.coeffs:
            raise SeriesError("division by zero series")
        v = Fraction(self.lo, self.denom)
        order = self.order - 2 * v
        if T is not None:
            order = min(order, _order(T))
        if order == INF:
            if len(self.coeffs) == 1:
                return QExp([Fraction(1) / self.coeffs[0]], -self.lo, self.denom)
            raise SeriesError("inverse of a non-monomial needs a finite order")
        d = self.denom
        n = math.floor(order * d) + self.lo + 1
        if n <= 0:
            return QExp(order=order)
        u = self.coeffs
        u0 = u[0]
        nz = [(k, u[k]) for k in range(1, min(len(u), n)) if u[k]]
        ints = u0 in (1, -1) and all(type(c) is int for _, c in nz)
        b = [0] * n
        b[0] = u0 if ints else Fraction(1) / Fraction(u0)
        for m in range(1, n):
            s = 0
            for k, c in nz:
                if k > m:
                    break
                s += c * b[m - k]
            if ints:
                b[m] = -s * u0
            else:
                b[m] = -s * b[0]
        return QExp(b, -self.lo, d, order)

    def __truediv__(self, other) -> "QExp":
        if isinstance(other, QExp):
            return self * other.invert()
        return self.scale(Fraction(1) / as_fraction(other))

    def __rtruediv__(self, other) -> "QExp":
        return self.invert().scale(other)

    # -- substitutions
    def rescale(self, s) -> "QExp":
        """Substitute ``q -> q^s`` for a positive rational ``s``."""
        s = as_fraction(s)
        if s <= 0:
            raise SeriesError("rescale factor must be positive")
        p, r = s.numerator, s.denominator
        order = self.order * s
        if not self.coeffs:
            return QExp(order=order)
        cs = [0] * ((len(self.coeffs) - 1) * p + 1)
        cs[::p] = self.coeffs
        return QExp(cs, self.lo * p, self.denom * r, order)

    def negate_q(self) -> "QExp":
        """Substitute ``q -> -q``; only defined on the integer lattice."""
        if self.denom != 1:
            raise SeriesError("q→−q undefined off integer lattice")
        return QExp(
            [c if (self.lo + i) % 2 == 0 else -c for i, c in enumerate(self.coeffs)],
            self.lo,
            1,
            self.order,
        )

    # -- logarithm and exponential
    def log(self, T=None) -> "QExp":
        """Formal logarithm of a series with constant term 1."""
        if not self.coeffs or self.lo != 0 or self.coeffs[0] != 1:
            raise SeriesError("log needs leading term 1 at q^0")
        order = self.order if T is None else min(self.order, _order(T))
        if order == INF:
            if len(self.coeffs) == 1:
                return QExp()
            raise SeriesError("log of a non-constant series needs a finite order")
        d = self.denom
        n = math.floor(order * d) + 1
        a = list(self.coeffs[:n]) + [0] * max(0, n - len(self.coeffs))
        nz = [(k, a[k]) for k in range(1, n) if a[k]]
        g = [Fraction(0)] * n
        # theta(a) = a * theta(g), theta = q d/dq on numerators
        for m in range(1, n):
            s = Fraction(m * a[m])
            for k, c in nz:
                if k >= m:
                    break
                s -= (m - k) * g[m - k] * c
            g[m] = s / m
        return QExp(g, 0, d, order)

    def exp(self, T=None) -> "QExp":
        """Formal exponential of a series with only positive exponents."""
        if self.coeffs and self.lo <= 0:
            raise SeriesError("exp needs a series without constant or negative terms")
        order = self.order if T is None else min(self.order, _order(T))
        if not self.coeffs:
            return QExp([1], order=order)
        if order == INF:
            raise SeriesError("exp needs a finite order")
        d = self.denom
        n = math.floor(order * d) + 1
        g = [0] * n
        for i, c in enumerate(self.coeffs):
            if self.lo + i < n:
                g[self.lo + i] = c
        nz = [(k, k * g[k]) for k in range(1, n) if g[k]]
        e = [Fraction(0)] * n
        e[0] = Fraction(1)
        for m in range(1, n):
            s = Fraction(0)
            for k, kc in nz:
                if k > m:
                    break
                s += kc * e[m - k]
            e[m] = s / m
        return QExp(e, 0, d, order)

    # -- presentation
    def __repr__(self) -> str:
        o = "" if self.order == INF else f" + O(q^{format_rational(self.order)})"
        return f"QExp({self}{o})"

    def __str__(self) -> str:
        return self.format()

    def format(self, limit: Optional[int] = None) -> str:
        parts = []
        for e, c in self.items():
            if limit is not None and len(parts) >= limit:
                break
            parts.append(_term(c, e))
        if not parts:
            return "0"
        s = parts[0]
        for p in parts[1:]:
            s += " - " + p[1:] if p.startswith("-") else " + " + p
        return s

    # -- serialization
    def to_json(self) -> dict:
        return {
            "denom": self.denom,
            "lo": self.lo,
            "order": "inf" if self.order == INF else format_rational(self.order),
            "coeffs": [format_rational(c) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "QExp":
        order = data.get("order", "inf")
        return cls(
            [as_fraction(c) for c in data["coeffs"]],
            int(data["lo"]),
            int(data["denom"]),
            INF if order == "inf" else as_fraction(order),
        )


def _exponent(e: Fraction) -> str:
    if e.denominator == 1 and e >= 0:
        return "q" if e == 1 else f"q^{e.numerator}"
    return "q^{" + format_rational(e) + "}"


def _term(c: Fraction, e: Fraction) -> str:
    if e == 0:
        return format_rational(c)
    q = _exponent(e)
    if c == 1:
        return q
    if c == -1:
        return "-" + q
    if c.denominator == 1:
        return f"{c.numerator}{q}"
    sign = "-" if c < 0 else ""
    return f"{sign}({format_rational(abs(c))}){q}"


def monomial(c, e) -> QExp:
    """The exact series ``c * q^e``."""
    return QExp.from_dict({as_fraction(e): _exact(c)})


@dataclass(frozen=True)
class Difference:
    """First exponent at which two series disagree."""

    exponent: Fraction
    left: Fraction
    right: Fraction

    def __str__(self) -> str:
        return (
            f"q^{format_rational(self.exponent)}: "
            f"{format_rational(self.left)} != {format_rational(self.right)}"
        )


def first_difference(a: QExp, b: QExp, T) -> Optional[Difference]:
    """Compare coefficients of all exponents ``<= T``; None means equal."""
    T = _order(T)
    if T > a.order or T > b.order:
        raise InsufficientOrder(
            f"insufficient truncation: asked for {T}, have {a.order} and {b.order}"
        )
    diff = (a - b).truncate(T) if T != INF else a - b
    if diff.is_zero():
        return None
    e = diff.valuation
    return Difference(e, a[e], b[e])


def agrees(a: QExp, b: QExp, T) -> bool:
    return first_difference(a, b, T) is None
