"""A small expression language for q-series identities.

Every node evaluates to a :class:`QExp` whose order is at least the order
asked for; the final result is truncated to exactly that order so that two
sides of an identity can be compared directly.  Nodes serialize to JSON as
tagged objects ``{"tag": ..., ...}`` with rationals written as strings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from . import linalg
from .lattice import QuadraticRegion
from .nahm import ModularQuadruple, ModularTriple, gnahm_expand, load_form
from .products import EtaQuotient, PochSpec, eta_expand, poch, theta_phi, theta_psi
from .series import QExp, SeriesError, as_fraction, format_rational, monomial

__all__ = [
    "Expr",
    "Scalar",
    "QPow",
    "Poch",
    "NahmRef",
    "Factor",
    "SumSpec",
    "Mul",
    "Add",
    "Neg",
    "Inv",
    "Rescale",
    "Theta",
    "Eta",
    "eval_expr",
    "expr_from_json",
]


def _fr(x) -> str:
    return format_rational(as_fraction(x))


class Expr:
    """Base class; subclasses implement ``_eval(T)`` with order >= T."""

    def _eval(self, T: Fraction) -> QExp:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    # sugar for building catalog entries
    def __mul__(self, other):
        return Mul([self, _lift(other)])

    def __rmul__(self, other):
        return Mul([_lift(other), self])

    def __add__(self, other):
        return Add([self, _lift(other)])

    def __radd__(self, other):
        return Add([_lift(other), self])

    def __sub__(self, other):
        return Add([self, Neg(_lift(other))])

    def __neg__(self):
        return Neg(self)


def _lift(x) -> Expr:
    if isinstance(x, Expr):
        return x
    return Scalar(x)


@dataclass(frozen=True, eq=False)
class Scalar(Expr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", as_fraction(self.value))

    def _eval(self, T):
        return monomial(self.value, 0)

    def to_json(self):
        return {"tag": "scalar", "value": _fr(self.value)}


@dataclass(frozen=True, eq=False)
class QPow(Expr):
    exponent: Fraction

    def __post_init__(self):
        object.__setattr__(self, "exponent", as_fraction(self.exponent))

    def _eval(self, T):
        return monomial(1, self.exponent)

    def to_json(self):
        return {"tag": "qpow", "exponent": _fr(self.exponent)}


@dataclass(frozen=True, eq=False)
class Poch(Expr):
    spec: PochSpec

    def _eval(self, T):
        if self.spec.infinite:
            return poch(self.spec, T)
        return poch(self.spec)

    def to_json(self):
        return {"tag": "poch", "spec": self.spec.to_json()}


@dataclass(frozen=True, eq=False)
class NahmRef(Expr):
    """A (generalized) Nahm sum, optionally with extra linear exponents."""

    form: object
    spec: Optional[tuple] = None

    def __post_init__(self):
        if self.spec is not None:
            object.__setattr__(self, "spec", tuple(as_fraction(x) for x in self.spec))

    def _eval(self, T):
        return gnahm_expand(self.form, T, self.spec)

    def to_json(self):
        d = {"tag": "nahm", "form": self.form.to_json()}
        if self.spec is not None:
            d["spec"] = [_fr(x) for x in self.spec]
        return d


@dataclass(frozen=True)
class Factor:
    """``(coeff * q^arg_exp; q^step)_L`` with ``L = length[0] + sum length[i+1] n_i``."""

    coeff: Fraction
    arg_exp: Fraction
    step: Fraction
    length: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeff", as_fraction(self.coeff))
        object.__setattr__(self, "arg_exp", as_fraction(self.arg_exp))
        object.__setattr__(self, "step", as_fraction(self.step))
        object.__setattr__(self, "length", tuple(int(x) for x in self.length))
        if self.step <= 0:
            raise SeriesError("Pochhammer step must be positive")

    def size(self, n: Sequence[int], idx_names) -> int:
        L = self.length[0] + sum(c * x for c, x in zip(self.length[1:], n))
        if L < 0:
            at = ", ".join(f"{name}={x}" for name, x in zip(idx_names, n))
            raise SeriesError(f"negative Pochhammer length {L} at {at}")
        return L

    def low_bound(self) -> Fraction:
        """Lower bound for the valuation of the product, whatever its length."""
        lo = Fraction(0)
        k = 0
        while self.arg_exp + k * self.step < 0:
            lo += self.arg_exp + k * self.step
            k += 1
        return lo

    def to_json(self):
        return {
            "coeff": _fr(self.coeff),
            "arg_exp": _fr(self.arg_exp),
            "step": _fr(self.step),
            "length": list(self.length),
        }

    @classmethod
    def from_json(cls, d):
        return cls(as_fraction(d.get("coeff", "1")), as_fraction(d.get("arg_exp", "0")),
                   as_fraction(d.get("step", "1")), d["length"])


@lru_cache(maxsize=8192)
def _poch_inverse(c, e, s, n, W) -> QExp:
    return poch(PochSpec(c, e, s, n)).invert(W)


@dataclass(frozen=True, eq=False)
class SumSpec(Expr):
    """A multiple sum of q-hypergeometric terms.

    term(n) = base^n * weight(n) * q^{n^T M n / 2 + lin.n + const} * prod num / prod den

    Indices run over ``n_i >= 0`` (``"nonneg"``) or all integers (``"all"``).
    ``weight`` is affine, ``(w0, w1, ..., wr)``; ``base`` holds one rational
    per index.  ``M`` must be positive definite, except that a single index
    with ``M = 0`` and a positive linear part is allowed.
    """

    M: tuple
    lin: tuple
    const: Fraction = Fraction(0)
    num: tuple = ()
    den: tuple = ()
    ranges: Optional[tuple] = None
    base: Optional[tuple] = None
    weight: Optional[tuple] = None
    names: Optional[tuple] = None

    def __post_init__(self):
        M = linalg.matrix(self.M)
        r = len(M)
        if not 1 <= r <= 3:
            raise SeriesError("sums of rank 1 to 3 only")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "lin", linalg.vector(self.lin))
        object.__setattr__(self, "const", as_fraction(self.const))
        object.__setattr__(self, "num", tuple(self.num))
        object.__setattr__(self, "den", tuple(self.den))
        object.__setattr__(self, "ranges", tuple(self.ranges or ("nonneg",) * r))
        object.__setattr__(self, "base", tuple(as_fraction(b) for b in (self.base or (1,) * r)))
        if self.weight is not None:
            object.__setattr__(self, "weight", tuple(as_fraction(w) for w in self.weight))
        object.__setattr__(self, "names", tuple(self.names or ("n", "m", "k")[:r]))
        if len(self.lin) != r or len(self.ranges) != r or len(self.base) != r:
            raise SeriesError("sum data have inconsistent sizes")
        for f in self.num + self.den:
            if len(f.length) != r + 1:
                raise SeriesError("Pochhammer length must be affine in the indices")
        if self.weight is not None and len(self.weight) != r + 1:
            raise SeriesError("weight must be affine in the indices")
        if any(x not in ("nonneg", "all") for x in self.ranges):
            raise SeriesError("index range must be 'nonneg' or 'all'")
        if not linalg.is_symmetric(M):
            raise SeriesError("quadratic part must be symmetric")
        if not self._linear() and not linalg.check_posdef(M):
            raise SeriesError("quadratic part must be positive definite")

    def _linear(self) -> bool:
        return len(self.M) == 1 and self.M[0][0] == 0 and self.lin[0] > 0 and self.ranges[0] == "nonneg"

    @property
    def rank(self) -> int:
        return len(self.M)

    def _points(self, bound):
        if self._linear():
            a = self.lin[0]
            for n in range(math.floor(bound / a) + 1 if bound >= 0 else 0):
                yield (n,), a * n
            return
        region = QuadraticRegion(self.M, self.lin, bound, [x == "nonneg" for x in self.ranges])
        yield from region.points()

    def _eval(self, T):
        slack = sum((f.low_bound() for f in self.num), Fraction(0))
        bound = T - self.const - slack
        out = QExp(order=T)
        terms: dict = {}
        for n, e in self._points(bound):
            c = Fraction(1)
            for b, x in zip(self.base, n):
                c *= b ** x
            if self.weight is not None:
                c *= self.weight[0] + sum(w * x for w, x in zip(self.weight[1:], n))
            if c == 0:
                continue
            e = e + self.const
            P = QExp.one()
            for f in self.num:
                P = P * poch(PochSpec(f.coeff, f.arg_exp, f.step, f.size(n, self.names)))
            if P.is_zero():
                continue
            W = T - e - P.valuation
            if W < 0:
                continue
            t = P
            for f in self.den:
                L = f.size(n, self.names)
                if L:
                    t = t * _poch_inverse(f.coeff, f.arg_exp, f.step, L, W)
            key = (e, c)
            terms[key] = terms.get(key, QExp(order=T - e)) + t.truncate(T - e)
        for (e, c), t in terms.items():
            out = out + t.shift(e).scale(c)
        return out.truncate(T)

    def to_json(self):
        d = {
            "tag": "sum",
            "M": [[_fr(x) for x in row] for row in self.M],
            "lin": [_fr(x) for x in self.lin],
            "const": _fr(self.const),
            "num": [f.to_json() for f in self.num],
            "den": [f.to_json() for f in self.den],
            "ranges": list(self.ranges),
            "base": [_fr(x) for x in self.base],
            "names": list(self.names),
        }
        if self.weight is not None:
            d["weight"] = [_fr(x) for x in self.weight]
        return d


@dataclass(frozen=True, eq=False)
class Mul(Expr):
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(_lift(f) for f in self.factors))

    def _eval(self, T):
        orders = [T] * len(self.factors)
        for _ in range(8):
            vals = [_eval(f, t) for f, t in zip(self.factors, orders)]
            lows = [v._floor_val() for v in vals]
            need = []
            ok = True
            for i, v in enumerate(vals):
                others = sum(lows[:i] + lows[i + 1:], Fraction(0))
                want = T - others
                need.append(max(orders[i], want))
                if v.order < want:
                    ok = False
            if ok:
                out = QExp.one()
                for v in vals:
                    out = out * v
                return out
            orders = need
        raise SeriesError("could not reach the requested order in a product")

    def to_json(self):
        return {"tag": "mul", "factors": [f.to_json() for f in self.factors]}


@dataclass(frozen=True, eq=False)
class Add(Expr):
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(_lift(t) for t in self.terms))

    def _eval(self, T):
        out = QExp()
        for t in self.terms:
            out = out + _eval(t, T)
        return out

    def to_json(self):
        return {"tag": "add", "terms": [t.to_json() for t in self.terms]}


@dataclass(frozen=True, eq=False)
class Neg(Expr):
    arg: Expr

    def _eval(self, T):
        return -_eval(self.arg, T)

    def to_json(self):
        return {"tag": "neg", "arg": self.arg.to_json()}


@dataclass(frozen=True, eq=False)
class Inv(Expr):
    arg: Expr

    def _eval(self, T):
        inner = _eval(self.arg, T)
        if inner.is_zero():
            raise SeriesError("division by zero series")
        v = inner.valuation
        if inner.order - 2 * v < T:
            inner = _eval(self.arg, T + 2 * v)
        return inner.invert(T)

    def to_json(self):
        return {"tag": "inv", "arg": self.arg.to_json()}


@dataclass(frozen=True, eq=False)
class Rescale(Expr):
    arg: Expr
    factor: Fraction

    def __post_init__(self):
        object.__setattr__(self, "factor", as_fraction(self.factor))
        if self.factor <= 0:
            raise SeriesError("rescale factor must be positive")

    def _eval(self, T):
        return _eval(self.arg, T / self.factor).rescale(self.factor)

    def to_json(self):
        return {"tag": "rescale", "arg": self.arg.to_json(), "factor": _fr(self.factor)}


@dataclass(frozen=True, eq=False)
class Theta(Expr):
    kind: str
    negate: bool = False

    def __post_init__(self):
        if self.kind not in ("phi", "psi"):
            raise SeriesError(f"unknown theta function {self.kind!r}")

    def _eval(self, T):
        f = theta_phi(T) if self.kind == "phi" else theta_psi(T)
        return f.negate_q() if self.negate else f

    def to_json(self):
        return {"tag": "theta", "kind": self.kind, "negate": self.negate}


@dataclass(frozen=True, eq=False)
class Eta(Expr):
    """An eta quotient; with ``eta=True`` each factor carries its ``q^{m/24}``."""

    quotient: EtaQuotient
    eta: bool = False

    def _eval(self, T):
        return eta_expand(self.quotient, T, self.eta)

    def to_json(self):
        return {"tag": "eta", "quotient": self.quotient.to_json(), "eta": self.eta}


def _eval(e: Expr, T: Fraction) -> QExp:
    out = e._eval(T)
    if out.order < T:
        raise SeriesError(f"{type(e).__name__} fell short of order {T}")
    return out


def eval_expr(e: Expr, T) -> QExp:
    """Evaluate to a series known exactly up to and including ``q^T``."""
    T = as_fraction(T)
    return _eval(e, T).truncate(T)


# -- JSON -----------------------------------------------------------------


def expr_from_json(d) -> Expr:
    if not isinstance(d, dict) or "tag" not in d:
        raise SeriesError(f"expression must be a tagged object, got {d!r}")
    tag = d["tag"]
    if tag == "scalar":
        return Scalar(as_fraction(d["value"]))
    if tag == "qpow":
        return QPow(as_fraction(d["exponent"]))
    if tag == "poch":
        return Poch(PochSpec.from_json(d["spec"]))
    if tag == "nahm":
        spec = d.get("spec")
        return NahmRef(load_form(d["form"]), None if spec is None else tuple(as_fraction(x) for x in spec))
    if tag == "sum":
        return SumSpec(
            [[as_fraction(x) for x in row] for row in d["M"]],
            [as_fraction(x) for x in d["lin"]],
            as_fraction(d.get("const", "0")),
            tuple(Factor.from_json(f) for f in d.get("num", [])),
            tuple(Factor.from_json(f) for f in d.get("den", [])),
            tuple(d["ranges"]) if "ranges" in d else None,
            tuple(as_fraction(x) for x in d["base"]) if "base" in d else None,
            tuple(as_fraction(x) for x in d["weight"]) if "weight" in d else None,
            tuple(d["names"]) if "names" in d else None,
        )
    if tag == "mul":
        return Mul(tuple(expr_from_json(f) for f in d["factors"]))
    if tag == "add":
        return Add(tuple(expr_from_json(t) for t in d["terms"]))
    if tag == "neg":
        return Neg(expr_from_json(d["arg"]))
    if tag == "inv":
        return Inv(expr_from_json(d["arg"]))
    if tag == "rescale":
        return Rescale(expr_from_json(d["arg"]), as_fraction(d["factor"]))
    if tag == "theta":
        return Theta(d["kind"], bool(d.get("negate", False)))
    if tag == "eta":
        return Eta(EtaQuotient.from_json(d["quotient"]), bool(d.get("eta", False)))
    raise SeriesError(f"unknown expression tag {tag!r}")
