"""Nahm sums, generalized Nahm sums and their duals.

``f_{A,B,C}(q) = sum_{n >= 0} q^{n^T A n / 2 + n^T B + C} / prod (q;q)_{n_i}``

and the symmetrized version with bases ``q^{d_i}`` and quadratic form
``A D``.  Expansion walks the lattice region of terms that can reach the
requested order and accumulates the inner sums coordinate by coordinate, so
each prefix of the walk costs one truncated convolution.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import linalg
from .lattice import QuadraticRegion
from .series import QExp, SeriesError, as_fraction, format_rational, int_convolve
from .linalg import check_posdef

__all__ = [
    "ModularTriple",
    "ModularQuadruple",
    "NotPositiveDefinite",
    "check_posdef",
    "gnahm_expand",
    "nahm_expand",
    "dual_triple",
    "dual_quadruple",
    "load_form",
    "F_FORM",
    "WW_FORM",
    "EXAM_A",
    "reindex_rank4",
    "reindex_vector",
    "splitting_check",
]


class NotPositiveDefinite(SeriesError):
    pass


@dataclass(frozen=True)
class ModularTriple:
    A: tuple
    B: tuple
    C: Fraction = Fraction(0)

    def __post_init__(self):
        A = linalg.matrix(self.A)
        B = linalg.vector(self.B)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", as_fraction(self.C))
        if len(B) != len(A):
            raise SeriesError("B must have the same length as A")
        if not linalg.is_symmetric(A):
            raise NotPositiveDefinite("A is not symmetric")
        if not check_posdef(A):
            raise NotPositiveDefinite("A is not positive definite")

    @property
    def rank(self) -> int:
        return len(self.A)

    def as_quadruple(self) -> "ModularQuadruple":
        return ModularQuadruple(self.A, self.B, self.C, (1,) * self.rank)

    def to_json(self) -> dict:
        return {
            "A": [[format_rational(x) for x in row] for row in self.A],
            "B": [format_rational(x) for x in self.B],
            "C": format_rational(self.C),
        }


@dataclass(frozen=True)
class ModularQuadruple:
    A: tuple
    B: tuple
    C: Fraction
    D: tuple

    def __post_init__(self):
        A = linalg.matrix(self.A)
        B = linalg.vector(self.B)
        D = tuple(self.D)
        if any(int(d) != d or d <= 0 for d in D):
            raise SeriesError("symmetrizer entries must be positive integers")
        D = tuple(int(d) for d in D)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", as_fraction(self.C))
        object.__setattr__(self, "D", D)
        if not (len(B) == len(D) == len(A)):
            raise SeriesError("A, B and D must have matching sizes")
        AD = self.AD
        if not linalg.is_symmetric(AD):
            raise NotPositiveDefinite("AD is not symmetric")
        if not check_posdef(AD):
            raise NotPositiveDefinite("AD is not positive definite")

    @property
    def rank(self) -> int:
        return len(self.A)

    @property
    def AD(self):
        return linalg.matmul(self.A, linalg.diag(self.D))

    def permuted(self, perm: Sequence[int]) -> "ModularQuadruple":
        """Relabel coordinates: new coordinate ``i`` is old coordinate ``perm[i]``."""
        return ModularQuadruple(
            linalg.permute(self.A, perm),
            tuple(self.B[i] for i in perm),
            self.C,
            tuple(self.D[i] for i in perm),
        )

    def to_json(self) -> dict:
        return {
            "A": [[format_rational(x) for x in row] for row in self.A],
            "B": [format_rational(x) for x in self.B],
            "C": format_rational(self.C),
            "D": list(self.D),
        }


def load_form(data: dict):
    """Parse the triple/quadruple JSON form; a missing ``D`` means a triple."""
    try:
        A, B = data["A"], data["B"]
    except KeyError as exc:
        raise SeriesError(f"missing field {exc.args[0]!r}") from None
    C = data.get("C", "0")
    if data.get("D") is None:
        return ModularTriple(A, B, C)
    return ModularQuadruple(A, B, C, data["D"])


# -- expansion -------------------------------------------------------------


def _reciprocal_table(step: int, N: int):
    """Lists ``1/(q^d;q^d)_n`` on a lattice where ``q^d`` is ``step`` slots, length N."""
    table = [[1] + [0] * (N - 1)] if N > 0 else [[]]

    def get(n: int) -> list:
        while len(table) <= n:
            k = len(table)
            s = step * k
            cur = list(table[-1])
            for i in range(s, N):
                cur[i] += cur[i - s]
            table.append(cur)
        return table[n]

    return get


def gnahm_expand(Q, T, spec: Optional[Sequence] = None) -> QExp:
    """Expand a (generalized) Nahm sum up to and including ``q^T``.

    ``Q`` is a :class:`ModularTriple` or :class:`ModularQuadruple`; ``spec``
    adds extra linear exponents, i.e. evaluates at ``u_i = q^{spec_i}``.
    """
    if isinstance(Q, ModularTriple):
        Q = Q.as_quadruple()
    T = as_fraction(T)
    S = Q.AD
    if not check_posdef(S):
        raise NotPositiveDefinite("AD is not positive definite")
    r = Q.rank
    lin = list(Q.B)
    if spec is not None:
        if len(spec) != r:
            raise SeriesError("specialization vector has the wrong length")
        lin = [x + as_fraction(y) for x, y in zip(lin, spec)]
    bound = T - Q.C
    region = QuadraticRegion(S, lin, bound)

    L = 1
    for i in range(r):
        L = math.lcm(L, (S[i][i] / 2).denominator, lin[i].denominator)
        for j in range(i + 1, r):
            L = math.lcm(L, S[i][j].denominator)
    base = math.floor(region.minimum() * L)
    top = math.floor(bound * L)
    N = top - base + 1
    if N <= 0 or not region.candidates([]):
        warnings.warn(f"order {T} is below every term of the sum", RuntimeWarning, stacklevel=2)
        return QExp(order=T)

    tables = {d: _reciprocal_table(d * L, N) for d in set(Q.D)}
    Si = [[int(S[i][j] * L) if i != j else 0 for j in range(r)] for i in range(r)]
    half = [int(S[i][i] * L / 2) for i in range(r)]
    li = [int(x * L) for x in lin]
    prefix: list[int] = []

    def leaf_exponent(n):
        e = 0
        for i in range(r):
            if n[i]:
                e += n[i] * (half[i] * n[i] + li[i] + sum(Si[i][j] * n[j] for j in range(i + 1, r)))
        return e - base

    def walk(k: int):
        """Return (offset, list) summing all completions of the current prefix."""
        get = tables[Q.D[k]]
        acc = None
        acc_lo = N
        for t in region.candidates(prefix):
            prefix.append(t)
            if k == r - 1:
                e = leaf_exponent(prefix)
                lo, part = e, get(t)[: N - e]
            else:
                lo, child = walk(k + 1)
                if child is None:
                    prefix.pop()
                    continue
                part = child if t == 0 else int_convolve(child, get(t), N - lo)
            prefix.pop()
            if acc is None:
                acc = [0] * N
            for i, c in enumerate(part):
                if c:
                    acc[lo + i] += c
            acc_lo = min(acc_lo, lo)
        if acc is None:
            return 0, None
        return acc_lo, acc[acc_lo:]

    lo, coeffs = walk(0)
    if coeffs is None:
        return QExp(order=T)
    return QExp(coeffs, base + lo, L, bound).shift(Q.C)


def nahm_expand(t: ModularTriple, T) -> QExp:
    return gnahm_expand(t, T)


# -- duality ---------------------------------------------------------------


def dual_triple(t: ModularTriple) -> ModularTriple:
    """``(A^-1, A^-1 B, B^T A^-1 B / 2 - r/24 - C)``."""
    Ai = linalg.inverse(t.A)
    Bs = linalg.matvec(Ai, t.B)
    Cs = linalg.dot(t.B, Bs) / 2 - Fraction(t.rank, 24) - t.C
    return ModularTriple(Ai, Bs, Cs)


def dual_quadruple(Q: ModularQuadruple) -> ModularQuadruple:
    """``(A^-1, A^-1 B, B^T (AD)^-1 B / 2 - tr(D)/24 - C, D)``."""
    Ai = linalg.inverse(Q.A)
    Bs = linalg.matvec(Ai, Q.B)
    ADi = linalg.inverse(Q.AD)
    Cs = linalg.dot(Q.B, linalg.matvec(ADi, Q.B)) / 2 - Fraction(sum(Q.D), 24) - Q.C
    return ModularQuadruple(Ai, Bs, Cs, Q.D)


# -- the rank 3 -> rank 4 rewriting ----------------------------------------

# exponent i^2/2 + j^2 + k^2 - ik - jk over bases q, q^2, q^2
F_FORM = ModularQuadruple(
    ((1, 0, -Fraction(1, 2)), (0, 1, -Fraction(1, 2)), (-1, -Fraction(1, 2), 1)), (0, 0, 0), 0, (1, 2, 2)
)
# exponent 3i^2/2 + 2j^2 + 4k^2 + 2ij + 4ik + 4jk over bases q, q^2, q^2
WW_FORM = ModularQuadruple(((3, 1, 2), (2, 2, 2), (4, 2, 4)), (0, 0, 0), 0, (1, 2, 2))

EXAM_A = linalg.matrix(
    (
        (1, 0, 0, Fraction(-1, 2)),
        (0, 1, 0, Fraction(-1, 2)),
        (0, 0, 1, Fraction(-1, 2)),
        (Fraction(-1, 2), Fraction(-1, 2), Fraction(-1, 2), 1),
    )
)


def reindex_vector(b: Sequence) -> tuple:
    """``(b1/2 - 1/4, b1/2 + 1/4, b2/2, b3/2)``."""
    b1, b2, b3 = (as_fraction(x) for x in b)
    return (b1 / 2 - Fraction(1, 4), b1 / 2 + Fraction(1, 4), b2 / 2, b3 / 2)


def reindex_rank4(b: Sequence, kind: str, T) -> tuple[QExp, QExp]:
    """Both sides of the rank-3 to rank-4 rewriting.

    ``lhs`` is the rank-3 generalized Nahm sum (identity side: the ``F`` form,
    Mizuno side: the dual-example form) with linear part ``b`` in ``q``;
    ``rhs`` is the rank-4 Nahm sum with matrix ``EXAM_A`` (resp. its inverse)
    and the rewritten linear vector, evaluated at ``q^2``.
    """
    T = as_fraction(T)
    if kind == "identity-side":
        form, A4 = F_FORM, EXAM_A
    elif kind == "mizuno-side":
        form, A4 = WW_FORM, linalg.inverse(EXAM_A)
    else:
        raise ValueError(f"unknown side {kind!r}")
    lhs = gnahm_expand(form, T, spec=b)
    rhs = gnahm_expand(ModularTriple(A4, reindex_vector(b), 0), T / 2).rescale(2)
    return lhs, rhs


def splitting_check(n_max: int, T):
    """Check ``q^{n(n-1)/2}/(q;q)_n = sum_{i+j=n} q^{i^2+j^2-i}/((q^2;q^2)_i (q^2;q^2)_j)``.

    Returns ``None`` when every ``n <= n_max`` agrees to order ``T``,
    otherwise ``(n, Difference)`` for the first failure.
    """
    from .products import PochSpec, poch
    from .series import first_difference, monomial

    T = as_fraction(T)
    for n in range(n_max + 1):
        lhs = monomial(1, Fraction(n * (n - 1), 2)) * poch(PochSpec(1, 1, 1, n)).invert(T)
        rhs = QExp(order=T)
        for i in range(n + 1):
            j = n - i
            den = poch(PochSpec(1, 2, 2, i)) * poch(PochSpec(1, 2, 2, j))
            rhs = rhs + monomial(1, i * i + j * j - i) * den.invert(T)
        d = first_difference(lhs.truncate(T), rhs.truncate(T), T)
        if d is not None:
            return n, d
    return None
