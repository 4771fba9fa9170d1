"""Exhaustive enumeration of lattice points under a convex quadratic bound.

The region is ``{n in Z^r : (1/2) n^T M n + lin^T n <= bound}`` with ``M``
positive definite, optionally restricted to ``n_i >= 0``.  Coordinates are
chosen one at a time; for every prefix the remaining coordinates are relaxed
to real values and minimised in closed form (a Schur complement), which gives
an exact rational lower bound for every completion of the prefix.  Floating
point is only used to locate the roots of a one-variable quadratic, and the
candidate range is then filtered with the exact bound.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .linalg import Matrix, check_posdef, inverse, matrix, vector

_MARGIN = 0.1


class QuadraticRegion:
    def __init__(self, M, lin, bound, nonneg: Optional[Sequence[bool]] = None):
        self.M: Matrix = matrix(M)
        self.r = len(self.M)
        self.lin = vector(lin)
        if len(self.lin) != self.r:
            raise ValueError("linear part has the wrong length")
        if not check_posdef(self.M):
            raise ValueError("quadratic part is not positive definite")
        self.bound = Fraction(bound)
        self.nonneg = tuple(True for _ in range(self.r)) if nonneg is None else tuple(nonneg)
        self._stages = [self._schur(k) for k in range(1, self.r + 1)]

    def _schur(self, k: int):
        """Lower bound for prefixes of length ``k`` as ``(S, beta, const)``."""
        r, M, lin = self.r, self.M, self.lin
        if k == r:
            return M, lin, Fraction(0)
        P = [[M[i][j] for j in range(k)] for i in range(k)]
        Q = [[M[i][j] for j in range(k, r)] for i in range(k)]
        Rinv = inverse([[M[i][j] for j in range(k, r)] for i in range(k, r)])
        ly = lin[k:]
        QR = [[sum((Q[i][t] * Rinv[t][j] for t in range(r - k)), Fraction(0)) for j in range(r - k)] for i in range(k)]
        S = tuple(
            tuple(P[i][j] - sum((QR[i][t] * Q[j][t] for t in range(r - k)), Fraction(0)) for j in range(k))
            for i in range(k)
        )
        beta = tuple(lin[i] - sum((QR[i][t] * ly[t] for t in range(r - k)), Fraction(0)) for i in range(k))
        Rl = [sum((Rinv[i][j] * ly[j] for j in range(r - k)), Fraction(0)) for i in range(r - k)]
        const = -sum((a * b for a, b in zip(ly, Rl)), Fraction(0)) / 2
        return S, beta, const

    def minimum(self) -> Fraction:
        """Minimum of the quadratic over real vectors (a lower bound on the region)."""
        S, beta, const = self._stages[0]
        a = S[0][0] / 2
        return const - beta[0] ** 2 / (4 * a)

    def exponent(self, n: Sequence[int]) -> Fraction:
        M, lin = self.M, self.lin
        r = self.r
        s = Fraction(0)
        for i in range(r):
            if n[i]:
                row = M[i]
                s += n[i] * (row[i] * n[i] / 2 + sum((row[j] * n[j] for j in range(i + 1, r)), Fraction(0)) + lin[i])
        return s

    def candidates(self, prefix: Sequence[int]) -> range:
        """All values of the next coordinate whose relaxed lower bound is within the bound."""
        k = len(prefix)
        S, beta, const = self._stages[k]
        a = S[k][k] / 2
        b = beta[k] + sum((S[k][j] * prefix[j] for j in range(k)), Fraction(0))
        c = const
        for i in range(k):
            if prefix[i]:
                c += prefix[i] * (
                    S[i][i] * prefix[i] / 2
                    + sum((S[i][j] * prefix[j] for j in range(i + 1, k)), Fraction(0))
                    + beta[i]
                )
        c -= self.bound
        disc = b * b - 4 * a * c
        if disc < 0:
            return range(0)
        root = math.sqrt(disc)
        lo_f = (-b - root) / (2 * a)
        hi_f = (-b + root) / (2 * a)
        pad = _MARGIN * abs(float(hi_f - lo_f)) + 2
        lo = math.floor(lo_f - pad)
        hi = math.ceil(hi_f + pad)
        if self.nonneg[k]:
            lo = max(lo, 0)

        def inside(t):
            return a * t * t + b * t + c <= 0

        while lo <= hi and not inside(lo):
            lo += 1
        while hi >= lo and not inside(hi):
            hi -= 1
        if lo <= hi:
            # the float roots only seed the search; the exact test decides
            while inside(hi + 1):
                hi += 1
            while (lo > 0 or not self.nonneg[k]) and inside(lo - 1):
                lo -= 1
        return range(lo, hi + 1)

    def points(self) -> Iterator[tuple[tuple[int, ...], Fraction]]:
        """Yield ``(n, exponent)`` for every lattice point in the region."""
        prefix: list[int] = []

        def walk():
            for t in self.candidates(prefix):
                prefix.append(t)
                if len(prefix) == self.r:
                    e = self.exponent(prefix)
                    if e <= self.bound:
                        yield tuple(prefix), e
                else:
                    yield from walk()
                prefix.pop()

        yield from walk()
