"""Independent reference computations for the tests.

Nothing here imports qnahm: series are plain dicts {exponent: coefficient}
with Fraction keys and values, multiplied by schoolbook loops, and the
Pochhammer denominators come from a partition-count table.
"""

from fractions import Fraction
from functools import lru_cache
import itertools


def clean(d):
    return {Fraction(e): Fraction(c) for e, c in d.items() if c != 0}


def as_dict(f, T):
    """A QExp as a dict, restricted to exponents <= T."""
    return {e: c for e, c in f.items() if e <= T}


def mul(a, b, T):
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = e1 + e2
            if e <= T:
                out[e] = out.get(e, 0) + c1 * c2
    return clean(out)


def add(*parts):
    out = {}
    for p in parts:
        for e, c in p.items():
            out[e] = out.get(e, 0) + c
    return clean(out)


def scale(a, c):
    return clean({e: c * x for e, x in a.items()})


def shift(a, v):
    return {e + v: c for e, c in a.items()}


def geometric(c, e, T):
    """1/(1 - c q^e) for e > 0."""
    out = {}
    k = 0
    while k * e <= T:
        out[Fraction(k * e)] = Fraction(c) ** k
        k += 1
    return out


def factor(c, e):
    """1 - c q^e."""
    return add({Fraction(0): 1}, {Fraction(e): -Fraction(c)})


def poch_finite(c, e, s, n, T):
    out = {Fraction(0): Fraction(1)}
    for k in range(n):
        out = mul(out, factor(c, Fraction(e) + k * Fraction(s)), T)
    return out


def poch_infinite(c, e, s, T):
    """(c q^e; q^s)_oo for e > 0."""
    out = {Fraction(0): Fraction(1)}
    k = 0
    while Fraction(e) + k * Fraction(s) <= T:
        out = mul(out, factor(c, Fraction(e) + k * Fraction(s)), T)
        k += 1
    return out


def poch_infinite_inverse(c, e, s, T):
    out = {Fraction(0): Fraction(1)}
    k = 0
    while Fraction(e) + k * Fraction(s) <= T:
        out = mul(out, geometric(c, Fraction(e) + k * Fraction(s), T), T)
        k += 1
    return out


@lru_cache(maxsize=None)
def partitions_bounded(m, k):
    """Number of partitions of m into parts of size <= k."""
    if m == 0:
        return 1
    if m < 0 or k == 0:
        return 0
    return partitions_bounded(m, k - 1) + partitions_bounded(m - k, k)


def partition_numbers(N):
    return [partitions_bounded(m, m) for m in range(N + 1)]


def inv_qq(n, d, T):
    """1/(q^d; q^d)_n: the coefficient of q^{dm} counts partitions of m into parts <= n."""
    out = {}
    m = 0
    while m * d <= T:
        out[Fraction(m * d)] = Fraction(partitions_bounded(m, n))
        m += 1
    return out


def sigma1(n):
    return sum(d for d in range(1, n + 1) if n % d == 0)


def eta_dict(scalar, vshift, exps, T):
    """scalar q^vshift prod_m (q^m;q^m)_oo^{e_m}, by repeated factor products."""
    W = T - Fraction(vshift)
    out = {Fraction(0): Fraction(1)}
    for m, e in exps.items():
        m = Fraction(m)
        base = poch_infinite(1, m, m, W) if e > 0 else poch_infinite_inverse(1, m, m, W)
        for _ in range(abs(e)):
            out = mul(out, base, W)
    return clean({x + Fraction(vshift): Fraction(scalar) * c for x, c in out.items()})


def quad_exponent(S, lin, n):
    r = len(n)
    e = Fraction(0)
    for i in range(r):
        e += Fraction(S[i][i]) * n[i] * n[i] / 2 + Fraction(lin[i]) * n[i]
        for j in range(i + 1, r):
            e += Fraction(S[i][j]) * n[i] * n[j]
    return e


def brute_gnahm(A, B, C, D, T, box=None):
    """sum_n q^{n^T A D n / 2 + B.n + C} / prod (q^{d_i}; q^{d_i})_{n_i}.

    The box is enlarged until two consecutive sizes give the same answer.
    """
    r = len(A)
    S = [[Fraction(A[i][j]) * D[j] for j in range(r)] for i in range(r)]
    T = Fraction(T)

    def run(K):
        out = {}
        for n in itertools.product(range(K), repeat=r):
            e = quad_exponent(S, B, n) + Fraction(C)
            if e > T:
                continue
            term = {e: Fraction(1)}
            for i in range(r):
                if n[i]:
                    term = mul(term, inv_qq(n[i], D[i], T - e), T)
            out = add(out, term)
        return out

    K = box or 6
    prev = run(K)
    while True:
        K += 3
        cur = run(K)
        if cur == prev:
            return cur
        prev = cur
