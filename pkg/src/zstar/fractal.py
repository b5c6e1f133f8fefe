"""Dimension constants of digit-restricted images and their covering sums.

``alpha(p)`` solves ``x^(p-1) (x - 1) = 1`` on (1, 2) and ``gamma(p, q)``
solves ``x^p + ... + x^q = 1`` on (0, 1).  The images of the sequences with
every digit >= p (resp. every digit in [p, q]) have Hausdorff dimension
``log(alpha_p)/log 2`` (resp. ``log(1/gamma_pq)/log 2``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from mpmath import iv, mp, mpf

from .core import DEFAULT_DIGITS, Enclosure, as_enclosure, working_bits
from .series import lemma_exp_constant, zeta_star


@dataclass(frozen=True)
class RootResult:
    value: Enclosure
    tag: str
    residual: float

    def __float__(self):
        return float(self.value)


def _alpha_poly(p: int):
    return lambda x: x ** (p - 1) * (x - 1) - 1


def _gamma_poly(p: int, q: int):
    return lambda x: sum(x**k for k in range(p, q + 1)) - 1


def _certified_root(f, df, a, b, tag: str, precision: int) -> RootResult:
    """Bisection to 1e-3, Newton polish, then an interval-arithmetic sign
    check on both sides of the root."""
    bits = working_bits(precision)
    with mp.workprec(bits + 32):
        a, b = mpf(a), mpf(b)
        fa = f(a)
        while b - a > mpf("1e-3"):
            m = (a + b) / 2
            fm = f(m)
            if (fm < 0) == (fa < 0):
                a, fa = m, fm
            else:
                b = m
        x = (a + b) / 2
        for _ in range(200):
            step = f(x) / df(x)
            x -= step
            if abs(step) < mpf(2) ** (-bits - 8) * abs(x):
                break
        residual = abs(f(x))
        delta = mpf(2) ** (-bits + 4) * x
        lo, hi = x - delta, x + delta
    saved = iv.prec
    iv.prec = bits + 32
    try:
        flo, fhi = f(iv.mpf(lo)), f(iv.mpf(hi))
    finally:
        iv.prec = saved
    if not ((flo.b < 0 < fhi.a) or (flo.a > 0 > fhi.b)):
        raise ArithmeticError(f"could not certify the root of {tag}")
    value = Enclosure.from_bounds(lo, hi, precision)
    return RootResult(value, tag, float(residual))


def alpha(p: int, precision: int = DEFAULT_DIGITS) -> RootResult:
    """Root of x^(p-1)(x-1) = 1 in (1, 2); alpha(2) is the golden ratio."""
    if p < 2:
        raise ValueError("p must be >= 2")
    f = _alpha_poly(p)

    def df(x):
        return (p - 1) * x ** (p - 2) * (x - 1) + x ** (p - 1)

    return _certified_root(f, df, 1, 2, f"alpha({p})", precision)


def gamma(p: int, q: int, precision: int = DEFAULT_DIGITS) -> RootResult:
    """Root of x^p + ... + x^q = 1 in (0, 1)."""
    if not 2 <= p < q:
        raise ValueError("need 2 <= p < q")
    f = _gamma_poly(p, q)

    def df(x):
        return sum(k * x ** (k - 1) for k in range(p, q + 1))

    return _certified_root(f, df, 0, 1, f"gamma({p},{q})", precision)


def _log2(precision: int) -> Enclosure:
    return Enclosure.exact(2, precision).log()


def dim_Tp(p: int, precision: int = DEFAULT_DIGITS) -> Enclosure:
    """log(alpha_p) / log 2."""
    return alpha(p, precision).value.log() / _log2(precision)


def dim_TpDq(p: int, q: int, precision: int = DEFAULT_DIGITS) -> Enclosure:
    """log(1/gamma_pq) / log 2."""
    return -gamma(p, q, precision).value.log() / _log2(precision)


def covering_sum_beta(p: int, q: int, t, r: int, precision: int = DEFAULT_DIGITS) -> Enclosure:
    """(sum_{k=p..q} 2^(-k t))^r, the exponent-t sum over all depth-r words
    with digits in [p, q] of the dyadic cell lengths."""
    if not (2 <= p <= q and r >= 1):
        raise ValueError("need 2 <= p <= q and r >= 1")
    t = as_enclosure(t, precision)
    x = (-(t * _log2(precision))).exp()  # 2^-t
    s = Enclosure.exact(0, precision)
    xk = x
    for _ in range(p - 1):
        xk = xk * x
    for _ in range(p, q + 1):
        s = s + xk
        xk = xk * x
    out = Enclosure.exact(1, precision)
    for _ in range(r):
        out = out * s
    return out


def _word_counts(p: int, r: int, w_max: int) -> list[int]:
    # counts[w] = number of r-tuples of integers >= p with sum w
    counts = [1] + [0] * w_max
    for _ in range(r):
        nxt = [0] * (w_max + 1)
        for w, c in enumerate(counts):
            if c:
                for k in range(p, w_max - w + 1):
                    nxt[w + k] += c
        counts = nxt
    return counts


def covering_sum_eta(
    p: int,
    t,
    r: int,
    precision: int = 20,
    max_weight: int | None = None,
) -> Enclosure:
    """Enclosure of sum over depth-r words with all digits >= p of
    mu(O_word)^t.

    Words are enumerated up to total weight ``max_weight``; the remainder is
    bounded with mu(O_k) <= 4 C_1 2^-(k_1+..+k_r), which follows from the
    two-sided restricted-sum estimate (the factor 4 covers a trailing 2,
    where the cell length is a restricted sum ending in an exponent 1).
    """
    if p < 2 or not 1 <= r <= 5:
        raise ValueError("need p >= 2 and 1 <= r <= 5")
    t = as_enclosure(t, precision)
    if max_weight is None:
        max_weight = r * p + 16
    if max_weight < r * p:
        raise ValueError("max_weight below the smallest word weight")
    total = Enclosure.exact(0, precision)
    prefix_budget = max_weight - p
    # group words by prefix P' so consecutive lengths share evaluations
    for prefix in _words(p, r - 1, prefix_budget):
        room = max_weight - sum(prefix)
        vals = [_endpoint(prefix, k, precision) for k in range(p - 1, room + 1)]
        for i in range(1, len(vals)):
            mu = vals[i - 1] - vals[i]
            total = total + (mu.log() * t).exp()
    # certified tail
    c1 = lemma_exp_constant(20).upper
    x = (-(t * _log2(precision))).exp()
    with mp.workprec(working_bits(precision) + 16):
        xs = x.upper
        full = (xs**p / (1 - xs)) ** r
        counts = _word_counts(p, r, max_weight)
        # lower bound the enumerated mass with x.lower to keep the tail an upper bound
        seen = sum(c * x.lower**w for w, c in enumerate(counts))
        tail = (4 * c1) ** t.upper * max(full - seen, mpf(0))
    return total.extend(above=tail)


def _words(p: int, depth: int, budget: int):
    if depth == 0:
        yield ()
        return
    for k in range(p, budget + 1):
        for rest in _words(p, depth - 1, budget - k):
            yield (k,) + rest


def _endpoint(prefix: tuple[int, ...], k: int, precision: int) -> Enclosure:
    # zeta*(prefix, k); the depth-1 cell of 2 closes at zeta*(2, 1)
    if not prefix and k == 1:
        return zeta_star((2, 1), precision)
    return zeta_star(prefix + (k,), precision)


# ---------------------------------------------------------------------------
# Nested-sum bound with n(n-1) weights
# ---------------------------------------------------------------------------


def leb_lhs(s: int, cutoff: int = 2_000_000) -> Enclosure:
    """sum_{n_1 >= .. >= n_s >= n_{s+1} >= 2} 1/(n_1(n_1-1)..n_s(n_s-1) n_{s+1}).

    Double-precision DP to ``cutoff``; for fixed n_1 = n the inner sum is at
    most sum_{m=2..n} 1/m <= ln n, so the tail is below
    sum_{n > N} ln n / (n (n - 1)) <= (1 + ln N) / (N - 1).
    """
    n = np.arange(2, cutoff + 1, dtype=np.float64)
    g = np.cumsum(1.0 / n)
    w = 1.0 / (n * (n - 1))
    for _ in range(s):
        g = np.cumsum(g * w)
    partial = float(g[-1])
    tail = (1 + math.log(cutoff)) / (cutoff - 1)
    rounding = partial * (s + 2) * cutoff * 2.0**-52
    return Enclosure.from_bounds(partial - rounding, partial + rounding + tail, 20)


def leb_rhs(s: int, precision: int = 30) -> Enclosure:
    """2^-(s+1) * prod_{l>=3} (1 - 2/(l(l-1)))^-1 + zeta*({2}^s, 1) - zeta*({2}^s).

    The product telescopes to 3.
    """
    twos = (2,) * s
    head = Enclosure.exact(mpmath.mpf(3) / 2 ** (s + 1), precision)
    return head + zeta_star(twos + (1,), precision) - zeta_star(twos, precision)


def leb_check(s: int) -> tuple[Enclosure, Enclosure]:
    if s < 1:
        raise ValueError("s must be >= 1")
    return leb_lhs(s), leb_rhs(s)

