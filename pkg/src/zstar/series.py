"""Certified evaluation of zeta, multiple zeta-star values and related limits.

Two evaluation routes live here.

``zeta_star`` writes the star sum as an iterated integral over the word
built from the letters ``dt/t``, ``dt/(1-t)`` and ``dt/(t(1-t))`` (the last
one encodes a ``>=`` between consecutive indices), splits the integration
simplex at ``t = 1/2`` and evaluates every half-integral as a power series
at ``1/2``.  All series coefficients lie in ``[0, 1]``, so truncating at
``N`` terms costs at most ``2**-N``; the arithmetic is fixed point with a
tracked one-sided error, which makes the returned radius rigorous.

``zeta_star_direct`` is the plain nested partial sum with a harmonic
majorant for the tail.  It converges slowly and is kept as an independent
oracle for tests and small tolerances.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import accumulate
from typing import Sequence

import numpy as np
from mpmath import mp, mpf

from .core import (
    DEFAULT_DIGITS,
    Composition,
    DivergentCompositionError,
    Enclosure,
    from_fixed,
    working_bits,
)

# letters of the iterated-integral word
_DT_T = 0  # dt / t
_DT_1MT = 1  # dt / (1 - t)
_DT_STAR = 2  # dt / (t (1 - t)) = dt/t + dt/(1-t)
_SWAP = {_DT_T: _DT_1MT, _DT_1MT: _DT_T, _DT_STAR: _DT_STAR}


class TailStrategy(enum.Enum):
    HARMONIC_POWER = "harmonic-power"
    GEOMETRIC_HALF = "geometric-half"
    ALTERNATING = "alternating"


@dataclass(frozen=True)
class TailBound:
    cutoff: int
    bound: float
    strategy: TailStrategy


def _as_comp(comp) -> Composition:
    if isinstance(comp, Composition):
        return comp
    return Composition(comp)


# ---------------------------------------------------------------------------
# Riemann zeta
# ---------------------------------------------------------------------------


@lru_cache(maxsize=64)
def _borwein_weights(n: int) -> tuple[int, ...]:
    d, acc = [], Fraction(0)
    for i in range(n + 1):
        acc += Fraction(
            math.factorial(n + i - 1) * 4**i,
            math.factorial(n - i) * math.factorial(2 * i),
        )
        d.append(n * acc)
    assert all(x.denominator == 1 for x in d)
    return tuple(int(x) for x in d)


def _zeta_real(s, digits: int) -> Enclosure:
    """zeta(s) for real s > 1 by Borwein's alternating-series algorithm.

    Truncation error is at most 3 (3 + sqrt 8)^-n / (1 - 2^(1-s)).
    """
    bits = working_bits(digits)
    n = int(bits * 0.3934) + 4
    wp = bits + 2 * n.bit_length() + 16
    d = _borwein_weights(n)
    with mp.workprec(wp):
        s = mpf(s)
        dn = d[n]
        total = mpf(0)
        for k in range(n):
            term = mpf(d[k] - dn) / mpf(k + 1) ** s
            total += term if k % 2 == 0 else -term
        alt = mpf(1) - mpf(2) ** (1 - s)
        value = -total / (dn * alt)
        trunc = 3 / (3 + mp.sqrt(8)) ** n / alt
        rounding = mpf(4 * n + 8) * mpf(2) ** (-wp) / alt
        radius = (trunc + rounding) * (1 + mpf(2) ** (8 - wp))
    return Enclosure(value, radius, digits)


def riemann_zeta(s: int, precision: int = DEFAULT_DIGITS) -> Enclosure:
    """Enclosure of zeta(s) for an integer s >= 2."""
    if int(s) != s:
        raise TypeError("integer argument expected; use zeta_real for real s")
    if s <= 1:
        raise DivergentCompositionError(f"zeta({s}) diverges")
    return _zeta_real(int(s), precision)


def zeta_real(s, precision: int = DEFAULT_DIGITS) -> Enclosure:
    """Enclosure of zeta(s) for real s > 1 (used for non-integer constants)."""
    if s <= 1:
        raise DivergentCompositionError(f"zeta({s}) diverges")
    return _zeta_real(s, precision)


# ---------------------------------------------------------------------------
# zeta-star via the split iterated integral
# ---------------------------------------------------------------------------


def star_word(parts: Sequence[int]) -> list[int]:
    """Iterated-integral word of zeta*(parts), outermost letter first."""
    word: list[int] = []
    for i, k in enumerate(parts):
        word.extend([_DT_T] * (k - 1))
        word.append(_DT_1MT if i == len(parts) - 1 else _DT_STAR)
    return word


def _apply(letter: int, c: list[int]) -> list[int]:
    """Integrate the series ``sum c_n t^n`` against one letter from 0 to t."""
    if letter == _DT_T:
        return [0] + [c[n] // n for n in range(1, len(c))]
    acc = list(accumulate(c))
    if letter == _DT_1MT:
        return [0] + [acc[n - 1] // n for n in range(1, len(c))]
    return [0] + [acc[n] // n for n in range(1, len(c))]


def _eval_half(c: list[int], n_terms: int) -> int:
    # floor(sum_n c_n 2^-n) in fixed point
    return sum(cn << (n_terms - n) for n, cn in enumerate(c)) >> n_terms


@lru_cache(maxsize=4096)
def _star_fixed(parts: tuple[int, ...], bits: int) -> tuple[int, int, int]:
    """Return ``(value, err, scale)`` with zeta*(parts) in
    ``[value, value + err] * 2**-scale``."""
    word = star_word(parts)
    w = len(word)
    scale = bits + 2 * (w + 5).bit_length() + 4
    n_terms = scale
    one = [1 << scale] + [0] * n_terms

    # suffix integrals, innermost letter first
    suffix = [0] * (w + 1)
    suffix[w] = 1 << scale
    c = one
    for j in range(w - 1, -1, -1):
        c = _apply(word[j], c)
        suffix[j] = _eval_half(c, n_terms)

    # reflected prefixes: t -> 1 - t swaps dt/t and dt/(1-t) and reverses order
    prefix = [0] * (w + 1)
    prefix[0] = 1 << scale
    c = one
    for j in range(1, w + 1):
        c = _apply(_SWAP[word[j - 1]], c)
        prefix[j] = _eval_half(c, n_terms)

    total = sum((a * b) >> scale for a, b in zip(prefix, suffix))
    # each factor with L letters is low by at most L + 2 ulps, each product
    # floor costs one more
    err = (w + 1) * (w + 5)
    return total, err, scale


def zeta_star(comp, precision: int = DEFAULT_DIGITS) -> Enclosure:
    """Enclosure of zeta*(k_1, ..., k_r); the empty composition gives 1."""
    comp = _as_comp(comp)
    if comp.depth == 0:
        return Enclosure.exact(1, precision)
    value, err, scale = _star_fixed(comp.parts, working_bits(precision))
    return from_fixed(value, err, scale, precision)


def zeta_star_restricted(comp, precision: int = DEFAULT_DIGITS) -> Enclosure:
    """Star sum with every index >= 2, via
    zeta*(k_1..k_r) - zeta*(k_1..k_{r-1})."""
    comp = _as_comp(comp)
    if comp.depth == 0:
        raise ValueError("restricted sum needs a non-empty composition")
    return zeta_star(comp, precision) - zeta_star(comp.prefix(comp.depth - 1), precision)


def delta(comp, precision: int = DEFAULT_DIGITS) -> Enclosure:
    """zeta*(comp, 1) - zeta*(comp)."""
    comp = _as_comp(comp)
    if comp.depth == 0:
        raise ValueError("delta needs a non-empty composition")
    return zeta_star_restricted(comp.append(1), precision)


# ---------------------------------------------------------------------------
# Limits with appended blocks
# ---------------------------------------------------------------------------

# prod_{l>=3} (1 - 4/l^2)^-1, telescoping
_TELESCOPE_SIX = 6


def limit_append_block(comp, p: int, precision: int = DEFAULT_DIGITS) -> Enclosure:
    """lim_{m->oo} zeta*(comp, {p}^m).

    The sequence increases in m; the increment at step m is the restricted
    sum of ``(comp, {p}^m)``, which is at most ``6 * 2^(-p m) * zeta*(comp)``
    because the appended block contributes a complete homogeneous sum of
    ``l^-p`` over ``l >= 2``.
    """
    comp = _as_comp(comp)
    if comp.depth == 0:
        raise ValueError("use euler_product_limit for the empty prefix")
    if p < 2:
        raise ValueError("p must be >= 2")
    bits = working_bits(precision)
    m = bits // p + 4
    base = zeta_star(comp.append(*([p] * m)), precision)
    head = zeta_star(comp, 8)
    with mp.workprec(bits + 16):
        tail = _TELESCOPE_SIX * head.upper * mpf(2) ** (-p * (m + 1)) / (1 - mpf(2) ** (-p))
    return base.extend(above=tail)


def euler_product_limit(p: int, precision: int = DEFAULT_DIGITS) -> Enclosure:
    """prod_{n>=2} (1 - n^-p)^-1 = lim_m zeta*({p}^m).

    Uses log of the product = sum_j (zeta(p j) - 1) / j, whose terms are
    bounded by 3 * 2^(-p j) / j.
    """
    if p < 2:
        raise ValueError("p must be >= 2")
    bits = working_bits(precision)
    terms = bits // p + 2
    acc = Enclosure.exact(0, precision)
    for j in range(1, terms + 1):
        acc = acc + (riemann_zeta(p * j, precision) - 1) / j
    with mp.workprec(bits + 16):
        tail = 3 * mpf(2) ** (-p * (terms + 1)) / ((terms + 1) * (1 - mpf(2) ** (-p)))
    log_prod = acc.extend(above=tail)
    return log_prod.exp()


# ---------------------------------------------------------------------------
# Direct nested partial sums (independent oracle)
# ---------------------------------------------------------------------------


def _upper_gamma_int(r: int, z: float) -> float:
    # Gamma(r, z) for integer r >= 1
    return math.factorial(r - 1) * math.exp(-z) * sum(z**j / math.factorial(j) for j in range(r))


def harmonic_tail_bound(k1: int, r: int, cutoff: int, base: int = 1) -> float:
    """Bound on sum_{n > cutoff} n^-k1 * (1 + ln n)^(r-1), which majorizes the
    tail of a depth-r star sum with leading exponent k1."""
    if k1 < 2:
        raise DivergentCompositionError("leading exponent must be >= 2")
    if r == 1:
        return cutoff ** (1 - k1) / (k1 - 1)
    # the majorant decreases past this point
    if 1 + math.log(cutoff) < (r - 1) / k1:
        raise ValueError("cutoff too small for the integral comparison")
    a = k1 - 1
    u0 = 1 + math.log(cutoff)
    return math.exp(a) * _upper_gamma_int(r, a * u0) / a**r


def zeta_star_direct(comp, cutoff: int, base: int = 1) -> tuple[Enclosure, TailBound]:
    """Nested partial sum over ``cutoff >= n_1 >= ... >= n_r >= base`` plus
    a certified harmonic-majorant tail, in double precision.

    ``base=2`` gives the restricted sum.
    """
    comp = _as_comp(comp)
    if comp.depth == 0:
        return Enclosure.exact(1), TailBound(cutoff, 0.0, TailStrategy.HARMONIC_POWER)
    n = np.arange(base, cutoff + 1, dtype=np.float64)
    g = np.ones_like(n)
    for k in reversed(comp.parts):
        g = np.cumsum(g * n ** (-float(k)))
    partial = float(g[-1])
    tail = harmonic_tail_bound(comp[0], comp.depth, cutoff, base)
    rounding = partial * (comp.depth * (cutoff + 2) + 16) * 2.0**-52
    enc = Enclosure.from_bounds(partial - rounding, partial + rounding + tail, 20)
    return enc, TailBound(cutoff, tail, TailStrategy.HARMONIC_POWER)


def limit_append_block_direct(comp, p: int, cutoff: int) -> Enclosure:
    """Weighted restricted DP for lim_m zeta*(comp, {p}^m), double precision.

    Sums zeta*(comp minus last part) + sum_{n_1>=..>=n_r>=2, n_1<=cutoff}
    prod n_i^-k_i * prod_{2<=l<=n_r} l^p/(l^p-1); the truncated tail is
    bounded by the harmonic majorant times the full Euler product.
    """
    comp = _as_comp(comp)
    n = np.arange(2, cutoff + 1, dtype=np.float64)
    weight = np.cumprod(1.0 / (1.0 - n ** (-float(p))))
    g = weight.copy()
    for k in reversed(comp.parts):
        g = np.cumsum(g * n ** (-float(k)))
    head = zeta_star(comp.prefix(comp.depth - 1), 20)
    partial = float(g[-1])
    euler = float(euler_product_limit(p, 20).upper)
    tail = euler * harmonic_tail_bound(comp[0], comp.depth, cutoff, 2)
    rounding = partial * (comp.depth + 2) * (cutoff + 2) * 2.0**-52
    return (head + partial).extend(rounding, rounding + tail)


# ---------------------------------------------------------------------------
# Constants
# ---------------------------------------------------------------------------


@lru_cache(maxsize=8)
def lemma_exp_constant(precision: int = 30) -> Enclosure:
    """C_1 = max(6, 2^(3/2) prod_{l>=3} (1 - (2/l)^(3/2))^-1).

    The product is evaluated through its logarithm,
    sum_j 2^(3j/2) (zeta(3j/2) - 1 - 2^(-3j/2)) / j, a series with ratio
    about (2/3)^(3/2).
    """
    bits = working_bits(precision)
    acc = Enclosure.exact(0, precision)
    j = 0
    with mp.workprec(bits + 16):
        while True:
            j += 1
            s = mpf(3 * j) / 2
            bound = (mpf(2) / 3) ** s * (1 + 3 / (s - 1)) / j
            if bound < mpf(2) ** (-bits - 8):
                break
            # scaling by 2^s costs s*log10(2) digits
            z = zeta_real(s, precision + int(s * 0.30103) + 2)
            two_s = mpf(2) ** s
            term = (z - 1 - 1 / two_s) * two_s / j
            acc = acc + Enclosure(term.center, term.radius, precision)
        ratio = (mpf(2) / 3) ** mpf(1.5)
        tail = bound / (1 - ratio)
    log_prod = acc.extend(above=tail)
    second = log_prod.exp() * Enclosure.exact(mpf(2) ** mpf(1.5), precision)
    if second.lower > _TELESCOPE_SIX:
        return second
    return Enclosure.from_bounds(_TELESCOPE_SIX, max(second.upper, mpf(_TELESCOPE_SIX)), precision)


# ---------------------------------------------------------------------------
# Finite identity check
# ---------------------------------------------------------------------------


def mgmg_nested_sum(r: int, m: int, alpha: Fraction) -> Fraction:
    """sum_{m >= m_1 >= ... >= m_r >= 1} alpha^(m_r - 1) / (m m_1 ... m_{r-1}), exactly."""
    alpha = Fraction(alpha)
    # h[j] = sum over chains ending below j, built from the innermost index out
    h = [Fraction(0)] + [alpha ** (j - 1) for j in range(1, m + 1)]
    for _ in range(r - 1):
        acc = Fraction(0)
        nxt = [Fraction(0)]
        for j in range(1, m + 1):
            acc += h[j]
            nxt.append(acc / j)
        h = nxt
    return sum(h[1:], Fraction(0)) / m


def _tensor_gauss(r: int, m: int, alpha: float, order: int) -> float:
    x, w = np.polynomial.legendre.leggauss(order)
    x = (x + 1) / 2
    w = w / 2
    grids = np.meshgrid(*([x] * r), indexing="ij")
    weights = np.meshgrid(*([w] * r), indexing="ij")
    prod_x = np.prod(np.stack(grids), axis=0)
    prod_w = np.prod(np.stack(weights), axis=0)
    return float(np.sum(prod_w * (1 - (1 - alpha) * prod_x) ** (m - 1)))


def mgmg_check(
    r: int, m: int, alpha, quad_order: int | None = None, tol: float = 1e-13
) -> tuple[Enclosure, Enclosure]:
    """Compare the cube integral of [1 - (1-alpha) x_1...x_r]^(m-1) with its
    nested-sum evaluation.

    The quadrature order doubles until two successive orders agree to ``tol``;
    the left enclosure radius is that agreement gap plus rounding, so it is a
    heuristic rather than a certified bound.  Returns ``(lhs, rhs)``.
    """
    if not (1 <= r <= 4 and 1 <= m <= 10):
        raise ValueError("mgmg_check supports r <= 4 and m <= 10")
    alpha = Fraction(alpha)
    order = quad_order or max(2, (m + 1) // 2 + 1)
    prev = _tensor_gauss(r, m, float(alpha), order)
    for _ in range(8):
        order *= 2
        cur = _tensor_gauss(r, m, float(alpha), order)
        if abs(cur - prev) <= tol:
            break
        prev = cur
    else:
        raise ArithmeticError(f"quadrature did not settle, residual {abs(cur - prev):.3e}")
    gap = abs(cur - prev) + 64 * 2.0**-52 * max(1.0, abs(cur))
    lhs = Enclosure.from_bounds(cur - gap, cur + gap, 20)
    rhs = Enclosure.exact(mgmg_nested_sum(r, m, alpha), 30)
    return lhs, rhs
