"""The limit map eta on admissible digit sequences, its greedy inverse and
the binary encoding beta.

For a prefix ``P = (k_1..k_r)`` every admissible continuation has its eta
value between ``zeta*(P)`` (appending digits only adds terms) and the
*ceiling* of ``P``: with ``s`` the last position carrying a digit >= 2,

    ceiling(P) = zeta*(k_1..k_{s-1}, k_s - 1) = lim_n zeta*(k_1..k_s, {1}^n),

read as ``zeta(k_1 - 1)`` when ``s = 1`` and as ``+inf`` when ``P = (2, 1..1)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from .core import (
    DEFAULT_DIGITS,
    Composition,
    Enclosure,
    NotInTError,
    SeqSpec,
    as_enclosure,
    mpf_to_fraction,
    validate_in_T,
)
from .series import zeta_star

MAX_DEPTH = 64
MAX_PRECISION_BITS = 4096


class Status(enum.Enum):
    TRUNCATED = "truncated"
    TERMINATED = "terminated"
    AMBIGUOUS = "ambiguous"
    OUT_OF_DOMAIN = "out-of-domain"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Bracket:
    """``lower = zeta*(prefix)``, ``upper = ceiling(prefix)``; ``upper`` is
    ``None`` for an unbounded ceiling."""

    lower: Enclosure
    upper: Enclosure | None

    @property
    def bounded(self) -> bool:
        return self.upper is not None

    def width(self) -> mpf:
        if self.upper is None:
            return mpmath.inf
        with mp.workprec(self.lower.center._mpf_[3] + 64):
            return self.upper.upper - self.lower.lower


@dataclass(frozen=True)
class DigitStream:
    """Extracted digits with the reason extraction stopped.

    ``composition`` is set for ``TERMINATED`` (the input equals its zeta*
    value, and ``digits`` is the canonical tail ``(.., k_r + 1, 1, 1, ..)``);
    ``position`` (1-based) is set for ``AMBIGUOUS``.
    """

    digits: tuple[int, ...]
    status: Status
    composition: Composition | None = None
    position: int | None = None
    bracket: Bracket | None = field(default=None, compare=False)


class ToleranceError(ArithmeticError):
    """Requested tolerance not reached; ``bracket`` holds the best bracket."""

    def __init__(self, message: str, bracket: Bracket):
        super().__init__(message)
        self.bracket = bracket


def _digits_for_tol(tol, precision: int) -> int:
    tol = float(tol)
    need = int(math.ceil(-math.log10(tol))) + 12 if tol > 0 else precision
    return max(precision, need)


def ceiling(prefix, precision: int = DEFAULT_DIGITS) -> Enclosure | None:
    """Supremum of eta over admissible continuations of ``prefix``."""
    k = tuple(prefix)
    if not k:
        return None
    s = max(i for i, d in enumerate(k) if i == 0 or d >= 2)
    if s == 0:
        return None if k[0] == 2 else zeta_star((k[0] - 1,), precision)
    return zeta_star(k[:s] + (k[s] - 1,), precision)


def bracket(prefix, precision: int = DEFAULT_DIGITS) -> Bracket:
    return Bracket(zeta_star(tuple(prefix), precision), ceiling(prefix, precision))


def eta(
    spec: SeqSpec,
    tol=1e-20,
    precision: int = DEFAULT_DIGITS,
    max_depth: int = 2048,
) -> Enclosure:
    """Enclosure of lim_r zeta*(k_1..k_r) with radius <= ``tol``.

    The prefix is deepened geometrically until its bracket is narrower than
    ``2 * tol``.
    """
    if not validate_in_T(spec):
        raise NotInTError(f"sequence {spec} is not admissible")
    digits = _digits_for_tol(tol, precision)
    tol = mpf(tol)
    depth = max(4, len(spec.preamble) + len(spec.period))
    best = None
    while True:
        br = bracket(spec.digits(depth), digits)
        if br.bounded:
            best = br
            if br.width() <= 2 * tol:
                return Enclosure.from_bounds(br.lower.lower, br.upper.upper, digits)
        if depth >= max_depth:
            raise ToleranceError(f"eta({spec}) not within {tol} at depth {depth}", best or br)
        depth = min(2 * depth, max_depth)


# ---------------------------------------------------------------------------
# Greedy expansion
# ---------------------------------------------------------------------------


class _Verdict(enum.Enum):
    BELOW = "below"  # zeta*(candidate) < x
    ABOVE = "above"  # zeta*(candidate) > x
    EQUAL = "equal"  # x contains the candidate value
    UNKNOWN = "unknown"


def _bits(digits: int) -> int:
    return int(digits * 3.3219280948873623)


def _judge(parts: tuple[int, ...], x: Enclosure, precision: int, max_bits: int) -> _Verdict:
    digits = precision
    while True:
        z = zeta_star(parts, digits)
        if z.definitely_less(x):
            return _Verdict.BELOW
        if z.definitely_greater(x):
            return _Verdict.ABOVE
        # more precision cannot help once z is much sharper than x
        sharp = x.radius > 0 and z.radius * 1024 < x.radius
        if sharp or _bits(digits) >= max_bits:
            return _Verdict.EQUAL if x.contains(z.center) and x.radius > 0 else _Verdict.UNKNOWN
        digits = min(2 * digits, max(digits + 1, int(max_bits / 3.3219280948873623)))


def _canonical(comp: tuple[int, ...], depth: int) -> tuple[int, ...]:
    seq = comp[:-1] + (comp[-1] + 1,)
    seq = seq + (1,) * max(0, depth - len(seq))
    return seq[:depth]


def expand(
    x,
    depth: int = MAX_DEPTH,
    precision: int = DEFAULT_DIGITS,
    max_precision_bits: int = MAX_PRECISION_BITS,
) -> DigitStream:
    """Greedy digits of eta^-1(x).

    The next digit is the least admissible ``d`` with ``zeta*(P + d) < x``,
    found by doubling then bisection.  ``x`` may be an :class:`Enclosure`;
    when it contains a candidate endpoint ``zeta*(P + d)`` the expansion
    stops with status ``TERMINATED`` and the canonical tail.
    """
    x = as_enclosure(x, precision)
    if not x.definitely_greater(1):
        raise ValueError("expand needs x > 1")
    prefix: tuple[int, ...] = ()

    def stop(status, **kw):
        return DigitStream(prefix, status, bracket=bracket(prefix, precision), **kw)

    for j in range(1, depth + 1):
        first = 2 if j == 1 else 1
        verdicts: dict[int, _Verdict] = {}

        def test(d):
            if d not in verdicts:
                verdicts[d] = _judge(prefix + (d,), x, precision, max_precision_bits)
            return verdicts[d]

        lo, hi = first - 1, first
        # doubling: find hi with candidate below x
        while True:
            v = test(hi)
            if v is _Verdict.BELOW:
                break
            if v is not _Verdict.ABOVE:
                break
            lo, hi = hi, 2 * hi
        if v is _Verdict.BELOW:
            while hi - lo > 1:
                mid = (lo + hi) // 2
                v = test(mid)
                if v is _Verdict.BELOW:
                    hi = mid
                elif v is _Verdict.ABOVE:
                    lo = mid
                else:
                    hi = mid
                    break
            if v in (_Verdict.BELOW, _Verdict.ABOVE):
                prefix = prefix + (hi,)
                continue
        if v is _Verdict.EQUAL:
            comp = prefix + (hi,)
            return DigitStream(
                _canonical(comp, depth),
                Status.TERMINATED,
                composition=Composition(comp),
                bracket=Bracket(zeta_star(comp, precision), zeta_star(comp, precision)),
            )
        return stop(Status.AMBIGUOUS, position=j)
    return stop(Status.TRUNCATED)


# ---------------------------------------------------------------------------
# Binary encoding
# ---------------------------------------------------------------------------


def beta_fraction(spec: SeqSpec) -> Fraction:
    """sum_j 2^-(k_1 + ... + k_j) as an exact rational."""
    total = Fraction(0)
    s = 0
    for k in spec.preamble:
        s += k
        total += Fraction(1, 2**s)
    period_sum = Fraction(0)
    u = 0
    for k in spec.period:
        u += k
        period_sum += Fraction(1, 2**u)
    return total + Fraction(1, 2**s) * period_sum / (1 - Fraction(1, 2**u))


def beta_prefix(digits) -> Fraction:
    total = Fraction(0)
    s = 0
    for k in digits:
        s += k
        total += Fraction(1, 2**s)
    return total


def beta_encode(spec: SeqSpec, precision: int = DEFAULT_DIGITS) -> Enclosure:
    if not validate_in_T(spec):
        raise NotInTError(f"sequence {spec} is not admissible")
    return Enclosure.exact(beta_fraction(spec), precision)


def _to_fraction(y) -> Fraction:
    if isinstance(y, Fraction):
        return y
    if isinstance(y, (int, float)):
        return Fraction(y)
    if isinstance(y, str):
        return Fraction(y.strip())
    return mpf_to_fraction(y)


def _decode_exact(y: Fraction, depth: int) -> tuple[int, ...]:
    # non-terminating binary expansion: dyadic points take the 0111.. form
    digits = []
    gap = 0
    while len(digits) < depth:
        y *= 2
        gap += 1
        if y > 1:
            y -= 1
            digits.append(gap)
            gap = 0
    return tuple(digits)


def beta_decode(y, depth: int = MAX_DEPTH) -> DigitStream:
    """Digits whose beta-encoding is ``y`` in (0, 1/2).

    Exact inputs (int, Fraction, float, decimal string) decode exactly; an
    :class:`Enclosure` decodes both ends and stops with ``AMBIGUOUS`` where
    they first disagree.
    """
    if isinstance(y, Enclosure):
        lo, hi = _to_fraction(y.lower), _to_fraction(y.upper)
    else:
        lo = hi = _to_fraction(y)
    if not (0 < lo and hi < Fraction(1, 2)):
        return DigitStream((), Status.OUT_OF_DOMAIN)
    a = _decode_exact(lo, depth)
    if lo == hi:
        digits = a
    else:
        b = _decode_exact(hi, depth)
        n = next((i for i, (p, q) in enumerate(zip(a, b)) if p != q), depth)
        if n < depth:
            return DigitStream(a[:n], Status.AMBIGUOUS, position=n + 1)
        digits = a
    if digits and digits[0] < 2:
        return DigitStream(digits, Status.OUT_OF_DOMAIN)
    return DigitStream(digits, Status.TRUNCATED)


def tau(x, depth: int = 16, precision: int = DEFAULT_DIGITS) -> Enclosure:
    """beta(eta^-1(x)), enclosing the unseen tail by ``(0, 2^-(k_1+..+k_depth)]``."""
    stream = expand(x, depth, precision)
    if stream.status is Status.TERMINATED:
        c = stream.composition.parts
        spec = SeqSpec(c[:-1] + (c[-1] + 1,), (1,))
        return beta_encode(spec, precision)
    head = beta_prefix(stream.digits)
    tail = Fraction(1, 2 ** sum(stream.digits))
    bits = int(precision * 3.33) + 32
    with mp.workprec(bits):
        lo = mpf(head.numerator) / head.denominator
        hi = mpf((head + tail).numerator) / (head + tail).denominator
    return Enclosure.from_bounds(lo, hi, precision)
