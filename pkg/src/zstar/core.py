"""Domain types shared by every module: compositions, digit sequences,
index sequences and the midpoint-radius :class:`Enclosure`.

Part ordering is outermost-first everywhere: ``parts[0]`` is the exponent
attached to the largest summation index ``n_1`` of

    zeta*(k_1, ..., k_r) = sum_{n_1 >= ... >= n_r >= 1} n_1^-k_1 ... n_r^-k_r

so a non-empty composition converges iff ``parts[0] >= 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

import mpmath
from mpmath import mp, mpf

DEFAULT_DIGITS = 64
GUARD_BITS = 24

Real = Union[int, float, str, Fraction, mpf, "Enclosure"]


class DivergentCompositionError(ValueError):
    """Leading exponent <= 1: the star sum diverges."""


class NotInTError(ValueError):
    """Digit sequence outside the admissible sequence set."""


class PrecisionExhaustedError(ArithmeticError):
    """Could not separate two quantities within the maximal precision."""


def digits_to_bits(digits: int) -> int:
    return int(math.ceil(digits * math.log2(10)))


def working_bits(digits: int) -> int:
    return digits_to_bits(digits) + GUARD_BITS


# ---------------------------------------------------------------------------
# Compositions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Composition:
    """Finite exponent tuple ``(k_1, ..., k_r)``; the empty tuple is the unit."""

    parts: tuple[int, ...] = ()

    def __init__(self, parts: Iterable[int] = ()):
        parts = tuple(int(k) for k in parts)
        if any(k < 1 for k in parts):
            raise ValueError(f"parts must be positive integers, got {parts}")
        if parts and parts[0] < 2:
            raise DivergentCompositionError(
                f"divergent composition {parts}: leading exponent must be >= 2"
            )
        object.__setattr__(self, "parts", parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def depth(self) -> int:
        return len(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    def append(self, *ks: int) -> "Composition":
        return Composition(self.parts + tuple(ks))

    def prefix(self, r: int) -> "Composition":
        return Composition(self.parts[:r])

    def __str__(self) -> str:
        return format_composition(self)

    def __repr__(self) -> str:
        return f"Composition{self.parts}"


def parse_composition(text: str) -> Composition:
    """Parse ``"k1,k2,...,kr"`` (whitespace tolerated, empty string is the unit).

    >>> parse_composition("2,1,3").weight
    6
    """
    text = text.strip()
    if not text:
        return Composition(())
    parts = []
    for token in text.split(","):
        token = token.strip()
        try:
            value = int(token)
        except ValueError:
            raise ValueError(f"not an integer: {token!r}") from None
        parts.append(value)
    return Composition(parts)


def format_composition(comp: Composition) -> str:
    return ",".join(str(k) for k in comp.parts)


# ---------------------------------------------------------------------------
# Eventually periodic digit sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeqSpec:
    """Infinite digit sequence ``preamble + period + period + ...``."""

    preamble: tuple[int, ...]
    period: tuple[int, ...]

    def __init__(self, preamble: Iterable[int], period: Iterable[int]):
        preamble = tuple(int(k) for k in preamble)
        period = tuple(int(k) for k in period)
        if not period:
            raise ValueError("period must be non-empty")
        if any(k < 1 for k in preamble + period):
            raise ValueError("digits must be positive integers")
        object.__setattr__(self, "preamble", preamble)
        object.__setattr__(self, "period", period)

    def digit(self, j: int) -> int:
        return seq_digit(self, j)

    def digits(self, n: int) -> tuple[int, ...]:
        return tuple(seq_digit(self, j) for j in range(1, n + 1))

    def unroll(self, times: int = 1) -> "SeqSpec":
        """Same sequence with ``times`` periods moved into the preamble."""
        return SeqSpec(self.preamble + self.period * times, self.period)

    def __str__(self) -> str:
        return format_seqspec(self)


def seq_digit(spec: SeqSpec, j: int) -> int:
    if j < 1:
        raise ValueError("digit positions start at 1")
    if j <= len(spec.preamble):
        return spec.preamble[j - 1]
    return spec.period[(j - 1 - len(spec.preamble)) % len(spec.period)]


def validate_in_T(spec: SeqSpec) -> bool:
    """True iff the sequence starts with a digit >= 2, and, when that digit is
    exactly 2, some later digit is >= 2 as well."""
    first = seq_digit(spec, 1)
    if first < 2:
        return False
    if first > 2:
        return True
    later = spec.preamble[1:] + spec.period
    return any(k >= 2 for k in later)


def parse_seqspec(text: str) -> SeqSpec:
    """Parse ``"preamble;period"``, e.g. ``"3;2,1"`` or ``";2"``."""
    if ";" not in text:
        raise ValueError(f"sequence spec needs 'preamble;period': {text!r}")
    pre, per = text.split(";", 1)

    def ints(s):
        s = s.strip()
        if not s:
            return ()
        try:
            return tuple(int(t) for t in s.split(","))
        except ValueError:
            raise ValueError(f"bad digit list {s!r}") from None

    return SeqSpec(ints(pre), ints(per))


def format_seqspec(spec: SeqSpec) -> str:
    return ",".join(map(str, spec.preamble)) + ";" + ",".join(map(str, spec.period))


# ---------------------------------------------------------------------------
# Index sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IndexSeq:
    """Strictly increasing positive indices ``i_1 < ... < i_r``."""

    indices: tuple[int, ...]

    def __init__(self, indices: Iterable[int]):
        indices = tuple(int(i) for i in indices)
        if not indices:
            raise ValueError("index sequence must be non-empty")
        if indices[0] < 1:
            raise ValueError("indices start at 1")
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError(f"indices must be strictly increasing: {indices}")
        object.__setattr__(self, "indices", indices)

    @property
    def depth(self) -> int:
        return len(self.indices)

    @property
    def dim(self) -> int:
        return self.indices[-1]

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)


def parse_indices(text: str) -> IndexSeq:
    try:
        return IndexSeq(int(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise ValueError(f"bad index list {text!r}: {exc}") from None


# ---------------------------------------------------------------------------
# Enclosures
# ---------------------------------------------------------------------------


def _bits_for(digits: int) -> int:
    return working_bits(digits)


@dataclass(frozen=True)
class Enclosure:
    """A real number known to lie in ``[center - radius, center + radius]``.

    Arithmetic widens the radius by the propagated error plus a relative
    rounding allowance, so containment is never lost.
    """

    center: mpf
    radius: mpf
    precision: int = DEFAULT_DIGITS

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("negative radius")

    @classmethod
    def exact(cls, value, precision: int = DEFAULT_DIGITS) -> "Enclosure":
        """Enclose an int, Fraction, decimal string or mpf.

        Inexact conversions receive a one-ulp radius.
        """
        if isinstance(value, Enclosure):
            return value
        bits = _bits_for(precision)
        with mp.workprec(bits):
            if isinstance(value, int):
                c = mpf(value)
                exact = int(c) == value
            elif isinstance(value, Fraction):
                c = mpf(value.numerator) / value.denominator
                exact = mpf_to_fraction(c) == value
            elif isinstance(value, str):
                return cls.exact(Fraction(value.strip()), precision)
            elif isinstance(value, float):
                return cls.exact(Fraction(value), precision)
            else:
                c = mpf(value)
                exact = True
            rad = mpf(0) if exact else abs(c) * mpf(2) ** (1 - bits)
        return cls(c, rad, precision)

    @classmethod
    def from_bounds(cls, lo, hi, precision: int = DEFAULT_DIGITS) -> "Enclosure":
        bits = _bits_for(precision)
        with mp.workprec(bits + 8):
            lo, hi = mpf(lo), mpf(hi)
            if hi < lo:
                raise ValueError("empty interval")
            c = (lo + hi) / 2
            r = (hi - lo) / 2
            r += abs(c) * mpf(2) ** (-bits - 4)
        return cls(c, r, precision)

    # -- bounds and comparisons ------------------------------------------------

    # endpoints are rounded outward so they never cut off the true value

    @property
    def lower(self) -> mpf:
        return mpmath.fsub(self.center, self.radius, prec=_bits_for(self.precision) + 8, rounding="f")

    @property
    def upper(self) -> mpf:
        return mpmath.fadd(self.center, self.radius, prec=_bits_for(self.precision) + 8, rounding="c")

    def contains(self, x) -> bool:
        if isinstance(x, Enclosure):
            return self.lower <= x.lower and x.upper <= self.upper
        if isinstance(x, Fraction):
            x = Enclosure.exact(x, self.precision)
            return self.contains(x)
        return self.lower <= x <= self.upper

    def overlaps(self, other: "Enclosure") -> bool:
        return not (self.upper < other.lower or other.upper < self.lower)

    def disjoint(self, other: "Enclosure") -> bool:
        return not self.overlaps(other)

    def definitely_less(self, other) -> bool:
        other = _as_enclosure(other, self.precision)
        return self.upper < other.lower

    def definitely_greater(self, other) -> bool:
        other = _as_enclosure(other, self.precision)
        return self.lower > other.upper

    def contains_integer(self) -> bool:
        lo, hi = self.lower, self.upper
        return mpmath.floor(hi) >= mpmath.ceil(lo)

    def within(self, other: "Enclosure") -> bool:
        """True when this enclosure lies inside ``other``."""
        return other.contains(self)

    # -- arithmetic --------------------------------------------------------------

    def _combine(self, other, op):
        other = _as_enclosure(other, self.precision)
        digits = min(self.precision, other.precision)
        bits = _bits_for(digits)
        with mp.workprec(bits + 16):
            a, ra, b, rb = self.center, self.radius, other.center, other.radius
            if op == "+":
                c, r = a + b, ra + rb
            elif op == "-":
                c, r = a - b, ra + rb
            elif op == "*":
                c = a * b
                r = abs(a) * rb + abs(b) * ra + ra * rb
            elif op == "/":
                if abs(b) <= rb:
                    raise ZeroDivisionError("divisor enclosure contains 0")
                c = a / b
                r = (abs(a) * rb + abs(b) * ra) / (abs(b) * (abs(b) - rb))
            else:
                raise ValueError(op)
            r = r * (1 + mpf(2) ** (-bits)) + abs(c) * mpf(2) ** (2 - bits - 16)
        return Enclosure(c, r, digits)

    def __add__(self, other):
        return self._combine(other, "+")

    def __radd__(self, other):
        return self._combine(other, "+")

    def __sub__(self, other):
        return self._combine(other, "-")

    def __rsub__(self, other):
        return _as_enclosure(other, self.precision)._combine(self, "-")

    def __mul__(self, other):
        return self._combine(other, "*")

    def __rmul__(self, other):
        return self._combine(other, "*")

    def __truediv__(self, other):
        return self._combine(other, "/")

    def __rtruediv__(self, other):
        return _as_enclosure(other, self.precision)._combine(self, "/")

    def __neg__(self):
        # exact: enough bits for the whole mantissa
        with mp.workprec(max(self.center._mpf_[3], 1) + 8):
            return Enclosure(-self.center, self.radius, self.precision)

    def __abs__(self):
        return self if self.center >= 0 else -self

    def extend(self, below=0, above=0) -> "Enclosure":
        """Enclosure of ``[lower - below, upper + above]`` (non-negative widths)."""
        bits = _bits_for(self.precision)
        with mp.workprec(bits + 32):
            lo = self.center - self.radius - mpf(below)
            hi = self.center + self.radius + mpf(above)
        return Enclosure.from_bounds(lo, hi, self.precision)

    def hull(self, other: "Enclosure") -> "Enclosure":
        lo = min(self.lower, other.lower)
        hi = max(self.upper, other.upper)
        return Enclosure.from_bounds(lo, hi, min(self.precision, other.precision))

    def intersect(self, other: "Enclosure") -> "Enclosure":
        lo = max(self.lower, other.lower)
        hi = min(self.upper, other.upper)
        if hi < lo:
            raise ValueError("enclosures are disjoint")
        return Enclosure.from_bounds(lo, hi, min(self.precision, other.precision))

    def exp(self) -> "Enclosure":
        bits = _bits_for(self.precision)
        with mp.workprec(bits + 16):
            c = mpmath.exp(self.center)
            r = mpmath.exp(self.center + self.radius) - c
            r = r * (1 + mpf(2) ** (-bits)) + c * mpf(2) ** (2 - bits - 16)
        return Enclosure(c, r, self.precision)

    def log(self) -> "Enclosure":
        if self.lower <= 0:
            raise ValueError("log of non-positive enclosure")
        bits = _bits_for(self.precision)
        with mp.workprec(bits + 16):
            c = mpmath.log(self.center)
            r = c - mpmath.log(self.center - self.radius)
            r = r * (1 + mpf(2) ** (-bits)) + abs(c) * mpf(2) ** (2 - bits - 16)
        return Enclosure(c, r, self.precision)

    # -- presentation ------------------------------------------------------------

    def to_decimal(self, digits: int | None = None) -> str:
        digits = digits or self.precision
        with mp.workprec(_bits_for(digits) + 8):
            return mpmath.nstr(self.center, digits, strip_zeros=False)

    def radius_str(self) -> str:
        with mp.workprec(64):
            return mpmath.nstr(self.radius, 6)

    def __float__(self):
        return float(self.center)

    def __str__(self):
        return f"{self.to_decimal(min(self.precision, 30))} +/- {self.radius_str()}"


def mpf_to_fraction(x: mpf) -> Fraction:
    """Exact rational value of a finite mpf."""
    if not isinstance(x, mpf):
        x = mpf(x)
    sign, man, exp, _ = x._mpf_
    if sign:
        man = -man
    if man == 0:
        return Fraction(0)
    return Fraction(int(man)) * Fraction(2) ** int(exp)


def _as_enclosure(x, precision: int) -> Enclosure:
    if isinstance(x, Enclosure):
        return x
    return Enclosure.exact(x, precision)


def as_enclosure(x: Real, precision: int = DEFAULT_DIGITS) -> Enclosure:
    """Coerce a number (or decimal string) to an :class:`Enclosure`."""
    return _as_enclosure(x, precision)


def from_fixed(value: int, err_ulps: int, scale_bits: int, precision: int) -> Enclosure:
    """Enclosure of a fixed-point result known to lie in
    ``[value, value + err_ulps] * 2**-scale_bits``."""
    with mp.workprec(max(scale_bits, value.bit_length()) + 64):
        lo = mpf(value)
        c = (lo + mpf(err_ulps) / 2) * mpf(2) ** (-scale_bits)
        r = mpf(err_ulps) / 2 * mpf(2) ** (-scale_bits)
    return Enclosure(c, r, precision)

