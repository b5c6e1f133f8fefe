"""The order on compositions and digit sequences, and the O-interval cells.

Comparison rule: a proper prefix is smaller than any extension; otherwise,
at the first position where the parts differ, the sequence with the
*smaller* part is the larger one.  This ordering agrees with the numerical
order of zeta* values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import (
    DEFAULT_DIGITS,
    Composition,
    Enclosure,
    PrecisionExhaustedError,
    SeqSpec,
    as_enclosure,
    seq_digit,
)
from .series import riemann_zeta, zeta_star


class Cmp(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1

    def __str__(self):
        return self.name.lower()


class Location(enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    AMBIGUOUS = "boundary-ambiguous"


def _sign(x: int) -> Cmp:
    return Cmp.GREATER if x > 0 else Cmp.LESS if x < 0 else Cmp.EQUAL


def compare(a, b) -> Cmp:
    """Compare two compositions in the zeta*-order.

    >>> compare((2, 1), (3,))
    <Cmp.GREATER: 1>
    """
    a = tuple(a)
    b = tuple(b)
    for x, y in zip(a, b):
        if x != y:
            return _sign(y - x)
    return _sign(len(a) - len(b))


def compare_seq(a: SeqSpec, b: SeqSpec) -> Cmp:
    """Compare two eventually periodic sequences digit by digit.

    Past ``max(preambles) + lcm(periods)`` positions both sequences repeat,
    so that many digits decide equality.
    """
    horizon = max(len(a.preamble), len(b.preamble)) + math.lcm(len(a.period), len(b.period))
    for j in range(1, horizon + 1):
        x, y = seq_digit(a, j), seq_digit(b, j)
        if x != y:
            return _sign(y - x)
    return Cmp.EQUAL


@dataclass(frozen=True)
class OInterval:
    """Open cell ``(lower, upper)`` of points whose digit expansion starts
    with ``label`` and continues with a digit >= 2 (or is the label's own
    limit cell for a trailing 1)."""

    label: Composition
    lower: Enclosure
    upper: Enclosure

    @property
    def length(self) -> Enclosure:
        return self.upper - self.lower


def o_endpoints(label: Composition) -> tuple[Composition | int, Composition]:
    """Return the compositions whose zeta* values bound the cell of ``label``.

    The lower end is ``label`` itself; an ``int`` upper end ``s`` stands for
    zeta(s).
    """
    k = label.parts
    if len(k) == 1:
        if k[0] >= 3:
            return label, Composition((k[0] - 1,))
        return label, Composition((2, 1))
    if k[-1] >= 2:
        return label, Composition(k[:-1] + (k[-1] - 1,))
    return label, Composition(k + (1,))


def o_interval(label, precision: int = DEFAULT_DIGITS, max_precision: int = 1240) -> OInterval:
    """Cell ``O_label`` with endpoint enclosures separated, raising the
    working precision as needed."""
    label = label if isinstance(label, Composition) else Composition(label)
    if label.depth == 0:
        raise ValueError("O-interval needs a non-empty label")
    lo_comp, hi_comp = o_endpoints(label)
    digits = precision
    while True:
        if label.depth == 1:
            lo = riemann_zeta(label[0], digits)
            hi = riemann_zeta(hi_comp[0], digits) if hi_comp.depth == 1 else zeta_star(hi_comp, digits)
        else:
            lo = zeta_star(lo_comp, digits)
            hi = zeta_star(hi_comp, digits)
        if lo.definitely_less(hi):
            return OInterval(label, lo, hi)
        if digits >= max_precision:
            raise PrecisionExhaustedError(f"cannot separate endpoints of O{label.parts}")
        digits = min(2 * digits, max_precision)


def interval_contains(iv: OInterval, x) -> Location:
    x = as_enclosure(x, iv.lower.precision)
    if x.definitely_greater(iv.lower) and x.definitely_less(iv.upper):
        return Location.INSIDE
    if x.definitely_less(iv.lower) or x.definitely_greater(iv.upper):
        return Location.OUTSIDE
    return Location.AMBIGUOUS
