"""Multiple zeta-star values: certified evaluation, the limit map on digit
sequences and its inverse, dimension constants and cube-integral checks."""

from .core import (
    Composition,
    DivergentCompositionError,
    Enclosure,
    IndexSeq,
    NotInTError,
    PrecisionExhaustedError,
    SeqSpec,
    parse_composition,
    parse_indices,
    parse_seqspec,
    seq_digit,
    validate_in_T,
)
from .eta import beta_decode, beta_encode, eta, expand, tau
from .order import compare, compare_seq, interval_contains, o_interval
from .series import (
    delta,
    euler_product_limit,
    limit_append_block,
    riemann_zeta,
    zeta_star,
    zeta_star_restricted,
)

__version__ = "0.1.0"

__all__ = [
    "Composition",
    "DivergentCompositionError",
    "Enclosure",
    "IndexSeq",
    "NotInTError",
    "PrecisionExhaustedError",
    "SeqSpec",
    "beta_decode",
    "beta_encode",
    "compare",
    "compare_seq",
    "delta",
    "eta",
    "euler_product_limit",
    "expand",
    "interval_contains",
    "limit_append_block",
    "o_interval",
    "parse_composition",
    "parse_indices",
    "parse_seqspec",
    "riemann_zeta",
    "seq_digit",
    "tau",
    "validate_in_T",
    "zeta_star",
    "zeta_star_restricted",
]
