"""Variable-width unum interval arithmetic, compression and an ALU model."""

from .arith import add, add_raw, negate, sub
from .codec import (
    EnvironmentMismatch,
    PackedUbound,
    PackedUnum,
    UnpackedUnum,
    decode,
    encode_exact,
    encode_tight,
    expand,
    maxreal,
    pack,
    single,
    smallest_pos,
    unpack,
)
from .compress import optimize, unify
from .env import Environment, max_es, max_fs, maxubits, utag_width
from .exact import (
    NAN,
    NAN_INTERVAL,
    NEG_INF,
    POS_INF,
    Dyadic,
    ExtendedReal,
    GeneralInterval,
    contains,
    fin,
    interval_add,
    interval_neg,
)

__all__ = [
    "Environment",
    "maxubits",
    "utag_width",
    "max_es",
    "max_fs",
    "Dyadic",
    "ExtendedReal",
    "GeneralInterval",
    "fin",
    "NAN",
    "NAN_INTERVAL",
    "POS_INF",
    "NEG_INF",
    "interval_add",
    "interval_neg",
    "contains",
    "PackedUnum",
    "PackedUbound",
    "UnpackedUnum",
    "single",
    "decode",
    "encode_exact",
    "encode_tight",
    "pack",
    "unpack",
    "expand",
    "maxreal",
    "smallest_pos",
    "add",
    "add_raw",
    "sub",
    "negate",
    "optimize",
    "unify",
    "EnvironmentMismatch",
]

__version__ = "0.1.0"
