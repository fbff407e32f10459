"""Unum environment descriptors and the width arithmetic derived from them."""

from __future__ import annotations

import re
from dataclasses import dataclass

# Largest environment this library supports; {4,5} matches the widest
# register layout (16 exponent bits, 32 fraction bits).
MAX_A = 4
MAX_B = 5

_ENV_RE = re.compile(r"^\{?\s*(\d+)\s*[,.]\s*(\d+)\s*\}?$")


@dataclass(frozen=True, slots=True)
class Environment:
    """An {a,b} pair fixing the self-descriptive field widths of a unum.

    ``a`` is the width in bits of the exponent-size field and ``b`` the width
    of the fraction-size field, so a unum in this environment carries an
    exponent of up to ``2**a`` bits and a fraction of up to ``2**b`` bits.
    Environments are plain values; every operation takes one explicitly.
    """

    a: int
    b: int

    def __post_init__(self) -> None:
        if not 0 <= self.a <= MAX_A:
            raise ValueError(f"exponent-size field width must be in [0, {MAX_A}], got {self.a}")
        if not 0 <= self.b <= MAX_B:
            raise ValueError(f"fraction-size field width must be in [0, {MAX_B}], got {self.b}")

    @property
    def max_es(self) -> int:
        """Largest exponent width, 2**a bits."""
        return 1 << self.a

    @property
    def max_fs(self) -> int:
        """Largest fraction width, 2**b bits."""
        return 1 << self.b

    @property
    def maxubits(self) -> int:
        """Largest possible bit length of a single packed unum."""
        return 2 + self.max_es + self.max_fs + self.a + self.b

    @property
    def utag_width(self) -> int:
        """Width of the utag: ubit plus the two size fields."""
        return 1 + self.a + self.b

    @classmethod
    def parse(cls, text: str) -> "Environment":
        """Parse '{a,b}', 'a,b' or 'a.b' forms used in CLI flags and headers."""
        m = _ENV_RE.match(text.strip())
        if m is None:
            raise ValueError(f"bad environment {text!r}, expected '{{a,b}}'")
        return cls(int(m.group(1)), int(m.group(2)))

    def __str__(self) -> str:
        return f"{{{self.a},{self.b}}}"


def maxubits(env: Environment) -> int:
    """Maximum packed width of a unum in ``env``: 2 + 2**a + 2**b + a + b."""
    return env.maxubits


def utag_width(env: Environment) -> int:
    """utag width of ``env``: 1 + a + b."""
    return env.utag_width


def max_es(env: Environment) -> int:
    return env.max_es


def max_fs(env: Environment) -> int:
    return env.max_fs
