"""Bit strings and linear objectives over them.

Conventions used throughout the package:

* Bit position ``i`` runs from 1 (least significant, smallest coefficient)
  to ``n`` (leftmost / most significant).  Internally bits live in a numpy
  ``uint8`` array where slot ``i - 1`` holds ``x_i``; text renderings show
  ``x_n ... x_1``, so ``"101"`` at n=3 means ``x_3=1, x_2=0, x_1=1``.
* Objectives are minimised.  Coefficients are positive and sorted ascending,
  so the unique optimum is the all-zero string and ``f(0) = 0``.
* Integer coefficients are kept as Python ints and evaluated exactly at any
  magnitude (selection on BinVal-like families must not round); float
  coefficients are summed in double precision, fixed low-index-to-high order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import DegenerateObjectiveError, ValidationError

Coefficient = Union[int, float]

# Coefficient tables whose total fits comfortably in int64 can be handled
# entirely in C by the kernels.
INT64_SAFE_TOTAL = 1 << 62


class BitString:
    """Fixed-length bit string; ``bits[i-1]`` is position ``i``."""

    __slots__ = ("bits",)

    def __init__(self, bits: np.ndarray):
        self.bits = bits

    @classmethod
    def zeros(cls, n: int) -> "BitString":
        return cls(np.zeros(n, dtype=np.uint8))

    @classmethod
    def all_ones(cls, n: int) -> "BitString":
        return cls(np.ones(n, dtype=np.uint8))

    @classmethod
    def from_bits(cls, values: Iterable[int]) -> "BitString":
        """Build from values ordered position 1 .. n."""
        arr = np.asarray(list(values), dtype=np.uint8)
        if arr.ndim != 1 or not np.all((arr == 0) | (arr == 1)):
            raise ValidationError("bits must be a flat 0/1 sequence")
        return cls(arr)

    @classmethod
    def from_text(cls, text: str) -> "BitString":
        """Parse display order ``x_n ... x_1`` (leftmost character is x_n)."""
        if not text or set(text) - {"0", "1"}:
            raise ValidationError(f"not a bit string: {text!r}")
        return cls(np.array([int(ch) for ch in reversed(text)], dtype=np.uint8))

    @classmethod
    def single_one(cls, n: int, position: int) -> "BitString":
        if not 1 <= position <= n:
            raise ValidationError(f"position {position} outside 1..{n}")
        x = cls.zeros(n)
        x.bits[position - 1] = 1
        return x

    @property
    def n(self) -> int:
        return len(self.bits)

    def ones(self) -> int:
        return int(self.bits.sum())

    def copy(self) -> "BitString":
        return BitString(self.bits.copy())

    def flipped(self, mask: "BitString") -> "BitString":
        return BitString(self.bits ^ mask.bits)

    def to_text(self) -> str:
        return "".join(str(b) for b in self.bits[::-1])

    def to_index(self) -> int:
        """Integer whose binary digits are the bits (position i has weight 2^(i-1))."""
        out = 0
        for i in range(self.n - 1, -1, -1):
            out = (out << 1) | int(self.bits[i])
        return out

    @classmethod
    def from_index(cls, n: int, index: int) -> "BitString":
        if not 0 <= index < (1 << n):
            raise ValidationError(f"index {index} outside [0, 2^{n})")
        return cls(np.array([(index >> i) & 1 for i in range(n)], dtype=np.uint8))

    def __eq__(self, other) -> bool:
        return isinstance(other, BitString) and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.n, self.to_index())) if self.n <= 64 else hash(self.bits.tobytes())

    def __repr__(self) -> str:
        return f"BitString({self.to_text()!r})"


@dataclass(frozen=True)
class NormalizationReport:
    """How raw user coefficients were mapped into normalized index space.

    ``source_raw_index[i-1]`` is the 0-based position in the raw sequence that
    became normalized position ``i``.  ``complemented`` marks normalized
    positions whose raw coefficient was negative: a raw bit value ``b`` at
    such a position enters the normalized string as ``1 - b``.
    """

    source_raw_index: tuple[int, ...]
    complemented: tuple[bool, ...]
    dropped_raw_indices: tuple[int, ...]

    @property
    def is_identity(self) -> bool:
        return (
            not self.dropped_raw_indices
            and not any(self.complemented)
            and self.source_raw_index == tuple(range(len(self.source_raw_index)))
        )

    def map_bits(self, raw_bits: Sequence[int]) -> BitString:
        """Carry a user-space bit assignment into normalized index space."""
        vals = []
        for src, comp in zip(self.source_raw_index, self.complemented):
            b = int(raw_bits[src])
            vals.append(1 - b if comp else b)
        return BitString.from_bits(vals)


@dataclass
class LinearObjective:
    """Minimisation objective ``f(x) = sum_i a_i x_i`` with sorted positive ``a``.

    Instances are immutable by convention (safe to share across workers).
    """

    n: int
    coefficients: tuple[Coefficient, ...]
    provenance: NormalizationReport
    _log_coefficients: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.n != len(self.coefficients):
            raise ValidationError("n does not match coefficient count")
        prev = None
        for a in self.coefficients:
            if not a > 0:
                raise ValidationError(f"coefficients must be positive, got {a!r}")
            if isinstance(a, float) and not np.isfinite(a):
                raise ValidationError(f"coefficients must be finite, got {a!r}")
            if prev is not None and a < prev:
                raise ValidationError("coefficients must be sorted ascending")
            prev = a

    @property
    def integer_valued(self) -> bool:
        return all(isinstance(a, int) for a in self.coefficients)

    @property
    def log_coefficients(self) -> np.ndarray:
        """Natural logs of the coefficients (handles arbitrary-size ints)."""
        if self._log_coefficients is None:
            import math

            logs = np.array([math.log(a) for a in self.coefficients], dtype=np.float64)
            object.__setattr__(self, "_log_coefficients", logs)
        return self._log_coefficients

    def coefficient_total(self) -> Coefficient:
        total = 0
        for a in self.coefficients:
            total += a
        return total

    def ratio_ge(self, i: int, j: int, factor: int) -> bool:
        """Exact test ``a_i / a_j >= factor`` (1-based positions, integer factor)."""
        ai, aj = self.coefficients[i - 1], self.coefficients[j - 1]
        if isinstance(ai, int) and isinstance(aj, int):
            return ai >= factor * aj
        # Float path: overflow to inf is conservative and correct because every
        # stored coefficient is finite.
        return float(ai) >= float(factor) * float(aj)

    def __repr__(self) -> str:
        head = ", ".join(repr(a) for a in self.coefficients[:6])
        tail = ", ..." if self.n > 6 else ""
        return f"LinearObjective(n={self.n}, coefficients=({head}{tail}))"


def normalize_objective(raw: Sequence[Coefficient]) -> LinearObjective:
    """Normalize raw coefficients into a sorted-positive objective.

    Zero coefficients are dropped (reported), negative coefficients are
    sign-flipped with the bit-complement convention recorded in the
    provenance, and the result is sorted ascending with the permutation
    recorded so user-space bit strings can be mapped into normalized space.
    """
    if len(raw) == 0:
        raise ValidationError("raw coefficient sequence is empty")
    kept: list[tuple[Coefficient, int, bool]] = []
    dropped: list[int] = []
    for idx, a in enumerate(raw):
        if isinstance(a, float) and not np.isfinite(a):
            raise ValidationError(f"coefficient {idx} is not finite")
        if a == 0:
            dropped.append(idx)
        elif a < 0:
            kept.append((-a, idx, True))
        else:
            kept.append((a, idx, False))
    if not kept:
        raise DegenerateObjectiveError("all coefficients are zero")
    kept.sort(key=lambda item: item[0])
    report = NormalizationReport(
        source_raw_index=tuple(item[1] for item in kept),
        complemented=tuple(item[2] for item in kept),
        dropped_raw_indices=tuple(dropped),
    )
    return LinearObjective(
        n=len(kept), coefficients=tuple(item[0] for item in kept), provenance=report
    )


def evaluate(f: LinearObjective, x: BitString):
    """``sum_i a_i x_i``, exact for integer coefficients.

    Float summation runs low-index-to-high so results are reproducible across
    platforms.
    """
    if x.n != f.n:
        raise ValidationError(f"bit string length {x.n} != objective size {f.n}")
    total = 0
    bits = x.bits
    for i, a in enumerate(f.coefficients):
        if bits[i]:
            total += a
    return total


def identity_objective(coefficients: Sequence[Coefficient]) -> LinearObjective:
    """Wrap an already sorted positive coefficient sequence (no permutation)."""
    n = len(coefficients)
    report = NormalizationReport(
        source_raw_index=tuple(range(n)),
        complemented=(False,) * n,
        dropped_raw_indices=(),
    )
    return LinearObjective(n=n, coefficients=tuple(coefficients), provenance=report)
