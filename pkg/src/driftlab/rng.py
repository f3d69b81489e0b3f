"""Counter-based random number generation with reproducible stream derivation.

All randomness in this package flows through SplitMix64, a 64-bit
counter-based generator (output ``j`` is a fixed bijective mix of
``key + j * GOLDEN``).  It was chosen because the exact same integer
arithmetic is trivial to reproduce in the compiled kernel, so the pure-Python
and compiled backends draw bit-identical streams on every platform.

Stream keys for batch experiments are derived with :func:`derive_key`, a
fixed published mixing of ``(master_seed, index)``: two applications of the
SplitMix64 finalizer.  Parallel and serial execution therefore see identical
per-run streams.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_DERIVE_SALT = 0xD1B54A32D192ED03


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a fixed 64-bit bijective hash."""
    z &= MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & MASK64
    z ^= z >> 31
    return z


def derive_key(master_seed: int, index: int) -> int:
    """Derive the stream key for run ``index`` under ``master_seed``.

    ``mix64(mix64(master ^ salt) + (index + 1) * GOLDEN)``; the salt keeps
    derived keys decorrelated from the master stream's own outputs.
    """
    if index < 0:
        raise ValueError(f"index must be nonnegative, got {index}")
    h = mix64((master_seed & MASK64) ^ _DERIVE_SALT)
    return mix64((h + (index + 1) * GOLDEN) & MASK64)


class Stream:
    """A SplitMix64 stream.  ``unit()`` yields doubles in [0, 1) with 53 bits."""

    __slots__ = ("_state",)

    def __init__(self, key: int):
        self._state = key & MASK64

    def u64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        return mix64(self._state)

    def unit(self) -> float:
        return (self.u64() >> 11) * 1.1102230246251565e-16  # 2**-53
