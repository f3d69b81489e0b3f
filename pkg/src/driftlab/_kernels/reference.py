"""Pure-Python EA kernels: the reference the compiled backend must match.

Draw discipline (fixed; the compiled twin reproduces it bit-for-bit):

* initial state: ``n`` unit draws, bit ``i`` set iff ``u < 0.5``,
  ascending position order;
* per iteration: one unit draw inverted through the binomial CDF gives the
  flip count ``k`` (distribution-identical to flipping each bit independently
  with probability ``p``), then ``k`` distinct positions are rejection-sampled
  (``floor(u * n)``, duplicates redrawn).

Acceptance of the offspring is decided from the signed coefficient delta.
Four coefficient modes keep this exact and fast:

* ``int64``    — all-integer table with total below 2**62; machine integers.
* ``superinc`` — every coefficient exceeds the sum of those below it, so the
  sign of the delta is the sign of the highest flipped term (covers BinVal
  at any n with no big-integer work).
* ``bigint``   — arbitrary-size integers; partial sums short-circuit once
  they dominate the prefix sum of the remaining positions.
* ``float64``  — double accumulation in draw order (documented approximation
  for non-integer coefficients).

All floating-point steps are plain IEEE double arithmetic in a fixed order,
so the two backends produce identical traces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..objective import INT64_SAFE_TOTAL, LinearObjective
from ..rng import GOLDEN, MASK64, mix64

MODE_INT64 = "int64"
MODE_SUPERINC = "superinc"
MODE_BIGINT = "bigint"
MODE_FLOAT64 = "float64"

TWO_POW_MINUS_53 = 1.1102230246251565e-16


@dataclass
class KernelObjective:
    """Coefficient table prepared for the run/sampling kernels (picklable)."""

    mode: str
    n: int
    a_int: Optional[np.ndarray] = None  # int64, int64 mode
    a_float: Optional[np.ndarray] = None  # float64 mode
    a_big: Optional[list] = None  # Python ints, bigint mode
    prefix_big: Optional[list] = None  # prefix_big[j] = sum of a_big[:j]


def prepare_objective(f: LinearObjective) -> KernelObjective:
    if f.integer_valued:
        prefix = [0] * (f.n + 1)
        superinc = True
        for j, a in enumerate(f.coefficients):
            if a <= prefix[j]:
                superinc = False
            prefix[j + 1] = prefix[j] + a
        if superinc:
            return KernelObjective(mode=MODE_SUPERINC, n=f.n)
        if prefix[f.n] < INT64_SAFE_TOTAL:
            return KernelObjective(
                mode=MODE_INT64, n=f.n, a_int=np.array(f.coefficients, dtype=np.int64)
            )
        return KernelObjective(
            mode=MODE_BIGINT, n=f.n, a_big=list(f.coefficients), prefix_big=prefix
        )
    return KernelObjective(
        mode=MODE_FLOAT64, n=f.n, a_float=np.array(f.coefficients, dtype=np.float64)
    )


def pow_int(base: float, exponent: int) -> float:
    """Binary exponentiation on doubles (avoids libm pow for reproducibility)."""
    result = 1.0
    acc = base
    e = exponent
    while e > 0:
        if e & 1:
            result *= acc
        acc *= acc
        e >>= 1
    return result


class _Stream:
    __slots__ = ("s",)

    def __init__(self, key: int):
        self.s = key & MASK64

    def unit(self) -> float:
        self.s = (self.s + GOLDEN) & MASK64
        return (mix64(self.s) >> 11) * TWO_POW_MINUS_53


def _draw_flip_count(stream: _Stream, n: int, p: float, base_pmf: float, odds: float) -> int:
    """Invert the Binomial(n, p) CDF on one unit draw."""
    if p >= 1.0:
        return n
    u = stream.unit()
    k = 0
    pmf = base_pmf
    cdf = pmf
    while u > cdf and k < n:
        pmf = pmf * ((n - k) / (k + 1.0)) * odds
        cdf += pmf
        k += 1
    return k


def _draw_positions(stream: _Stream, n: int, k: int, out: list) -> None:
    """Rejection-sample k distinct positions in [0, n) into out[:k]."""
    j = 0
    while j < k:
        idx = int(stream.unit() * n)
        if idx >= n:  # guard the round-to-even edge at u ~ 1
            idx = n - 1
        dup = False
        for m in range(j):
            if out[m] == idx:
                dup = True
                break
        if not dup:
            out[j] = idx
            j += 1


def _delta_accepts(kobj: KernelObjective, bits: np.ndarray, pos: list, k: int) -> bool:
    """True iff flipping ``pos[:k]`` does not increase the objective."""
    if k == 0:
        return True
    mode = kobj.mode
    if mode == MODE_SUPERINC:
        top = pos[0]
        for m in range(1, k):
            if pos[m] > top:
                top = pos[m]
        return bits[top] == 1
    if mode == MODE_INT64:
        a = kobj.a_int
        delta = 0
        for m in range(k):
            i = pos[m]
            delta += -int(a[i]) if bits[i] else int(a[i])
        return delta <= 0
    if mode == MODE_FLOAT64:
        a = kobj.a_float
        delta = 0.0
        for m in range(k):
            i = pos[m]
            delta += -float(a[i]) if bits[i] else float(a[i])
        return delta <= 0.0
    # bigint: scan positions from the highest; once |partial| exceeds the
    # prefix sum of everything below, the sign is decided.
    order = sorted(pos[:k], reverse=True)
    a = kobj.a_big
    prefix = kobj.prefix_big
    partial = 0
    for m, i in enumerate(order):
        partial += -a[i] if bits[i] else a[i]
        if m + 1 < k:
            below = prefix[order[m + 1] + 1]
            if partial > below:
                return False
            if partial < -below:
                return True
    return partial <= 0


def run_ea_kernel(
    kobj: KernelObjective,
    p: float,
    stream_key: int,
    max_iters: int,
    initial: Optional[np.ndarray] = None,
):
    """Run the EA; returns (optimisation_time, initial_ones, truncated, final_bits).

    ``optimisation_time`` counts objective evaluations, the initial one
    included.
    """
    n = kobj.n
    stream = _Stream(stream_key)
    bits = np.zeros(n, dtype=np.uint8)
    if initial is None:
        for i in range(n):
            if stream.unit() < 0.5:
                bits[i] = 1
    else:
        bits[:] = initial
    ones = int(bits.sum())
    initial_ones = ones
    evals = 1
    if ones == 0:
        return evals, initial_ones, False, bits

    base_pmf = pow_int(1.0 - p, n)
    odds = p / (1.0 - p) if p < 1.0 else 0.0
    pos = [0] * n
    for _ in range(max_iters):
        k = _draw_flip_count(stream, n, p, base_pmf, odds)
        if k > 0:
            _draw_positions(stream, n, k, pos)
        evals += 1
        if k > 0 and _delta_accepts(kobj, bits, pos, k):
            for m in range(k):
                i = pos[m]
                if bits[i]:
                    bits[i] = 0
                    ones -= 1
                else:
                    bits[i] = 1
                    ones += 1
            if ones == 0:
                return evals, initial_ones, False, bits
    return evals, initial_ones, True, bits


def mc_phi_kernel(
    kobj: KernelObjective,
    w_rel: np.ndarray,
    bits: np.ndarray,
    p: float,
    samples: int,
    stream_key: int,
):
    """Sample ``Phi(select(x, mutate(x))) / Phi(x)`` from a fixed state.

    ``w_rel[i]`` must hold ``w_{i+1} / Phi(x)``.  Returns ``(sum, sum_sq)``
    of the relative next-potential over ``samples`` draws.
    """
    n = kobj.n
    stream = _Stream(stream_key)
    base_pmf = pow_int(1.0 - p, n)
    odds = p / (1.0 - p) if p < 1.0 else 0.0
    pos = [0] * n
    total = 0.0
    total_sq = 0.0
    for _ in range(samples):
        k = _draw_flip_count(stream, n, p, base_pmf, odds)
        rel = 1.0
        if k > 0:
            _draw_positions(stream, n, k, pos)
            if _delta_accepts(kobj, bits, pos, k):
                for m in range(k):
                    i = pos[m]
                    rel += -w_rel[i] if bits[i] else w_rel[i]
        total += rel
        total_sq += rel * rel
    return total, total_sq
