# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled EA kernels; a bit-exact twin of ``reference.py``.

Every floating-point operation and every RNG draw happens in the same order
as in the pure-Python reference, so results are identical between backends.
"""

from libc.stdint cimport int64_t, uint64_t

import numpy as np

from ..objective import INT64_SAFE_TOTAL

MODE_INT64 = "int64"
MODE_SUPERINC = "superinc"
MODE_BIGINT = "bigint"
MODE_FLOAT64 = "float64"

cdef double TWO_POW_MINUS_53 = 1.1102230246251565e-16
cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15U

cdef int C_INT64 = 0
cdef int C_SUPERINC = 1
cdef int C_BIGINT = 2
cdef int C_FLOAT64 = 3


cdef inline uint64_t _mix64(uint64_t z) nogil:
    z ^= z >> 30
    z = z * <uint64_t>0xBF58476D1CE4E5B9U
    z ^= z >> 27
    z = z * <uint64_t>0x94D049BB133111EBU
    z ^= z >> 31
    return z


cdef inline double _unit(uint64_t* state) nogil:
    state[0] = state[0] + GOLDEN
    return <double>(_mix64(state[0]) >> 11) * TWO_POW_MINUS_53


cdef inline double _pow_int(double base, long exponent) nogil:
    cdef double result = 1.0
    cdef double acc = base
    cdef long e = exponent
    while e > 0:
        if e & 1:
            result *= acc
        acc *= acc
        e >>= 1
    return result


def pow_int(double base, long exponent):
    return _pow_int(base, exponent)


cdef inline long _draw_flip_count(uint64_t* state, long n, double p,
                                  double base_pmf, double odds) nogil:
    cdef double u, pmf, cdf
    cdef long k
    if p >= 1.0:
        return n
    u = _unit(state)
    k = 0
    pmf = base_pmf
    cdf = pmf
    while u > cdf and k < n:
        pmf = pmf * ((<double>(n - k)) / (<double>k + 1.0)) * odds
        cdf += pmf
        k += 1
    return k


cdef inline void _draw_positions(uint64_t* state, long n, long k, long* out) nogil:
    cdef long j = 0, m, idx
    cdef bint dup
    while j < k:
        idx = <long>(_unit(state) * n)
        if idx >= n:
            idx = n - 1
        dup = False
        for m in range(j):
            if out[m] == idx:
                dup = True
                break
        if not dup:
            out[j] = idx
            j += 1


cdef inline bint _accepts_int64(const int64_t* a, const unsigned char* bits,
                                const long* pos, long k) nogil:
    cdef int64_t delta = 0
    cdef long m, i
    for m in range(k):
        i = pos[m]
        if bits[i]:
            delta -= a[i]
        else:
            delta += a[i]
    return delta <= 0


cdef inline bint _accepts_superinc(const unsigned char* bits, const long* pos, long k) nogil:
    cdef long top = pos[0]
    cdef long m
    for m in range(1, k):
        if pos[m] > top:
            top = pos[m]
    return bits[top] == 1


cdef inline bint _accepts_float64(const double* a, const unsigned char* bits,
                                  const long* pos, long k) nogil:
    cdef double delta = 0.0
    cdef long m, i
    for m in range(k):
        i = pos[m]
        if bits[i]:
            delta -= a[i]
        else:
            delta += a[i]
    return delta <= 0.0


cdef bint _accepts_bigint(list a, list prefix, const unsigned char* bits,
                          long* pos, long k):
    # Insertion-sort the k positions descending, then short-circuit the exact
    # integer partial sums against the prefix bound of the remaining terms.
    cdef long m, j, v
    for m in range(1, k):
        v = pos[m]
        j = m - 1
        while j >= 0 and pos[j] < v:
            pos[j + 1] = pos[j]
            j -= 1
        pos[j + 1] = v
    partial = 0
    cdef long i
    for m in range(k):
        i = pos[m]
        if bits[i]:
            partial -= <object>a[i]
        else:
            partial += <object>a[i]
        if m + 1 < k:
            below = <object>prefix[pos[m + 1] + 1]
            if partial > below:
                return False
            if partial < -below:
                return True
    return partial <= 0


cdef int _mode_code(str mode):
    if mode == MODE_INT64:
        return C_INT64
    if mode == MODE_SUPERINC:
        return C_SUPERINC
    if mode == MODE_BIGINT:
        return C_BIGINT
    return C_FLOAT64


def run_ea_kernel(kobj, double p, stream_key, long max_iters, initial=None):
    """Compiled twin of ``reference.run_ea_kernel``."""
    cdef long n = kobj.n
    cdef int mode = _mode_code(kobj.mode)
    cdef uint64_t state = <uint64_t>(<unsigned long long>(stream_key & 0xFFFFFFFFFFFFFFFF))

    bits_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] bits = bits_arr
    cdef long i
    if initial is None:
        for i in range(n):
            if _unit(&state) < 0.5:
                bits[i] = 1
    else:
        bits_arr[:] = initial

    cdef long ones = 0
    for i in range(n):
        if bits[i]:
            ones += 1
    cdef long initial_ones = ones
    cdef long evals = 1
    if ones == 0:
        return evals, initial_ones, False, bits_arr

    cdef double base_pmf = _pow_int(1.0 - p, n)
    cdef double odds = p / (1.0 - p) if p < 1.0 else 0.0

    pos_arr = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] pos_mv = pos_arr
    cdef long* pos = <long*>&pos_mv[0]

    cdef const int64_t* a_int = NULL
    cdef const double* a_float = NULL
    cdef int64_t[::1] a_int_mv
    cdef double[::1] a_float_mv
    cdef list a_big = None, prefix_big = None
    if mode == C_INT64:
        a_int_mv = kobj.a_int
        a_int = &a_int_mv[0]
    elif mode == C_FLOAT64:
        a_float_mv = kobj.a_float
        a_float = &a_float_mv[0]
    elif mode == C_BIGINT:
        a_big = kobj.a_big
        prefix_big = kobj.prefix_big

    cdef long it, k, m
    cdef bint accepted
    for it in range(max_iters):
        k = _draw_flip_count(&state, n, p, base_pmf, odds)
        if k > 0:
            _draw_positions(&state, n, k, pos)
        evals += 1
        if k > 0:
            if mode == C_SUPERINC:
                accepted = _accepts_superinc(&bits[0], pos, k)
            elif mode == C_INT64:
                accepted = _accepts_int64(a_int, &bits[0], pos, k)
            elif mode == C_FLOAT64:
                accepted = _accepts_float64(a_float, &bits[0], pos, k)
            else:
                accepted = _accepts_bigint(a_big, prefix_big, &bits[0], pos, k)
            if accepted:
                for m in range(k):
                    i = pos[m]
                    if bits[i]:
                        bits[i] = 0
                        ones -= 1
                    else:
                        bits[i] = 1
                        ones += 1
                if ones == 0:
                    return evals, initial_ones, False, bits_arr
    return evals, initial_ones, True, bits_arr


def mc_phi_kernel(kobj, w_rel, x_bits, double p, long samples, stream_key):
    """Compiled twin of ``reference.mc_phi_kernel``."""
    cdef long n = kobj.n
    cdef int mode = _mode_code(kobj.mode)
    cdef uint64_t state = <uint64_t>(<unsigned long long>(stream_key & 0xFFFFFFFFFFFFFFFF))

    w_arr = np.ascontiguousarray(w_rel, dtype=np.float64)
    bits_arr = np.ascontiguousarray(x_bits, dtype=np.uint8)
    cdef double[::1] w = w_arr
    cdef unsigned char[::1] bits = bits_arr

    cdef double base_pmf = _pow_int(1.0 - p, n)
    cdef double odds = p / (1.0 - p) if p < 1.0 else 0.0

    pos_arr = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] pos_mv = pos_arr
    cdef long* pos = <long*>&pos_mv[0]

    cdef const int64_t* a_int = NULL
    cdef const double* a_float = NULL
    cdef int64_t[::1] a_int_mv
    cdef double[::1] a_float_mv
    cdef list a_big = None, prefix_big = None
    if mode == C_INT64:
        a_int_mv = kobj.a_int
        a_int = &a_int_mv[0]
    elif mode == C_FLOAT64:
        a_float_mv = kobj.a_float
        a_float = &a_float_mv[0]
    elif mode == C_BIGINT:
        a_big = kobj.a_big
        prefix_big = kobj.prefix_big

    cdef double total = 0.0
    cdef double total_sq = 0.0
    cdef double rel
    cdef long s, k, m, i
    cdef bint accepted
    for s in range(samples):
        k = _draw_flip_count(&state, n, p, base_pmf, odds)
        rel = 1.0
        if k > 0:
            _draw_positions(&state, n, k, pos)
            if mode == C_SUPERINC:
                accepted = _accepts_superinc(&bits[0], pos, k)
            elif mode == C_INT64:
                accepted = _accepts_int64(a_int, &bits[0], pos, k)
            elif mode == C_FLOAT64:
                accepted = _accepts_float64(a_float, &bits[0], pos, k)
            else:
                accepted = _accepts_bigint(a_big, prefix_big, &bits[0], pos, k)
            if accepted:
                for m in range(k):
                    i = pos[m]
                    if bits[i]:
                        rel -= w[i]
                    else:
                        rel += w[i]
        total += rel
        total_sq += rel * rel
    return total, total_sq
