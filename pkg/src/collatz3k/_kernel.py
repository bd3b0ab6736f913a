"""int64 fast path for range sweeps.

Starts whose orbit would leave int64 are flagged ``OVERFLOW`` and re-run by
the caller with Python ints. Pattern codes match ``TAG_CODES`` below.
"""

import numpy as np
from numba import njit

REACHED, EXHAUSTED, OVERFLOW, BROKEN = 0, 1, 2, 3
TAG_NONE, TAG_SHORT, TAG_STANDARD, TAG_SHORTCUT = 0, 1, 2, 3

# 4 * 3^k must fit comfortably, and starts must leave headroom for 3n + 3^k
MAX_K = 30
MAX_START = 1 << 62


def usable(k: int, lo: int, hi: int) -> bool:
    return 0 <= k <= MAX_K and 1 <= lo and hi < MAX_START


@njit(nogil=True, cache=True)
def _sweep(lo, count, add, budget, t_out, odd_out, tag_out, status_out):
    target = add
    limit = (np.int64(9223372036854775807) - add) // 3
    standard = 4 * target
    shortcut = target // 3 if target > 1 else -1
    for i in range(count):
        n = lo + i
        b = budget
        if b < 0:
            bits = 0
            y = n
            while y:
                bits += 1
                y >>= 1
            b = 10 * bits * bits + 10000
        x = n
        steps = 0
        odd = 0
        p1 = -1
        p2 = -1
        status = EXHAUSTED
        while True:
            if x == target:
                status = REACHED
                break
            if steps >= b:
                break
            p2 = p1
            p1 = x
            if x & 1:
                if x > limit:
                    status = OVERFLOW
                    break
                x = 3 * x + add
                odd += 1
            else:
                x >>= 1
            steps += 1
        tag = TAG_NONE
        if status == REACHED:
            if steps < 2:
                tag = TAG_SHORT
            elif p2 == standard:
                tag = TAG_STANDARD
            elif p2 == shortcut:
                tag = TAG_SHORTCUT
            else:
                status = BROKEN
        t_out[i] = steps
        odd_out[i] = odd
        tag_out[i] = tag
        status_out[i] = status


def sweep(lo: int, hi: int, k: int, budget):
    """Run the kernel over ``[lo, hi]``; returns ``(t, odd, tag, status)`` arrays."""
    count = hi - lo + 1
    t = np.empty(count, dtype=np.int64)
    odd = np.empty(count, dtype=np.int64)
    tag = np.empty(count, dtype=np.int8)
    status = np.empty(count, dtype=np.int8)
    b = -1 if budget is None else min(budget, MAX_START)
    _sweep(np.int64(lo), count, np.int64(3 ** k), np.int64(b), t, odd, tag, status)
    return t, odd, tag, status
