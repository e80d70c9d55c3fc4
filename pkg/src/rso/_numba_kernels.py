"""Compiled inner loops."""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def gray_code_expansion(n, indptr, indices):
    """Walk all subsets in Gray-code order keeping |N(S) minus S| incrementally.

    Returns (numerator, denominator, subset bitmask) of the minimum ratio over
    non-empty S with |S| <= n/2.
    """
    in_s = np.zeros(n, dtype=np.bool_)
    cnt = np.zeros(n, dtype=np.int32)
    boundary = 0
    size = 0
    code = np.int64(0)
    best_num = n + 1
    best_den = 1
    best_code = np.int64(0)
    limit = np.int64(1) << n
    step = np.int64(1)
    while step < limit:
        x = 0
        while ((step >> x) & 1) == 0:
            x += 1
        code ^= np.int64(1) << x
        if not in_s[x]:
            in_s[x] = True
            size += 1
            if cnt[x] > 0:
                boundary -= 1
            for t in range(indptr[x], indptr[x + 1]):
                w = indices[t]
                cnt[w] += 1
                if cnt[w] == 1 and not in_s[w]:
                    boundary += 1
        else:
            in_s[x] = False
            size -= 1
            for t in range(indptr[x], indptr[x + 1]):
                w = indices[t]
                cnt[w] -= 1
                if cnt[w] == 0 and not in_s[w]:
                    boundary -= 1
            if cnt[x] > 0:
                boundary += 1
        if size > 0 and 2 * size <= n:
            if boundary * best_den < best_num * size:
                best_num = boundary
                best_den = size
                best_code = code
        step += 1
    return best_num, best_den, best_code
