"""Vectors in F_q^N with at most d nonzero entries.

If f(x) = 1 has a solution and deg f <= d, then it has one among these:
keep the variables of a maximal monomial of f - 1 restricted to a solution
and zero the rest. The stream is graded: support size ascending, then
support positions in lexicographic order, then nonzero values in
lexicographic order. The stream for d is a prefix of the stream for N.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, islice
from math import comb

import numpy as np

DEFAULT_BLOCK = 1 << 18


def hitting_set_size(N: int, d: int, q: int) -> int:
    return sum(comb(N, k) * (q - 1) ** k for k in range(min(d, N) + 1))


@lru_cache(maxsize=64)
def _value_table(q: int, k: int) -> np.ndarray:
    """All of (1..q-1)^k in lexicographic order, shape ((q-1)^k, k)."""
    b = q - 1
    out = np.empty((b**k, k), dtype=np.int8)
    for j in range(k):
        col = np.repeat(np.arange(1, q, dtype=np.int8), b ** (k - 1 - j))
        out[:, j] = np.tile(col, b**j)
    out.flags.writeable = False
    return out


def _value_rows(q: int, k: int, lo: int, hi: int, block: int) -> np.ndarray:
    """Rows lo..hi-1 of the lexicographic list of (1..q-1)^k."""
    b = q - 1
    r = k
    while r and b**r > block:
        r -= 1
    low = _value_table(q, r)
    span = b**r
    parts = []
    for prefix in range(lo // span, (hi - 1) // span + 1):
        head = np.empty(k - r, dtype=np.int8)
        p = prefix
        for j in range(k - r - 1, -1, -1):
            p, head[j] = divmod(p, b)
        part = np.empty((span, k), dtype=np.int8)
        part[:, : k - r] = head + 1
        part[:, k - r :] = low
        a = max(lo - prefix * span, 0)
        parts.append(part[a : min(hi - prefix * span, span)])
    return np.concatenate(parts) if len(parts) > 1 else parts[0]


def hitting_set_blocks(N: int, d: int, q: int, start: int = 0, stop: int | None = None, block: int = DEFAULT_BLOCK):
    """Yield (offset, rows) covering stream positions [start, stop) in order.

    rows is an int8 array of shape (r, N); offset is the stream position of
    its first row. Blocks never mix support sizes and hold at most about
    `block` rows.
    """
    total = hitting_set_size(N, d, q)
    stop = total if stop is None else min(stop, total)
    pos = 0
    for k in range(min(d, N) + 1):
        if pos >= stop:
            return
        v = (q - 1) ** k
        size_k = comb(N, k) * v
        if pos + size_k <= start:
            pos += size_k
            continue
        if k == 0:
            yield pos, np.zeros((1, N), dtype=np.int8)
            pos += 1
            continue
        per_combo = max(1, block // v)  # whole combinations per block
        vchunk = v  # value rows per block when one combination is too big
        while vchunk > block:
            vchunk //= q - 1
        combos = combinations(range(N), k)
        while pos < stop:
            chunk = list(islice(combos, per_combo))
            if not chunk:
                break
            span = len(chunk) * v
            if pos + span <= start:
                pos += span
                continue
            if v <= block:
                vals = _value_table(q, k)
                supp = np.array(chunk, dtype=np.int64)
                rows = np.zeros((len(chunk), v, N), dtype=np.int8)
                ci = np.arange(len(chunk))
                for j in range(k):
                    rows[ci, :, supp[:, j]] = vals[:, j]
                rows = rows.reshape(-1, N)
                lo, hi = max(start - pos, 0), min(stop - pos, span)
                yield pos + lo, rows[lo:hi]
                pos += span
                continue
            supp = np.array(chunk[0], dtype=np.int64)
            for vlo in range(0, v, vchunk):
                vhi = min(vlo + vchunk, v)
                if pos + vlo >= stop:
                    break
                if pos + vhi <= start:
                    continue
                lo, hi = max(start - pos, vlo), min(stop - pos, vhi)
                rows = np.zeros((hi - lo, N), dtype=np.int8)
                rows[:, supp] = _value_rows(q, k, lo, hi, block)
                yield pos + lo, rows
            pos += span


def enumerate_hitting_set(N: int, d: int, q: int, start: int = 0, stop: int | None = None):
    """Yield the hitting-set vectors as tuples, in stream order."""
    for _, rows in hitting_set_blocks(N, d, q, start, stop):
        for r in rows.tolist():
            yield tuple(r)


def partition(total: int, parts: int) -> list:
    """Split [0, total) into `parts` contiguous ranges of near-equal length."""
    parts = max(1, parts)
    bounds = [total * i // parts for i in range(parts + 1)]
    return [(bounds[i], bounds[i + 1]) for i in range(parts) if bounds[i] < bounds[i + 1]]
