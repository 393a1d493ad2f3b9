from itertools import islice

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nilcsat.hitting import (
    enumerate_hitting_set,
    hitting_set_blocks,
    hitting_set_size,
    partition,
)

from oracles import count_low_support, hitting_reference


def test_size_examples():
    assert hitting_set_size(4, 2, 2) == 11
    assert hitting_set_size(4, 4, 2) == 16
    assert hitting_set_size(3, 1, 3) == 7
    assert hitting_set_size(5, 0, 5) == 1
    assert hitting_set_size(3, 9, 3) == 27


def test_small_stream():
    assert list(enumerate_hitting_set(2, 1, 2)) == [(0, 0), (1, 0), (0, 1)]
    stream = list(enumerate_hitting_set(4, 2, 2))
    assert len(stream) == 11 and all(sum(v) <= 2 for v in stream)
    assert stream[:6] == [
        (0, 0, 0, 0),
        (1, 0, 0, 0),
        (0, 1, 0, 0),
        (0, 0, 1, 0),
        (0, 0, 0, 1),
        (1, 1, 0, 0),
    ]
    assert list(enumerate_hitting_set(2, 2, 3)) == [
        (0, 0), (1, 0), (2, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 1), (2, 2)
    ]


@pytest.mark.parametrize("q", [2, 3, 5])
def test_matches_reference_and_counts(q):
    for N in range(0, 7 if q < 5 else 5):
        for d in range(N + 1):
            stream = list(enumerate_hitting_set(N, d, q))
            assert stream == hitting_reference(N, d, q)
            assert len(set(stream)) == len(stream) == hitting_set_size(N, d, q)
            assert len(stream) == count_low_support(N, d, q)


@pytest.mark.parametrize("block", [1, 2, 3, 7, 64])
def test_block_sizes_do_not_change_the_stream(block):
    for q, N, d in [(2, 6, 4), (3, 5, 5), (5, 4, 3)]:
        ref = hitting_reference(N, d, q)
        pos = 0
        for off, rows in hitting_set_blocks(N, d, q, block=block):
            assert off == pos and rows.dtype == np.int8
            assert [tuple(r) for r in rows.tolist()] == ref[pos : pos + len(rows)]
            pos += len(rows)
        assert pos == len(ref)


@settings(max_examples=80, deadline=None)
@given(
    q=st.sampled_from([2, 3, 5]),
    N=st.integers(1, 5),
    data=st.data(),
)
def test_ranges_are_slices_of_the_stream(q, N, data):
    d = data.draw(st.integers(0, N))
    total = hitting_set_size(N, d, q)
    start = data.draw(st.integers(0, total))
    stop = data.draw(st.integers(start, total))
    block = data.draw(st.sampled_from([1, 2, 5, 1 << 18]))
    ref = hitting_reference(N, d, q)
    got = []
    pos = start
    for off, rows in hitting_set_blocks(N, d, q, start, stop, block=block):
        assert off == pos
        got += [tuple(r) for r in rows.tolist()]
        pos += len(rows)
    assert got == ref[start:stop]


@settings(max_examples=50, deadline=None)
@given(q=st.sampled_from([2, 3, 5]), N=st.integers(0, 6), data=st.data())
def test_lower_support_bound_is_a_prefix(q, N, data):
    d = data.draw(st.integers(0, N))
    full = list(islice(enumerate_hitting_set(N, N, q), hitting_set_size(N, d, q)))
    assert full == list(enumerate_hitting_set(N, d, q))


def test_partition():
    assert partition(10, 3) == [(0, 3), (3, 6), (6, 10)]
    assert partition(2, 5) == [(0, 1), (1, 2)]
    assert partition(0, 4) == []
    for total in range(40):
        for parts in range(1, 7):
            ranges = partition(total, parts)
            assert sum(b - a for a, b in ranges) == total
            assert all(r[1] == s[0] for r, s in zip(ranges, ranges[1:]))
