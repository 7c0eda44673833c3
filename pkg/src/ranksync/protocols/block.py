"""Synchronization from a single block of d consecutive deletions.

Both sides split their strings into d residue-class subsequences; the block
removes exactly one symbol from each. Let p_k be the position of the symbol
lost from subsequence k. The sequence p_1..p_d takes the shape
(j, .., j, j-1, .., j-1) and the index where it drops locates the block.
Only subsequences 1 and d, plus those probed by a binary search over k, are
repaired; the order of the d lost symbols is sent last.
"""

from __future__ import annotations

from math import factorial, log2

from ..codec import BitReader, bit_width, ordering_rank, ordering_unrank, ordering_width
from ..core import PartialPermutation, Permutation, missing_symbols
from .common import (
    ProtocolError,
    SyncOutcome,
    checksum_message,
    feedback,
    forward,
    read,
    read_checksum,
    read_syndrome,
    receive,
    repair_single_deletion,
    run,
    symbol_width,
    syndrome_message,
)
from .deletions import limited_receiver, limited_transmitter


def residue_class(values, k: int, d: int) -> tuple[int, ...]:
    """Subsequence k (1-based) of ``values`` under a d-way deinterleave."""
    return tuple(values[k - 1 :: d])


def first_deleted_position(p1: int, boundary: int, d: int) -> int:
    """First position of the block from p_1 and the drop index k.

    ``boundary == 1`` stands for a constant p-sequence.
    """
    if boundary == 1:
        return (p1 - 1) * d + 1
    return (p1 - 2) * d + boundary


def block_transmitter(x: PartialPermutation, d: int):
    n = x.n
    if d == 1:
        yield from limited_transmitter(x, 1)
        return

    def probe(k):
        sub = residue_class(x.values, k, d)
        yield syndrome_message(sub)
        yield checksum_message(sub, n)

    yield from probe(1)
    yield from probe(d)
    msg = yield from receive()
    if msg.kind != "FLAG":
        raise ProtocolError(f"expected a FLAG message, got {msg.kind}")
    reader = BitReader(msg.payload)
    if reader.uint(1):
        boundary = reader.uint(bit_width(d)) + 1
        if boundary != 1 or not reader.done():
            raise ProtocolError(f"malformed FLAG message {msg.payload}")
    else:
        lo, hi = 2, d
        while lo < hi:
            m = (lo + hi) // 2
            yield from probe(m)
            msg = yield from receive()
            (right_of_drop,) = read(msg, "BRANCH", 1)
            if right_of_drop:
                hi = m
            else:
                lo = m + 1
        msg = yield from receive()
        (k,) = read(msg, "FOUND", bit_width(d))
        boundary = k + 1
        if boundary != lo:
            raise ProtocolError(f"receiver reported boundary {boundary}, search ended at {lo}")
    msg = yield from receive()
    (p,) = read(msg, "POSITION", symbol_width(n))
    start = p + 1
    block = x.values[start - 1 : start - 1 + d]
    yield forward("ORDERING", [(ordering_rank(block, block), ordering_width(d))], log2(factorial(d)))


def block_receiver(y: PartialPermutation, d: int):
    n = y.n
    if d == 1:
        restored, stats = yield from limited_receiver(y, 1)
        return restored, stats
    missing = missing_symbols(y)
    if len(missing) != d:
        raise ProtocolError(f"receiver holds {len(y)} of {n} symbols, expected {n - d}")
    candidates = set(missing)
    p = {}

    def probe(k):
        xlen = (n - k) // d + 1
        vt = read_syndrome((yield from receive()), xlen)
        cs = read_checksum((yield from receive()), xlen, n)
        sub, b = repair_single_deletion(residue_class(y.values, k, d), cs, vt, candidates)
        p[k] = sub.index(b) + 1

    yield from probe(1)
    yield from probe(d)
    p1, pd = p[1], p[d]
    if p1 == pd:
        boundary = 1
        yield feedback("FLAG", [(1, 1), (0, bit_width(d))], 1 + log2(d))
    elif p1 == pd + 1:
        yield feedback("FLAG", [(0, 1)], 1.0)
        lo, hi = 2, d
        while lo < hi:
            m = (lo + hi) // 2
            yield from probe(m)
            if p[m] == pd:
                hi = m
            elif p[m] != p1:
                raise ProtocolError(f"p-sequence {p} is not two-valued")
            else:
                lo = m + 1
            yield feedback("BRANCH", [(1 if hi == m else 0, 1)], 1.0)
        boundary = lo
        yield feedback("FOUND", [(boundary - 1, bit_width(d))], log2(d))
    else:
        raise ProtocolError(f"p_1={p1}, p_d={pd} cannot come from one block")
    start = first_deleted_position(p1, boundary, d)
    if not 1 <= start <= n - d + 1:
        raise ProtocolError(f"block start {start} out of range")
    yield feedback("POSITION", [(start - 1, symbol_width(n))], log2(n), deviation=True)
    msg = yield from receive()
    (r,) = read(msg, "ORDERING", ordering_width(d))
    block = ordering_unrank(r, missing)
    restored = y.values[: start - 1] + block + y.values[start - 1 :]
    return restored, {"p_sequence": dict(sorted(p.items())), "boundary": boundary, "start": start}


def sync_block_deletion(x: Permutation, y: PartialPermutation, d: int) -> SyncOutcome:
    if d < 1 or x.n != y.n or len(x) - len(y) != d:
        raise ProtocolError(f"{y} is not {x} with a block of {d} deletions")
    s = next((k for k, (a, b) in enumerate(zip(x.values, y.values)) if a != b), len(y))
    if x.values[:s] + x.values[s + d :] != y.values:
        raise ProtocolError(f"{y} is not {x} with a block of {d} deletions")
    return run(block_transmitter(x, d), block_receiver(y, d), x)
