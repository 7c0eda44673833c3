"""Synchronization from d random deletions (and the one-way insertion variant).

``interactive_*`` implements the equal-throughput exchange: the receiver names
the missing symbols, the transmitter answers with their positions and order.

``limited_*`` implements the anchor-based protocol for a cheap forward link
and an expensive feedback link. Unsynchronized substrings are kept as tasks;
each task's central symbol is sent as an anchor and the receiver's reply
classifies both halves. Halves with a single deletion are repaired from a
checksum (which names the symbol) and a VT syndrome (which places it).
"""

from __future__ import annotations

from math import comb, factorial, log2

from ..core import PartialPermutation, Permutation, missing_symbols
from ..codec import (
    ordering_rank,
    ordering_unrank,
    ordering_width,
    subset_rank,
    subset_unrank,
    subset_width,
)
from .common import (
    ProtocolError,
    SyncOutcome,
    checksum_message,
    feedback,
    forward,
    is_subsequence,
    read,
    read_checksum,
    read_syndrome,
    receive,
    repair_single_deletion,
    run,
    symbol_width,
    syndrome_message,
)

# -- equal-throughput protocol ---------------------------------------------


def interactive_transmitter(x: PartialPermutation, d: int):
    n = x.n
    msg = yield from receive()
    (r,) = read(msg, "SUBSET", subset_width(n, d))
    missing = subset_unrank(r, n, d)
    where = {v: k for k, v in enumerate(x, start=1)}
    positions = sorted(where[v] for v in missing)
    in_order = [x[p - 1] for p in positions]
    yield forward("POSITION", [(subset_rank(positions, n, d), subset_width(n, d))], log2(comb(n, d)))
    yield forward("ORDERING", [(ordering_rank(in_order, missing), ordering_width(d))], log2(factorial(d)))


def interactive_receiver(y: PartialPermutation, d: int):
    n = y.n
    missing = missing_symbols(y)
    if len(missing) != d:
        raise ProtocolError(f"receiver holds {len(y)} of {n} symbols, expected {n - d}")
    yield feedback("SUBSET", [(subset_rank(missing, n, d), subset_width(n, d))], log2(comb(n, d)))
    msg = yield from receive()
    (r,) = read(msg, "POSITION", subset_width(n, d))
    positions = subset_unrank(r, n, d)
    msg = yield from receive()
    (r,) = read(msg, "ORDERING", ordering_width(d))
    symbols = ordering_unrank(r, missing)
    out = list(y)
    for p, v in zip(positions, symbols):
        out.insert(p - 1, v)
    return out, {}


def sync_deletions_interactive(x: Permutation, y: PartialPermutation, d: int) -> SyncOutcome:
    _check_deletion_inputs(x, y, d)
    return run(interactive_transmitter(x, d), interactive_receiver(y, d), x)


# -- limited-feedback protocol -----------------------------------------------

NONE, SINGLE, RECURSE = 0, 1, 2
MISS = 9
MISS_SINGLE = 10
FEEDBACK_WIRE = 4
FEEDBACK_IDEAL = 3.0


def _classify(dels: int) -> int:
    return NONE if dels == 0 else SINGLE if dels == 1 else RECURSE


def center_index(length: int) -> int:
    """0-based index of the central element, ceil(L/2) in 1-based terms."""
    return (length + 1) // 2 - 1


def _send_single(x: PartialPermutation, xs: tuple[int, ...]):
    vals = [x[p - 1] for p in xs]
    yield checksum_message(vals, x.n)
    yield syndrome_message(vals)


def limited_transmitter(x: PartialPermutation, d: int):
    n = x.n
    everything = tuple(range(1, n + 1))
    if d == 1:
        yield from _send_single(x, everything)
        return
    worklist = [everything]
    while worklist:
        upcoming = []
        for xs in sorted(worklist):
            ci = center_index(len(xs))
            anchor = x[xs[ci] - 1]
            yield forward("ANCHOR", [(anchor - 1, symbol_width(n))], log2(n))
            msg = yield from receive()
            (code,) = read(msg, "FEEDBACK", FEEDBACK_WIRE)
            if code in (MISS, MISS_SINGLE):
                rest = xs[:ci] + xs[ci + 1 :]
                if code == MISS:
                    upcoming.append(rest)
                else:
                    yield from _send_single(x, rest)
                continue
            if code > 8:
                raise ProtocolError(f"unknown feedback code {code}")
            for half, action in ((xs[:ci], code // 3), (xs[ci + 1 :], code % 3)):
                if action == SINGLE:
                    yield from _send_single(x, half)
                elif action == RECURSE:
                    upcoming.append(half)
        worklist = upcoming


def limited_receiver(y: PartialPermutation, d: int):
    n = y.n
    missing = set(missing_symbols(y))
    if len(missing) != d:
        raise ProtocolError(f"receiver holds {len(y)} of {n} symbols, expected {n - d}")
    where = {v: k for k, v in enumerate(y, start=1)}
    placed = [0] * (n + 1)
    stats = {"anchors": 0, "misses": 0, "singles": 0}

    def place(xs, values):
        for p, v in zip(xs, values):
            placed[p] = v

    def resolve(xs, ylo, yhi):
        cs_msg = yield from receive()
        vt_msg = yield from receive()
        cs = read_checksum(cs_msg, len(xs), n)
        syn = read_syndrome(vt_msg, len(xs))
        values, _ = repair_single_deletion(y.values[ylo - 1 : yhi], cs, syn, missing)
        place(xs, values)
        stats["singles"] += 1

    everything = tuple(range(1, n + 1))
    if d == 1:
        yield from resolve(everything, 1, n - 1)
        return placed[1:], stats

    worklist = [(everything, 1, n - d)]
    while worklist:
        upcoming = []
        for xs, ylo, yhi in sorted(worklist):
            msg = yield from receive()
            (a,) = read(msg, "ANCHOR", symbol_width(n))
            a += 1
            stats["anchors"] += 1
            ci = center_index(len(xs))
            placed[xs[ci]] = a
            yp = where.get(a)
            if yp is None:
                stats["misses"] += 1
                rest = xs[:ci] + xs[ci + 1 :]
                if len(rest) - (yhi - ylo + 1) == 1:
                    yield feedback("FEEDBACK", [(MISS_SINGLE, FEEDBACK_WIRE)], FEEDBACK_IDEAL)
                    yield from resolve(rest, ylo, yhi)
                else:
                    yield feedback("FEEDBACK", [(MISS, FEEDBACK_WIRE)], FEEDBACK_IDEAL)
                    upcoming.append((rest, ylo, yhi))
                continue
            if not ylo <= yp <= yhi:
                raise ProtocolError(f"anchor {a} found outside its substring")
            dels = len(xs) - (yhi - ylo + 1)
            left = ci - (yp - ylo)
            if not 0 <= left <= dels:
                raise ProtocolError(f"anchor {a} shifted by {left}, only {dels} deletions pending")
            halves = (
                (xs[:ci], ylo, yp - 1, left),
                (xs[ci + 1 :], yp + 1, yhi, dels - left),
            )
            code = 3 * _classify(halves[0][3]) + _classify(halves[1][3])
            yield feedback("FEEDBACK", [(code, FEEDBACK_WIRE)], FEEDBACK_IDEAL)
            for hxs, hlo, hhi, hdels in halves:
                if hdels == 0:
                    place(hxs, y.values[hlo - 1 : hhi])
                elif hdels == 1:
                    yield from resolve(hxs, hlo, hhi)
                else:
                    upcoming.append((hxs, hlo, hhi))
        worklist = upcoming
    if 0 in placed[1:]:
        raise ProtocolError("some positions were never resolved")
    return placed[1:], stats


def sync_deletions_limited_feedback(x: Permutation, y: PartialPermutation, d: int) -> SyncOutcome:
    _check_deletion_inputs(x, y, d)
    return run(limited_transmitter(x, d), limited_receiver(y, d), x)


def _check_deletion_inputs(x: PartialPermutation, y: PartialPermutation, d: int) -> None:
    if d < 1:
        raise ProtocolError(f"need at least one deletion, got d={d}")
    if x.n != y.n or len(x) - len(y) != d or not is_subsequence(y, x):
        raise ProtocolError(f"{y} is not {x} with {d} deletions")


# -- insertions -------------------------------------------------------------


def insertion_transmitter(x: PartialPermutation, d: int):
    n = x.n
    extra = missing_symbols(x)
    yield forward("SUBSET", [(subset_rank(extra, n, d), subset_width(n, d))], log2(comb(n, d)))


def insertion_receiver(y: PartialPermutation, d: int):
    n = y.n
    msg = yield from receive()
    (r,) = read(msg, "SUBSET", subset_width(n, d))
    extra = set(subset_unrank(r, n, d))
    return [v for v in y if v not in extra], {}


def sync_insertions_oneway(x: PartialPermutation, y: Permutation, d: int) -> SyncOutcome:
    """Remove d inserted symbols from ``y``; only their identities are sent."""
    if x.n != y.n or len(y) - len(x) != d or not is_subsequence(x, y):
        raise ProtocolError(f"{y} is not {x} with {d} insertions")
    return run(insertion_transmitter(x, d), insertion_receiver(y, d), x)
