"""Synchronization from a single translocation by iterative halving.

A translocation is a deletion and an insertion of the same symbol. Each round
the transmitter sends the central symbol of the current substring. If the
receiver finds it at the same position, the error lies wholly in one half and
a VT syndrome of the left half tells which. If it moved by one, the deletion
and insertion straddle the centre and are repaired directly: a checksum of
the insertion side names the moved symbol, a syndrome of the deletion side
places it.
"""

from __future__ import annotations

from math import log2

from ..core import DecodeError, Permutation, UniquenessViolation, perm_syndrome, reinsert_index
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
    run,
    symbol_width,
    syndrome_message,
)
from .deletions import center_index

SEND_VT_LEFT = 0
PARSE_LEFT = 1
PARSE_RIGHT = 2
SEND_CS_RIGHT_VT_LEFT = 3
SEND_CS_LEFT_VT_RIGHT = 4
DONE = 5
FEEDBACK_WIRE = 3
FEEDBACK_IDEAL = 3.0
BASE_LENGTH = 3


def _fb(code: int):
    return feedback("FEEDBACK", [(code, FEEDBACK_WIRE)], FEEDBACK_IDEAL)


def translocation_transmitter(x: Permutation, d: int = 1):
    n = x.n
    w = symbol_width(n)
    xv = x.values
    lo, hi = 1, n
    while True:
        if hi - lo + 1 <= BASE_LENGTH:
            raw = xv[lo - 1 : hi]
            yield forward("RAW_SUBSTRING", [(v - 1, w) for v in raw], len(raw) * log2(n))
            return
        c = lo + center_index(hi - lo + 1)
        left, right = xv[lo - 1 : c - 1], xv[c:hi]
        yield forward("ANCHOR", [(xv[c - 1] - 1, w)], log2(n))
        (code,) = read((yield from receive()), "FEEDBACK", FEEDBACK_WIRE)
        if code == SEND_VT_LEFT:
            yield syndrome_message(left)
            (code,) = read((yield from receive()), "FEEDBACK", FEEDBACK_WIRE)
            if code == PARSE_LEFT:
                hi = c - 1
            elif code == PARSE_RIGHT:
                lo = c + 1
            else:
                raise ProtocolError(f"unexpected feedback {code} after a syndrome")
            continue
        if code == SEND_CS_RIGHT_VT_LEFT:
            yield checksum_message(right, n)
            yield syndrome_message(left)
        elif code == SEND_CS_LEFT_VT_RIGHT:
            yield checksum_message(left, n)
            yield syndrome_message(right)
        elif code != DONE:
            raise ProtocolError(f"unexpected feedback {code}")
        return


def translocation_receiver(y: Permutation, d: int = 1):
    n = y.n
    w = symbol_width(n)
    yv = list(y.values)
    lo, hi = 1, n
    info = {"lengths": [], "shifts": [], "anchors": []}
    while True:
        length = hi - lo + 1
        info["lengths"].append(length)
        if length <= BASE_LENGTH:
            raw = read((yield from receive()), "RAW_SUBSTRING", *([w] * length))
            yv[lo - 1 : hi] = [v + 1 for v in raw]
            break
        c = lo + center_index(length)
        (a,) = read((yield from receive()), "ANCHOR", w)
        a += 1
        try:
            found = yv.index(a, lo - 1, hi) + 1
        except ValueError:
            raise ProtocolError(f"anchor {a} missing from the current substring") from None
        shift = c - found
        info["shifts"].append(shift)
        info["anchors"].append(a)
        if shift == 0:
            yield _fb(SEND_VT_LEFT)
            syn = read_syndrome((yield from receive()), c - lo)
            if syn != perm_syndrome(yv[lo - 1 : c - 1]):
                yield _fb(PARSE_LEFT)
                hi = c - 1
            else:
                yield _fb(PARSE_RIGHT)
                lo = c + 1
            continue
        if shift == 1:
            # anchor slid left: the left half lost the moved symbol, the right half gained it
            yield _fb(SEND_CS_RIGHT_VT_LEFT)
            cs = read_checksum((yield from receive()), hi - c, n)
            syn = read_syndrome((yield from receive()), c - lo)
            left, right = _repair(yv[lo - 1 : found - 1], yv[found:hi], cs, syn)
            yv[lo - 1 : hi] = left + [a] + right
        elif shift == -1:
            yield _fb(SEND_CS_LEFT_VT_RIGHT)
            cs = read_checksum((yield from receive()), c - lo, n)
            syn = read_syndrome((yield from receive()), hi - c)
            right, left = _repair(yv[found:hi], yv[lo - 1 : found - 1], cs, syn)
            yv[lo - 1 : hi] = left + [a] + right
        else:
            # the anchor itself was moved; put it back
            yield _fb(DONE)
            del yv[found - 1]
            yv.insert(c - 1, a)
        break
    info["termination_round"] = len(info["lengths"])
    return yv, info


def _repair(deletion_side, insertion_side, cs, syn):
    """Undo the move: drop the extra symbol from one side, reinsert it on the other."""
    moved = sum(insertion_side) - cs
    if moved not in insertion_side:
        raise ProtocolError(f"checksum difference {moved} is not on the insertion side")
    try:
        k = reinsert_index(deletion_side, moved, syn)
    except (DecodeError, UniquenessViolation) as exc:
        raise ProtocolError(str(exc)) from exc
    return deletion_side[:k] + [moved] + deletion_side[k:], [v for v in insertion_side if v != moved]


def sync_translocation(x: Permutation, y: Permutation) -> SyncOutcome:
    if x.n != y.n or len(x) != x.n or len(y) != y.n or x == y:
        raise ProtocolError(f"{y} is not {x} with one translocation")
    return run(translocation_transmitter(x), translocation_receiver(y), x)
