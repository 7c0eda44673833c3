from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from math import log2
from typing import Any

from ..channel import RECEIVE, Direction, Message, Transcript, run_session
from ..codec import bit_width, pack, unpack
from ..core import (
    DecodeError,
    PartialPermutation,
    Permutation,
    UniquenessViolation,
    perm_syndrome,
    reinsert_index,
)


class ProtocolError(RuntimeError):
    """A protocol contract was violated (bad inputs or inconsistent messages)."""


@dataclass
class SyncOutcome:
    restored: PartialPermutation
    transcript: Transcript
    success: bool
    info: dict[str, Any] = field(default_factory=dict)


def forward(kind: str, fields: Sequence[tuple[int, int]], ideal: float, deviation: bool = False) -> Message:
    return Message(Direction.TtoR, kind, pack(*fields), ideal, deviation)


def feedback(kind: str, fields: Sequence[tuple[int, int]], ideal: float, deviation: bool = False) -> Message:
    return Message(Direction.RtoT, kind, pack(*fields), ideal, deviation)


def read(msg: Message, kind: str, *widths: int) -> tuple[int, ...]:
    if msg.kind != kind:
        raise ProtocolError(f"expected a {kind} message, got {msg.kind}")
    return unpack(msg.payload, *widths)


def symbol_width(n: int) -> int:
    return bit_width(n)


def max_checksum(length: int, n: int) -> int:
    """Largest possible sum of ``length`` distinct symbols from [n]."""
    return length * n - length * (length - 1) // 2


def checksum_width(length: int, n: int) -> int:
    return max_checksum(length, n).bit_length()


def checksum_message(values: Sequence[int], n: int) -> Message:
    cs = sum(values)
    return forward("CHECKSUM", [(cs, checksum_width(len(values), n))], log2(max(cs, 2)))


def syndrome_message(values: Sequence[int]) -> Message:
    L = len(values)
    return forward("VT_SYNDROME", [(perm_syndrome(values), bit_width(L))], log2(L))


def read_checksum(msg: Message, length: int, n: int) -> int:
    return read(msg, "CHECKSUM", checksum_width(length, n))[0]


def read_syndrome(msg: Message, length: int) -> int:
    return read(msg, "VT_SYNDROME", bit_width(length))[0]


def repair_single_deletion(ysub: Sequence[int], cs: int, syndrome: int, candidates) -> tuple[tuple[int, ...], int]:
    """Recover a substring that lost one symbol from its checksum and VT syndrome.

    Returns the repaired substring and the recovered symbol.
    """
    b = cs - sum(ysub)
    if b not in candidates:
        raise ProtocolError(f"checksum difference {b} is not a missing symbol")
    try:
        k = reinsert_index(ysub, b, syndrome)
    except (DecodeError, UniquenessViolation) as exc:
        raise ProtocolError(str(exc)) from exc
    ysub = tuple(ysub)
    return ysub[:k] + (b,) + ysub[k:], b


def receive():
    """Block until the next incoming message (use as ``msg = yield from receive()``)."""
    msg = yield RECEIVE
    return msg


def is_subsequence(short: Sequence[int], long: Sequence[int]) -> bool:
    """Order-preserving containment for sequences of distinct symbols."""
    where = {v: k for k, v in enumerate(long)}
    prev = -1
    for v in short:
        k = where.get(v, -1)
        if k <= prev:
            return False
        prev = k
    return True


def as_partial(values: Sequence[int], n: int) -> PartialPermutation:
    values = tuple(values)
    if len(values) == n:
        return Permutation(values, n)
    return PartialPermutation(values, n)


def run(transmitter, receiver, reference: PartialPermutation) -> SyncOutcome:
    """Run a transmitter/receiver pair; the receiver returns ``(values, info)``."""
    (values, info), transcript = run_session(transmitter, receiver)
    restored = as_partial(values, reference.n)
    return SyncOutcome(restored, transcript, restored == reference, info)
