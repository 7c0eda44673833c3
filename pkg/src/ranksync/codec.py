"""Fixed-width wire fields and combinatorial ranking.

Subsets are ranked in colexicographic order through the combinatorial number
system; orderings of a fixed set are ranked by their Lehmer code.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from math import comb, factorial

from .core import DomainError


@dataclass(frozen=True)
class BitString:
    """An ordered string of bits, stored big-endian in an integer."""

    value: int = 0
    length: int = 0

    def __post_init__(self) -> None:
        if self.length < 0 or self.value < 0 or self.value >> self.length:
            raise DomainError(f"value {self.value} does not fit in {self.length} bits")

    def __len__(self) -> int:
        return self.length

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> (self.length - 1 - k)) & 1 for k in range(self.length))

    def __add__(self, other: "BitString") -> "BitString":
        return BitString((self.value << other.length) | other.value, self.length + other.length)

    def hex(self) -> str:
        """Hex digits of the bit string, right-aligned and zero-padded to whole nibbles."""
        if self.length == 0:
            return ""
        return format(self.value, "0{}x".format((self.length + 3) // 4))

    def __str__(self) -> str:
        return "".join(map(str, self.bits))

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "BitString":
        v = 0
        for b in bits:
            if b not in (0, 1):
                raise DomainError(f"not a bit: {b!r}")
            v = (v << 1) | b
        return cls(v, len(bits))


def bit_width(count: int) -> int:
    """Bits of a fixed field able to hold ``count`` distinct values (ceil log2)."""
    if count < 1:
        raise DomainError(f"a field needs at least one value, got {count}")
    return (count - 1).bit_length()


def uint_encode(value: int, width: int) -> BitString:
    if value < 0 or width < 0 or value >> width:
        raise DomainError(f"{value} does not fit in {width} bits")
    return BitString(value, width)


def uint_decode(bits: BitString) -> int:
    return bits.value


class BitWriter:
    def __init__(self) -> None:
        self._value = 0
        self._length = 0

    def uint(self, value: int, width: int) -> "BitWriter":
        if value < 0 or value >> width:
            raise DomainError(f"{value} does not fit in {width} bits")
        self._value = (self._value << width) | value
        self._length += width
        return self

    def getvalue(self) -> BitString:
        return BitString(self._value, self._length)


class BitReader:
    def __init__(self, bits: BitString) -> None:
        self._bits = bits
        self._pos = 0

    def uint(self, width: int) -> int:
        if self._pos + width > self._bits.length:
            raise DomainError("read past the end of the payload")
        shift = self._bits.length - self._pos - width
        self._pos += width
        return (self._bits.value >> shift) & ((1 << width) - 1)

    def done(self) -> bool:
        return self._pos == self._bits.length


def pack(*fields: tuple[int, int]) -> BitString:
    """Concatenate ``(value, width)`` fields."""
    w = BitWriter()
    for value, width in fields:
        w.uint(value, width)
    return w.getvalue()


def unpack(bits: BitString, *widths: int) -> tuple[int, ...]:
    r = BitReader(bits)
    out = tuple(r.uint(w) for w in widths)
    if not r.done():
        raise DomainError(f"{bits.length} payload bits, expected {sum(widths)}")
    return out


# -- subsets ----------------------------------------------------------------


def subset_rank(s: Sequence[int], n: int, d: int) -> int:
    """Colex rank of an ascending d-subset of [n]: ``sum C(s_i - 1, i)``."""
    s = tuple(s)
    if len(s) != d or any(not 1 <= v <= n for v in s) or any(a >= b for a, b in zip(s, s[1:])):
        raise DomainError(f"{s} is not an ascending {d}-subset of [{n}]")
    return sum(comb(v - 1, i) for i, v in enumerate(s, start=1))


def subset_unrank(rank: int, n: int, d: int) -> tuple[int, ...]:
    if not 0 <= rank < comb(n, d):
        raise DomainError(f"rank {rank} outside [0, C({n},{d}))")
    out = []
    v = n
    for i in range(d, 0, -1):
        # largest v with C(v - 1, i) <= rank
        while comb(v - 1, i) > rank:
            v -= 1
        out.append(v)
        rank -= comb(v - 1, i)
        v -= 1
    return tuple(reversed(out))


def subset_width(n: int, d: int) -> int:
    return bit_width(comb(n, d))


# -- orderings --------------------------------------------------------------


def ordering_rank(seq: Sequence[int], reference: Sequence[int]) -> int:
    """Lehmer-code rank of ``seq`` among the orderings of ``reference``."""
    ref = sorted(reference)
    if sorted(seq) != ref or len(set(ref)) != len(ref):
        raise DomainError(f"{tuple(seq)} is not a rearrangement of {tuple(reference)}")
    pool = list(ref)
    d = len(pool)
    rank = 0
    for k, v in enumerate(seq):
        idx = pool.index(v)
        rank += idx * factorial(d - 1 - k)
        pool.pop(idx)
    return rank


def ordering_unrank(rank: int, reference: Sequence[int]) -> tuple[int, ...]:
    pool = sorted(reference)
    d = len(pool)
    if not 0 <= rank < factorial(d):
        raise DomainError(f"rank {rank} outside [0, {d}!)")
    out = []
    for k in range(d):
        idx, rank = divmod(rank, factorial(d - 1 - k))
        out.append(pool.pop(idx))
    return tuple(out)


def ordering_width(d: int) -> int:
    return bit_width(factorial(d))
