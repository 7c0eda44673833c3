"""Permutations, partial permutations, corruption operators and VT syndromes.

All positions and values are 1-based. A partial permutation always carries
the size ``n`` of its universe explicitly.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from math import comb
from typing import Union

import numpy as np


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class DecodeError(ValueError):
    """No single-symbol insertion reproduces the requested syndrome."""


class UniquenessViolation(RuntimeError):
    """More than one insertion position reproduces the requested syndrome."""


@dataclass(frozen=True, eq=False)
class PartialPermutation(Sequence):
    values: tuple[int, ...]
    n: int

    def __post_init__(self) -> None:
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if self.n < 0:
            raise DomainError(f"universe size must be non-negative, got {self.n}")
        if len(vals) > self.n:
            raise DomainError(f"{len(vals)} values do not fit in [1, {self.n}]")
        if len(set(vals)) != len(vals):
            raise DomainError(f"values are not distinct: {vals}")
        if vals and (min(vals) < 1 or max(vals) > self.n):
            bad = next(v for v in vals if not 1 <= v <= self.n)
            raise DomainError(f"value {bad} outside [1, {self.n}]")

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    def __str__(self) -> str:
        return format_perm(self.values)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PartialPermutation):
            return NotImplemented
        return self.n == other.n and self.values == other.values

    def __hash__(self) -> int:
        return hash((self.values, self.n))

    @property
    def is_full(self) -> bool:
        return len(self.values) == self.n


@dataclass(frozen=True, eq=False, init=False)
class Permutation(PartialPermutation):
    def __init__(self, values: Iterable[int], n: int | None = None) -> None:
        vals = tuple(int(v) for v in values)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "n", len(vals) if n is None else n)
        self.__post_init__()

    def __post_init__(self) -> None:
        super().__post_init__()
        if len(self.values) != self.n:
            raise DomainError(f"permutation of [{self.n}] needs {self.n} values, got {len(self.values)}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(1, n + 1))


def format_perm(values: Iterable[int]) -> str:
    """Canonical text form, e.g. ``(2,3,7,5,1)``."""
    return "(" + ",".join(str(v) for v in values) + ")"


def parse_perm(text: str, n: int | None = None) -> PartialPermutation:
    body = text.strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise DomainError(f"not a parenthesised permutation: {text!r}")
    body = body[1:-1].strip()
    vals = tuple(int(tok) for tok in body.split(",")) if body else ()
    if n is None:
        n = max(vals, default=0)
    if len(vals) == n:
        return Permutation(vals, n)
    return PartialPermutation(vals, n)


# -- error patterns ---------------------------------------------------------


@dataclass(frozen=True)
class Deletions:
    positions: tuple[int, ...]

    def __post_init__(self) -> None:
        pos = tuple(sorted(int(p) for p in self.positions))
        if len(set(pos)) != len(pos):
            raise DomainError(f"repeated deletion position in {pos}")
        object.__setattr__(self, "positions", pos)

    @property
    def d(self) -> int:
        return len(self.positions)


@dataclass(frozen=True)
class BlockDeletion:
    start: int
    d: int


@dataclass(frozen=True)
class Translocation:
    """Move the symbol at position ``i`` to position ``j``."""

    i: int
    j: int


@dataclass(frozen=True)
class Transposition:
    a: int
    b: int

    def __post_init__(self) -> None:
        if self.a >= self.b:
            raise DomainError(f"transposition needs a < b, got ({self.a}, {self.b})")


ErrorPattern = Union[Deletions, BlockDeletion, Translocation, Transposition]

ERROR_MODELS = ("deletions", "block", "translocation", "transposition")


def validate_pattern(e: ErrorPattern, n: int) -> None:
    if isinstance(e, Deletions):
        if any(not 1 <= p <= n for p in e.positions):
            raise DomainError(f"deletion positions {e.positions} outside [1, {n}]")
    elif isinstance(e, BlockDeletion):
        if e.d < 1 or not 1 <= e.start <= n - e.d + 1:
            raise DomainError(f"block of {e.d} at {e.start} does not fit in length {n}")
    elif isinstance(e, Translocation):
        if not (1 <= e.i <= n and 1 <= e.j <= n):
            raise DomainError(f"translocation ({e.i}, {e.j}) outside [1, {n}]")
        if e.i == e.j:
            raise DomainError("identity translocation")
    elif isinstance(e, Transposition):
        if not (1 <= e.a <= n and 1 <= e.b <= n):
            raise DomainError(f"transposition ({e.a}, {e.b}) outside [1, {n}]")
    else:
        raise DomainError(f"unknown error pattern {e!r}")


# -- basic operations -------------------------------------------------------


def project(sigma: PartialPermutation, keep: Iterable[int]) -> PartialPermutation:
    keep = set(keep)
    bad = [v for v in keep if not 1 <= v <= sigma.n]
    if bad:
        raise DomainError(f"values {sorted(bad)} outside [1, {sigma.n}]")
    return PartialPermutation(tuple(v for v in sigma if v in keep), sigma.n)


def inversion_bits(seq: Sequence[int]) -> list[int]:
    """Descent indicators of ``seq`` as a plain list (no validation)."""
    return [1 if seq[k] > seq[k + 1] else 0 for k in range(len(seq) - 1)]


def inversion_vector(p: Sequence[int]) -> tuple[int, ...]:
    """Binary descent vector: bit ``i`` is 1 iff ``p[i] > p[i+1]``.

    >>> inversion_vector((2, 3, 7, 5, 1))
    (0, 0, 1, 1)
    """
    if len(p) == 0:
        raise DomainError("inversion vector of an empty sequence")
    return tuple(inversion_bits(p))


def vt_syndrome(v: Sequence[int], modulus: int) -> int:
    """Varshamov-Tenengolts syndrome ``sum(i * v_i) mod modulus`` (1-based i)."""
    if modulus <= 0:
        raise DomainError(f"modulus must be positive, got {modulus}")
    return sum(i * b for i, b in enumerate(v, start=1)) % modulus


def perm_syndrome(seq: Sequence[int]) -> int:
    """VT syndrome of the inversion vector of ``seq``, modulo ``len(seq)``."""
    L = len(seq)
    if L == 0:
        raise DomainError("syndrome of an empty sequence")
    s = 0
    for k in range(L - 1):
        if seq[k] > seq[k + 1]:
            s += k + 1
    return s % L


def checksum(p: Iterable[int]) -> int:
    return sum(p)


def missing_symbols(p: PartialPermutation) -> tuple[int, ...]:
    present = set(p.values)
    return tuple(v for v in range(1, p.n + 1) if v not in present)


def apply_error(sigma: PartialPermutation, e: ErrorPattern) -> PartialPermutation:
    n = len(sigma)
    validate_pattern(e, n)
    vals = list(sigma.values)
    if isinstance(e, Deletions):
        drop = set(e.positions)
        return PartialPermutation(tuple(v for k, v in enumerate(vals, 1) if k not in drop), sigma.n)
    if isinstance(e, BlockDeletion):
        del vals[e.start - 1 : e.start - 1 + e.d]
        return PartialPermutation(tuple(vals), sigma.n)
    if isinstance(e, Translocation):
        moved = vals.pop(e.i - 1)
        vals.insert(e.j - 1, moved)
    else:
        vals[e.a - 1], vals[e.b - 1] = vals[e.b - 1], vals[e.a - 1]
    if len(vals) == sigma.n:
        return Permutation(vals, sigma.n)
    return PartialPermutation(tuple(vals), sigma.n)


def translocation_perm(i: int, j: int, n: int) -> tuple[int, ...]:
    """The translocation permutation phi(i, j) written as its image sequence."""
    rest = [k for k in range(1, n + 1) if k != i]
    rest.insert(j - 1, i)
    return tuple(rest)


def compose(sigma: Sequence[int], phi: Sequence[int]) -> tuple[int, ...]:
    """Right composition ``(sigma phi)_k = sigma_{phi_k}``."""
    return tuple(sigma[k - 1] for k in phi)


# -- single-deletion decoding ----------------------------------------------


def insertion_syndromes(seq: Sequence[int], b: int) -> list[int]:
    """Syndromes (mod ``len(seq)+1``) of ``seq`` with ``b`` inserted before index k.

    Entry k covers the insertion that leaves ``b`` at 0-based index k, for
    k = 0..len(seq). Runs in linear time.
    """
    m = len(seq)
    mod = m + 1
    v = inversion_bits(seq)
    # prefix[k] = sum_{i<k} i*v_i ; suffix[k] = sum_{i>=k+1} (i+1)*v_i  (1-based i)
    prefix = [0] * (m + 1)
    for k in range(1, m + 1):
        prefix[k] = prefix[k - 1] + ((k - 1) * v[k - 2] if k >= 2 else 0)
    suffix = [0] * (m + 2)
    for k in range(m - 1, 0, -1):
        suffix[k] = suffix[k + 1] + (k + 1) * v[k - 1]
    out = []
    for k in range(m + 1):
        s = prefix[k] + suffix[k + 1]
        if k >= 1 and seq[k - 1] > b:
            s += k
        if k < m and b > seq[k]:
            s += k + 1
        out.append(s % mod)
    return out


def reinsert_index(seq: Sequence[int], b: int, target_syndrome: int) -> int:
    """0-based index at which ``b`` must be inserted to hit ``target_syndrome``."""
    hits = [k for k, s in enumerate(insertion_syndromes(seq, b)) if s == target_syndrome]
    if not hits:
        raise DecodeError(f"no insertion of {b} into {format_perm(seq)} has syndrome {target_syndrome}")
    if len(hits) > 1:
        raise UniquenessViolation(
            f"insertions of {b} into {format_perm(seq)} at {hits} all have syndrome {target_syndrome}"
        )
    return hits[0]


def reinsert_by_vt(p: PartialPermutation, b: int, target_syndrome: int) -> PartialPermutation:
    """Insert ``b`` into ``p`` at the unique position matching ``target_syndrome``."""
    if not 1 <= b <= p.n:
        raise DomainError(f"symbol {b} outside [1, {p.n}]")
    if b in p.values:
        raise DomainError(f"symbol {b} already present")
    if not 0 <= target_syndrome <= len(p):
        raise DomainError(f"syndrome {target_syndrome} outside [0, {len(p)}]")
    k = reinsert_index(p.values, b, target_syndrome)
    vals = p.values[:k] + (b,) + p.values[k:]
    if len(vals) == p.n:
        return Permutation(vals, p.n)
    return PartialPermutation(vals, p.n)


# -- deinterleaving ---------------------------------------------------------


def deinterleave(p: Sequence[int], d: int) -> list[tuple[int, ...]]:
    if not 1 <= d <= max(len(p), 1):
        raise DomainError(f"cannot deinterleave length {len(p)} into {d} parts")
    vals = tuple(p)
    return [vals[k::d] for k in range(d)]


def interleave(parts: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Round-robin merge; inverse of :func:`deinterleave`."""
    out = []
    longest = max((len(s) for s in parts), default=0)
    for r in range(longest):
        for s in parts:
            if r < len(s):
                out.append(s[r])
    return tuple(out)


# -- sampling ---------------------------------------------------------------


def sample_permutation(n: int, rng: np.random.Generator) -> Permutation:
    return Permutation((rng.permutation(n) + 1).tolist(), n)


def translocation_count(n: int) -> int:
    """Number of distinct non-identity translocation rearrangements of length n."""
    return (n - 1) ** 2


def sample_error(model: str, n: int, d: int, rng: np.random.Generator) -> ErrorPattern:
    """Draw a uniformly random error pattern of the given model."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    if model == "deletions":
        if not 1 <= d <= n:
            raise DomainError(f"d={d} deletions invalid for n={n}")
        picks = rng.choice(n, size=d, replace=False) + 1
        return Deletions(tuple(int(p) for p in picks))
    if model == "block":
        if not 1 <= d <= n:
            raise DomainError(f"block span d={d} invalid for n={n}")
        return BlockDeletion(int(rng.integers(1, n - d + 2)), d)
    if model == "translocation":
        if n < 2:
            raise DomainError("translocations need n >= 2")
        # (i, i+1) and (i+1, i) give the same rearrangement; keep only the former.
        while True:
            i, j = (int(v) for v in rng.integers(1, n + 1, size=2))
            if j != i and j != i - 1:
                return Translocation(i, j)
    if model == "transposition":
        if n < 2:
            raise DomainError("transpositions need n >= 2")
        a, b = sorted(int(v) for v in rng.choice(n, size=2, replace=False) + 1)
        return Transposition(a, b)
    raise DomainError(f"unknown error model {model!r}")


def pattern_count(model: str, n: int, d: int = 0) -> int:
    if model == "deletions":
        return comb(n, d)
    if model == "block":
        return n - d + 1
    if model == "translocation":
        return translocation_count(n)
    if model == "transposition":
        return comb(n, 2)
    raise DomainError(f"unknown error model {model!r}")


def all_patterns(model: str, n: int, d: int = 0) -> Iterable[ErrorPattern]:
    """Every pattern of a model, with translocations deduplicated as in sampling."""
    from itertools import combinations

    if model == "deletions":
        for pos in combinations(range(1, n + 1), d):
            yield Deletions(pos)
    elif model == "block":
        for s in range(1, n - d + 2):
            yield BlockDeletion(s, d)
    elif model == "translocation":
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if j != i and j != i - 1:
                    yield Translocation(i, j)
    elif model == "transposition":
        for a, b in combinations(range(1, n + 1), 2):
            yield Transposition(a, b)
    else:
        raise DomainError(f"unknown error model {model!r}")
