"""Closed-form reference values: genie-aided limits and expected-cost bounds (log base 2)."""

from __future__ import annotations

import enum
from math import comb, factorial, log2

from ..core import DomainError


class BoundKind(enum.Enum):
    GenieDeletions = "GenieDeletions"
    GenieBlock = "GenieBlock"
    GenieTranslocation = "GenieTranslocation"
    GenieTransposition = "GenieTransposition"
    Thm1Forward = "Thm1Forward"
    Thm1Feedback = "Thm1Feedback"
    Thm2Forward = "Thm2Forward"
    Thm2Feedback = "Thm2Feedback"
    Thm3Forward = "Thm3Forward"
    Thm3Feedback = "Thm3Feedback"
    AnchorTranspositionRounds = "AnchorTranspositionRounds"
    QM1 = "QM1"


NEEDS_D = {
    BoundKind.GenieDeletions,
    BoundKind.GenieBlock,
    BoundKind.Thm1Forward,
    BoundKind.Thm1Feedback,
    BoundKind.Thm2Forward,
    BoundKind.Thm2Feedback,
}


def _check(kind: BoundKind, n: int, d: int | None) -> None:
    if n < 2:
        raise DomainError(f"{kind.value} needs n >= 2, got {n}")
    if kind in NEEDS_D and (d is None or not 1 <= d <= n):
        raise DomainError(f"{kind.value} needs 1 <= d <= n, got d={d}")


def bound(kind: BoundKind | str, n: int, d: int | None = None) -> float:
    """Expected value (or upper bound on it) for ``kind`` at length n, d errors."""
    kind = BoundKind(kind)
    _check(kind, n, d)
    ln = log2(n)
    if kind is BoundKind.GenieDeletions:
        return log2(comb(n, d) * factorial(d))
    if kind is BoundKind.GenieBlock:
        return log2(n - d + 1) + log2(factorial(d))
    if kind is BoundKind.GenieTranslocation:
        return 2 * log2(n - 1)
    if kind is BoundKind.GenieTransposition:
        return log2(comb(n, 2))
    if kind is BoundKind.Thm1Forward:
        return (5 * d - 2) * ln - 2 * d * log2(d) - d
    if kind is BoundKind.Thm1Feedback:
        return 6.0 * (d - 1)
    if kind is BoundKind.Thm2Forward:
        ld = log2(d)
        return 3 * ld * ln + 6 * ln + log2(factorial(d)) - 2 * ld / d
    if kind is BoundKind.Thm2Feedback:
        return (2 * d - 1) / d * log2(d)
    if kind is BoundKind.Thm3Forward:
        return 6 * ln
    if kind is BoundKind.Thm3Feedback:
        return 6.0
    if kind is BoundKind.AnchorTranspositionRounds:
        return (n + 1) / 3
    if kind is BoundKind.QM1:
        if n % 2:
            return 0.5 + 2 / (n - 1) - 2 / (n - 1) ** 2
        return 0.5 + 2 / (n - 1) - 5 / (2 * (n - 1) ** 2)
    raise DomainError(f"no formula for {kind}")


def bound_variance(kind: BoundKind | str, n: int, d: int | None = None) -> float | None:
    """Variance (or its leading-order bound) for the kinds that come with one."""
    kind = BoundKind(kind)
    _check(kind, n, d)
    ln = log2(n)
    if kind is BoundKind.Thm2Forward:
        return 9 * (d - 1) / d**2 * log2(d) ** 2 * ln**2
    if kind is BoundKind.Thm2Feedback:
        return (d - 1) / d**2 * log2(d) ** 2
    if kind is BoundKind.Thm3Forward:
        return 8 * ln**2
    if kind is BoundKind.Thm3Feedback:
        return 18.0
    return None


def thm2_forward_case_average(n: int, d: int) -> float:
    """Block-protocol forward mean from averaging its two termination cases.

    Charges ``6(log n + log d!)`` to the constant-p early exit. The closed
    form in :func:`bound` does not follow from this average, so both are
    reported.
    """
    _check(BoundKind.Thm2Forward, n, d)
    ln, ld, lf = log2(n), log2(d), log2(factorial(d))
    return 6 * (ln + lf) / d + (d - 1) / d * (6 * ln + 3 * ld * ln + lf)


def interactive_total(n: int, d: int) -> float:
    """Two-way total of the equal-throughput protocol: log C(n,d) + log C(n,d) d!."""
    return 2 * log2(comb(n, d)) + log2(factorial(d))


def transposition_oneway_total(n: int) -> float:
    return 12 * log2(n)


def translocation_round_one_probability(n: int, k: int | None = None) -> float:
    """Probability that the symbol at position k is displaced by a uniform translocation."""
    if k is None:
        k = (n + 1) // 2
    return 1 - ((k - 2) ** 2 + (n - k - 1) ** 2) / (n - 1) ** 2


def limited_feedback_expected_anchors(n: int, d: int) -> float:
    """Exact mean number of anchors the limited-feedback protocol sends.

    Dynamic program over (substring length, pending deletions) with deletion
    patterns uniform; independent of the protocol implementation.
    """
    if not 1 <= d <= n:
        raise DomainError(f"need 1 <= d <= n, got d={d}, n={n}")
    table: dict[tuple[int, int], float] = {}

    def expect(length: int, k: int) -> float:
        if k <= 1:
            return 0.0
        key = (length, k)
        if key not in table:
            ci = (length + 1) // 2
            left, right = ci - 1, length - ci
            total = comb(length, k)
            value = 1.0 + k / length * expect(length - 1, k - 1)
            for j in range(max(0, k - right), min(k, left) + 1):
                p = comb(left, j) * comb(right, k - j) / total
                value += p * (expect(left, j) + expect(right, k - j))
            table[key] = value
        return table[key]

    # fill bottom-up in length to keep recursion shallow
    for length in range(1, n + 1):
        for k in range(2, min(d, length) + 1):
            expect(length, k)
    return expect(n, d)


def translocation_expected_rounds(n: int, base_length: int = 3) -> float:
    """Exact mean number of rounds of the halving translocation protocol.

    A round ends the protocol unless the central symbol stays put, which
    happens exactly when the move lies wholly inside one half; conditioned on
    that, the move is uniform over the (m - 1)^2 distinct ones of that half.
    """
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    memo: dict[int, float] = {}
    for length in range(1, n + 1):
        if length <= base_length:
            memo[length] = 1.0
            continue
        c = (length + 1) // 2
        left, right = c - 1, length - c
        stay = (left - 1) ** 2 * memo[left] + (right - 1) ** 2 * memo[right]
        memo[length] = 1.0 + stay / (length - 1) ** 2
    return memo[n]
