"""One-way synchronization from a single transposition, plus the anchoring baseline.

The transmitter sends three position-weighted moment sums
``sum(i**k * x_i)`` for k = 1, 2, 3. A swap of positions a < b changes them by
``D * (a - b) * {1, a + b, a*a + a*b + b*b}`` with ``D = x_b - x_a``, so two
exact divisions and an integer quadratic give back (a, b).
"""

from __future__ import annotations

from math import isqrt, log2

import numpy as np

from ..codec import bit_width
from ..core import Permutation, Transposition, apply_error
from .common import ProtocolError, SyncOutcome, forward, read, receive, run

MOMENT_POWERS = (1, 2, 3)
# field width multipliers: sum(i^k * x_i) < (n + 1) ** (k + 2)
FIELD_MULTIPLIERS = (3, 4, 5)


def moments(values) -> tuple[int, int, int]:
    return tuple(sum(i**k * v for i, v in enumerate(values, start=1)) for k in MOMENT_POWERS)


def moment_widths(n: int) -> tuple[int, ...]:
    w = bit_width(n + 1)
    return tuple(m * w for m in FIELD_MULTIPLIERS)


def transposition_transmitter(x: Permutation, d: int = 1):
    n = x.n
    fields = list(zip(moments(x.values), moment_widths(n)))
    yield forward("MOMENTS", fields, sum(FIELD_MULTIPLIERS) * log2(n))


def solve_swap(dx, dy) -> tuple[int, int] | None:
    """Positions (a, b) whose swap turns moments ``dx`` into ``dy``; None if equal."""
    d1, d2, d3 = (b - a for a, b in zip(dx, dy))
    if d1 == d2 == d3 == 0:
        return None
    if d1 == 0 or d2 % d1 or d3 % d1:
        raise ProtocolError(f"moment differences {(d1, d2, d3)} do not come from one swap")
    total = d2 // d1  # a + b
    q = d3 // d1  # a^2 + ab + b^2
    prod = total * total - q  # ab
    disc = total * total - 4 * prod
    root = isqrt(disc) if disc >= 0 else -1
    if root < 0 or root * root != disc or (total - root) % 2:
        raise ProtocolError(f"a+b={total}, ab={prod} has no integer solution")
    a, b = (total - root) // 2, (total + root) // 2
    if a == b:
        raise ProtocolError("degenerate swap")
    return a, b


def transposition_receiver(y: Permutation, d: int = 1):
    n = y.n
    dx = read((yield from receive()), "MOMENTS", *moment_widths(n))
    swap = solve_swap(dx, moments(y.values))
    out = list(y.values)
    if swap is not None:
        a, b = swap
        if not 1 <= a < b <= n:
            raise ProtocolError(f"solved positions ({a}, {b}) outside [1, {n}]")
        out[a - 1], out[b - 1] = out[b - 1], out[a - 1]
    return out, {"swap": swap}


def sync_transposition_oneway(x: Permutation, y: Permutation) -> SyncOutcome:
    if x.n != y.n or len(x) != x.n or sorted(x.values) != sorted(y.values):
        raise ProtocolError(f"{y} is not a rearrangement of {x}")
    return run(transposition_transmitter(x), transposition_receiver(y), x)


def anchor_transposition_rounds(
    x: Permutation,
    tau: Transposition,
    rng: np.random.Generator | None = None,
    probe_order=None,
) -> int:
    """Rounds of naive send-and-check anchoring until a swapped position is hit.

    Probes follow ``probe_order`` (1-based positions) or a uniformly random
    order drawn from ``rng``.
    """
    y = apply_error(x, tau)
    if probe_order is None:
        if rng is None:
            raise ValueError("need either rng or probe_order")
        probe_order = (rng.permutation(x.n) + 1).tolist()
    for k, p in enumerate(probe_order, start=1):
        if x[p - 1] != y[p - 1]:
            return k
    raise ProtocolError("probe order never reached a swapped position")
