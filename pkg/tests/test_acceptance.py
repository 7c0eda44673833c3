"""Acceptance criteria, each at its stated sample size and tolerance.

Every criterion prints a single ``[PASS]``/``[FAIL]`` line; the lines are
also repeated in the pytest terminal summary. Run standalone with
``python tests/test_acceptance.py``.
"""

import itertools
import math
import sys
from decimal import Decimal, getcontext
from functools import lru_cache

import pytest

from ranksync.harness import ExperimentConfig, run_experiment, verify_small_n
from ranksync.protocols import bound
from ranksync.protocols.transposition import moments, solve_swap

pytestmark = pytest.mark.slow

SEED = 1
N = 1024
DS = (2, 4, 8, 16)
LINES: list[str] = []


def report(k: int, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {k}: {detail}"
    LINES.append(line)
    print(line)
    assert ok, line


@lru_cache(maxsize=None)
def experiment(protocol: str, n: int, d: int | None, trials: int):
    return run_experiment(ExperimentConfig(protocol, n, d, trials, seed=SEED))


def test_criterion_01_exhaustive_exactness():
    rep = verify_small_n("exactness_all", 6)
    checked = sum(r.checked for r in rep.results)
    bad = [r for r in rep.results if not r.passed]
    detail = f"exactness_all n_max=6, {checked} sessions" + (f", first failure {bad[0]}" if bad else "")
    report(1, rep.passed, detail)


def test_criterion_02_randomized_exactness():
    runs = [(p, d) for p in ("p1", "p2", "insertions", "block") for d in DS]
    runs += [("translocation", None), ("transposition", None)]
    rates = {(p, d): experiment(p, N, d, 10_000).success_rate for p, d in runs}
    worst = min(rates.values())
    report(2, all(r == 1.0 for r in rates.values()), f"{len(runs)} configs x 10^4 trials at n={N}, min success rate {worst}")


def test_criterion_03_coset_structure():
    rep = verify_small_n("coset_partition", 8)
    results = [r for r in rep.results if r.n >= 4]
    report(3, all(r.passed for r in results), "n=4..8: n classes of size (n-1)! each")


def test_criterion_04_limited_feedback_forward():
    parts, ok = [], True
    for d in (2, 4, 8):
        mean = experiment("p2", N, d, 10_000).metric("ideal_excl_dev", "TtoR").mean
        b = bound("Thm1Forward", N, d)
        ok &= 0.3 * b <= mean <= b
        parts.append(f"d={d} {mean:.2f} in [{0.3 * b:.2f}, {b:.2f}]")
    report(4, ok, "; ".join(parts))


def test_criterion_05_limited_feedback_feedback():
    parts, ok = [], True
    for d in (2, 4, 8):
        mean = experiment("p2", N, d, 10_000).metric("ideal_excl_dev", "RtoT").mean
        b = bound("Thm1Feedback", N, d)
        ok &= mean <= b
        parts.append(f"d={d} {mean:.3f} <= {b:.0f}")
    report(5, ok, "; ".join(parts))


def test_criterion_06_block_forward():
    parts, ok = [], True
    width = math.ceil(math.log2(N))
    for d in (4, 8, 16):
        stats = experiment("block", N, d, 10_000)
        mean = stats.metric("ideal_excl_dev", "TtoR").mean
        b = bound("Thm2Forward", N, d)
        dev = stats.metric("deviation_wire", "RtoT")
        ok &= 0.5 * b <= mean <= 1.1 * b and dev.min == dev.max == width
        parts.append(f"d={d} {mean:.2f}/{b:.2f}={mean / b:.3f}, p* feedback {dev.min:g}..{dev.max:g} bits")
    report(6, ok, "; ".join(parts))


def test_criterion_07_translocation():
    n = 1023
    stats = experiment("translocation", n, None, 100_000)
    fwd = stats.metric("ideal_excl_dev", "TtoR").mean
    em = stats.metric("termination_round").mean
    q1 = stats.metric("round1_termination").mean
    qm1 = 0.5 + 2 / 1022 - 2 / 1022**2
    ok = fwd <= 6 * math.log2(n) and em <= 2 and abs(q1 - qm1) <= 0.01
    report(7, ok, f"forward {fwd:.2f} <= {6 * math.log2(n):.2f}; E[M]={em:.4f} <= 2; Q1={q1:.4f} vs {qm1:.5f} (+-0.01)")


def test_criterion_08_transposition_oneway():
    stats = experiment("transposition", N, None, 10_000)
    fwd, fb = stats.metric("wire", "TtoR"), stats.metric("wire", "RtoT")
    expected = 12 * math.ceil(math.log2(N + 1))
    ok = fwd.min == fwd.max == expected and fb.max == 0
    checked = 0
    for n in range(2, 9):
        pairs = list(itertools.combinations(range(n), 2))
        for p in itertools.permutations(range(1, n + 1)):
            mx = moments(p)
            for a, b in pairs:
                y = list(p)
                y[a], y[b] = y[b], y[a]
                # oracle: a transposition changes exactly the two swapped positions
                diff = tuple(k + 1 for k in range(n) if p[k] != y[k])
                ok &= solve_swap(mx, moments(y)) == diff
                checked += 1
    report(8, ok, f"wire {fwd.min:g}..{fwd.max:g} == {expected}, feedback max {fb.max:g}; oracle agrees on {checked} (sigma, tau) pairs n<=8")


def test_criterion_09_anchor_baseline():
    n = 100
    mean = experiment("anchor-baseline", n, None, 100_000).metric("rounds").mean
    target = (n + 1) / 3
    report(9, abs(mean - target) <= 0.02 * target, f"mean rounds {mean:.3f} vs {target:.3f} (+-2%)")


def test_criterion_10_genie_bounds():
    getcontext().prec = 40
    two = Decimal(2).ln()

    def lg(v):
        return Decimal(v).ln() / two

    cases = [
        ("GenieDeletions", 2, lg(240)),
        ("GenieBlock", 2, lg(15) + 1),
        ("GenieTranslocation", None, 2 * lg(15)),
        ("GenieTransposition", None, lg(120)),
    ]
    parts, ok = [], True
    for kind, d, ref in cases:
        got = bound(kind, 16, d)
        ok &= f"{got:.10g}" == f"{float(ref):.10g}"
        parts.append(f"{kind}={got:.10g}")
    report(10, ok, ", ".join(parts))


def test_criterion_11_translocation_detection():
    rep = verify_small_n("translocation_detection", 7)
    checked = sum(r.checked for r in rep.results)
    report(11, rep.passed, f"{checked} (sigma, translocation) pairs up to n=7, none syndrome-preserving")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
