import itertools
import math
from math import comb, factorial, log2

import numpy as np
import pytest

from ranksync.codec import bit_width, subset_unrank, unpack
from ranksync.core import (
    BlockDeletion,
    Deletions,
    PartialPermutation,
    Permutation,
    Transposition,
    all_patterns,
    apply_error,
    sample_permutation,
)
from ranksync.protocols import (
    ProtocolError,
    anchor_transposition_rounds,
    sync_block_deletion,
    sync_deletions_interactive,
    sync_deletions_limited_feedback,
    sync_insertions_oneway,
    sync_translocation,
    sync_transposition_oneway,
)
from ranksync.protocols.block import first_deleted_position, residue_class
from ranksync.protocols.transposition import moments, solve_swap

X_EX = Permutation((1, 14, 12, 2, 3, 4, 9, 10, 11, 13, 5, 8, 7, 6, 15))
Y_EX = apply_error(X_EX, BlockDeletion(5, 3))


def kinds(outcome):
    return [(m.direction.value, m.kind) for m in outcome.transcript.messages]


def sampled(n, count, seed):
    rng = np.random.default_rng([seed, n])
    return [sample_permutation(n, rng) for _ in range(count)]


# -- interactive deletions ------------------------------------------------------


def test_interactive_single_forced_pattern():
    x = Permutation((2, 1, 3, 4))
    out = sync_deletions_interactive(x, PartialPermutation((2, 1, 3), 4), 1)
    assert out.success and out.restored == x
    subset, position, ordering = out.transcript.messages
    assert subset.kind == "SUBSET" and subset_unrank(unpack(subset.payload, subset.wire_bits)[0], 4, 1) == (4,)
    assert position.kind == "POSITION" and subset_unrank(unpack(position.payload, position.wire_bits)[0], 4, 1) == (4,)
    assert ordering.kind == "ORDERING" and ordering.wire_bits == 0


def test_interactive_block_example_forward_cost():
    out = sync_deletions_interactive(X_EX, Y_EX, 3)
    assert out.success
    fwd = out.transcript.totals().TtoR.ideal
    assert fwd == pytest.approx(log2(comb(15, 3) * factorial(3)))
    assert fwd == pytest.approx(11.41, abs=0.01)
    assert out.transcript.totals().RtoT.ideal == pytest.approx(log2(comb(15, 3)))


def test_interactive_exhaustive_n6():
    for p in itertools.permutations(range(1, 7)):
        x = Permutation(p)
        for e in all_patterns("deletions", 6, 2):
            assert sync_deletions_interactive(x, apply_error(x, e), 2).success


def test_deletion_contract_violation():
    x = Permutation((1, 2, 3, 4))
    with pytest.raises(ProtocolError):
        sync_deletions_interactive(x, PartialPermutation((2, 1), 4), 2)
    with pytest.raises(ProtocolError):
        sync_deletions_limited_feedback(x, PartialPermutation((1, 2), 4), 1)


# -- limited feedback -----------------------------------------------------------


def test_limited_feedback_single_deletion_trace():
    x = Permutation((3, 1, 5, 7, 2, 6, 4))
    y = PartialPermutation((3, 5, 7, 2, 6, 4), 7)
    out = sync_deletions_limited_feedback(x, y, 1)
    assert out.restored == x
    cs, vt = out.transcript.messages
    assert cs.kind == "CHECKSUM" and cs.payload.value == 28
    assert vt.kind == "VT_SYNDROME" and vt.payload.value == 4
    assert out.transcript.totals().RtoT.wire == 0


def test_limited_feedback_n8_sweep():
    for x in sampled(8, 1000, 1)[:200]:
        for d in (1, 2, 3):
            for e in all_patterns("deletions", 8, d):
                out = sync_deletions_limited_feedback(x, apply_error(x, e), d)
                assert out.success, (x, e)
                assert out.transcript.totals().RtoT.ideal_excl_dev == 3 * out.info.get("anchors", 0)


def test_limited_feedback_feedback_is_three_ideal_bits_per_message():
    rng = np.random.default_rng(8)
    x = sample_permutation(300, rng)
    y = apply_error(x, Deletions(tuple(int(v) for v in rng.choice(300, 7, replace=False) + 1)))
    out = sync_deletions_limited_feedback(x, y, 7)
    fb = [m for m in out.transcript.messages if m.direction.value == "RtoT"]
    assert fb and all(m.ideal_bits == 3.0 and m.wire_bits == 4 for m in fb)
    anchors = sum(1 for m in out.transcript.messages if m.kind == "ANCHOR")
    assert anchors == len(fb) == out.info["anchors"]


def test_limited_feedback_adjacent_and_edge_deletions():
    x = Permutation.identity(20)
    for e in (Deletions((1, 2)), Deletions((19, 20)), Deletions((10, 11)), Deletions((1, 20)), Deletions(tuple(range(1, 21)))):
        d = len(e.positions)
        assert sync_deletions_limited_feedback(x, apply_error(x, e), d).success


# -- insertions -------------------------------------------------------------------


def test_insertions_examples():
    out = sync_insertions_oneway(PartialPermutation((2, 1, 3), 4), Permutation((2, 1, 4, 3)), 1)
    assert out.success and out.restored.values == (2, 1, 3)
    assert kinds(out) == [("TtoR", "SUBSET")]
    for y in itertools.permutations((1, 2, 3)):
        out = sync_insertions_oneway(PartialPermutation((), 3), Permutation(y), 3)
        assert out.success and out.restored.values == ()


def test_insertions_random_n6():
    rng = np.random.default_rng(6)
    for _ in range(300):
        y = sample_permutation(6, rng)
        keep = sorted(rng.choice(6, 4, replace=False))
        x = PartialPermutation(tuple(y.values[k] for k in keep), 6)
        assert sync_insertions_oneway(x, y, 2).success
    with pytest.raises(ProtocolError):
        sync_insertions_oneway(PartialPermutation((3, 1), 3), Permutation((1, 2, 3)), 1)


# -- block deletion -----------------------------------------------------------------


def test_block_worked_example():
    out = sync_block_deletion(X_EX, Y_EX, 3)
    assert out.success
    assert out.info["p_sequence"] == {1: 3, 2: 2, 3: 2}
    assert out.info["boundary"] == 2 and out.info["start"] == 5
    assert X_EX.values[4:7] == (3, 4, 9)
    dev = [m for m in out.transcript.messages if m.deviation]
    assert [(m.kind, m.direction.value, m.wire_bits) for m in dev] == [("POSITION", "RtoT", 4)]


def _p_oracle(x, y, d):
    """p_k by brute force: the position in subsequence k of its lost symbol."""
    ps = []
    for k in range(1, d + 1):
        xs, ys = residue_class(x.values, k, d), residue_class(y.values, k, d)
        (lost,) = set(xs) - set(ys)
        ps.append(xs.index(lost) + 1)
    return ps


def test_block_start_formula_against_oracle():
    for d in (2, 3, 4):
        for x in sampled(12, 5, d):
            for e in all_patterns("block", 12, d):
                ps = _p_oracle(x, apply_error(x, e), d)
                drop = next((k + 1 for k in range(d) if ps[k] != ps[0]), 1)
                assert first_deleted_position(ps[0], drop, d) == e.start
                if e.start == 1:
                    assert len(set(ps)) == 1


def test_block_exhaustive_starts_n12():
    for d in (1, 2, 3, 4):
        for x in sampled(12, 20, 10 + d):
            for e in all_patterns("block", 12, d):
                out = sync_block_deletion(x, apply_error(x, e), d)
                assert out.success, (x, e)
                if d > 1:
                    assert out.info["start"] == e.start


def test_block_whole_string_and_contract():
    x = Permutation((4, 2, 1, 3))
    assert sync_block_deletion(x, PartialPermutation((), 4), 4).success
    with pytest.raises(ProtocolError):
        sync_block_deletion(x, PartialPermutation((4, 1), 4), 2)


# -- translocation ------------------------------------------------------------------


def test_translocation_adjacent_swap():
    x = Permutation((6, 2, 9, 1, 4, 8, 3, 7, 5))
    for k in range(1, 9):
        v = list(x.values)
        v[k - 1], v[k] = v[k], v[k - 1]
        assert sync_translocation(x, Permutation(v)).success


@pytest.mark.parametrize("n", range(2, 10))
def test_translocation_sweep(n):
    perms = list(map(Permutation, itertools.permutations(range(1, n + 1)))) if n <= 5 else sampled(n, 200, 3)
    for x in perms:
        for e in all_patterns("translocation", n):
            out = sync_translocation(x, apply_error(x, e))
            assert out.success, (x, e)
            assert out.info["termination_round"] == len(out.info["lengths"])


@pytest.mark.parametrize("n", [7, 8, 15, 16])
def test_translocation_shift_domain(n):
    # an anchor is displaced by more than one only when it is the moved symbol
    for x in sampled(n, 30, 4):
        for e in all_patterns("translocation", n):
            info = sync_translocation(x, apply_error(x, e)).info
            for shift, anchor in zip(info["shifts"], info["anchors"]):
                assert shift in (-1, 0, 1) or anchor == x[e.i - 1]


@pytest.mark.parametrize("k", [3, 4, 5, 6, 7])
def test_translocation_halving_lengths(k):
    n = 2**k - 1
    x = sampled(n, 1, k)[0]
    for e in all_patterns("translocation", n):
        lengths = sync_translocation(x, apply_error(x, e)).info["lengths"]
        for r, length in enumerate(lengths, start=1):
            assert length == (n + 1 - 2 ** (r - 1)) // 2 ** (r - 1)
            assert (n + 1 - 2 ** (r - 1)) % 2 ** (r - 1) == 0


def test_translocation_feedback_codes_are_three_bits():
    x = sampled(101, 1, 0)[0]
    for e in list(all_patterns("translocation", 101))[::97]:
        out = sync_translocation(x, apply_error(x, e))
        assert all(m.wire_bits == 3 for m in out.transcript.messages if m.direction.value == "RtoT")


def test_translocation_rejects_identity():
    x = Permutation.identity(5)
    with pytest.raises(ProtocolError):
        sync_translocation(x, x)


# -- transposition --------------------------------------------------------------------


def test_transposition_identity_is_noop():
    x = Permutation((3, 1, 4, 2))
    out = sync_transposition_oneway(x, x)
    assert out.success and out.info["swap"] is None
    assert out.transcript.totals().TtoR.wire == 36


def test_transposition_exhaustive_oracle_small():
    for n in range(2, 7):
        for p in itertools.permutations(range(1, n + 1)):
            x = Permutation(p)
            for e in all_patterns("transposition", n):
                out = sync_transposition_oneway(x, apply_error(x, e))
                assert out.success and out.info["swap"] == (e.a, e.b)
                assert out.transcript.totals().TtoR.wire == 12 * bit_width(n + 1)


@pytest.mark.parametrize("n", [2, 3, 4, 7, 8, 15, 16, 1023, 1024])
def test_transposition_wire_size(n):
    x = sampled(n, 1, 1)[0]
    out = sync_transposition_oneway(x, apply_error(x, Transposition(1, n)))
    expected = 12 * math.ceil(math.log2(n + 1))
    assert out.transcript.totals().TtoR.wire == expected
    assert out.transcript.totals().RtoT.wire == 0


def test_transposition_sampled_n8_brute_force():
    for x in sampled(8, 500, 8):
        mx = moments(x.values)
        for e in all_patterns("transposition", 8):
            y = apply_error(x, e)
            brute = [(a, b) for a, b in itertools.combinations(range(1, 9), 2) if apply_error(y, Transposition(a, b)) == x]
            assert brute == [solve_swap(mx, moments(y.values))]


def test_solve_swap_rejects_non_transposition():
    x = (1, 2, 3, 4, 5)
    with pytest.raises(ProtocolError):
        solve_swap(moments(x), moments((2, 3, 1, 4, 5)))


# -- anchoring baseline -----------------------------------------------------------------


def test_anchor_rounds_n2_always_one():
    rng = np.random.default_rng(0)
    x = Permutation((2, 1))
    assert all(anchor_transposition_rounds(x, Transposition(1, 2), rng) == 1 for _ in range(50))


def test_anchor_rounds_follow_probe_order():
    x = Permutation.identity(6)
    assert anchor_transposition_rounds(x, Transposition(2, 5), probe_order=[1, 3, 4, 5, 2, 6]) == 4
    with pytest.raises(ValueError):
        anchor_transposition_rounds(x, Transposition(2, 5))
