"""Ordering operators: swaps, shifts, reversal, reunion, and the
arc-dropping permutation search."""

import pytest
from numpy.random import default_rng

from ordermap import (
    Dag,
    DagOracle,
    Ordering,
    PermutationBudgetError,
    RejectedSwapError,
    apply_swap,
    build_causal_input_list,
    clique_reunion,
    dag_from_boundaries,
    free_sets,
    is_imap,
    maximal_cliques,
    represented_model,
    reversal,
    shift,
    statement,
    swap_admissible,
    unclique,
)
from ordermap.fixtures import fork_join_oracle, noisy_xor_oracle

from .instances import make_instance

A, B, C, D = 0, 1, 2, 3


def fork_join_state():
    oracle = fork_join_oracle()
    order = Ordering((B, A, D, C))
    return oracle, order, build_causal_input_list(oracle, order)


def xor_state():
    oracle = noisy_xor_oracle()
    order = Ordering((A, B, C))
    return oracle, order, build_causal_input_list(oracle, order)


def total_arcs(bmap) -> int:
    return sum(len(b) for b in bmap.values())


def test_swap_admissible_examples():
    oracle, order, bmap = xor_state()
    assert bmap == {A: frozenset(), B: frozenset(), C: frozenset({A, B})}
    # collider child refuses to move before a parent it cannot shed
    assert not swap_admissible(order, bmap, B, C)
    assert swap_admissible(order, bmap, A, B)  # unconnected pair

    oracle, order, bmap = fork_join_state()
    assert swap_admissible(order, bmap, D, C)  # boundaries nest exactly


def test_apply_swap_unconnected_changes_nothing_but_order():
    oracle, order, bmap = xor_state()
    out = apply_swap(oracle, order, bmap, A, B)
    assert out.order.seq == (B, A, C)
    assert not out.connected
    assert not out.forced
    assert out.bmap == bmap
    assert out.queries_used == 0


def test_apply_swap_requires_consecutive_ranks():
    oracle, order, bmap = xor_state()
    with pytest.raises(ValueError):
        apply_swap(oracle, order, bmap, A, C)


def test_apply_swap_blocked_without_force():
    oracle, order, bmap = xor_state()
    with pytest.raises(RejectedSwapError) as exc:
        apply_swap(oracle, order, bmap, B, C)
    assert exc.value.pair == (B, C)


def test_forced_swap_on_collider_loses_marginal_independence():
    oracle, order, bmap = xor_state()
    out = apply_swap(oracle, order, bmap, B, C, force=True)
    assert out.forced and out.connected
    assert out.order.seq == (A, C, B)
    assert out.bmap[C] == frozenset()
    assert out.bmap[B] == frozenset({A, C})
    before = represented_model(dag_from_boundaries(order, bmap))
    after = represented_model(dag_from_boundaries(out.order, out.bmap))
    assert statement({A}, (), {B}) in before - after


def test_swapped_boundary_union_is_invariant():
    # connected swap of (i, j): union of the two boundaries plus the pair
    # membership is conserved
    checked = 0
    for seed in range(40):
        truth, oracle, order = make_instance(seed, lo=3, hi=6)
        bmap = build_causal_input_list(oracle, order)
        for rank in range(1, order.n):
            i, j = order.at(rank), order.at(rank + 1)
            if i not in bmap[j]:
                continue
            out = apply_swap(oracle, order, bmap, i, j, force=True)
            assert (out.bmap[i] | out.bmap[j]) - {j} == (bmap[i] | bmap[j]) - {i}
            checked += 1
    assert checked >= 30


def test_shift_moves_variable_and_rebuilds_boundaries():
    oracle, order, bmap = fork_join_state()
    new_order, new_bmap = shift(oracle, order, bmap, C, 3)
    assert new_order.seq == (B, A, C, D)
    assert new_bmap[C] == frozenset({A})
    assert new_bmap[D] == frozenset({A, B, C})
    # original state untouched
    assert order.seq == (B, A, D, C)
    assert bmap[C] == frozenset({A, B, D})


def test_shift_rejects_blocked_route():
    oracle, order, bmap = xor_state()
    with pytest.raises(RejectedSwapError):
        shift(oracle, order, bmap, C, 1)


def test_free_sets_fork_join_single_run():
    oracle, order, bmap = fork_join_state()
    assert free_sets(order, bmap, frozenset({A, B, C, D})) == [[B, A, D, C]]


def test_free_sets_partition_clique_in_order():
    for seed in range(60):
        truth, oracle, order = make_instance(seed, lo=4, hi=7)
        bmap = build_causal_input_list(oracle, order)
        dag = dag_from_boundaries(order, bmap)
        for clique in maximal_cliques(dag):
            fsets = free_sets(order, bmap, clique)
            flat = [v for fs in fsets for v in fs]
            assert sorted(flat) == sorted(clique)
            assert flat == sorted(flat, key=order.rank)
            assert all(fs for fs in fsets)


def test_reversal_preserves_represented_model():
    applied = 0
    for seed in range(60):
        truth, oracle, order = make_instance(seed, lo=3, hi=7)
        bmap = build_causal_input_list(oracle, order)
        dag = dag_from_boundaries(order, bmap)
        for clique in maximal_cliques(dag):
            out = reversal(oracle, order, bmap, clique)
            if not out.applied:
                assert out.order is order and out.bmap is bmap
                assert isinstance(out.reason, str) and out.reason
                continue
            applied += 1
            after = dag_from_boundaries(out.order, out.bmap)
            assert represented_model(after) == represented_model(dag)
    assert applied >= 5


def test_clique_reunion_gathers_free_sets():
    moved = 0
    for seed in range(60):
        truth, oracle, order = make_instance(seed, lo=4, hi=7)
        bmap = build_causal_input_list(oracle, order)
        dag = dag_from_boundaries(order, bmap)
        model_before = represented_model(dag)
        for clique in maximal_cliques(dag):
            out = clique_reunion(oracle, order, bmap, clique)
            still_clique = all(
                u in out.bmap[v] or v in out.bmap[u]
                for u in clique
                for v in clique
                if u < v
            )
            if still_clique:
                for fs in free_sets(out.order, out.bmap, clique):
                    ranks = sorted(out.order.rank(v) for v in fs)
                    assert ranks == list(range(ranks[0], ranks[0] + len(ranks)))
            moved += out.moved
            after = represented_model(dag_from_boundaries(out.order, out.bmap))
            assert model_before <= after  # admissible swaps never lose a statement
    assert moved >= 5


def test_unclique_drops_fork_join_arc():
    oracle, order, bmap = fork_join_state()
    assert total_arcs(bmap) == 6
    out = unclique(oracle, order, bmap, frozenset({A, B, C, D}))
    assert out.removed == (B, C)
    assert out.removed_arcs == ((B, C),)
    assert out.order.seq == (B, A, C, D)
    assert out.bmap[C] == frozenset({A})
    assert out.bmap[D] == frozenset({A, B, C})
    assert total_arcs(out.bmap) == 5
    assert 0 < out.permutations_tried < 24


def test_unclique_budget_exceeded():
    oracle, order, bmap = fork_join_state()
    with pytest.raises(PermutationBudgetError) as exc:
        unclique(oracle, order, bmap, frozenset({A, B, C, D}), max_perms=6)
    assert exc.value.clique == (A, B, C, D)
    assert exc.value.total == 24


def test_unclique_requires_contiguous_free_sets():
    oracle = DagOracle(Dag(3, [(0, 1)]))
    order = Ordering((0, 2, 1))
    bmap = build_causal_input_list(oracle, order)
    assert free_sets(order, bmap, frozenset({0, 1})) == [[0, 1]]
    with pytest.raises(ValueError):
        unclique(oracle, order, bmap, frozenset({0, 1}))


def test_unclique_acceptance_reduces_arcs_and_keeps_imap():
    accepted = 0
    for seed in range(60):
        truth, oracle, order = make_instance(seed, lo=4, hi=7)
        bmap = build_causal_input_list(oracle, order)
        dag = dag_from_boundaries(order, bmap)
        for clique in maximal_cliques(dag):
            got = clique_reunion(oracle, order, bmap, clique)
            still_clique = all(
                u in got.bmap[v] or v in got.bmap[u]
                for u in clique
                for v in clique
                if u < v
            )
            if not still_clique:
                continue
            out = unclique(oracle, got.order, got.bmap, clique)
            if out.removed is None:
                assert total_arcs(out.bmap) == total_arcs(got.bmap)
                continue
            accepted += 1
            assert total_arcs(out.bmap) < total_arcs(got.bmap)
            assert is_imap(dag_from_boundaries(out.order, out.bmap), oracle)
            assert out.removed_arcs
            assert out.removed == out.removed_arcs[0]
    assert accepted >= 3
