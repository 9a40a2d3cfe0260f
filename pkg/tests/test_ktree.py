import numpy as np
import pytest

from conftest import connected_subtree_costs
from minlatency.core import TreeInstance, gen_tree, metric_closure, walk_length
from minlatency.exact import brute_force_mlt
from minlatency.ktree import (
    _closed_dfs,
    binarize,
    itree_dp,
    itree_phases,
    itree_sum_bounds,
    mlt_from_itrees,
)

PATH = TreeInstance(3, ((0, 1, 1), (1, 2, 2)), 0)
STAR4 = TreeInstance(5, ((0, 1, 1), (0, 2, 1), (0, 3, 1), (0, 4, 1)), 0)


def _edge_set(t):
    return {(min(u, v), max(u, v), w) for u, v, w in t.edges}


def test_binarize_path_unchanged():
    bt = binarize(PATH)
    assert len(bt) == 3 and all(o >= 0 for o in bt.orig)
    assert bt.contract() == _edge_set(PATH)


def test_binarize_star_gadget():
    bt = binarize(STAR4)
    aux = [x for x, o in enumerate(bt.orig) if o < 0]
    assert len(aux) == 2
    assert bt.orig[0] == 0 and bt.weight[0] == 1
    assert sorted(bt.children[0]) == sorted(aux)
    assert all(bt.weight[x] == 0 and bt.edge[x] == 0 for x in aux)
    assert all(len(bt.children[x]) == 2 for x in aux)


def test_binarize_random_contracts_back():
    for seed in range(60):
        t = gen_tree(1 + seed % 10, seed)
        bt = binarize(t)
        assert sum(bt.weight) == t.n
        assert all(len(c) <= 2 for c in bt.children)
        assert bt.contract() == _edge_set(t)


def test_itree_path_example():
    table = itree_dp(PATH)
    assert table.cost[1:].tolist() == [0, 1, 3]
    assert table.witness(2) == ((0, 1, 1.0),)


def test_itree_matches_subtree_enumeration():
    for seed in range(80):
        t = gen_tree(1 + seed % 12, seed)
        table = itree_dp(t)
        oracle = connected_subtree_costs(t)
        np.testing.assert_allclose(table.cost[1:], oracle[1:], atol=1e-9)


def test_itree_table_invariants():
    for seed in range(30):
        t = gen_tree(2 + seed % 10, seed)
        table = itree_dp(t)
        cost = table.cost[1:]
        assert cost[0] == 0
        assert np.all(np.diff(cost) >= -1e-12)
        assert cost[-1] == pytest.approx(sum(w for *_, w in t.edges))
        _, parent, _, _ = t.rooted()
        for i in range(1, t.n + 1):
            verts = set(table.vertices(i))
            assert len(verts) == i and t.start in verts
            assert all(parent[v] in verts for v in verts if v != t.start)
            assert sum(w for *_, w in table.witness(i)) == pytest.approx(table.cost[i], abs=1e-9)


def test_itree_index_range():
    with pytest.raises(ValueError):
        itree_dp(PATH).vertices(0)
    with pytest.raises(ValueError):
        itree_dp(PATH).vertices(4)


def test_mlt_from_itrees_path_example():
    assert itree_phases(PATH) == [(2.0, 2), (4.0, 3)]
    walk, value = mlt_from_itrees(PATH)
    assert walk == [0, 1, 0, 1, 2]
    assert value == 6
    assert brute_force_mlt(metric_closure(PATH)).value == 4


def test_mlt_from_itrees_two_vertices():
    t = TreeInstance(2, ((0, 1, 3.5),), 0)
    walk, value = mlt_from_itrees(t)
    assert walk == [0, 1] and value == 3.5


def test_mlt_from_itrees_unit_star_within_8():
    walk, value = mlt_from_itrees(STAR4)
    assert value <= 8 * brute_force_mlt(metric_closure(STAR4)).value


def test_mlt_from_itrees_ratio_and_phase_lengths():
    for seed in range(60):
        t = gen_tree(2 + seed % 8, seed)
        walk, value = mlt_from_itrees(t)
        m = metric_closure(t)
        assert value <= 8 * brute_force_mlt(m).value + 1e-9
        table = itree_dp(t)
        adj = t.adjacency()
        for _, mj in itree_phases(t):
            seg = _closed_dfs(t, set(table.vertices(mj)), adj)
            assert walk_length(m, seg) <= 2 * table.cost[mj] + 1e-9


def test_itree_sum_bounds_examples():
    assert itree_sum_bounds(PATH) == (4.0, 32.0, 4.0)
    assert itree_sum_bounds(TreeInstance(2, ((0, 1, 2.0),), 0)) == (2.0, 16.0, 2.0)
    lower, upper, opt = itree_sum_bounds(gen_tree(15, 1))
    assert opt is None and upper == 8 * lower
