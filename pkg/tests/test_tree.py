import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epdkit.generate import random_tree
from epdkit.tree import (
    TreeError,
    build_tree,
    clade,
    is_ultrametric,
    pd_of_subset,
    root_path_arcs,
    total_pd,
    ultrametrize,
)

seeds = st.integers(0, 2**32 - 1)


def star(lengths=(1.0, 1.0, 1.0)):
    return build_tree([-1] + [0] * len(lengths), [0.0, *lengths], ["A", "B", "C"][: len(lengths)])


def two_leaf(a, b):
    return build_tree([-1, 0, 0], [0, a, b], ["x", "y"])


class TestBuild:
    def test_star(self):
        t = star()
        assert t.n_species == 3
        assert len(t.arcs()) == 3
        assert total_pd(t) == 3

    def test_figure1_shape(self, fig1):
        assert fig1.n_species == 7
        assert len(fig1.arcs()) == 10

    def test_relabels_to_preorder(self):
        # root is input node 3; leaves are input nodes 0, 1, 4
        t = build_tree([2, 2, 3, -1, 3], [1, 2, 3, 0, 4], ["a", "b", "c"])
        assert t.parent[0] == -1
        assert all(t.parent[v] < v for v in range(1, t.n_nodes))
        assert t.labels == ("a", "b", "c")
        assert root_path_arcs(t, 2) == [int(t.species_node[2])]
        assert sorted(t.length[1:].tolist()) == [1, 2, 3, 4]

    @pytest.mark.parametrize(
        "parents, lengths, labels, match",
        [
            ([-1, 0, 1, 1], [0, 1, 1, 1], None, "exactly one child"),
            ([-1, 0, 0], [0, -1, 1], None, "invalid branch length"),
            ([-1, 0, 0], [0, float("nan"), 1], None, "invalid branch length"),
            ([-1, 0, 0], [0, 1, 1], ["a", "a"], "duplicate leaf label"),
            ([-1, -1, 0], [0, 1, 1], None, "exactly one root"),
            ([-1, 0, 0, 4, 3, 3, 4], [0, 1, 1, 1, 1, 1, 1], None, "cycle"),
            ([-1, 0, 0, 3], [0, 1, 1, 1], None, "cycle"),
            ([-1], [0], None, "at least two children"),
            ([-1, 0, 7], [0, 1, 1], None, "unknown parent"),
        ],
    )
    def test_rejects(self, parents, lengths, labels, match):
        with pytest.raises(TreeError, match=match):
            build_tree(parents, lengths, labels)

    def test_immutable(self):
        t = star()
        with pytest.raises(ValueError):
            t.length[1] = 5.0


class TestClade:
    def test_leaf_arc(self, fig1):
        for i in range(fig1.n_species):
            assert clade(fig1, fig1.species_node[i]) == {i}

    def test_root_child(self):
        t = build_tree([-1, 0, 1, 1, 1, 0], [0, 1, 1, 1, 1, 1])
        left = t.children(0)[0]
        assert clade(t, left) == {0, 1, 2}

    def test_unknown_arc(self, fig1):
        with pytest.raises(KeyError):
            clade(fig1, 0)
        with pytest.raises(KeyError):
            clade(fig1, fig1.n_nodes)

    @settings(max_examples=60, deadline=None)
    @given(seeds, st.integers(2, 50))
    def test_partition(self, seed, n):
        t = random_tree(np.random.default_rng(seed), n, max_children=4)
        for a in t.arcs():
            kids = t.children(a)
            if not kids:
                assert len(clade(t, a)) == 1
                continue
            parts = [clade(t, c) for c in kids]
            assert frozenset().union(*parts) == clade(t, a)
            assert sum(map(len, parts)) == len(clade(t, a))


class TestRootPath:
    def test_direct_child(self, fig2):
        tree, _ = fig2
        assert len(root_path_arcs(tree, 7)) == 1

    def test_depth_three(self, fig2):
        tree, _ = fig2
        assert len(root_path_arcs(tree, 1)) == 3  # species "2"

    def test_unknown(self, fig2):
        with pytest.raises(KeyError):
            root_path_arcs(fig2[0], 8)

    @settings(max_examples=40, deadline=None)
    @given(seeds, st.integers(2, 50))
    def test_path_iff_clade(self, seed, n):
        t = random_tree(np.random.default_rng(seed), n)
        for i in range(n):
            on_path = set(root_path_arcs(t, i))
            for a in t.arcs():
                assert (a in on_path) == (i in clade(t, a))


class TestPD:
    def test_all_survive(self, fig1):
        assert pd_of_subset(fig1, range(7)) == total_pd(fig1)

    def test_empty(self, fig1):
        assert pd_of_subset(fig1, []) == 0

    def test_figure1_losses(self, fig1):
        full = total_pd(fig1)
        # species are labelled 1..7, indexed 0..6
        assert full - pd_of_subset(fig1, [1, 2, 3, 4]) == 22
        assert full - pd_of_subset(fig1, [0, 4, 5, 6]) == 13

    def test_unknown_species(self, fig1):
        with pytest.raises(KeyError):
            pd_of_subset(fig1, [7])

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_monotone(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 10))
        t = random_tree(rng, n)
        for r in range(n):
            for small in itertools.combinations(range(n), r):
                extra = [i for i in range(n) if i not in small]
                big = small + (extra[int(rng.integers(len(extra)))],)
                assert pd_of_subset(t, small) <= pd_of_subset(t, big)


class TestUltrametric:
    def test_already_ultrametric(self, fig1):
        u = ultrametrize(fig1)
        assert np.array_equal(u.length, fig1.length)

    def test_two_leaf(self):
        u = ultrametrize(two_leaf(5, 9))
        assert u.length.tolist() == [0, 9, 9]

    def test_detects(self):
        assert is_ultrametric(star())
        assert not is_ultrametric(two_leaf(5, 9), 1e-9)

    @settings(max_examples=60, deadline=None)
    @given(seeds, st.integers(2, 60))
    def test_properties(self, seed, n):
        t = random_tree(np.random.default_rng(seed), n, max_children=4)
        u = ultrametrize(t)
        assert is_ultrametric(u, 1e-9)
        assert np.all(u.length >= t.length)
        internal = [v for v in t.arcs() if not t.is_leaf(v)]
        assert np.array_equal(u.length[internal], t.length[internal])
        assert np.array_equal(u.parent, t.parent)
        assert u.leaf_depths().max() == pytest.approx(t.leaf_depths().max())
        np.testing.assert_allclose(ultrametrize(u).length, u.length, rtol=0, atol=1e-12)
