import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epdkit.generate import gen_topology, random_tree
from epdkit.newick import NewickError, parse_newick, write_newick
from epdkit.tree import build_tree, clade, is_ultrametric, total_pd


def signature(tree):
    """Topology + lengths as a set of (leaf labels below arc, length)."""
    return sorted(
        (tuple(sorted(tree.labels[s] for s in clade(tree, a))), float(tree.length[a]))
        for a in tree.arcs()
    )


class TestParse:
    @pytest.mark.parametrize("text", ["(A:1,B:1):0;", "(A:1,B:1);"])
    def test_two_leaves(self, text):
        t = parse_newick(text)
        assert t.labels == ("A", "B")
        assert total_pd(t) == 2

    def test_three_leaves(self):
        t = parse_newick("((A:2,B:2):3,C:5);")
        assert total_pd(t) == 12
        assert is_ultrametric(t)

    def test_internal_labels_and_comments(self):
        t = parse_newick("[c] ((A:1,B:2)ab:0.5 [x],'C d':3e0)root;\n")
        assert t.labels == ("A", "B", "C d")
        assert "ab" in t.node_labels and t.node_labels[0] == "root"
        assert write_newick(t) == "((A:1,B:2)ab:0.5,'C d':3)root;"

    def test_multiline_position(self):
        with pytest.raises(NewickError) as err:
            parse_newick("(A:1,\n B:1,\n C);")
        assert (err.value.line, err.value.column) == (3, 2)  # the "C" on line 3
        assert "missing branch length" in str(err.value)

    @pytest.mark.parametrize(
        "text, match",
        [
            ("(A:1,B:1)", "expected ';'"),
            ("(A:1,(B:1):1);", "exactly one child"),
            ("(A:1,B:x);", "invalid branch length"),
            ("(A:1,:1);", "unlabeled leaf"),
            ("(A:1,A:1);", "duplicate leaf label"),
            ("(A:1,B:1);x", "trailing"),
            ("A;", "start of tree"),
            ("(A:1,,B:1);", "empty subtree"),
            ("(A:1,B:-1);", "invalid branch length"),
            ("(A:1,B:1", "end of input"),
            ("('A:1,B:1);", "unterminated"),
        ],
    )
    def test_errors(self, text, match):
        with pytest.raises(NewickError, match=match):
            parse_newick(text)

    def test_deep_caterpillar(self):
        n = 3000
        text = "(" * (n - 1) + "L0:1" + "".join(f",L{i}:1):1" for i in range(1, n - 1)) + f",L{n - 1}:1);"
        t = parse_newick(text)
        assert t.n_species == n
        assert parse_newick(write_newick(t)).n_species == n


class TestWrite:
    def test_two_leaves(self):
        t = build_tree([-1, 0, 0], [0, 1, 1], ["A", "B"])
        assert write_newick(t) == "(A:1,B:1);"

    def test_seventeen_digits(self):
        t = build_tree([-1, 0, 0], [0, 0.1, 1 / 3], ["A", "B"])
        assert write_newick(t) == "(A:0.10000000000000001,B:0.33333333333333331);"

    def test_children_permutation_invariant(self):
        a = parse_newick("((A:1,B:2):3,(C:4,D:5):6);")
        # same species order A..D, but the CD clade is the root's first child
        b = build_tree([5, 5, 4, 4, 6, 6, -1], [1, 2, 4, 5, 6, 3, 0], ["A", "B", "C", "D"])
        assert b.children(0)[0] != a.children(0)[0] or b.labels == a.labels
        assert write_newick(b) == write_newick(a) == "((A:1,B:2):3,(C:4,D:5):6);"

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 40), st.booleans())
    def test_round_trip(self, seed, n, integer):
        t = random_tree(np.random.default_rng(seed), n, max_children=4, integer_lengths=integer)
        text = write_newick(t)
        u = parse_newick(text)
        assert signature(u) == signature(t)  # bit-exact lengths
        assert sorted(u.labels) == sorted(t.labels)
        assert write_newick(u) == text

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_permuting_children_same_output(self, seed):
        rng = np.random.default_rng(seed)
        t = random_tree(rng, int(rng.integers(3, 25)), max_children=4)
        # renumber nodes at random (which reorders siblings) but keep the
        # leaves in species order, so species indices are unchanged
        m = t.n_nodes
        new = rng.permutation(m)
        leaves = t.species_node.tolist()
        for v, nid in zip(leaves, sorted(new[leaves].tolist())):
            new[v] = nid
        parents = [0] * m
        lengths = [0.0] * m
        for v in range(m):
            parents[new[v]] = -1 if v == 0 else int(new[t.parent[v]])
            lengths[new[v]] = float(t.length[v])
        u = build_tree(parents, lengths, t.labels)
        assert u.labels == t.labels
        assert write_newick(u) == write_newick(t)

    def test_generated_tree(self):
        t, _ = gen_topology(np.random.default_rng(1))
        assert signature(parse_newick(write_newick(t))) == signature(t)
