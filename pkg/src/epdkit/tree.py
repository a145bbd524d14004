"""Rooted phylogenetic trees with branch lengths.

A :class:`Phylogeny` stores its nodes renumbered in preorder, so that node 0
is the root, ``parent[v] < v`` for every other node, and the leaves below any
node occupy a contiguous block of the left-to-right leaf order. Arcs are
identified by their terminal (child) node id; the root has no incoming arc.

Species are indexed ``0..n-1``. Labels are for display and I/O only.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np


class TreeError(ValueError):
    """Raised when an input does not describe a valid rooted phylogeny."""


class Phylogeny:
    """Immutable rooted tree with per-arc branch lengths.

    Use :func:`build_tree` (or :func:`epdkit.newick.parse_newick`) to make one.

    Attributes
    ----------
    parent : int64[m]
        Parent node of each node, ``-1`` for the root (node 0).
    length : float64[m]
        Length of the arc into each node; ``length[0]`` is 0.
    leaf_lo, leaf_hi : int64[m]
        Half-open range of leaf positions (left-to-right order) below a node.
    leaf_node : int64[n]
        Node id of the leaf at each leaf position.
    species_at : int64[n]
        Species index of the leaf at each leaf position.
    species_node : int64[n]
        Node id of each species' leaf.
    labels : tuple of str
        Display label of each species.
    """

    __slots__ = (
        "parent",
        "length",
        "leaf_lo",
        "leaf_hi",
        "leaf_node",
        "species_at",
        "species_node",
        "labels",
        "node_labels",
        "_children",
        "_species_of_node",
    )

    def __init__(self, parent, length, children, species_node, labels, node_labels):
        # Trusted constructor: callers go through build_tree.
        m = len(parent)
        self.parent = np.asarray(parent, dtype=np.int64)
        self.length = np.asarray(length, dtype=np.float64)
        self._children = tuple(tuple(c) for c in children)
        self.labels = tuple(labels)
        self.node_labels = tuple(node_labels)

        leaf_lo = np.zeros(m, dtype=np.int64)
        leaf_hi = np.zeros(m, dtype=np.int64)
        leaf_node = []
        for v in range(m):
            leaf_lo[v] = len(leaf_node)
            if not self._children[v]:
                leaf_node.append(v)
        # preorder: a node's subtree is the block v..v+size-1, leaves likewise
        for v in range(m - 1, -1, -1):
            kids = self._children[v]
            leaf_hi[v] = leaf_hi[kids[-1]] if kids else leaf_lo[v] + 1
        self.leaf_lo = leaf_lo
        self.leaf_hi = leaf_hi
        self.leaf_node = np.asarray(leaf_node, dtype=np.int64)

        self.species_node = np.asarray(species_node, dtype=np.int64)
        species_of_node = np.full(m, -1, dtype=np.int64)
        species_of_node[self.species_node] = np.arange(len(self.species_node))
        self._species_of_node = species_of_node
        self.species_at = species_of_node[self.leaf_node]

        for arr in (
            self.parent,
            self.length,
            self.leaf_lo,
            self.leaf_hi,
            self.leaf_node,
            self.species_at,
            self.species_node,
        ):
            arr.flags.writeable = False

    # -- sizes -----------------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.parent)

    @property
    def n_species(self) -> int:
        return len(self.species_node)

    @property
    def n_internal(self) -> int:
        """Number of non-leaf nodes, root included."""
        return self.n_nodes - self.n_species

    def __len__(self) -> int:
        return self.n_species

    def __repr__(self) -> str:
        return (
            f"Phylogeny(n_species={self.n_species}, n_nodes={self.n_nodes}, "
            f"total_pd={total_pd(self):.6g})"
        )

    # -- structure -------------------------------------------------------

    def children(self, node: int) -> tuple[int, ...]:
        return self._children[node]

    def arcs(self) -> range:
        """Arc ids, i.e. every non-root node."""
        return range(1, self.n_nodes)

    def is_leaf(self, node: int) -> bool:
        return not self._children[node]

    def species_of(self, node: int) -> int:
        """Species index of a leaf node, ``-1`` for internal nodes."""
        return int(self._species_of_node[node])

    def arc_lengths(self) -> dict[int, float]:
        return {v: float(self.length[v]) for v in self.arcs()}

    def root_distances(self) -> np.ndarray:
        """Path length from the root to every node."""
        dist = np.zeros(self.n_nodes)
        par = self.parent
        ln = self.length
        for v in range(1, self.n_nodes):
            dist[v] = dist[par[v]] + ln[v]
        return dist

    def leaf_depths(self) -> np.ndarray:
        """Root-to-leaf path length per species."""
        return self.root_distances()[self.species_node]

    def with_lengths(self, length) -> Phylogeny:
        """Same topology and labels, new arc lengths (indexed by node)."""
        length = np.array(length, dtype=np.float64)
        if length.shape != (self.n_nodes,):
            raise TreeError(f"expected {self.n_nodes} lengths, got {length.shape}")
        length[0] = 0.0
        if not np.all(np.isfinite(length)) or np.any(length < 0):
            raise TreeError("branch lengths must be finite and non-negative")
        return Phylogeny(
            self.parent,
            length,
            self._children,
            self.species_node,
            self.labels,
            self.node_labels,
        )

    def species_index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown species label {label!r}") from None

    def _check_species(self, species: int) -> int:
        i = int(species)
        if not 0 <= i < self.n_species:
            raise KeyError(f"unknown species {species!r}")
        return i


def build_tree(
    parents: Sequence[int],
    lengths: Sequence[float],
    leaf_labels: Sequence[str] | None = None,
    node_labels: Sequence[str | None] | None = None,
) -> Phylogeny:
    """Validate a parent-list description and return a :class:`Phylogeny`.

    Parameters
    ----------
    parents
        ``parents[v]`` is the parent of input node ``v``; the root has ``-1``.
    lengths
        ``lengths[v]`` is the length of the arc into ``v``. The root's entry
        is ignored.
    leaf_labels
        One label per leaf, in increasing input-node order. Species indices
        follow the same order. Defaults to ``"0", "1", ...``.
    node_labels
        Optional label per input node (``None`` for unlabeled). Leaf entries
        are ignored in favour of ``leaf_labels``.

    Raises
    ------
    TreeError
        On several or no roots, cycles or disconnected nodes, unary nodes,
        negative or non-finite lengths, or duplicate leaf labels.
    """
    m = len(parents)
    if len(lengths) != m:
        raise TreeError(f"{m} nodes but {len(lengths)} branch lengths")
    if m == 0:
        raise TreeError("empty tree")
    roots = [v for v, p in enumerate(parents) if p == -1]
    if len(roots) != 1:
        raise TreeError(f"expected exactly one root, found {len(roots)}")
    root = roots[0]

    kids: list[list[int]] = [[] for _ in range(m)]
    for v, p in enumerate(parents):
        if p == -1:
            continue
        if not 0 <= p < m:
            raise TreeError(f"node {v} has unknown parent {p}")
        if p == v:
            raise TreeError(f"cycle detected at node {v}")
        kids[p].append(v)

    for v in range(m):
        if len(kids[v]) == 1:
            raise TreeError(f"node {v} has exactly one child")
    if not kids[root]:
        raise TreeError("the root must have at least two children")

    for v in range(m):
        if v == root:
            continue
        x = float(lengths[v])
        if not np.isfinite(x) or x < 0:
            raise TreeError(f"invalid branch length {lengths[v]!r} into node {v}")

    # preorder walk; anything unreached sits on a cycle or hangs off one
    order: list[int] = []
    stack = [root]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(reversed(kids[v]))
    if len(order) != m:
        raise TreeError("cycle detected: not every node is reachable from the root")

    leaves_in = [v for v in range(m) if not kids[v]]
    if leaf_labels is None:
        leaf_labels = [str(i) for i in range(len(leaves_in))]
    leaf_labels = [str(s) for s in leaf_labels]
    if len(leaf_labels) != len(leaves_in):
        raise TreeError(f"{len(leaves_in)} leaves but {len(leaf_labels)} leaf labels")
    seen = set()
    for s in leaf_labels:
        if s in seen:
            raise TreeError(f"duplicate leaf label {s!r}")
        seen.add(s)

    new_id = {v: i for i, v in enumerate(order)}
    parent = [-1] * m
    length = [0.0] * m
    nlabels: list[str | None] = [None] * m
    children = [[] for _ in range(m)]
    for v in order:
        i = new_id[v]
        if v != root:
            parent[i] = new_id[parents[v]]
            length[i] = float(lengths[v])
        children[i] = [new_id[c] for c in kids[v]]
        if node_labels is not None and kids[v]:
            nlabels[i] = node_labels[v]
    species_node = [new_id[v] for v in leaves_in]
    for sp, i in enumerate(species_node):
        nlabels[i] = leaf_labels[sp]

    return Phylogeny(parent, length, children, species_node, leaf_labels, nlabels)


def clade(tree: Phylogeny, arc: int) -> frozenset[int]:
    """Species reachable below ``arc`` (the arc into node ``arc``)."""
    a = int(arc)
    if not 1 <= a < tree.n_nodes:
        raise KeyError(f"unknown arc {arc!r}")
    return frozenset(tree.species_at[tree.leaf_lo[a] : tree.leaf_hi[a]].tolist())


def root_path_arcs(tree: Phylogeny, species: int) -> list[int]:
    """Arcs from the root down to ``species``' leaf, in order."""
    v = int(tree.species_node[tree._check_species(species)])
    path = []
    while v != 0:
        path.append(v)
        v = int(tree.parent[v])
    path.reverse()
    return path


def total_pd(tree: Phylogeny) -> float:
    """Faith PD of the whole tree: the sum of all arc lengths."""
    return float(tree.length[1:].sum())


def pd_of_subset(tree: Phylogeny, survivors: Iterable[int]) -> float:
    """Rooted Faith PD of ``survivors``.

    Sums arc lengths over arcs with at least one surviving descendant.
    """
    keep = np.zeros(tree.n_nodes, dtype=bool)
    for s in survivors:
        v = int(tree.species_node[tree._check_species(s)])
        while v > 0 and not keep[v]:
            keep[v] = True
            v = int(tree.parent[v])
    return float(tree.length[keep].sum())


def ultrametrize(tree: Phylogeny) -> Phylogeny:
    """Stretch leaf arcs so every root-to-leaf path has the maximum length."""
    depth = tree.leaf_depths()
    target = depth.max()
    length = tree.length.copy()
    length[tree.species_node] += target - depth
    return tree.with_lengths(length)


def is_ultrametric(tree: Phylogeny, tol: float = 1e-9) -> bool:
    if tol < 0:
        raise ValueError("tol must be non-negative")
    depth = tree.leaf_depths()
    return bool(depth.max() - depth.min() <= tol)
