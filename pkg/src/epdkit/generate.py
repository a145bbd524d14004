"""Seeded random instances for the scenario-sensitivity experiments.

Every instance owns a private :class:`numpy.random.SeedSequence` derived
from ``(master_seed, index)`` and split into named sub-streams, so an
instance is identical whatever order or process it is generated in.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .tree import Phylogeny, build_tree, ultrametrize

#: Extinction-probability intervals for categories 1 (most threatened) to 5,
#: used for randomly generated trees.
TABLE1 = ((0.50, 1.00), (0.20, 0.50), (0.10, 0.20), (0.05, 0.10), (0.00, 0.05))
#: Intervals used for the fixed 52-species lemur tree.
TABLE2 = ((0.90, 1.00), (0.65, 0.85), (0.40, 0.60), (0.15, 0.35), (0.00, 0.10))
INTERVAL_PRESETS = {"table1": TABLE1, "table2": TABLE2}

#: Category frequencies of the skewed assignment, categories 1..5.
SKEWED_FREQUENCIES = (0.02, 0.04, 0.09, 0.09, 0.76)

CATEGORY_MODES = ("uniform", "skewed", "mixed")
PROBABILITY_MODES = ("per-category", "per-species")

_STREAMS = ("params", "topology", "categories", "scenario1", "scenario2")


@dataclass(frozen=True)
class GenParams:
    internal_node_range: tuple[int, int] = (50, 1000)
    d_max_range: tuple[int, int] = (2, 4)
    lambda_max_range: tuple[int, int] = (5, 20)
    rho_choices: tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5)
    intervals: tuple[tuple[float, float], ...] = TABLE1
    category_mode: str = "mixed"
    probability_mode: str = "per-category"
    ultrametric: bool = False

    def __post_init__(self):
        check_intervals(self.intervals)
        if self.category_mode not in CATEGORY_MODES:
            raise ValueError(f"unknown category mode {self.category_mode!r}")
        if self.probability_mode not in PROBABILITY_MODES:
            raise ValueError(f"unknown probability mode {self.probability_mode!r}")
        for lo, hi in (self.internal_node_range, self.d_max_range, self.lambda_max_range):
            if not 1 <= lo <= hi:
                raise ValueError(f"invalid integer range [{lo}, {hi}]")
        if self.d_max_range[0] < 2:
            raise ValueError("internal nodes need at least two children")
        if not self.rho_choices or any(not 0 <= r <= 1 for r in self.rho_choices):
            raise ValueError("rho choices must lie in [0, 1]")


def check_intervals(intervals) -> None:
    if len(intervals) != 5:
        raise ValueError("expected one probability interval per category (5)")
    for g, (lo, hi) in enumerate(intervals, 1):
        if not 0.0 <= lo <= hi <= 1.0:
            raise ValueError(f"category {g} interval [{lo}, {hi}] not within [0, 1]")


@dataclass(frozen=True)
class TreeDraw:
    n_internal: int
    d_max: int
    lambda_max: int


@dataclass
class Instance:
    """A tree, two extinction-probability scenarios and a protection budget.

    ``tree2`` is set only when the scenarios differ in branch lengths; both
    scenarios then share the probability vector.
    """

    tree: Phylogeny
    categories: np.ndarray | None
    probs1: np.ndarray
    probs2: np.ndarray
    k: int
    provenance: dict = field(default_factory=dict)
    scenario1: tuple[float, ...] | None = None
    scenario2: tuple[float, ...] | None = None
    tree2: Phylogeny | None = None

    @property
    def trees(self) -> tuple[Phylogeny, Phylogeny]:
        return self.tree, self.tree if self.tree2 is None else self.tree2


def instance_streams(master_seed: int, index: int) -> dict[str, np.random.Generator]:
    """Named, independent generators for instance ``index``."""
    root = np.random.SeedSequence([int(master_seed), int(index)])
    return {
        name: np.random.default_rng(ss) for name, ss in zip(_STREAMS, root.spawn(len(_STREAMS)))
    }


def budget(rho: float, n: int) -> int:
    """``floor(rho * n)``, computed exactly for decimal ``rho``."""
    return int(Fraction(str(rho)) * n)


def _uniform_int(rng, lo_hi) -> int:
    lo, hi = lo_hi
    return int(rng.integers(lo, hi + 1))


def gen_topology(
    rng: np.random.Generator,
    params: GenParams = GenParams(),
    *,
    n_internal: int | None = None,
    d_max: int | None = None,
    lambda_max: int | None = None,
) -> tuple[Phylogeny, TreeDraw]:
    """Random tree with integer branch lengths.

    Draws the number of non-leaf nodes ``N``, the maximum out-degree and the
    maximum branch length (unless given). Internal nodes are created in
    breadth-first order, each drawing its child count uniformly from
    ``[2, d_max]`` and taking the earliest open child slot; once ``N``
    internal nodes exist, every open slot becomes a leaf. Each arc length is
    uniform on the integers ``[1, lambda_max]``.
    """
    if n_internal is None:
        n_internal = _uniform_int(rng, params.internal_node_range)
    if d_max is None:
        d_max = _uniform_int(rng, params.d_max_range)
    if lambda_max is None:
        lambda_max = _uniform_int(rng, params.lambda_max_range)

    counts = rng.integers(2, d_max + 1, size=n_internal)
    parents = [-1]
    slots = deque([0] * int(counts[0]))
    for j in range(1, n_internal):
        parents.append(slots.popleft())
        slots.extend([j] * int(counts[j]))
    parents.extend(slots)
    m = len(parents)
    lengths = np.zeros(m)
    lengths[1:] = rng.integers(1, lambda_max + 1, size=m - 1)
    tree = build_tree(parents, lengths)
    return tree, TreeDraw(n_internal, d_max, lambda_max)


def assign_categories(rng: np.random.Generator, n: int, mode: str) -> np.ndarray:
    """Threat category (1 = most threatened .. 5) for each of ``n`` species."""
    if mode == "uniform":
        return rng.integers(1, 6, size=n)
    if mode == "skewed":
        return rng.choice(5, size=n, p=SKEWED_FREQUENCIES) + 1
    raise ValueError(f"unknown category mode {mode!r}")


def draw_scenario(rng: np.random.Generator, intervals=TABLE1) -> np.ndarray:
    """One extinction probability per category, uniform within its interval."""
    check_intervals(intervals)
    lo, hi = np.asarray(intervals, dtype=np.float64).T
    return rng.uniform(lo, hi)


def species_probs(
    categories,
    scenario=None,
    *,
    rng: np.random.Generator | None = None,
    intervals=TABLE1,
) -> np.ndarray:
    """Per-species extinction probabilities.

    With ``scenario`` (5 values) every species takes its category's value.
    Without it, each species draws independently from its category's
    interval using ``rng``.
    """
    cat = np.asarray(categories, dtype=np.int64)
    if cat.size and (cat.min() < 1 or cat.max() > 5):
        raise ValueError("categories must lie in 1..5")
    if scenario is not None:
        return np.asarray(scenario, dtype=np.float64)[cat - 1]
    if rng is None:
        raise ValueError("per-species probabilities need a random generator")
    check_intervals(intervals)
    lo, hi = np.asarray(intervals, dtype=np.float64).T
    return rng.uniform(lo[cat - 1], hi[cat - 1])


def perturb_lengths(rng: np.random.Generator, tree: Phylogeny, fraction: float) -> Phylogeny:
    """Redraw each arc length uniformly within ``±fraction`` of its value."""
    if not 0 <= fraction < 1:
        raise ValueError("fraction must lie in [0, 1)")
    length = tree.length.copy()
    length[1:] = rng.uniform((1 - fraction) * length[1:], (1 + fraction) * length[1:])
    return tree.with_lengths(length)


def _scenario_pair(streams, categories, params: GenParams):
    if params.probability_mode == "per-category":
        s1 = draw_scenario(streams["scenario1"], params.intervals)
        s2 = draw_scenario(streams["scenario2"], params.intervals)
        return (
            species_probs(categories, s1),
            species_probs(categories, s2),
            tuple(s1.tolist()),
            tuple(s2.tolist()),
        )
    p1 = species_probs(categories, rng=streams["scenario1"], intervals=params.intervals)
    p2 = species_probs(categories, rng=streams["scenario2"], intervals=params.intervals)
    return p1, p2, None, None


def gen_instance(master_seed: int, index: int, params: GenParams = GenParams()) -> Instance:
    """Random-tree instance ``index`` of the batch seeded by ``master_seed``."""
    streams = instance_streams(master_seed, index)
    tree, draw = gen_topology(streams["topology"], params)
    if params.ultrametric:
        tree = ultrametrize(tree)

    pr = streams["params"]
    case = params.category_mode
    if case == "mixed":
        case = "uniform" if pr.random() < 0.5 else "skewed"
    rho = float(params.rho_choices[int(pr.integers(len(params.rho_choices)))])

    categories = assign_categories(streams["categories"], tree.n_species, case)
    p1, p2, s1, s2 = _scenario_pair(streams, categories, params)
    return Instance(
        tree=tree,
        categories=categories,
        probs1=p1,
        probs2=p2,
        k=budget(rho, tree.n_species),
        scenario1=s1,
        scenario2=s2,
        provenance={
            "seed": int(master_seed),
            "index": int(index),
            "n_internal": draw.n_internal,
            "d_max": draw.d_max,
            "lambda_max": draw.lambda_max,
            "category_case": case,
            "rho": rho,
        },
    )


def gen_fixed_tree_instance(
    master_seed: int,
    index: int,
    tree: Phylogeny,
    *,
    categories=None,
    probs=None,
    params: GenParams = GenParams(),
    perturb: float = 0.0,
    rho: float | None = None,
) -> Instance:
    """Instance on a given tree.

    Without ``perturb``, the two scenarios are probability draws for the
    given ``categories`` (or the fixed ``probs`` pair when supplied). With
    ``perturb`` > 0, ``probs[0]`` is used in both scenarios and each scenario
    redraws every branch length within ``±perturb`` of the original.
    """
    streams = instance_streams(master_seed, index)
    pr = streams["params"]
    if rho is None:
        rho = float(params.rho_choices[int(pr.integers(len(params.rho_choices)))])
    cats = None if categories is None else np.asarray(categories, dtype=np.int64)
    tree2 = None
    s1 = s2 = None
    if perturb > 0:
        if probs is None:
            raise ValueError("branch-length perturbation needs fixed probabilities")
        p1 = p2 = np.asarray(probs[0], dtype=np.float64)
        t1 = perturb_lengths(streams["scenario1"], tree, perturb)
        tree2 = perturb_lengths(streams["scenario2"], tree, perturb)
        tree = t1
    elif probs is not None:
        p1 = np.asarray(probs[0], dtype=np.float64)
        p2 = np.asarray(probs[1], dtype=np.float64)
    else:
        if cats is None:
            raise ValueError("need categories or probabilities")
        p1, p2, s1, s2 = _scenario_pair(streams, cats, params)
    return Instance(
        tree=tree,
        categories=cats,
        probs1=p1,
        probs2=p2,
        k=budget(rho, tree.n_species),
        scenario1=s1,
        scenario2=s2,
        tree2=tree2,
        provenance={
            "seed": int(master_seed),
            "index": int(index),
            "n_internal": tree.n_internal,
            "d_max": max(len(tree.children(v)) for v in range(tree.n_nodes)),
            "lambda_max": None,
            "category_case": "given",
            "rho": rho,
        },
    )


def random_tree(
    rng: np.random.Generator,
    n_species: int,
    max_children: int = 3,
    integer_lengths: bool = False,
) -> Phylogeny:
    """Small random tree for oracle checks.

    Repeatedly joins 2..``max_children`` randomly chosen subtrees under a new
    node. Lengths are uniform on (0, 10), or integers 1..10.
    """
    if n_species < 2:
        raise ValueError("need at least two species")
    parents = [-1] * n_species
    pool = list(range(n_species))
    while len(pool) > 1:
        c = int(rng.integers(2, min(max_children, len(pool)) + 1))
        picked = sorted(rng.choice(len(pool), size=c, replace=False).tolist(), reverse=True)
        node = len(parents)
        parents.append(-1)
        for j in picked:
            parents[pool.pop(j)] = node
        pool.append(node)
    if integer_lengths:
        lengths = rng.integers(1, 11, size=len(parents)).astype(float)
    else:
        lengths = rng.uniform(0.0, 10.0, size=len(parents))
    return build_tree(parents, lengths)
