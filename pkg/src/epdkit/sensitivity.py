"""How much does the choice of extinction probabilities matter?

Each instance is solved under its two scenarios. ``epd_ws`` below is the
ePD computed with scenario ``w``'s probabilities (and branch lengths) when
the set optimal for scenario ``s`` is protected; ``gap1`` is the relative
loss in scenario 1 from protecting scenario 2's optimum instead of its own,
and ``gap2`` the reverse.
"""

from __future__ import annotations

import logging
import multiprocessing
from dataclasses import dataclass, field, replace

import numpy as np

from .epd import epd, epd_with_protection, greedy_protect
from .generate import (
    INTERVAL_PRESETS,
    GenParams,
    Instance,
    gen_fixed_tree_instance,
    gen_instance,
)
from .tree import Phylogeny, total_pd

log = logging.getLogger(__name__)

FAMILIES = (
    "random-nonultrametric",
    "random-ultrametric",
    "fixed-tree-scenarios",
    "fixed-tree-perturbation",
)

#: Default master seed; every experiment is reproducible from its seed.
DEFAULT_SEED = 20180917

# Roundoff slack when checking that each scenario's own optimum is best.
_OPT_RTOL = 1e-9


@dataclass(frozen=True)
class ExperimentConfig:
    family: str = "random-nonultrametric"
    instances: int = 10_000
    prob_mode: str = "per-category"
    intervals_preset: str = "table1"
    category_mode: str = "mixed"
    perturb: float = 0.0
    rho: float | None = None
    seed: int = DEFAULT_SEED
    workers: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown experiment family {self.family!r}")
        if self.instances < 1:
            raise ValueError("need at least one instance")
        if self.intervals_preset not in INTERVAL_PRESETS:
            raise ValueError(f"unknown intervals preset {self.intervals_preset!r}")
        if not 0 <= self.perturb < 1:
            raise ValueError("perturbation fraction must lie in [0, 1)")
        if self.family == "fixed-tree-perturbation" and self.perturb == 0:
            raise ValueError("the perturbation experiment needs a non-zero fraction")
        if self.rho is not None and not 0 <= self.rho <= 1:
            raise ValueError("rho must lie in [0, 1]")
        if self.workers < 1:
            raise ValueError("workers must be positive")

    @property
    def gen_params(self) -> GenParams:
        return GenParams(
            intervals=INTERVAL_PRESETS[self.intervals_preset],
            category_mode=self.category_mode,
            probability_mode=self.prob_mode,
            ultrametric=self.family == "random-ultrametric",
            rho_choices=(0.1, 0.2, 0.3, 0.4, 0.5) if self.rho is None else (self.rho,),
        )


@dataclass(frozen=True)
class InstanceResult:
    index: int
    seed: int
    n_species: int
    n_internal: int
    d_max: int
    lambda_max: int | None
    category_case: str
    rho: float
    k: int
    total_pd1: float
    total_pd2: float
    longest_path: float
    shortest_path: float
    category_counts: tuple[int, ...] | None
    scenario1: tuple[float, ...] | None
    scenario2: tuple[float, ...] | None
    epd0_1: float
    epd0_2: float
    epd11: float
    epd12: float
    epd21: float
    epd22: float
    gap1: float
    gap2: float
    dissimilarity: float
    s1_by_category: tuple[int, ...] | None
    s2_by_category: tuple[int, ...] | None
    S1: tuple[int, ...]
    S2: tuple[int, ...]


@dataclass(frozen=True)
class BatchStats:
    count: int
    gap_mean: float
    gap_std: float
    gap_max: float
    dissimilarity_max: float
    min_species: int
    max_species: int
    argmax_index: int
    argmax: InstanceResult = field(repr=False)

    @property
    def dissimilarity_at_max_gap(self) -> float:
        return self.argmax.dissimilarity


def gaps(epd11: float, epd12: float, epd21: float, epd22: float) -> tuple[float, float]:
    """Relative losses ``(epd11 - epd12) / epd11`` and ``(epd22 - epd21) / epd22``."""
    if not (epd11 > 0 and epd22 > 0):
        raise ValueError("optimal ePD values must be positive")
    return (epd11 - epd12) / epd11, (epd22 - epd21) / epd22


def dissimilarity(S1, S2) -> float:
    """``|S1 ^ S2| / |S1 | S2|``; 0 when both sets are empty."""
    a, b = set(S1), set(S2)
    union = a | b
    if not union:
        log.warning("dissimilarity of two empty sets reported as 0")
        return 0.0
    return len(a ^ b) / len(union)


def _by_category(categories, species) -> tuple[int, ...] | None:
    if categories is None:
        return None
    counts = np.bincount(np.asarray(categories)[list(species)], minlength=6)
    return tuple(int(c) for c in counts[1:6])


def _clamp(gap: float) -> float:
    # distinct but tied optimal sets can differ by roundoff only
    if gap < 0:
        if gap < -_OPT_RTOL:
            raise AssertionError(f"greedy set beaten by the other scenario's set (gap {gap})")
        return 0.0
    return gap


def solve_instance(instance: Instance) -> InstanceResult:
    """Optimal sets under both scenarios and the four cross-scenario ePDs."""
    t1, t2 = instance.trees
    p1, p2 = instance.probs1, instance.probs2
    k = instance.k
    S1 = tuple(sorted(greedy_protect(t1, p1, k).species))
    S2 = tuple(sorted(greedy_protect(t2, p2, k).species))
    e11 = epd_with_protection(t1, p1, S1)
    e12 = epd_with_protection(t1, p1, S2)
    e21 = epd_with_protection(t2, p2, S1)
    e22 = epd_with_protection(t2, p2, S2)
    g1, g2 = gaps(e11, e12, e21, e22)
    depth = t1.leaf_depths()
    prov = instance.provenance
    cats = instance.categories
    return InstanceResult(
        index=int(prov.get("index", 0)),
        seed=int(prov.get("seed", 0)),
        n_species=t1.n_species,
        n_internal=t1.n_internal,
        d_max=int(prov["d_max"]),
        lambda_max=prov.get("lambda_max"),
        category_case=str(prov.get("category_case", "given")),
        rho=float(prov["rho"]),
        k=k,
        total_pd1=total_pd(t1),
        total_pd2=total_pd(t2),
        longest_path=float(depth.max()),
        shortest_path=float(depth.min()),
        category_counts=None
        if cats is None
        else tuple(int(c) for c in np.bincount(cats, minlength=6)[1:6]),
        scenario1=instance.scenario1,
        scenario2=instance.scenario2,
        epd0_1=epd(t1, p1),
        epd0_2=epd(t2, p2),
        epd11=e11,
        epd12=e12,
        epd21=e21,
        epd22=e22,
        gap1=_clamp(g1),
        gap2=_clamp(g2),
        dissimilarity=dissimilarity(S1, S2),
        s1_by_category=_by_category(cats, S1),
        s2_by_category=_by_category(cats, S2),
        S1=S1,
        S2=S2,
    )


def summarize(results) -> BatchStats:
    """Pooled statistics over both gaps of every instance.

    Results are ordered by instance index first; the standard deviation is
    the population one. The argmax instance is the first one (in index order,
    gap1 before gap2) attaining the largest gap.
    """
    results = sorted(results, key=lambda r: r.index)
    if not results:
        raise ValueError("cannot summarize an empty batch")
    pooled = np.array([g for r in results for g in (r.gap1, r.gap2)])
    at = int(np.argmax(pooled)) // 2
    return BatchStats(
        count=len(results),
        gap_mean=float(pooled.mean()),
        gap_std=float(pooled.std()),
        gap_max=float(pooled.max()),
        dissimilarity_max=max(r.dissimilarity for r in results),
        min_species=min(r.n_species for r in results),
        max_species=max(r.n_species for r in results),
        argmax_index=results[at].index,
        argmax=results[at],
    )


# -- batch driver --------------------------------------------------------

_WORKER_STATE: dict = {}


def _make_instance(config: ExperimentConfig, index: int, fixed) -> Instance:
    if config.family.startswith("random"):
        return gen_instance(config.seed, index, config.gen_params)
    tree, categories, probs = fixed
    if config.family == "fixed-tree-perturbation" and probs is None:
        lo, hi = np.asarray(INTERVAL_PRESETS[config.intervals_preset]).T
        mid = ((lo + hi) / 2)[np.asarray(categories) - 1]
        probs = (mid, mid)
    return gen_fixed_tree_instance(
        config.seed,
        index,
        tree,
        categories=categories,
        probs=probs,
        params=config.gen_params,
        perturb=config.perturb if config.family == "fixed-tree-perturbation" else 0.0,
        rho=config.rho,
    )


def _solve_index(index: int) -> InstanceResult:
    cfg = _WORKER_STATE["config"]
    return solve_instance(_make_instance(cfg, index, _WORKER_STATE["fixed"]))


def _init_worker(config, fixed):
    _WORKER_STATE["config"] = config
    _WORKER_STATE["fixed"] = fixed


def run_batch(
    config: ExperimentConfig,
    tree: Phylogeny | None = None,
    categories=None,
    probs=None,
    progress=None,
) -> tuple[BatchStats, list[InstanceResult]]:
    """Generate and solve ``config.instances`` instances.

    Fixed-tree families need ``tree`` plus ``categories`` and/or a ``probs``
    pair. Output does not depend on ``config.workers``.
    """
    fixed = None
    if config.family.startswith("fixed"):
        if tree is None or (categories is None and probs is None):
            raise ValueError(f"{config.family} needs a tree and a species table")
        fixed = (tree, categories, probs)
    elif tree is not None:
        raise ValueError(f"{config.family} generates its own trees")

    indices = range(config.instances)
    if config.workers == 1:
        _init_worker(config, fixed)
        it = map(_solve_index, indices)
        results = _collect(it, progress)
    else:
        ctx = multiprocessing.get_context("fork")
        chunk = max(1, config.instances // (config.workers * 8))
        with ctx.Pool(config.workers, _init_worker, (config, fixed)) as pool:
            results = _collect(pool.imap_unordered(_solve_index, indices, chunk), progress)
    results.sort(key=lambda r: r.index)
    return summarize(results), results


def _collect(it, progress):
    out = []
    for r in it:
        out.append(r)
        if progress is not None:
            progress(len(out))
    return out


def with_identical_scenarios(instance: Instance) -> Instance:
    """Copy of ``instance`` whose second scenario equals the first."""
    return replace(instance, probs2=instance.probs1, scenario2=instance.scenario1, tree2=None)
