"""Expected phylogenetic diversity and optimal protection sets.

The expected PD of a tree whose species go extinct independently with
probabilities ``p`` is ``sum_a length_a * (1 - P_a)``, where ``P_a`` is the
probability that every species below arc ``a`` is lost. Protecting a species
sets its extinction probability to 0.

The greedy algorithm (identical to iterated HEDGE) is exactly optimal for
choosing ``k`` species to protect; :func:`brute_force_protect` and
:func:`epd_by_outcome_enumeration` are exhaustive oracles used to check it.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from . import kernels
from .tree import Phylogeny, clade

#: Gains within this relative distance of the round's best count as tied;
#: ties go to the smallest species index.
TIE_RTOL = 1e-12

#: Largest species count accepted by the exhaustive oracles.
ORACLE_MAX_SPECIES = 20


class ProbabilityError(ValueError):
    """Extinction probabilities of the wrong shape or outside [0, 1]."""


@dataclass(frozen=True)
class ProtectionSet:
    """Result of :func:`greedy_protect`.

    ``species`` are in pick order and ``gains[t]`` is the ePD increase of
    round ``t``; ``base_epd + sum(gains) == epd`` up to rounding.
    """

    species: tuple[int, ...]
    gains: tuple[float, ...]
    base_epd: float
    epd: float

    def __len__(self) -> int:
        return len(self.species)

    def __iter__(self):
        return iter(self.species)


def check_probs(tree: Phylogeny, probs) -> np.ndarray:
    p = np.asarray(probs, dtype=np.float64)
    if p.shape != (tree.n_species,):
        raise ProbabilityError(
            f"expected {tree.n_species} extinction probabilities, got shape {p.shape}"
        )
    bad = ~((p >= 0.0) & (p <= 1.0))
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise ProbabilityError(f"probability {p[i]!r} of species {i} outside [0, 1]")
    return p


def _protected(tree: Phylogeny, probs, protect: Iterable[int]) -> np.ndarray:
    p = check_probs(tree, probs).copy()
    for s in protect:
        p[tree._check_species(s)] = 0.0
    return p


def _epd(tree: Phylogeny, p: np.ndarray) -> float:
    prod = kernels.extinction_products(tree.parent, tree.leaf_node, p[tree.species_at])
    return float(np.dot(tree.length[1:], 1.0 - prod[1:]))


def epd(tree: Phylogeny, probs) -> float:
    """Expected PD with no species protected."""
    return _epd(tree, check_probs(tree, probs))


def epd_with_protection(tree: Phylogeny, probs, protect: Iterable[int]) -> float:
    """Expected PD when the species in ``protect`` are sure to survive."""
    return _epd(tree, _protected(tree, probs, protect))


def hedge_scores(tree: Phylogeny, probs) -> np.ndarray:
    """ePD increase from protecting each species alone.

    Computed as the sum of ``length_a * P_a`` along the species' root path,
    which is exactly what protecting it recovers.
    """
    p = check_probs(tree, probs)
    prod = kernels.extinction_products(tree.parent, tree.leaf_node, p[tree.species_at])
    by_pos = kernels.path_gains(tree.parent, tree.length, tree.leaf_node, prod)
    scores = np.empty(tree.n_species)
    scores[tree.species_at] = by_pos
    return scores


def argmax_tied(values) -> int:
    """Index of the maximum, smallest index among values within TIE_RTOL."""
    v = np.asarray(values, dtype=np.float64)
    best = v.max()
    return int(np.flatnonzero(v >= best - TIE_RTOL * abs(best))[0])


def greedy_protect(tree: Phylogeny, probs, k: int) -> ProtectionSet:
    """Choose ``k`` species to protect by repeatedly taking the best gain.

    Each round protects the species whose protection raises the ePD most,
    given the species already protected. Protecting species ``j`` zeroes
    ``P_a`` on every arc of ``j``'s root path, so gains are updated along
    that path only.
    """
    p = check_probs(tree, probs)
    n = tree.n_species
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in [0, {n}], got {k}")
    base = _epd(tree, p)
    picks, gains = kernels.greedy(
        tree.parent,
        tree.length,
        tree.leaf_node,
        tree.leaf_lo,
        tree.leaf_hi,
        tree.species_at,
        p[tree.species_at],
        int(k),
        TIE_RTOL,
    )
    species = tuple(int(s) for s in tree.species_at[picks])
    gains = tuple(float(g) for g in gains)
    return ProtectionSet(species, gains, base, math.fsum((base, *gains)))


def brute_force_protect(
    tree: Phylogeny, probs, k: int, max_species: int = ORACLE_MAX_SPECIES
) -> tuple[tuple[int, ...], float]:
    """Best size-``k`` protection set by trying every subset.

    Ties (within TIE_RTOL) go to the lexicographically smallest set.
    """
    p = check_probs(tree, probs)
    n = tree.n_species
    if n > max_species:
        raise ValueError(f"{n} species exceeds the exhaustive-search cap of {max_species}")
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in [0, {n}], got {k}")
    best_set: tuple[int, ...] = ()
    best = -math.inf
    for combo in itertools.combinations(range(n), k):
        q = p.copy()
        q[list(combo)] = 0.0
        val = _epd(tree, q)
        if val > best + TIE_RTOL * abs(best) or best == -math.inf:
            best, best_set = val, combo
    return best_set, best


def epd_by_outcome_enumeration(
    tree: Phylogeny, probs, max_species: int = ORACLE_MAX_SPECIES
) -> float:
    """Expected PD as an explicit sum over all 2**n survival outcomes.

    Outcome ``mask`` (bit ``i`` set when species ``i`` survives) has
    probability ``prod(1 - p_i for survivors) * prod(p_i for the lost)`` and
    PD equal to the total length of arcs whose clade meets the survivors.
    """
    p = check_probs(tree, probs)
    n = tree.n_species
    if n > max_species:
        raise ValueError(f"{n} species exceeds the enumeration cap of {max_species}")
    masks = np.arange(1 << n, dtype=np.int64)
    weight = np.ones(1 << n)
    for i in range(n):
        alive = (masks >> i) & 1
        weight *= np.where(alive == 1, 1.0 - p[i], p[i])
    pd = np.zeros(1 << n)
    for a in tree.arcs():
        bits = sum(1 << s for s in clade(tree, a))
        pd += tree.length[a] * ((masks & bits) != 0)
    return float(math.fsum(weight * pd))
