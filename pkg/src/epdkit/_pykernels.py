"""Pure-Python/numpy kernels.

Reference implementation of the hot loops; ``_ckernels.pyx`` mirrors it
operation for operation so both produce bit-identical floats.

All arrays follow the :class:`~epdkit.tree.Phylogeny` preorder layout.
"""

import numpy as np


def extinction_products(parent, leaf_node, p_pos):
    """Probability that every species below each node goes extinct.

    ``p_pos`` holds extinction probabilities in leaf-position order.
    """
    m = len(parent)
    prod = [1.0] * m
    for pos, v in enumerate(leaf_node.tolist()):
        prod[v] = float(p_pos[pos])
    par = parent.tolist()
    for v in range(m - 1, 0, -1):
        prod[par[v]] *= prod[v]
    return np.array(prod)


def path_gains(parent, length, leaf_node, prod):
    """Sum of ``length * prod`` along each leaf's root path, per leaf position."""
    m = len(parent)
    par = parent.tolist()
    ln = length.tolist()
    pr = prod.tolist()
    acc = [0.0] * m
    for v in range(1, m):
        acc[v] = acc[par[v]] + ln[v] * pr[v]
    return np.array(acc)[leaf_node]


def _pick(gains, species_at, rel_tol, scale):
    best = gains.max()
    thr = best - rel_tol * max(abs(best), scale)
    cand = np.flatnonzero(gains >= thr)
    return int(cand[np.argmin(species_at[cand])]), float(best)


def greedy(parent, length, leaf_node, leaf_lo, leaf_hi, species_at, p_pos, k, rel_tol):
    """Greedy k-species protection with path-local gain updates.

    Returns ``(picks, gains)``: leaf positions in pick order and the winning
    marginal gain of each round.
    """
    prod = extinction_products(parent, leaf_node, p_pos)
    gains = path_gains(parent, length, leaf_node, prod)
    par = parent.tolist()
    ln = length.tolist()
    pr = prod.tolist()
    lo = leaf_lo.tolist()
    hi = leaf_hi.tolist()
    cleared = [False] * len(par)
    picks = np.empty(k, dtype=np.int64)
    won = np.empty(k, dtype=np.float64)
    scale = 0.0
    for t in range(k):
        pos, best = _pick(gains, species_at, rel_tol, scale)
        if t == 0:
            scale = abs(best)
        picks[t] = pos
        won[t] = best
        gains[pos] = -np.inf
        v = int(leaf_node[pos])
        while v != 0 and not cleared[v]:
            cleared[v] = True
            w = ln[v] * pr[v]
            if w != 0.0:
                gains[lo[v] : hi[v]] -= w
            v = par[v]
    return picks, won
