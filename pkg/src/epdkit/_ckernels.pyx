# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same arithmetic, in the same order, as ``_pykernels``."""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs

cnp.import_array()

ctypedef cnp.int64_t i64


cdef void _products(const i64[::1] parent, const i64[::1] leaf_node,
                    const double[::1] p_pos, double[::1] prod) noexcept nogil:
    cdef Py_ssize_t m = parent.shape[0]
    cdef Py_ssize_t v, pos
    for v in range(m):
        prod[v] = 1.0
    for pos in range(leaf_node.shape[0]):
        prod[leaf_node[pos]] = p_pos[pos]
    for v in range(m - 1, 0, -1):
        prod[parent[v]] *= prod[v]


def extinction_products(const i64[::1] parent, const i64[::1] leaf_node, p_pos):
    cdef const double[::1] pp = np.ascontiguousarray(p_pos, dtype=np.float64)
    out = np.empty(parent.shape[0], dtype=np.float64)
    cdef double[::1] prod = out
    with nogil:
        _products(parent, leaf_node, pp, prod)
    return out


cdef void _path_gains(const i64[::1] parent, const double[::1] length,
                      const i64[::1] leaf_node, const double[::1] prod,
                      double[::1] acc, double[::1] gains) noexcept nogil:
    cdef Py_ssize_t m = parent.shape[0]
    cdef Py_ssize_t v, pos
    acc[0] = 0.0
    for v in range(1, m):
        acc[v] = acc[parent[v]] + length[v] * prod[v]
    for pos in range(leaf_node.shape[0]):
        gains[pos] = acc[leaf_node[pos]]


def path_gains(const i64[::1] parent, const double[::1] length,
               const i64[::1] leaf_node, const double[::1] prod):
    acc = np.empty(parent.shape[0], dtype=np.float64)
    out = np.empty(leaf_node.shape[0], dtype=np.float64)
    cdef double[::1] a = acc
    cdef double[::1] g = out
    with nogil:
        _path_gains(parent, length, leaf_node, prod, a, g)
    return out


def greedy(const i64[::1] parent, const double[::1] length, const i64[::1] leaf_node,
           const i64[::1] leaf_lo, const i64[::1] leaf_hi, const i64[::1] species_at,
           p_pos, Py_ssize_t k, double rel_tol):
    cdef Py_ssize_t m = parent.shape[0]
    cdef Py_ssize_t n = leaf_node.shape[0]
    cdef const double[::1] pp = np.ascontiguousarray(p_pos, dtype=np.float64)
    prod_arr = np.empty(m, dtype=np.float64)
    acc_arr = np.empty(m, dtype=np.float64)
    gains_arr = np.empty(n, dtype=np.float64)
    cleared_arr = np.zeros(m, dtype=np.uint8)
    picks_arr = np.empty(k, dtype=np.int64)
    won_arr = np.empty(k, dtype=np.float64)
    cdef double[::1] prod = prod_arr
    cdef double[::1] acc = acc_arr
    cdef double[::1] gains = gains_arr
    cdef cnp.uint8_t[::1] cleared = cleared_arr
    cdef i64[::1] picks = picks_arr
    cdef double[::1] won = won_arr
    cdef Py_ssize_t t, i, pos, v
    cdef i64 best_sp
    cdef double best, thr, w, scale = 0.0

    with nogil:
        _products(parent, leaf_node, pp, prod)
        _path_gains(parent, length, leaf_node, prod, acc, gains)
        for t in range(k):
            best = -INFINITY
            for i in range(n):
                if gains[i] > best:
                    best = gains[i]
            thr = best - rel_tol * (fabs(best) if fabs(best) > scale else scale)
            pos = -1
            best_sp = 0
            for i in range(n):
                if gains[i] >= thr and (pos < 0 or species_at[i] < best_sp):
                    pos = i
                    best_sp = species_at[i]
            if t == 0:
                scale = fabs(best)
            picks[t] = pos
            won[t] = best
            gains[pos] = -INFINITY
            v = leaf_node[pos]
            while v != 0 and not cleared[v]:
                cleared[v] = 1
                w = length[v] * prod[v]
                if w != 0.0:
                    for i in range(leaf_lo[v], leaf_hi[v]):
                        gains[i] -= w
                v = parent[v]
    return picks_arr, won_arr
