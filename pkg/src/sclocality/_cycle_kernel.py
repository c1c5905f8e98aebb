"""Compiled kernel for exact short-cycle counting in bipartite graphs.

A cycle of length 2h is anchored at its smallest-index check node ``a``.
The node diametrically opposite ``a`` is reached by two internally disjoint
simple paths of length h whose nodes (other than ``a``) all exceed ``a``
in the check-node order.  Each cycle is therefore one unordered pair of
such paths, and is counted exactly once.

Node ids: check ``i`` is ``i``; variable ``j`` is ``n_checks + j``.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _paths_from(a, half, n_checks, rowptr, rowidx, colptr, colidx, out, store):
    # iterative DFS over simple paths a -> ... of exactly `half` edges
    stack = np.empty(half + 1, np.int64)
    pos = np.empty(half + 1, np.int64)
    stack[0] = a
    pos[0] = rowptr[a]
    depth = 0
    count = 0
    while depth >= 0:
        if depth == half:
            if store:
                for t in range(half + 1):
                    out[count, t] = stack[t]
            count += 1
            depth -= 1
            continue
        cur = stack[depth]
        if cur < n_checks:
            p = pos[depth]
            if p >= rowptr[cur + 1]:
                depth -= 1
                continue
            pos[depth] = p + 1
            nxt = n_checks + rowidx[p]
        else:
            p = pos[depth]
            if p >= colptr[cur - n_checks + 1]:
                depth -= 1
                continue
            pos[depth] = p + 1
            nxt = colidx[p]
            if nxt <= a:
                continue
        seen = False
        for t in range(depth):
            if stack[t] == nxt:
                seen = True
                break
        if seen:
            continue
        depth += 1
        stack[depth] = nxt
        if nxt < n_checks:
            pos[depth] = rowptr[nxt]
        else:
            pos[depth] = colptr[nxt - n_checks]
    return count


@njit(cache=True)
def _count_from(a, half, n_checks, rowptr, rowidx, colptr, colidx):
    dummy = np.empty((1, half + 1), np.int64)
    n = _paths_from(a, half, n_checks, rowptr, rowidx, colptr, colidx, dummy, False)
    if n < 2:
        return 0
    paths = np.empty((n, half + 1), np.int64)
    _paths_from(a, half, n_checks, rowptr, rowidx, colptr, colidx, paths, True)
    ends = paths[:, half].copy()
    order = np.argsort(ends, kind="mergesort")
    total = 0
    i = 0
    while i < n:
        e = ends[order[i]]
        j = i
        while j < n and ends[order[j]] == e:
            j += 1
        for u in range(i, j):
            pu = paths[order[u]]
            for v in range(u + 1, j):
                pv = paths[order[v]]
                disjoint = True
                for s in range(1, half):
                    for t in range(1, half):
                        if pu[s] == pv[t]:
                            disjoint = False
                            break
                    if not disjoint:
                        break
                if disjoint:
                    total += 1
        i = j
    return total


@njit(cache=True)
def count_cycles_csr(n_checks, rowptr, rowidx, colptr, colidx, half):
    total = 0
    for a in range(n_checks):
        total += _count_from(a, half, n_checks, rowptr, rowidx, colptr, colidx)
    return total


@njit(cache=True)
def per_anchor_counts(n_checks, rowptr, rowidx, colptr, colidx, half, anchors):
    out = np.zeros(anchors.shape[0], np.int64)
    for i in range(anchors.shape[0]):
        out[i] = _count_from(anchors[i], half, n_checks, rowptr, rowidx, colptr, colidx)
    return out
