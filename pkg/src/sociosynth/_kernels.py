"""Compiled graph kernels over compressed adjacency arrays."""

import numba
import numpy as np


@numba.njit(cache=True)
def triangles_per_node(indptr, indices):
    """Number of triangles through each node; neighbor lists must be sorted."""
    n = len(indptr) - 1
    tri = np.zeros(n, np.int64)
    for u in range(n):
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            if v <= u:
                continue
            # count w > v adjacent to both u and v
            i = p + 1
            j = indptr[v]
            iend = indptr[u + 1]
            jend = indptr[v + 1]
            while i < iend and j < jend:
                a = indices[i]
                b = indices[j]
                if a < b:
                    i += 1
                elif b < a:
                    j += 1
                else:
                    if a > v:
                        tri[u] += 1
                        tri[v] += 1
                        tri[a] += 1
                    i += 1
                    j += 1
    return tri


@numba.njit(cache=True)
def bfs(indptr, indices, source, dist, queue):
    """Hop distances from ``source`` into ``dist`` (-1 = unreached).

    Returns the eccentricity of ``source`` and the number of reached nodes.
    """
    dist[:] = -1
    dist[source] = 0
    queue[0] = source
    head = 0
    tail = 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u] + 1
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            if dist[v] < 0:
                dist[v] = du
                queue[tail] = v
                tail += 1
    return dist[queue[tail - 1]], tail


@numba.njit(cache=True)
def bounding_eccentricities(indptr, indices):
    """Exact (radius, diameter, number of BFS runs) of a connected graph.

    Keeps a lower and an upper eccentricity bound per node. Each BFS from a
    chosen node v tightens every bound through the triangle inequality:
    max(ecc(v) - d(v,w), d(v,w)) <= ecc(w) <= ecc(v) + d(v,w). Nodes whose
    bounds can no longer move the radius or diameter drop out of the
    candidate set; the search stops when both extremes are pinned.
    Sources alternate between the largest upper bound and the smallest
    lower bound, ties broken by higher degree.
    """
    n = len(indptr) - 1
    lo = np.zeros(n, np.int64)
    hi = np.full(n, n, np.int64)
    active = np.ones(n, np.bool_)
    n_active = n
    dist = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    deg = indptr[1:] - indptr[:-1]
    d_lo = 0
    d_hi = n
    r_lo = 0
    r_hi = n
    pick_upper = True
    runs = 0
    while n_active > 0 and (d_lo < d_hi or r_lo < r_hi):
        best = -1
        for w in range(n):
            if not active[w]:
                continue
            if best < 0:
                best = w
            elif pick_upper:
                if hi[w] > hi[best] or (hi[w] == hi[best] and deg[w] > deg[best]):
                    best = w
            else:
                if lo[w] < lo[best] or (lo[w] == lo[best] and deg[w] > deg[best]):
                    best = w
        pick_upper = not pick_upper
        ecc, _ = bfs(indptr, indices, best, dist, queue)
        runs += 1
        lo[best] = ecc
        hi[best] = ecc
        for w in range(n):
            if not active[w]:
                continue
            dw = dist[w]
            a = ecc - dw
            if dw > a:
                a = dw
            if a > lo[w]:
                lo[w] = a
            b = ecc + dw
            if b < hi[w]:
                hi[w] = b
            if lo[w] > d_lo:
                d_lo = lo[w]
            if hi[w] < r_hi:
                r_hi = hi[w]
        d_hi = d_lo
        r_lo = r_hi
        for w in range(n):
            if not active[w]:
                continue
            if hi[w] > d_hi:
                d_hi = hi[w]
            if lo[w] < r_lo:
                r_lo = lo[w]
        for w in range(n):
            if active[w] and (lo[w] == hi[w] or (hi[w] <= d_lo and lo[w] >= r_hi)):
                active[w] = False
                n_active -= 1
    return r_hi, d_lo, runs
