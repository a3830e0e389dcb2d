"""Pure-Python transportation simplex (fallback for the compiled kernel).

The algorithm is the classical primal transportation simplex (MODI method):
a northwest-corner basic solution, node potentials from the basis spanning
tree, Dantzig pricing, and a pivot around the unique cycle closed by the
entering cell. After a run of degenerate pivots the pricing switches to
Bland's rule (first improving cell in row-major order) to break cycling.

The compiled module ``_transport_cy`` implements the same steps in the same
order so the two backends produce identical plans.
"""
import numpy as np

# status codes shared with the compiled kernel
OPTIMAL = 0
ITERATION_LIMIT = 1


def _northwest_corner(a, b, flow, bi, bj):
    m, n = len(a), len(b)
    sa = list(a)
    sb = list(b)
    i = j = k = 0
    while True:
        f = sa[i] if sa[i] < sb[j] else sb[j]
        flow[i, j] = f
        bi[k] = i
        bj[k] = j
        k += 1
        sa[i] -= f
        sb[j] -= f
        if i == m - 1 and j == n - 1:
            break
        if i == m - 1:
            j += 1
        elif j == n - 1:
            i += 1
        elif sa[i] <= sb[j]:
            i += 1
        else:
            j += 1


def _tree(m, n, bi, bj):
    """Adjacency lists of the basis tree; nodes 0..m-1 are rows, m..m+n-1 columns."""
    adj = [[] for _ in range(m + n)]
    for k in range(m + n - 1):
        adj[bi[k]].append(k)
        adj[m + bj[k]].append(k)
    return adj


def _potentials(cost, m, n, bi, bj, adj):
    u = [0.0] * m
    v = [0.0] * n
    seen = [False] * (m + n)
    seen[0] = True
    stack = [0]
    while stack:
        node = stack.pop()
        for k in adj[node]:
            i = bi[k]
            j = bj[k]
            if node < m:
                other = m + j
                if not seen[other]:
                    v[j] = cost[i, j] - u[i]
                    seen[other] = True
                    stack.append(other)
            else:
                if not seen[i]:
                    u[i] = cost[i, j] - v[j]
                    seen[i] = True
                    stack.append(i)
    return u, v


def _path_edges(m, bi, bj, adj, start, goal):
    """Basis edges on the tree path from node ``start`` to node ``goal``, in order."""
    parent_edge = [-1] * len(adj)
    seen = [False] * len(adj)
    seen[start] = True
    stack = [start]
    while stack:
        node = stack.pop()
        if node == goal:
            break
        for k in adj[node]:
            other = m + bj[k] if node < m else bi[k]
            if not seen[other]:
                seen[other] = True
                parent_edge[other] = k
                stack.append(other)
    edges = []
    node = goal
    while node != start:
        k = parent_edge[node]
        edges.append(k)
        node = bi[k] if node >= m else m + bj[k]
    edges.reverse()
    return edges


def transport(cost, a, b, tol, max_iter):
    """Solve ``min <P, cost>`` over couplings of ``a`` and ``b``.

    ``a`` and ``b`` must be nonnegative with equal totals. Returns
    ``(plan, status, iterations)``.
    """
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    m, n = cost.shape
    flow = np.zeros((m, n), dtype=np.float64)
    bi = [0] * (m + n - 1)
    bj = [0] * (m + n - 1)
    _northwest_corner([float(t) for t in a], [float(t) for t in b], flow, bi, bj)
    basic = np.zeros((m, n), dtype=bool)
    for k in range(m + n - 1):
        basic[bi[k], bj[k]] = True

    degenerate_run = 0
    bland_after = m + n
    it = 0
    while it < max_iter:
        adj = _tree(m, n, bi, bj)
        u, v = _potentials(cost, m, n, bi, bj, adj)

        ei = ej = -1
        best = -tol
        bland = degenerate_run > bland_after
        for i in range(m):
            ui = u[i]
            for j in range(n):
                if basic[i, j]:
                    continue
                r = cost[i, j] - ui - v[j]
                if r < best:
                    best = r
                    ei, ej = i, j
                    if bland:
                        break
            if bland and ei >= 0:
                break
        if ei < 0:
            return flow, OPTIMAL, it

        # The path from row ei to column ej has odd length; its edges alternate
        # starting with a donor (flow decreases) at row ei.
        path = _path_edges(m, bi, bj, adj, ei, m + ej)
        theta = -1.0
        leave = -1
        for pos in range(0, len(path), 2):
            k = path[pos]
            f = flow[bi[k], bj[k]]
            if leave < 0 or f < theta:
                theta = f
                leave = k
        for pos, k in enumerate(path):
            if pos % 2 == 0:
                flow[bi[k], bj[k]] -= theta
            else:
                flow[bi[k], bj[k]] += theta
        flow[ei, ej] = theta
        li, lj = bi[leave], bj[leave]
        flow[li, lj] = 0.0
        basic[li, lj] = False
        basic[ei, ej] = True
        bi[leave] = ei
        bj[leave] = ej

        degenerate_run = degenerate_run + 1 if theta == 0.0 else 0
        it += 1
    return flow, ITERATION_LIMIT, it
