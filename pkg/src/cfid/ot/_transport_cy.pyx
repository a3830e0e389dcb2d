# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled transportation simplex.

Step-for-step port of ``_transport_py.transport``; see that module for the
algorithm description. Pivot choices, tie-breaks and the Bland switch are
identical so both backends return the same plan.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()

OPTIMAL = 0
ITERATION_LIMIT = 1


cdef void _build_tree(Py_ssize_t m, Py_ssize_t n, Py_ssize_t[::1] bi, Py_ssize_t[::1] bj,
                      Py_ssize_t[::1] start, Py_ssize_t[::1] fill, Py_ssize_t[::1] edges) nogil:
    cdef Py_ssize_t nodes = m + n, nb = m + n - 1, k, node
    for node in range(nodes + 1):
        start[node] = 0
    for k in range(nb):
        start[bi[k] + 1] += 1
        start[m + bj[k] + 1] += 1
    for node in range(nodes):
        start[node + 1] += start[node]
    for node in range(nodes):
        fill[node] = start[node]
    # edges appended per node in increasing k, matching the list order of the fallback
    for k in range(nb):
        node = bi[k]
        edges[fill[node]] = k
        fill[node] += 1
        node = m + bj[k]
        edges[fill[node]] = k
        fill[node] += 1


def transport(cost_in, a, b, double tol, Py_ssize_t max_iter):
    cdef double[:, ::1] cost = np.ascontiguousarray(cost_in, dtype=np.float64)
    cdef Py_ssize_t m = cost.shape[0], n = cost.shape[1]
    cdef Py_ssize_t nodes = m + n, nb = m + n - 1
    flow_arr = np.zeros((m, n), dtype=np.float64)
    cdef double[:, ::1] flow = flow_arr
    cdef double[::1] sa = np.array(a, dtype=np.float64)
    cdef double[::1] sb = np.array(b, dtype=np.float64)
    cdef Py_ssize_t[::1] bi = np.zeros(nb, dtype=np.intp)
    cdef Py_ssize_t[::1] bj = np.zeros(nb, dtype=np.intp)
    cdef unsigned char[:, ::1] basic = np.zeros((m, n), dtype=np.uint8)
    cdef double[::1] u = np.zeros(m, dtype=np.float64)
    cdef double[::1] v = np.zeros(n, dtype=np.float64)
    cdef unsigned char[::1] seen = np.zeros(nodes, dtype=np.uint8)
    cdef Py_ssize_t[::1] stack = np.zeros(nodes, dtype=np.intp)
    cdef Py_ssize_t[::1] start = np.zeros(nodes + 1, dtype=np.intp)
    cdef Py_ssize_t[::1] fill = np.zeros(nodes, dtype=np.intp)
    cdef Py_ssize_t[::1] edges = np.zeros(2 * nb, dtype=np.intp)
    cdef Py_ssize_t[::1] parent_edge = np.zeros(nodes, dtype=np.intp)
    cdef Py_ssize_t[::1] path = np.zeros(nodes, dtype=np.intp)

    cdef Py_ssize_t i, j, k, e, top, node, other, plen, pos, ei, ej, leave, li, lj
    cdef Py_ssize_t it = 0, degenerate_run = 0, bland_after = m + n
    cdef double f, r, best, theta, ui
    cdef bint bland

    with nogil:
        # northwest corner
        i = 0
        j = 0
        k = 0
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
        for k in range(nb):
            basic[bi[k], bj[k]] = 1

        while it < max_iter:
            _build_tree(m, n, bi, bj, start, fill, edges)

            # potentials, depth-first from row 0 with u[0] = 0
            for node in range(nodes):
                seen[node] = 0
            u[0] = 0.0
            seen[0] = 1
            stack[0] = 0
            top = 1
            while top > 0:
                top -= 1
                node = stack[top]
                for e in range(start[node], start[node + 1]):
                    k = edges[e]
                    i = bi[k]
                    j = bj[k]
                    if node < m:
                        other = m + j
                        if not seen[other]:
                            v[j] = cost[i, j] - u[i]
                            seen[other] = 1
                            stack[top] = other
                            top += 1
                    else:
                        if not seen[i]:
                            u[i] = cost[i, j] - v[j]
                            seen[i] = 1
                            stack[top] = i
                            top += 1

            # pricing
            ei = -1
            ej = -1
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
                        ei = i
                        ej = j
                        if bland:
                            break
                if bland and ei >= 0:
                    break
            if ei < 0:
                break

            # tree path from row ei to column ej
            for node in range(nodes):
                seen[node] = 0
                parent_edge[node] = -1
            seen[ei] = 1
            stack[0] = ei
            top = 1
            while top > 0:
                top -= 1
                node = stack[top]
                if node == m + ej:
                    break
                for e in range(start[node], start[node + 1]):
                    k = edges[e]
                    if node < m:
                        other = m + bj[k]
                    else:
                        other = bi[k]
                    if not seen[other]:
                        seen[other] = 1
                        parent_edge[other] = k
                        stack[top] = other
                        top += 1
            plen = 0
            node = m + ej
            while node != ei:
                k = parent_edge[node]
                path[plen] = k
                plen += 1
                if node >= m:
                    node = bi[k]
                else:
                    node = m + bj[k]
            # reverse into row-to-column order
            for pos in range(plen // 2):
                k = path[pos]
                path[pos] = path[plen - 1 - pos]
                path[plen - 1 - pos] = k

            theta = -1.0
            leave = -1
            for pos in range(0, plen, 2):
                k = path[pos]
                f = flow[bi[k], bj[k]]
                if leave < 0 or f < theta:
                    theta = f
                    leave = k
            for pos in range(plen):
                k = path[pos]
                if pos % 2 == 0:
                    flow[bi[k], bj[k]] -= theta
                else:
                    flow[bi[k], bj[k]] += theta
            flow[ei, ej] = theta
            li = bi[leave]
            lj = bj[leave]
            flow[li, lj] = 0.0
            basic[li, lj] = 0
            basic[ei, ej] = 1
            bi[leave] = ei
            bj[leave] = ej

            if theta == 0.0:
                degenerate_run += 1
            else:
                degenerate_run = 0
            it += 1

    if it >= max_iter:
        return flow_arr, ITERATION_LIMIT, it
    return flow_arr, OPTIMAL, it
