"""Array kernels for the hot inner loops.

Every kernel operates on plain numpy arrays (CSR adjacency where a graph is
involved) so that it can be compiled by numba.  The uncompiled Python
versions are kept in :data:`PY` for benchmarking and cross-checking; the
module-level names are the selected backend (see :mod:`legalnet._accel`).
"""
import numpy as np

from ._accel import USE_NUMBA, jit


def _plogp(x):
    if x > 0.0:
        return x * np.log2(x)
    return 0.0


def _scc_labels(indptr, indices):
    """Iterative Tarjan.  Returns a component label per node."""
    n = indptr.shape[0] - 1
    index = np.full(n, -1, np.int64)
    low = np.zeros(n, np.int64)
    onstack = np.zeros(n, np.bool_)
    stack = np.empty(n, np.int64)
    call_node = np.empty(n, np.int64)
    call_edge = np.empty(n, np.int64)
    labels = np.full(n, -1, np.int64)
    sp = 0
    counter = 0
    ncomp = 0
    for s in range(n):
        if index[s] != -1:
            continue
        index[s] = counter
        low[s] = counter
        counter += 1
        stack[sp] = s
        sp += 1
        onstack[s] = True
        call_node[0] = s
        call_edge[0] = indptr[s]
        csp = 1
        while csp > 0:
            v = call_node[csp - 1]
            e = call_edge[csp - 1]
            if e < indptr[v + 1]:
                call_edge[csp - 1] = e + 1
                w = indices[e]
                if index[w] == -1:
                    index[w] = counter
                    low[w] = counter
                    counter += 1
                    stack[sp] = w
                    sp += 1
                    onstack[w] = True
                    call_node[csp] = w
                    call_edge[csp] = indptr[w]
                    csp += 1
                elif onstack[w] and index[w] < low[v]:
                    low[v] = index[w]
            else:
                csp -= 1
                if low[v] == index[v]:
                    while True:
                        sp -= 1
                        w = stack[sp]
                        onstack[w] = False
                        labels[w] = ncomp
                        if w == v:
                            break
                    ncomp += 1
                if csp > 0:
                    u = call_node[csp - 1]
                    if low[v] < low[u]:
                        low[u] = low[v]
    return labels


def _reachable(indptr, indices, seed):
    """Boolean mask of nodes reachable from any node flagged in ``seed``."""
    n = indptr.shape[0] - 1
    seen = seed.copy()
    queue = np.empty(n, np.int64)
    head = 0
    tail = 0
    for i in range(n):
        if seen[i]:
            queue[tail] = i
            tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        for e in range(indptr[v], indptr[v + 1]):
            w = indices[e]
            if not seen[w]:
                seen[w] = True
                queue[tail] = w
                tail += 1
    return seen


def _weak_labels(n, src, dst):
    """Union-find over an edge list; label = smallest node index of the component."""
    parent = np.arange(n)
    for k in range(src.shape[0]):
        a = src[k]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        b = dst[k]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a < b:
            parent[b] = a
        elif b < a:
            parent[a] = b
    labels = np.empty(n, np.int64)
    for i in range(n):
        a = i
        while parent[a] != a:
            a = parent[a]
        labels[i] = a
    return labels


def _local_moves(indptr, indices, link_flow, node_flow, node_exit,
                 module, mod_flow, mod_exit, mod_size, order, max_sweeps, tol):
    """Greedy node moves that lower the two-level map equation.

    ``link_flow`` holds the flow on each (undirected, non-self) CSR entry;
    ``node_exit`` is the row sum of ``link_flow``.  Module state arrays are
    updated in place.  Returns the number of moves made.
    """
    n = node_flow.shape[0]
    nbr = np.zeros(n)
    mark = np.zeros(n, np.bool_)
    touched = np.empty(n, np.int64)
    free = np.empty(n, np.int64)
    nfree = 0
    for m in range(n):
        if mod_size[m] == 0:
            free[nfree] = m
            nfree += 1
    sum_exit = 0.0
    for m in range(n):
        sum_exit += mod_exit[m]
    total = 0
    for _ in range(max_sweeps):
        moves = 0
        for t in range(order.shape[0]):
            u = order[t]
            a = module[u]
            nt = 0
            for k in range(indptr[u], indptr[u + 1]):
                m = module[indices[k]]
                if not mark[m]:
                    mark[m] = True
                    touched[nt] = m
                    nt += 1
                nbr[m] += link_flow[k]
            p = node_flow[u]
            ex = node_exit[u]
            qa = mod_exit[a] - ex + 2.0 * nbr[a]
            if qa < 0.0:
                qa = 0.0
            pa = mod_flow[a] - p
            old_a = -2.0 * _plogp(mod_exit[a]) + _plogp(mod_exit[a] + mod_flow[a])
            new_a = -2.0 * _plogp(qa) + _plogp(qa + pa)
            base = _plogp(sum_exit)
            best = a
            best_delta = 0.0
            best_q = 0.0
            for i in range(nt):
                b = touched[i]
                if b == a:
                    continue
                qb = mod_exit[b] + ex - 2.0 * nbr[b]
                if qb < 0.0:
                    qb = 0.0
                pb = mod_flow[b] + p
                s_new = sum_exit - mod_exit[a] - mod_exit[b] + qa + qb
                delta = (_plogp(s_new) - base + new_a - old_a
                         - 2.0 * _plogp(qb) + _plogp(qb + pb)
                         + 2.0 * _plogp(mod_exit[b]) - _plogp(mod_exit[b] + mod_flow[b]))
                if delta < best_delta - tol:
                    best_delta = delta
                    best = b
                    best_q = qb
            if mod_size[a] > 1 and nfree > 0:
                b = free[nfree - 1]
                qb = ex
                s_new = sum_exit - mod_exit[a] + qa + qb
                delta = (_plogp(s_new) - base + new_a - old_a
                         - 2.0 * _plogp(qb) + _plogp(qb + p))
                if delta < best_delta - tol:
                    best_delta = delta
                    best = b
                    best_q = qb
            if best != a:
                if mod_size[best] == 0:
                    nfree -= 1
                sum_exit += qa + best_q - mod_exit[a] - mod_exit[best]
                mod_exit[a] = qa
                mod_flow[a] = pa
                mod_size[a] -= 1
                if mod_size[a] == 0:
                    free[nfree] = a
                    nfree += 1
                mod_exit[best] = best_q
                mod_flow[best] += p
                mod_size[best] += 1
                module[u] = best
                moves += 1
            for i in range(nt):
                nbr[touched[i]] = 0.0
                mark[touched[i]] = False
        total += moves
        if moves == 0:
            break
    return total


def _coclass_loop(counts, labels):
    n = labels.shape[0]
    for i in range(n):
        li = labels[i]
        for j in range(n):
            if labels[j] == li:
                counts[i, j] += 1


def _coclass_numpy(counts, labels):
    counts += labels[:, None] == labels[None, :]


def _jaro_winkler(a, b, prefix_scale, max_prefix):
    la = a.shape[0]
    lb = b.shape[0]
    if la == 0 and lb == 0:
        return 1.0
    if la == 0 or lb == 0:
        return 0.0
    window = max(la, lb) // 2 - 1
    if window < 0:
        window = 0
    a_hit = np.zeros(la, np.bool_)
    b_hit = np.zeros(lb, np.bool_)
    matches = 0
    for i in range(la):
        lo = max(0, i - window)
        hi = min(i + window + 1, lb)
        for j in range(lo, hi):
            if not b_hit[j] and a[i] == b[j]:
                a_hit[i] = True
                b_hit[j] = True
                matches += 1
                break
    if matches == 0:
        return 0.0
    half = 0
    k = 0
    for i in range(la):
        if a_hit[i]:
            while not b_hit[k]:
                k += 1
            if a[i] != b[k]:
                half += 1
            k += 1
    m = float(matches)
    jaro = (m / la + m / lb + (m - half / 2.0) / m) / 3.0
    prefix = 0
    limit = min(max_prefix, la, lb)
    while prefix < limit and a[prefix] == b[prefix]:
        prefix += 1
    return jaro + prefix * prefix_scale * (1.0 - jaro)


def _prune_star(indptr, indices, spokes, in_set, pos, cap_num, cap_den):
    """Greedy spoke pruning for one ego graph.

    ``spokes`` must be sorted ascending (node index order is key order, so
    ties go to the smallest key).  A spoke is removed while its number of
    spoke neighbours exceeds ``cap_num / cap_den * (k - 1)``.  Returns the
    boolean keep-mask over ``spokes``; ``in_set`` is restored to all-False.
    """
    k = spokes.shape[0]
    for i in range(k):
        in_set[spokes[i]] = True
        pos[spokes[i]] = i
    cnt = np.zeros(k, np.int64)
    for i in range(k):
        s = spokes[i]
        for e in range(indptr[s], indptr[s + 1]):
            w = indices[e]
            if w != s and in_set[w]:
                cnt[i] += 1
    alive = np.ones(k, np.bool_)
    alive_k = k
    while alive_k > 1:
        best = -1
        best_cnt = -1
        for i in range(k):
            if alive[i] and cnt[i] > best_cnt:
                best = i
                best_cnt = cnt[i]
        if best_cnt * cap_den <= cap_num * (alive_k - 1):
            break
        alive[best] = False
        alive_k -= 1
        s = spokes[best]
        in_set[s] = False
        for e in range(indptr[s], indptr[s + 1]):
            w = indices[e]
            if w != s and in_set[w]:
                cnt[pos[w]] -= 1
    for i in range(k):
        in_set[spokes[i]] = False
    return alive


PY = {
    "plogp": _plogp,
    "scc_labels": _scc_labels,
    "reachable": _reachable,
    "weak_labels": _weak_labels,
    "local_moves": _local_moves,
    "coclass": _coclass_numpy,
    "jaro_winkler": _jaro_winkler,
    "prune_star": _prune_star,
}

plogp = jit(_plogp)
if USE_NUMBA:
    # numba resolves callees at compile time; rebind the helper first
    _plogp = plogp
scc_labels = jit(_scc_labels)
reachable = jit(_reachable)
weak_labels = jit(_weak_labels)
local_moves = jit(_local_moves)
coclass_accumulate = jit(_coclass_loop) if USE_NUMBA else _coclass_numpy
jaro_winkler_codes = jit(_jaro_winkler)
prune_star = jit(_prune_star)
