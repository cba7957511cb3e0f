# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled training kernels.

Line-by-line translation of `_pure.py`; same operation order, same RNG,
same clamping, so results are bit-identical to the pure backend (the build
disables FP contraction to keep it that way).
"""

import numpy as np

from libc.math cimport exp, log, sqrt


cdef inline double _next_uniform(unsigned long long *state) nogil:
    cdef unsigned long long z
    state[0] = state[0] + 0x9E3779B97F4A7C15ULL
    z = state[0]
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    z = z ^ (z >> 31)
    return (z >> 11) * (1.0 / 9007199254740992.0)


cdef inline double _sigmoid(double x) nogil:
    if x > 30.0:
        return 1.0
    if x < -30.0:
        return 0.0
    return 1.0 / (1.0 + exp(-x))


cdef inline long _searchsorted(double[::1] cum, double u) nogil:
    cdef long lo = 0
    cdef long hi = cum.shape[0] - 1
    cdef long mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if cum[mid] > u:
            hi = mid
        else:
            lo = mid + 1
    return lo


def sgns_train(int[::1] walks, int[::1] offsets, double[:, ::1] syn0,
               double[:, ::1] syn1, double[::1] cum_table, long window,
               long negatives, long epochs, double lr0, double lr_min,
               unsigned long long seed):
    cdef long dim = syn0.shape[1]
    cdef unsigned long long state = seed
    cdef long n_walks = offsets.shape[0] - 1
    cdef long long total = epochs * walks.shape[0]
    cdef long long processed = 0
    if total == 0:
        return
    cdef double[::1] neu1e = np.zeros(dim, dtype=np.float64)
    cdef long epoch, w, start, end, i, j, lo, hi, d, t
    cdef long center, context, target
    cdef double alpha, label, u, f, g
    with nogil:
        for epoch in range(epochs):
            for w in range(n_walks):
                start = offsets[w]
                end = offsets[w + 1]
                for i in range(start, end):
                    alpha = lr0 - (lr0 - lr_min) * ((<double>processed) / (<double>total))
                    if alpha < lr_min:
                        alpha = lr_min
                    processed += 1
                    center = walks[i]
                    lo = i - window
                    if lo < start:
                        lo = start
                    hi = i + window + 1
                    if hi > end:
                        hi = end
                    for j in range(lo, hi):
                        if j == i:
                            continue
                        context = walks[j]
                        for d in range(dim):
                            neu1e[d] = 0.0
                        for t in range(negatives + 1):
                            if t == 0:
                                target = center
                                label = 1.0
                            else:
                                u = _next_uniform(&state)
                                target = _searchsorted(cum_table, u)
                                if target == center:
                                    continue
                                label = 0.0
                            f = 0.0
                            for d in range(dim):
                                f += syn0[context, d] * syn1[target, d]
                            g = (label - _sigmoid(f)) * alpha
                            for d in range(dim):
                                neu1e[d] += g * syn1[target, d]
                            for d in range(dim):
                                syn1[target, d] += g * syn0[context, d]
                        for d in range(dim):
                            syn0[context, d] += neu1e[d]


cdef inline double _pair_distance(double[:, ::1] e, double[::1] sq_norms,
                                  long a, long b, long dim) nogil:
    cdef double delta = 0.0
    cdef double diff, alpha, beta, gamma
    cdef long d
    for d in range(dim):
        diff = e[a, d] - e[b, d]
        delta += diff * diff
    alpha = 1.0 - sq_norms[a]
    beta = 1.0 - sq_norms[b]
    gamma = 1.0 + 2.0 * delta / (alpha * beta)
    return log(gamma + sqrt(gamma * gamma - 1.0))


cdef inline void _accumulate_grads(double[:, ::1] e, double[::1] sq_norms,
                                   long a, long b, long dim,
                                   double[::1] grad_u, double[::1] grad_x) nogil:
    cdef double delta = 0.0
    cdef double dot = 0.0
    cdef double diff, alpha, beta, gamma, root, ca, fa, cb, fb
    cdef long d
    for d in range(dim):
        diff = e[a, d] - e[b, d]
        delta += diff * diff
        dot += e[a, d] * e[b, d]
    alpha = 1.0 - sq_norms[a]
    beta = 1.0 - sq_norms[b]
    gamma = 1.0 + 2.0 * delta / (alpha * beta)
    root = sqrt(gamma * gamma - 1.0)
    if root < 1e-12:
        root = 1e-12
    ca = 4.0 / (beta * root)
    fa = (sq_norms[b] - 2.0 * dot + 1.0) / (alpha * alpha)
    for d in range(dim):
        grad_u[d] = ca * (fa * e[a, d] - e[b, d] / alpha)
    cb = 4.0 / (alpha * root)
    fb = (sq_norms[a] - 2.0 * dot + 1.0) / (beta * beta)
    for d in range(dim):
        grad_x[d] = cb * (fb * e[b, d] - e[a, d] / beta)


cdef inline void _riemannian_step(double[:, ::1] e, double[::1] sq_norms,
                                  long a, double[::1] g, double scale,
                                  double step, double max_norm, long dim) nogil:
    cdef double alpha = 1.0 - sq_norms[a]
    cdef double factor = step * scale * (alpha * alpha) / 4.0
    cdef double s = 0.0
    cdef double norm, shrink
    cdef long d
    for d in range(dim):
        e[a, d] -= factor * g[d]
    for d in range(dim):
        s += e[a, d] * e[a, d]
    if s > max_norm * max_norm:
        norm = sqrt(s)
        shrink = max_norm / norm
        for d in range(dim):
            e[a, d] *= shrink
        s = 0.0
        for d in range(dim):
            s += e[a, d] * e[a, d]
    sq_norms[a] = s


def poincare_train(int[::1] edges_child, int[::1] edges_parent,
                   double[:, ::1] emb, long epochs, long negatives, double lr,
                   long burn_in, double burn_in_factor, double eps,
                   unsigned long long seed):
    cdef long n_nodes = emb.shape[0]
    cdef long n_edges = edges_child.shape[0]
    cdef long dim = emb.shape[1]
    cdef unsigned long long state = seed
    cdef double max_norm = 1.0 - eps
    cdef long[::1] order = np.arange(n_edges, dtype=np.int64)
    cdef double[::1] sq_norms = np.zeros(n_nodes, dtype=np.float64)
    cdef long[::1] targets = np.zeros(negatives + 1, dtype=np.int64)
    cdef double[::1] coeffs = np.zeros(negatives + 1, dtype=np.float64)
    cdef double[::1] dists = np.zeros(negatives + 1, dtype=np.float64)
    cdef double[::1] grad_u = np.zeros(dim, dtype=np.float64)
    cdef double[::1] grad_x = np.zeros(dim, dtype=np.float64)
    cdef double[::1] acc_u = np.zeros(dim, dtype=np.float64)
    cdef long a, d, epoch, i, j, pos, edge, node_u, node_v, count, t, cand, tmp
    cdef double s, step, u, total_exp, p, c
    for a in range(n_nodes):
        s = 0.0
        for d in range(dim):
            s += emb[a, d] * emb[a, d]
        sq_norms[a] = s
    with nogil:
        for epoch in range(epochs):
            step = lr * burn_in_factor if epoch < burn_in else lr
            for i in range(n_edges - 1, 0, -1):
                u = _next_uniform(&state)
                j = <long>(u * (i + 1))
                tmp = order[i]
                order[i] = order[j]
                order[j] = tmp
            for pos in range(n_edges):
                edge = order[pos]
                node_u = edges_child[edge]
                node_v = edges_parent[edge]
                targets[0] = node_v
                count = 1
                for t in range(negatives):
                    u = _next_uniform(&state)
                    cand = <long>(u * n_nodes)
                    if cand == node_u or cand == node_v:
                        continue
                    targets[count] = cand
                    count += 1
                total_exp = 0.0
                for t in range(count):
                    dists[t] = _pair_distance(emb, sq_norms, node_u, targets[t], dim)
                    coeffs[t] = exp(-dists[t])
                    total_exp += coeffs[t]
                for t in range(count):
                    p = coeffs[t] / total_exp
                    coeffs[t] = (1.0 - p) if t == 0 else -p
                for d in range(dim):
                    acc_u[d] = 0.0
                for t in range(count):
                    _accumulate_grads(emb, sq_norms, node_u, targets[t], dim,
                                      grad_u, grad_x)
                    c = coeffs[t]
                    for d in range(dim):
                        acc_u[d] += c * grad_u[d]
                    _riemannian_step(emb, sq_norms, targets[t], grad_x, c,
                                     step, max_norm, dim)
                _riemannian_step(emb, sq_norms, node_u, acc_u, 1.0, step,
                                 max_norm, dim)
