"""Pure-Python training kernels.

Fallback for environments where the Cython extension is unavailable.  The
arithmetic (operation order, RNG, clamping) matches `_fast.pyx` exactly, so
both backends produce bit-identical embeddings; this file is the readable
reference and `_fast.pyx` is its line-by-line translation.
"""

from math import exp, log, sqrt

import numpy as np

_MASK = (1 << 64) - 1
_INV_2_53 = 1.0 / 9007199254740992.0


class SplitMix64:
    """Tiny deterministic PRNG reproduced identically in the C kernels."""

    def __init__(self, seed):
        self.state = seed & _MASK

    def next_uniform(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        z = z ^ (z >> 31)
        return (z >> 11) * _INV_2_53


def _sigmoid(x):
    # Clamped like word2vec's table; keeps exp() in range on both backends.
    if x > 30.0:
        return 1.0
    if x < -30.0:
        return 0.0
    return 1.0 / (1.0 + exp(-x))


def _searchsorted(cum, u):
    # Smallest index with cum[idx] > u.
    lo = 0
    hi = len(cum) - 1
    while lo < hi:
        mid = (lo + hi) >> 1
        if cum[mid] > u:
            hi = mid
        else:
            lo = mid + 1
    return lo


def sgns_train(walks, offsets, syn0, syn1, cum_table, window, negatives,
               epochs, lr0, lr_min, seed):
    """Skip-gram negative sampling over an integer-encoded walk corpus.

    ``walks`` is the flat corpus, ``offsets`` the per-walk start indices
    (length n_walks + 1).  ``syn0`` (input vectors, the embeddings kept) and
    ``syn1`` (output vectors) are updated in place.  The learning rate
    decays linearly per corpus position from ``lr0`` to ``lr_min``.
    """
    walks = [int(x) for x in walks]
    offsets = [int(x) for x in offsets]
    s0 = [list(map(float, row)) for row in syn0]
    s1 = [list(map(float, row)) for row in syn1]
    cum = [float(x) for x in cum_table]
    dim = len(s0[0]) if s0 else 0
    rng = SplitMix64(seed)
    n_walks = len(offsets) - 1
    total = epochs * len(walks)
    if total == 0:
        return
    processed = 0
    neu1e = [0.0] * dim
    for _epoch in range(epochs):
        for w in range(n_walks):
            start = offsets[w]
            end = offsets[w + 1]
            for i in range(start, end):
                alpha = lr0 - (lr0 - lr_min) * (processed / total)
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
                    l1 = s0[context]
                    for d in range(dim):
                        neu1e[d] = 0.0
                    for t in range(negatives + 1):
                        if t == 0:
                            target = center
                            label = 1.0
                        else:
                            u = rng.next_uniform()
                            target = _searchsorted(cum, u)
                            if target == center:
                                continue
                            label = 0.0
                        l2 = s1[target]
                        f = 0.0
                        for d in range(dim):
                            f += l1[d] * l2[d]
                        g = (label - _sigmoid(f)) * alpha
                        for d in range(dim):
                            neu1e[d] += g * l2[d]
                        for d in range(dim):
                            l2[d] += g * l1[d]
                    for d in range(dim):
                        l1[d] += neu1e[d]
    syn0[:] = np.asarray(s0, dtype=np.float64).reshape(syn0.shape)
    syn1[:] = np.asarray(s1, dtype=np.float64).reshape(syn1.shape)


def poincare_train(edges_child, edges_parent, emb, epochs, negatives, lr,
                   burn_in, burn_in_factor, eps, seed):
    """Riemannian SGD on the Poincaré ball over hypernymy edges.

    Per positive edge, ``negatives`` nodes are drawn uniformly; a softmax
    over negated distances gives the loss.  Euclidean gradients are rescaled
    by ((1 - |theta|^2)^2 / 4) and every touched point is projected back to
    norm <= 1 - eps.  Edge order is reshuffled each epoch.  ``emb`` is
    updated in place.
    """
    children = [int(x) for x in edges_child]
    parents = [int(x) for x in edges_parent]
    e = [list(map(float, row)) for row in emb]
    n_nodes = len(e)
    n_edges = len(children)
    dim = len(e[0]) if e else 0
    rng = SplitMix64(seed)
    order = list(range(n_edges))
    max_norm = 1.0 - eps

    sq_norms = [0.0] * n_nodes
    for a in range(n_nodes):
        s = 0.0
        row = e[a]
        for d in range(dim):
            s += row[d] * row[d]
        sq_norms[a] = s

    targets = [0] * (negatives + 1)
    coeffs = [0.0] * (negatives + 1)
    dists = [0.0] * (negatives + 1)
    grad_u = [0.0] * dim
    grad_x = [0.0] * dim

    def pair_distance(a, b):
        ra = e[a]
        rb = e[b]
        delta = 0.0
        for d in range(dim):
            diff = ra[d] - rb[d]
            delta += diff * diff
        alpha = 1.0 - sq_norms[a]
        beta = 1.0 - sq_norms[b]
        gamma = 1.0 + 2.0 * delta / (alpha * beta)
        return log(gamma + sqrt(gamma * gamma - 1.0))

    def accumulate_grads(a, b):
        # d(a,b) partials; writes grad_u (w.r.t. a) and grad_x (w.r.t. b).
        ra = e[a]
        rb = e[b]
        delta = 0.0
        dot = 0.0
        for d in range(dim):
            diff = ra[d] - rb[d]
            delta += diff * diff
            dot += ra[d] * rb[d]
        alpha = 1.0 - sq_norms[a]
        beta = 1.0 - sq_norms[b]
        gamma = 1.0 + 2.0 * delta / (alpha * beta)
        root = sqrt(gamma * gamma - 1.0)
        if root < 1e-12:
            root = 1e-12
        ca = 4.0 / (beta * root)
        fa = (sq_norms[b] - 2.0 * dot + 1.0) / (alpha * alpha)
        for d in range(dim):
            grad_u[d] = ca * (fa * ra[d] - rb[d] / alpha)
        cb = 4.0 / (alpha * root)
        fb = (sq_norms[a] - 2.0 * dot + 1.0) / (beta * beta)
        for d in range(dim):
            grad_x[d] = cb * (fb * rb[d] - ra[d] / beta)

    def riemannian_step(a, g, scale, step):
        row = e[a]
        alpha = 1.0 - sq_norms[a]
        factor = step * scale * (alpha * alpha) / 4.0
        for d in range(dim):
            row[d] -= factor * g[d]
        s = 0.0
        for d in range(dim):
            s += row[d] * row[d]
        if s > max_norm * max_norm:
            norm = sqrt(s)
            shrink = max_norm / norm
            for d in range(dim):
                row[d] *= shrink
            s = 0.0
            for d in range(dim):
                s += row[d] * row[d]
        sq_norms[a] = s

    acc_u = [0.0] * dim
    for epoch in range(epochs):
        step = lr * burn_in_factor if epoch < burn_in else lr
        for i in range(n_edges - 1, 0, -1):
            u = rng.next_uniform()
            j = int(u * (i + 1))
            order[i], order[j] = order[j], order[i]
        for pos in range(n_edges):
            edge = order[pos]
            node_u = children[edge]
            node_v = parents[edge]
            targets[0] = node_v
            count = 1
            for _t in range(negatives):
                u = rng.next_uniform()
                cand = int(u * n_nodes)
                if cand == node_u or cand == node_v:
                    continue
                targets[count] = cand
                count += 1
            total_exp = 0.0
            for t in range(count):
                dists[t] = pair_distance(node_u, targets[t])
                coeffs[t] = exp(-dists[t])
                total_exp += coeffs[t]
            # dL/d(distance): positive pair gets 1 - p, negatives get -p.
            for t in range(count):
                p = coeffs[t] / total_exp
                coeffs[t] = (1.0 - p) if t == 0 else -p
            for d in range(dim):
                acc_u[d] = 0.0
            for t in range(count):
                accumulate_grads(node_u, targets[t])
                c = coeffs[t]
                for d in range(dim):
                    acc_u[d] += c * grad_u[d]
                riemannian_step(targets[t], grad_x, c, step)
            riemannian_step(node_u, acc_u, 1.0, step)
    emb[:] = np.asarray(e, dtype=np.float64).reshape(emb.shape)
