"""node2vec: biased random walks + skip-gram negative sampling.

Walks are sampled per start node with independently seeded generators
(global seed XOR node index), so the walk content of a node never depends
on scheduling; the corpus interleaves rounds so the decaying learning rate
touches all nodes evenly.
"""

import numpy as np

from .. import _kernels
from ..taxonomy import Taxonomy
from .base import (NodeEmbeddings, Node2VecConfig, embeddings_from_matrix,
                   undirected_adjacency)


def _one_walk(adj, adj_sets, start, length, p, q, rng):
    walk = [start]
    nbrs = adj[start]
    if not nbrs:
        return walk
    walk.append(nbrs[int(rng.integers(len(nbrs)))])
    while len(walk) < length:
        prev = walk[-2]
        cur = walk[-1]
        nbrs = adj[cur]
        weights = np.empty(len(nbrs))
        prev_nbrs = adj_sets[prev]
        for i, x in enumerate(nbrs):
            if x == prev:
                weights[i] = 1.0 / p
            elif x in prev_nbrs:
                weights[i] = 1.0
            else:
                weights[i] = 1.0 / q
        r = rng.random() * float(weights.sum())
        acc = 0.0
        pick = len(nbrs) - 1
        for i, w in enumerate(weights):
            acc += float(w)
            if r < acc:
                pick = i
                break
        walk.append(nbrs[pick])
    return walk


def sample_walks(t: Taxonomy, cfg: Node2VecConfig):
    """All walks, round-major: round 0 over every node, then round 1, ..."""
    ids, adj = undirected_adjacency(t)
    adj_sets = [set(nbrs) for nbrs in adj]
    per_node = []
    for node in range(len(ids)):
        rng = np.random.default_rng(np.random.PCG64(cfg.seed ^ node))
        per_node.append([_one_walk(adj, adj_sets, node, cfg.walk_length,
                                   cfg.p, cfg.q, rng)
                         for _ in range(cfg.num_walks)])
    walks = [per_node[node][r]
             for r in range(cfg.num_walks)
             for node in range(len(ids))]
    return ids, walks


def train_node2vec(t: Taxonomy, cfg: Node2VecConfig = Node2VecConfig()
                   ) -> NodeEmbeddings:
    ids, walks = sample_walks(t, cfg)
    n = len(ids)
    flat = np.array([node for walk in walks for node in walk],
                    dtype=np.int32)
    offsets = np.zeros(len(walks) + 1, dtype=np.int32)
    for i, walk in enumerate(walks):
        offsets[i + 1] = offsets[i] + len(walk)

    counts = np.bincount(flat, minlength=n).astype(np.float64)
    weights = counts ** 0.75
    cum = np.cumsum(weights)
    cum /= cum[-1]

    rng = np.random.default_rng(np.random.PCG64(cfg.seed))
    syn0 = (rng.random((n, cfg.dim)) - 0.5) / cfg.dim
    syn1 = np.zeros((n, cfg.dim))
    _kernels.sgns_train(flat, offsets, syn0, syn1, cum, cfg.window,
                        cfg.negatives, cfg.epochs, cfg.lr, cfg.lr_min,
                        cfg.seed)
    return embeddings_from_matrix("euclidean", "node2vec", ids, syn0)
