"""Katz-proximity embeddings of the directed hypernymy graph.

S = (I - beta A)^{-1} beta A with beta = 0.5 / spectral-radius estimate
(floored at 1.0, so DAGs get beta = 0.5); node vectors are the source
factors U sqrt(Sigma) of a truncated SVD of S.
"""

import numpy as np

from ..taxonomy import Taxonomy
from .base import (HopeConfig, NodeEmbeddings, directed_edges,
                   embeddings_from_matrix)


def adjacency_matrix(t: Taxonomy) -> np.ndarray:
    ids, edges = directed_edges(t)
    a = np.zeros((len(ids), len(ids)))
    for c, p in edges:
        a[c, p] = 1.0
    return a


def spectral_radius(a: np.ndarray, iters: int = 100) -> float:
    """Power-iteration estimate, floored at 1.0 (nilpotent A drives it to 0)."""
    n = a.shape[0]
    if n == 0:
        return 1.0
    x = np.ones(n) / np.sqrt(n)
    estimate = 0.0
    for _ in range(iters):
        y = a @ x
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            estimate = 0.0
            break
        x = y / norm
        estimate = norm
    return max(estimate, 1.0)


def katz_matrix(a: np.ndarray, beta: float) -> np.ndarray:
    """Closed form (I - beta A)^{-1} beta A."""
    n = a.shape[0]
    return np.linalg.solve(np.eye(n) - beta * a, beta * a)


def katz_series(a: np.ndarray, beta: float, terms: int) -> np.ndarray:
    """Truncated series sum_{l=1..terms} beta^l A^l."""
    total = np.zeros_like(a)
    power = np.eye(a.shape[0])
    for _ in range(terms):
        power = beta * (power @ a)
        total += power
    return total


def train_hope(t: Taxonomy, cfg: HopeConfig = HopeConfig()) -> NodeEmbeddings:
    ids, _ = directed_edges(t)
    a = adjacency_matrix(t)
    n = len(ids)
    beta = 0.5 / spectral_radius(a, cfg.power_iters)
    if n <= cfg.dense_limit:
        s = katz_matrix(a, beta)
    else:
        s = katz_series(a, beta, cfg.series_terms)
    rank = min(cfg.dim, max(1, n - 1))
    u, sing, _ = np.linalg.svd(s, full_matrices=False)
    emb = u[:, :rank] * np.sqrt(sing[:rank])
    return embeddings_from_matrix("euclidean", "hope", ids, emb)
