"""Text-associated matrix factorization over the taxonomy graph.

Factorizes the proximity matrix M = (S + S^2)/2 (S = row-normalized
undirected adjacency) as W^T H T, where T holds SVD-reduced, column-
normalized text features.  Each alternating step solves its ridge
subproblem exactly, so the objective never increases.
"""

import numpy as np

from ..errors import ConfigError, SingularSolveError
from ..taxonomy import Taxonomy
from ..vectors import SynsetIndex
from .base import (NodeEmbeddings, TadwConfig, embeddings_from_matrix,
                   node_order, undirected_adjacency)


def proximity_matrix(t: Taxonomy) -> np.ndarray:
    """M = (S + S^2)/2 with S the row-normalized undirected adjacency."""
    ids, adj = undirected_adjacency(t)
    n = len(ids)
    s = np.zeros((n, n))
    for i, nbrs in enumerate(adj):
        if nbrs:
            s[i, nbrs] = 1.0 / len(nbrs)
    return (s + s @ s) / 2.0


def text_feature_matrix(idx: SynsetIndex, text_dim: int) -> np.ndarray:
    """T (text_dim' x n): SVD-reduced synset text features, unit columns."""
    x = idx.matrix
    f = min(text_dim, min(x.shape))
    u, sing, _ = np.linalg.svd(x, full_matrices=False)
    reduced = u[:, :f] * sing[:f]
    tmat = reduced.T.copy()
    norms = np.linalg.norm(tmat, axis=0)
    nonzero = norms > 0.0
    tmat[:, nonzero] /= norms[nonzero]
    return tmat


def tadw_objective(m, w, h, tmat, lam) -> float:
    resid = m - w.T @ (h @ tmat)
    return float(np.sum(resid * resid)
                 + (lam / 2.0) * (np.sum(w * w) + np.sum(h * h)))


def _solve_w(m, h, tmat, lam, k):
    b = h @ tmat
    lhs = 2.0 * (b @ b.T) + lam * np.eye(k)
    rhs = 2.0 * (b @ m.T)
    try:
        return np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSolveError(str(exc))


def _solve_h(m, w, tmat, lam):
    # Minimizer of |M - W^T H T|^2 + (lam/2)|H|^2 solves
    # (2 W W^T) H (T T^T) + lam H = 2 W M T^T; separable in the
    # eigenbases of the two symmetric factors.
    a1 = 2.0 * (w @ w.T)
    a2 = tmat @ tmat.T
    rhs = 2.0 * (w @ m @ tmat.T)
    eva, ua = np.linalg.eigh(a1)
    evc, uc = np.linalg.eigh(a2)
    rhat = ua.T @ rhs @ uc
    denom = np.outer(eva, evc) + lam
    return ua @ (rhat / denom) @ uc.T


def train_tadw(t: Taxonomy, text_features: SynsetIndex,
               cfg: TadwConfig = TadwConfig()) -> NodeEmbeddings:
    ids = node_order(t)
    if text_features.ids != ids:
        raise ConfigError("text features do not cover the taxonomy")
    m = proximity_matrix(t)
    tmat = text_feature_matrix(text_features, cfg.text_dim)
    n = len(ids)
    rng = np.random.default_rng(np.random.PCG64(cfg.seed))
    w = rng.random((cfg.dim, n)) * 0.02 - 0.01
    h = rng.random((cfg.dim, tmat.shape[0])) * 0.02 - 0.01
    for _ in range(cfg.iters):
        w = _solve_w(m, h, tmat, cfg.lam, cfg.dim)
        h = _solve_h(m, w, tmat, cfg.lam)
    return embeddings_from_matrix("euclidean", "tadw", ids, w.T)
