"""Poincaré ball embeddings of the hypernymy graph.

Training runs Riemannian SGD on (child, parent) edges with a
negative-sampled softmax over ball distances; the Euclidean gradient is
rescaled by ((1 - |theta|^2)^2 / 4) and points are projected back to norm
<= 1 - eps after every step.
"""

import numpy as np

from .. import _kernels
from ..errors import ConfigError, OutOfBallError
from ..taxonomy import Taxonomy
from .base import (NodeEmbeddings, PoincareConfig, directed_edges,
                   embeddings_from_matrix)


def poincare_distance(u, v) -> float:
    """d(u, v) = arcosh(1 + 2|u-v|^2 / ((1-|u|^2)(1-|v|^2)))."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu = float(u @ u)
    nv = float(v @ v)
    if nu >= 1.0 or nv >= 1.0:
        raise OutOfBallError("point on or outside the unit ball")
    diff = u - v
    gamma = 1.0 + 2.0 * float(diff @ diff) / ((1.0 - nu) * (1.0 - nv))
    return float(np.arccosh(gamma))


def einstein_midpoint(points) -> np.ndarray:
    """Gyro-midpoint of ball points, via Klein coordinates.

    Poincare -> Klein: k = 2x / (1 + |x|^2); Lorentz factor
    gamma = 1 / sqrt(1 - |k|^2); midpoint = sum(gamma k) / sum(gamma);
    Klein -> Poincare: x = k / (1 + sqrt(1 - |k|^2)).
    """
    points = [np.asarray(p, dtype=np.float64) for p in points]
    if not points:
        raise ValueError("need at least one point")
    gammas = []
    kleins = []
    for p in points:
        sq = float(p @ p)
        if sq >= 1.0:
            raise OutOfBallError("point on or outside the unit ball")
        k = 2.0 * p / (1.0 + sq)
        ksq = float(k @ k)
        gammas.append(1.0 / np.sqrt(1.0 - ksq))
        kleins.append(k)
    mid = sum(g * k for g, k in zip(gammas, kleins)) / sum(gammas)
    msq = float(mid @ mid)
    return mid / (1.0 + np.sqrt(1.0 - msq))


def train_poincare(t: Taxonomy, cfg: PoincareConfig = PoincareConfig()
                   ) -> NodeEmbeddings:
    ids, edges = directed_edges(t)
    if not edges:
        raise ConfigError("ball training needs at least one hypernymy edge")
    children = np.array([c for c, _ in edges], dtype=np.int32)
    parents = np.array([p for _, p in edges], dtype=np.int32)
    rng = np.random.default_rng(np.random.PCG64(cfg.seed))
    emb = rng.uniform(-0.001, 0.001, (len(ids), cfg.dim))
    _kernels.poincare_train(children, parents, emb, cfg.epochs,
                            cfg.negatives, cfg.lr, cfg.burn_in,
                            cfg.burn_in_factor, cfg.eps, cfg.seed)
    return embeddings_from_matrix("poincare", "poincare", ids, emb)
