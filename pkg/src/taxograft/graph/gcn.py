"""Two-layer graph-convolutional autoencoder over the taxonomy.

Encoder Z = A_hat relu(A_hat X W0) W1 with the symmetrized, self-looped,
degree-normalized adjacency; decoder scores an edge by the inner product
of its endpoint vectors through a logistic link.  Trained full-batch with
binary cross-entropy over the positive edges plus uniformly resampled
non-edges each step.  The weights are kept so out-of-graph inputs can be
encoded later.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, NonFiniteLossError
from ..taxonomy import Taxonomy
from ..vectors import SynsetIndex
from .base import (GcnConfig, NodeEmbeddings, directed_edges,
                   embeddings_from_matrix, node_order)


@dataclass
class GcnModel:
    w0: np.ndarray
    w1: np.ndarray

    def save(self, path) -> None:
        np.savez(path, w0=self.w0, w1=self.w1)

    @classmethod
    def load(cls, path) -> "GcnModel":
        data = np.load(path, allow_pickle=False)
        return cls(w0=data["w0"], w1=data["w1"])

    def encode_isolated(self, x: np.ndarray) -> np.ndarray:
        """Forward pass for a node with no neighbors (self-loop only)."""
        return np.maximum(x @ self.w0, 0.0) @ self.w1


def normalized_adjacency(t: Taxonomy) -> np.ndarray:
    """A_hat = D^{-1/2} (A + I + A^T) D^{-1/2}, D from the symmetrized sum."""
    ids, edges = directed_edges(t)
    n = len(ids)
    sym = np.eye(n)
    for c, p in edges:
        sym[c, p] = 1.0
        sym[p, c] = 1.0
    dinv = 1.0 / np.sqrt(sym.sum(axis=1))
    return sym * dinv[:, None] * dinv[None, :]


def _forward(ahat, x, w0, w1):
    pre = ahat @ x @ w0
    hidden = np.maximum(pre, 0.0)
    z = ahat @ hidden @ w1
    return pre, hidden, z


def loss_and_grads(ahat, x, w0, w1, pos, neg):
    """Mean edge-reconstruction BCE and its gradients w.r.t. W0, W1.

    ``pos`` and ``neg`` are (i, j) index pairs scored by sigmoid(z_i . z_j).
    """
    pre, hidden, z = _forward(ahat, x, w0, w1)
    pairs = [(i, j, 1.0) for i, j in pos] + [(i, j, 0.0) for i, j in neg]
    if not pairs:
        return 0.0, np.zeros_like(w0), np.zeros_like(w1)
    n_samples = len(pairs)
    loss = 0.0
    dz = np.zeros_like(z)
    for i, j, label in pairs:
        s = float(z[i] @ z[j])
        # BCE with logits: y*softplus(-s) + (1-y)*softplus(s).
        loss += (label * np.logaddexp(0.0, -s)
                 + (1.0 - label) * np.logaddexp(0.0, s))
        coeff = (1.0 / (1.0 + np.exp(-s)) - label) / n_samples
        dz[i] += coeff * z[j]
        dz[j] += coeff * z[i]
    loss /= n_samples
    if not np.isfinite(loss):
        raise NonFiniteLossError(f"loss became {loss!r}")
    dhidden = (ahat @ dz) @ w1.T
    dw1 = hidden.T @ (ahat @ dz)
    dpre = dhidden * (pre > 0.0)
    dw0 = (ahat @ x).T @ dpre
    return float(loss), dw0, dw1


def _sample_non_edges(rng, n, forbidden, count):
    out = []
    attempts = 0
    limit = max(100, 50 * count)
    while len(out) < count and attempts < limit:
        i = int(rng.integers(n))
        j = int(rng.integers(n))
        attempts += 1
        if i != j and (i, j) not in forbidden:
            out.append((i, j))
    return out


def _glorot(rng, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, (fan_in, fan_out))


def train_gcn(t: Taxonomy, features: SynsetIndex,
              cfg: GcnConfig = GcnConfig()):
    ids = node_order(t)
    if features.ids != ids:
        raise ConfigError("features do not cover the taxonomy")
    ahat = normalized_adjacency(t)
    x = features.matrix
    n = len(ids)
    pos = directed_edges(t)[1]
    forbidden = set(pos)
    n_neg = max(1, round(cfg.neg_ratio * len(pos))) if n > 1 else 0
    rng = np.random.default_rng(np.random.PCG64(cfg.seed))
    w0 = _glorot(rng, x.shape[1], cfg.hidden_dim)
    w1 = _glorot(rng, cfg.hidden_dim, cfg.dim)
    for _ in range(cfg.steps):
        neg = _sample_non_edges(rng, n, forbidden, n_neg)
        _, dw0, dw1 = loss_and_grads(ahat, x, w0, w1, pos, neg)
        w0 -= cfg.lr * dw0
        w1 -= cfg.lr * dw1
    z = _forward(ahat, x, w0, w1)[2]
    return embeddings_from_matrix("euclidean", "gcn", ids, z), GcnModel(w0, w1)
