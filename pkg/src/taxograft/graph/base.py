"""Shared graph-embedding types, configs, and on-disk format.

Embeddings are saved in word2vec text format with synset ids as tokens,
plus a one-line ``<path>.meta`` sidecar recording geometry and method so a
loaded space knows how to measure similarity.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ConfigError, ParseError
from ..taxonomy import Taxonomy
from ..vectors import load_vectors, save_vectors

GEOMETRIES = ("euclidean", "poincare")
METHODS = ("node2vec", "poincare", "tadw", "hope", "gcn")


@dataclass
class NodeEmbeddings:
    geometry: str
    method: str
    dim: int
    vectors: dict[str, np.ndarray]

    def __post_init__(self):
        if self.geometry not in GEOMETRIES:
            raise ConfigError(f"unknown geometry {self.geometry!r}")
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}")
        for sid, vec in self.vectors.items():
            if vec.shape != (self.dim,):
                raise ConfigError(f"vector for {sid!r} has shape {vec.shape},"
                                  f" expected ({self.dim},)")
            if not np.all(np.isfinite(vec)):
                raise ConfigError(f"non-finite vector for {sid!r}")
            if self.geometry == "poincare" and np.linalg.norm(vec) >= 1.0:
                raise ConfigError(f"vector for {sid!r} is outside the ball")

    def covers(self, t: Taxonomy) -> bool:
        return all(sid in self.vectors for sid in t.synsets)


def _positive(name, value):
    if value <= 0:
        raise ConfigError(f"{name} must be positive, got {value!r}")


def _valid_seed(seed):
    if seed < 0:
        raise ConfigError(f"seed must be >= 0, got {seed!r}")


@dataclass(frozen=True)
class Node2VecConfig:
    dim: int = 300
    walk_length: int = 30
    num_walks: int = 200
    p: float = 1.0
    q: float = 1.0
    window: int = 10
    negatives: int = 5
    epochs: int = 5
    lr: float = 0.025
    lr_min: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        for name in ("dim", "walk_length", "num_walks", "p", "q", "window",
                     "negatives", "epochs", "lr", "lr_min"):
            _positive(name, getattr(self, name))
        _valid_seed(self.seed)


@dataclass(frozen=True)
class PoincareConfig:
    dim: int = 10
    epochs: int = 50
    negatives: int = 10
    lr: float = 0.01
    burn_in: int = 10
    burn_in_factor: float = 0.1
    eps: float = 1e-5
    seed: int = 0

    def __post_init__(self):
        for name in ("dim", "epochs", "negatives", "lr", "burn_in_factor"):
            _positive(name, getattr(self, name))
        if self.burn_in < 0:
            raise ConfigError("burn_in must be >= 0")
        if not 0.0 < self.eps <= 1e-3:
            raise ConfigError(f"eps must be in (0, 1e-3], got {self.eps!r}")
        _valid_seed(self.seed)


@dataclass(frozen=True)
class TadwConfig:
    dim: int = 80
    text_dim: int = 200
    lam: float = 0.2
    iters: int = 20
    seed: int = 0

    def __post_init__(self):
        for name in ("dim", "text_dim", "lam", "iters"):
            _positive(name, getattr(self, name))
        _valid_seed(self.seed)


@dataclass(frozen=True)
class HopeConfig:
    dim: int = 128
    power_iters: int = 100
    series_terms: int = 10
    # Beyond this many nodes the Katz matrix comes from the truncated
    # series instead of the dense solve.
    dense_limit: int = 2000
    seed: int = 0

    def __post_init__(self):
        for name in ("dim", "power_iters", "series_terms", "dense_limit"):
            _positive(name, getattr(self, name))
        _valid_seed(self.seed)


@dataclass(frozen=True)
class GcnConfig:
    hidden_dim: int = 128
    dim: int = 64
    steps: int = 200
    lr: float = 0.01
    neg_ratio: float = 1.0
    seed: int = 0

    def __post_init__(self):
        for name in ("hidden_dim", "dim", "steps", "lr", "neg_ratio"):
            _positive(name, getattr(self, name))
        _valid_seed(self.seed)


def node_order(t: Taxonomy) -> list[str]:
    """Canonical node numbering shared by every trainer."""
    return t.sorted_ids()


def undirected_adjacency(t: Taxonomy):
    """Neighbor index lists (sorted) for the undirected hypernymy graph."""
    ids = node_order(t)
    index = {sid: i for i, sid in enumerate(ids)}
    nbrs: list[set] = [set() for _ in ids]
    for sid, syn in t.synsets.items():
        i = index[sid]
        for hid in syn.hypernym_ids:
            j = index[hid]
            nbrs[i].add(j)
            nbrs[j].add(i)
    return ids, [sorted(s) for s in nbrs]


def directed_edges(t: Taxonomy):
    """(child index, parent index) pairs in canonical order."""
    ids = node_order(t)
    index = {sid: i for i, sid in enumerate(ids)}
    edges = []
    for sid in ids:
        for hid in t.synsets[sid].hypernym_ids:
            edges.append((index[sid], index[hid]))
    return ids, edges


def embeddings_from_matrix(geometry, method, ids, matrix) -> NodeEmbeddings:
    matrix = np.ascontiguousarray(matrix, dtype=np.float64)
    vectors = {sid: matrix[i].copy() for i, sid in enumerate(ids)}
    return NodeEmbeddings(geometry=geometry, method=method,
                          dim=matrix.shape[1], vectors=vectors)


def save_embeddings(emb: NodeEmbeddings, path) -> None:
    path = Path(path)
    items = [(sid, emb.vectors[sid]) for sid in sorted(emb.vectors)]
    save_vectors(items, emb.dim, path)
    meta = path.with_name(path.name + ".meta")
    meta.write_text(f"geometry={emb.geometry} method={emb.method}\n",
                    encoding="utf-8")


def load_embeddings(path) -> NodeEmbeddings:
    path = Path(path)
    meta = path.with_name(path.name + ".meta")
    if not meta.exists():
        raise ParseError(f"missing embedding sidecar {meta}")
    fields = dict(part.split("=", 1)
                  for part in meta.read_text(encoding="utf-8").split())
    store = load_vectors(path)
    return NodeEmbeddings(geometry=fields["geometry"],
                          method=fields["method"], dim=store.dim,
                          vectors=store.vectors)
