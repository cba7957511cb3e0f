"""Projecting out-of-vocabulary query words into a node embedding space.

A query gets a text vector first; its five text-nearest synsets are then
aggregated in the target space (arithmetic mean in Euclidean spaces,
Einstein midpoint in the ball).  GCN spaces instead run the query's text
features through the trained encoder as an isolated node.
"""

import numpy as np

from ..errors import ConfigError, ZeroQueryError
from ..vectors import SynsetIndex, VectorStore, phrase_vector
from .base import NodeEmbeddings
from .gcn import GcnModel
from .poincare import einstein_midpoint

TOP_TEXT_NEIGHBORS = 5


def project_oov(query: str, store: VectorStore, idx: SynsetIndex,
                emb: NodeEmbeddings, gcn: GcnModel | None = None
                ) -> np.ndarray:
    vec, missed = phrase_vector(store, query)
    if missed:
        raise ZeroQueryError(f"no text vector derivable for {query!r}")
    if emb.method == "gcn":
        if gcn is None:
            raise ConfigError("gcn embeddings need the trained model "
                              "to project new nodes")
        return gcn.encode_isolated(vec)
    nearest = idx.top_k(vec, TOP_TEXT_NEIGHBORS)
    points = [emb.vectors[sid] for sid, _ in nearest]
    if emb.geometry == "poincare":
        return einstein_midpoint(points)
    return np.mean(points, axis=0)
