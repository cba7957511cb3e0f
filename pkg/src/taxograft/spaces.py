"""Uniform similarity-space view over word, graph, and meta embeddings.

The ranker only needs five things from a space: a query vector, a lemma
vector, a synset vector, nearest-synset search, and a similarity between
two vectors.  Euclidean spaces use cosine; the Poincaré ball uses negated
ball distance.  Every space also keeps the text store and text synset
index around because several ranking features are defined on text vectors
regardless of the ranking space.
"""

import numpy as np

from .errors import MissError, ZeroQueryError
from .graph.base import NodeEmbeddings
from .graph.gcn import GcnModel
from .graph.oov import project_oov
from .graph.poincare import einstein_midpoint, poincare_distance
from .meta import MetaSpace, encode
from .taxonomy import Synset, Taxonomy, normalize_lemma
from .vectors import SynsetIndex, VectorStore, cosine, phrase_vector


class WordSynsetSpace:
    """Plain text-vector space; synset rows come from the text index."""

    geometry = "euclidean"

    def __init__(self, store: VectorStore, taxonomy: Taxonomy,
                 index: "SynsetIndex | None" = None):
        self.store = store
        self.taxonomy = taxonomy
        self.text_index = index or SynsetIndex(store, taxonomy)

    def query_vector(self, lemma: str) -> np.ndarray:
        vec, missed = phrase_vector(self.store, lemma)
        if missed:
            raise ZeroQueryError(f"no text vector derivable for {lemma!r}")
        return vec

    def lemma_vector(self, lemma: str) -> np.ndarray:
        return phrase_vector(self.store, lemma).vector

    def synset_vec(self, synset_id: str) -> np.ndarray:
        return self.text_index.row(synset_id)

    def top_k(self, q: np.ndarray, k: int, exclude=frozenset()):
        return self.text_index.top_k(q, k, exclude)

    def similarity(self, u: np.ndarray, v: np.ndarray) -> float:
        return cosine(u, v)

    def add_synset(self, syn: Synset, taxonomy: Taxonomy) -> "WordSynsetSpace":
        return WordSynsetSpace(self.store, taxonomy,
                               self.text_index.with_synset(syn))


class _RankedMatrix:
    """Sorted-id matrix search shared by the graph and meta spaces."""

    def __init__(self, ids, matrix):
        self.ids = list(ids)
        self.matrix = np.asarray(matrix, dtype=np.float64)
        self._row_of = {sid: i for i, sid in enumerate(self.ids)}
        self._norms = np.linalg.norm(self.matrix, axis=1)

    def row(self, synset_id: str) -> np.ndarray:
        return self.matrix[self._row_of[synset_id]]

    def top_cosine(self, q, k, exclude):
        qnorm = float(np.linalg.norm(q))
        if qnorm == 0.0:
            raise ZeroQueryError("query vector has zero norm")
        sims = self.matrix @ (q / qnorm)
        with np.errstate(invalid="ignore", divide="ignore"):
            sims = np.where(self._norms > 0.0, sims / self._norms, -np.inf)
        return self._take(sims, k, exclude)

    def top_ball(self, q, k, exclude):
        # similarity = negated ball distance, so closer ranks higher
        sims = np.array([-poincare_distance(q, row) for row in self.matrix])
        return self._take(sims, k, exclude)

    def _take(self, sims, k, exclude):
        for sid in exclude:
            i = self._row_of.get(sid)
            if i is not None:
                sims[i] = -np.inf
        order = np.argsort(-sims, kind="stable")[:k]
        return [(self.ids[i], float(sims[i])) for i in order]


class GraphSynsetSpace:
    """Node-embedding space; lemmas aggregate their synsets' nodes."""

    def __init__(self, emb: NodeEmbeddings, taxonomy: Taxonomy,
                 store: VectorStore, text_index: "SynsetIndex | None" = None,
                 gcn: "GcnModel | None" = None):
        self.emb = emb
        self.taxonomy = taxonomy
        self.store = store
        self.text_index = text_index or SynsetIndex(store, taxonomy)
        self.gcn = gcn
        self.geometry = emb.geometry
        ids = sorted(emb.vectors)
        self._search = _RankedMatrix(ids, np.stack([emb.vectors[i]
                                                    for i in ids]))

    def _aggregate(self, points):
        if self.geometry == "poincare":
            return einstein_midpoint(points)
        return np.mean(points, axis=0)

    def query_vector(self, lemma: str) -> np.ndarray:
        lemma = normalize_lemma(lemma)
        sids = self.taxonomy.lemma_index.get(lemma)
        if sids:
            return self._aggregate([self.emb.vectors[sid] for sid in sids])
        return project_oov(lemma, self.store, self.text_index, self.emb,
                           self.gcn)

    def lemma_vector(self, lemma: str) -> np.ndarray:
        try:
            return self.query_vector(lemma)
        except ZeroQueryError:
            return np.zeros(self.emb.dim)

    def synset_vec(self, synset_id: str) -> np.ndarray:
        return self.emb.vectors[synset_id]

    def top_k(self, q: np.ndarray, k: int, exclude=frozenset()):
        if self.geometry == "poincare":
            return self._search.top_ball(q, k, exclude)
        return self._search.top_cosine(q, k, exclude)

    def similarity(self, u: np.ndarray, v: np.ndarray) -> float:
        if self.geometry == "poincare":
            return -poincare_distance(u, v)
        return cosine(u, v)

    def add_synset(self, syn: Synset, taxonomy: Taxonomy) -> "GraphSynsetSpace":
        # A synset created after training has no trained node vector; its
        # lemma projections stand in for one.
        points = []
        for lemma in syn.words:
            try:
                points.append(project_oov(lemma, self.store, self.text_index,
                                          self.emb, self.gcn))
            except ZeroQueryError:
                continue
        vec = self._aggregate(points) if points else np.zeros(self.emb.dim)
        vectors = dict(self.emb.vectors)
        vectors[syn.id] = vec
        emb = NodeEmbeddings(geometry=self.emb.geometry,
                             method=self.emb.method, dim=self.emb.dim,
                             vectors=vectors)
        return GraphSynsetSpace(emb, taxonomy, self.store,
                                self.text_index.with_synset(syn), self.gcn)


class MetaSynsetSpace:
    """Fused-embedding space; synset rows average their lemma encodings."""

    geometry = "euclidean"

    def __init__(self, ms: MetaSpace, taxonomy: Taxonomy, store: VectorStore,
                 text_index: "SynsetIndex | None" = None):
        self.ms = ms
        self.taxonomy = taxonomy
        self.store = store
        self.text_index = text_index or SynsetIndex(store, taxonomy)
        ids = taxonomy.sorted_ids()
        matrix = np.stack([self._synset_row(taxonomy.synsets[sid])
                           for sid in ids])
        self._search = _RankedMatrix(ids, matrix)

    def _synset_row(self, syn: Synset) -> np.ndarray:
        rows = []
        for lemma in syn.words:
            try:
                rows.append(encode(self.ms, lemma))
            except MissError:
                continue
        if not rows:
            return np.zeros(self.ms.dim)
        return np.mean(rows, axis=0)

    def query_vector(self, lemma: str) -> np.ndarray:
        try:
            return encode(self.ms, normalize_lemma(lemma))
        except MissError as exc:
            raise ZeroQueryError(str(exc))

    def lemma_vector(self, lemma: str) -> np.ndarray:
        try:
            return encode(self.ms, normalize_lemma(lemma))
        except MissError:
            return np.zeros(self.ms.dim)

    def synset_vec(self, synset_id: str) -> np.ndarray:
        return self._search.row(synset_id)

    def top_k(self, q: np.ndarray, k: int, exclude=frozenset()):
        return self._search.top_cosine(q, k, exclude)

    def similarity(self, u: np.ndarray, v: np.ndarray) -> float:
        return cosine(u, v)

    def add_synset(self, syn: Synset, taxonomy: Taxonomy) -> "MetaSynsetSpace":
        space = MetaSynsetSpace.__new__(MetaSynsetSpace)
        space.ms = self.ms
        space.taxonomy = taxonomy
        space.store = self.store
        space.text_index = self.text_index.with_synset(syn)
        ids = self._search.ids + [syn.id]
        matrix = np.vstack([self._search.matrix,
                            self._synset_row(syn)[None, :]])
        order = np.argsort(np.array(ids))
        space._search = _RankedMatrix([ids[i] for i in order], matrix[order])
        return space
