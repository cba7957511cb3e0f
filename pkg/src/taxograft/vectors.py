"""Pretrained word vectors: loading, OOV fallback, synset vectors, search.

Vectors live in word2vec text format: a "count dim" header line followed by
one "token v1 ... vdim" line per word.  Out-of-vocabulary tokens fall back
to the longest vocabulary prefix; a token with no vocabulary prefix at all
yields the zero vector with a miss flag (never an error).
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatchError, ParseError, ZeroQueryError
from .taxonomy import Synset, Taxonomy


class Lookup(NamedTuple):
    """A derived vector plus whether it came from a hard OOV miss."""
    vector: np.ndarray
    missed: bool


@dataclass
class VectorStore:
    dim: int
    vectors: dict[str, np.ndarray]
    normalized: bool = False

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)


def load_vectors(path) -> VectorStore:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if not header.strip():
            raise ParseError("empty vector file", line=1)
        parts = header.split()
        if len(parts) != 2:
            raise ParseError(f"bad header {header.strip()!r}", line=1)
        try:
            count, dim = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"bad header {header.strip()!r}", line=1)
        if dim <= 0 or count < 0:
            raise ParseError(f"bad header {header.strip()!r}", line=1)
        vectors: dict[str, np.ndarray] = {}
        for lineno, raw in enumerate(fh, start=2):
            if not raw.strip():
                continue
            fields = raw.split()
            token = fields[0]
            if len(fields) - 1 != dim:
                raise DimensionMismatchError(
                    f"line {lineno}: token {token!r} has {len(fields) - 1} "
                    f"components, header says {dim}")
            if token in vectors:
                continue  # duplicates keep the first occurrence
            try:
                vec = np.array([float(x) for x in fields[1:]], dtype=np.float64)
            except ValueError:
                raise ParseError(f"non-numeric component for {token!r}",
                                 line=lineno)
            if not np.all(np.isfinite(vec)):
                raise ParseError(f"non-finite component for {token!r}",
                                 line=lineno)
            vectors[token] = vec
    return VectorStore(dim=dim, vectors=vectors)


def save_vectors(tokens_vectors, dim: int, path) -> None:
    """Write word2vec text format; float repr round-trips exactly."""
    items = list(tokens_vectors)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(items)} {dim}\n")
        for token, vec in items:
            comps = " ".join(repr(float(x)) for x in vec)
            fh.write(f"{token} {comps}\n")


def word_vector(store: VectorStore, token: str) -> Lookup:
    """Exact hit, else longest vocabulary prefix, else zero + miss flag."""
    hit = store.vectors.get(token)
    if hit is not None:
        return Lookup(hit, False)
    for k in range(len(token) - 1, 0, -1):
        prefix = store.vectors.get(token[:k])
        if prefix is not None:
            # All maximal-length vocabulary prefixes coincide as strings,
            # so the "average" over them is the single stored vector.
            return Lookup(prefix, False)
    return Lookup(np.zeros(store.dim), True)


def phrase_vector(store: VectorStore, phrase: str) -> Lookup:
    """Mean of the L2-normalized token vectors that have positive norm."""
    tokens = phrase.split()
    if not tokens:
        raise ValueError("phrase must be non-empty")
    normalized = []
    for token in tokens:
        vec, _ = word_vector(store, token)
        norm = float(np.linalg.norm(vec))
        if norm > 0.0:
            normalized.append(vec / norm)
    if not normalized:
        return Lookup(np.zeros(store.dim), True)
    return Lookup(np.mean(normalized, axis=0), False)


def synset_vector(store: VectorStore, syn: Synset) -> Lookup:
    """Mean of the phrase vectors of the synset's lemmas."""
    found = []
    for lemma in syn.words:
        vec, missed = phrase_vector(store, lemma)
        if not missed:
            found.append(vec)
    if not found:
        return Lookup(np.zeros(store.dim), True)
    return Lookup(np.mean(found, axis=0), False)


CACHE_VERSION = 1


class SynsetIndex:
    """Matrix of synset vectors aligned to the sorted synset id list."""

    def __init__(self, store: VectorStore, taxonomy: Taxonomy,
                 ids=None, matrix=None):
        self.store = store
        self.taxonomy = taxonomy
        if ids is None:
            ids = taxonomy.sorted_ids()
            matrix = np.zeros((len(ids), store.dim))
            for i, sid in enumerate(ids):
                matrix[i], _ = synset_vector(store, taxonomy.synsets[sid])
        self.ids: list[str] = list(ids)
        self.matrix: np.ndarray = matrix
        self._row_of = {sid: i for i, sid in enumerate(self.ids)}
        self._norms = np.linalg.norm(self.matrix, axis=1)

    def row(self, synset_id: str) -> np.ndarray:
        return self.matrix[self._row_of[synset_id]]

    def top_k(self, q: np.ndarray, k: int, exclude=frozenset()):
        """k most cosine-similar synsets; ties broken by ascending id."""
        return top_k_synsets(self, q, k, exclude)

    def with_synset(self, syn: Synset) -> "SynsetIndex":
        """New index with one extra row computed for ``syn``."""
        vec, _ = synset_vector(self.store, syn)
        ids = self.ids + [syn.id]
        matrix = np.vstack([self.matrix, vec[None, :]])
        order = np.argsort(np.array(ids))
        return SynsetIndex(self.store, self.taxonomy,
                           ids=[ids[i] for i in order], matrix=matrix[order])

    def save_cache(self, path) -> None:
        np.savez(path, version=CACHE_VERSION, dim=self.store.dim,
                 ids=np.array(self.ids), matrix=self.matrix)

    @classmethod
    def load_cache(cls, path, store: VectorStore, taxonomy: Taxonomy):
        data = np.load(path, allow_pickle=False)
        if int(data["version"]) != CACHE_VERSION:
            raise ParseError(f"unsupported index cache version "
                             f"{int(data['version'])}")
        ids = [str(s) for s in data["ids"]]
        if int(data["dim"]) != store.dim or ids != taxonomy.sorted_ids():
            raise ParseError("index cache does not match store/taxonomy; "
                             "regenerate it")
        return cls(store, taxonomy, ids=ids, matrix=data["matrix"])


def top_k_synsets(idx: SynsetIndex, q: np.ndarray, k: int,
                  exclude=frozenset()):
    if k < 1:
        raise ValueError("k must be >= 1")
    qnorm = float(np.linalg.norm(q))
    if qnorm == 0.0:
        raise ZeroQueryError("query vector has zero norm")
    sims = idx.matrix @ (q / qnorm)
    with np.errstate(invalid="ignore", divide="ignore"):
        sims = np.where(idx._norms > 0.0, sims / idx._norms, -np.inf)
    if exclude:
        for sid in exclude:
            i = idx._row_of.get(sid)
            if i is not None:
                sims[i] = -np.inf
    # Stable sort on -sims keeps row order (ascending id) among ties.
    order = np.argsort(-sims, kind="stable")[:k]
    return [(idx.ids[i], float(sims[i])) for i in order]


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity; defined as 0.0 when either vector is zero."""
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))
