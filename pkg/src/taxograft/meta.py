"""Meta-embeddings: fuse several word representation spaces into one.

Four fusion modes over a shared vocabulary: plain concatenation of the
per-source normalized vectors, an SVD projection of that concatenation,
and two autoencoded variants that combine per-source affine encodings by
concatenation (caeme) or by summation (aaeme) and L2-normalize the result.
The autoencoders minimize per-source cosine reconstruction distance,
optionally mixed with a hinge triplet term that pulls taxonomy-related
words together.
"""

import json
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import (ConfigError, InsufficientDataError, MissError,
                     NonFiniteLossError, RankError)
from .taxonomy import Taxonomy, hyponyms, normalize_lemma

AAEME_DIM = 300
EPOCHS = 50
BATCH_SIZE = 128
STEP_SIZE = 0.01
_TINY = 1e-12


@dataclass(frozen=True)
class TripletConfig:
    k: int = 5
    margin: float = 0.1
    alpha: float = 0.005
    sigma: float = 0.01

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k!r}")
        if self.margin <= 0:
            raise ConfigError(f"margin must be > 0, got {self.margin!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must be in (0, 1), got {self.alpha!r}")
        if self.sigma <= 0:
            raise ConfigError(f"sigma must be > 0, got {self.sigma!r}")


@dataclass(frozen=True)
class Source:
    """One embedding space: a name, a token lookup, and its dimension.

    ``lookup`` returns a vector or None on a hard miss; ``path`` is kept
    only so a saved MetaSpace can name where its inputs came from.
    """
    name: str
    lookup: Callable[[str], "np.ndarray | None"]
    dim: int
    path: str = ""


@dataclass(frozen=True)
class SourceSet:
    sources: tuple[Source, ...]
    vocabulary: tuple[str, ...]


def build_source_set(sources, tokens) -> SourceSet:
    """Shared-vocabulary source set: keeps tokens every source resolves."""
    sources = tuple(sources)
    if len(sources) < 2:
        raise ConfigError("need at least 2 sources to build meta-embeddings")
    shared = []
    for token in sorted(set(tokens)):
        if all(src.lookup(token) is not None for src in sources):
            shared.append(token)
    if not shared:
        raise InsufficientDataError("no token is covered by every source")
    return SourceSet(sources=sources, vocabulary=tuple(shared))


def _unit(vec: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    return vec / norm if norm > 0.0 else vec


def _source_vectors(ss: SourceSet, token: str):
    """Per-source normalized vectors; zero block for a missing source."""
    out = []
    misses = 0
    for src in ss.sources:
        vec = src.lookup(token)
        if vec is None:
            out.append(np.zeros(src.dim))
            misses += 1
        else:
            vec = np.asarray(vec, dtype=np.float64)
            if vec.shape != (src.dim,):
                raise ConfigError(f"source {src.name!r} returned shape "
                                  f"{vec.shape} for {token!r}")
            out.append(_unit(vec))
    if misses == len(ss.sources):
        raise MissError(f"{token!r} missing from every source")
    return out


def concat_meta(ss: SourceSet, token: str) -> np.ndarray:
    """Normalized source vectors concatenated in source order."""
    return np.concatenate(_source_vectors(ss, token))


def source_matrices(ss: SourceSet):
    """One (vocab x dim) matrix of normalized vectors per source."""
    mats = [np.zeros((len(ss.vocabulary), src.dim)) for src in ss.sources]
    for row, token in enumerate(ss.vocabulary):
        for i, vec in enumerate(_source_vectors(ss, token)):
            mats[i][row] = vec
    return mats


@dataclass
class MetaSpace:
    mode: str
    dim: int
    sources: SourceSet
    projection: "np.ndarray | None" = None
    # per-source affine maps as dicts with we/be (encoder), wd/bd (decoder)
    params: list = field(default_factory=list)


def fit_svd_meta(ss: SourceSet, dim: int) -> MetaSpace:
    """Project the concatenation onto its top right-singular directions."""
    total = sum(src.dim for src in ss.sources)
    if dim > total:
        raise RankError(f"target dim {dim} exceeds concatenation dim {total}")
    if len(ss.vocabulary) < dim:
        raise RankError(f"shared vocabulary ({len(ss.vocabulary)}) smaller "
                        f"than target dim {dim}")
    x = np.stack([concat_meta(ss, token) for token in ss.vocabulary])
    _, _, vt = np.linalg.svd(x, full_matrices=False)
    return MetaSpace(mode="svd", dim=dim, sources=ss,
                     projection=vt[:dim].T.copy())


def _combine(mode, encoded):
    """Raw meta vectors (pre-normalization) from per-source encodings."""
    if mode == "caeme":
        return np.concatenate(encoded, axis=1)
    total = encoded[0].copy()
    for enc in encoded[1:]:
        total += enc
    return total


def _normalize_rows(u):
    norms = np.maximum(np.linalg.norm(u, axis=1, keepdims=True), _TINY)
    return u / norms, norms


class Triplet(NamedTuple):
    """Anchor/positive/negative vocabulary row indices.

    A noise positive has ``positive`` None and carries the synthesized
    constant vector in ``positive_vec`` instead.
    """
    anchor: int
    positive: "int | None"
    positive_vec: "np.ndarray | None"
    negative: int


def triplet_value(dp: float, dn: float, margin: float) -> float:
    """Hinge max(d(a,p) - d(a,n) + margin, 0)."""
    return max(dp - dn + margin, 0.0)


def meta_rows(params, mats, mode):
    """Meta vectors for every vocabulary row under the given parameters."""
    encoded = [mats[i] @ p["we"] + p["be"] for i, p in enumerate(params)]
    u = _combine(mode, encoded)
    return _normalize_rows(u)


def batch_loss_and_grads(params, mats, mode, batch_rows, triplets,
                         margin=0.1, alpha=None):
    """Combined loss and parameter gradients for one minibatch.

    ``params`` is a list of per-source dicts (we, be, wd, bd).
    Reconstruction (mean over the batch of the per-source cosine distance
    sum) runs over ``batch_rows``; the hinge triplet term averages over
    ``triplets``.  With alpha None the loss is plain reconstruction,
    otherwise alpha * recon + (1 - alpha) * triplet.
    """
    m, norms = meta_rows(params, mats, mode)
    grads = [{k: np.zeros_like(p[k]) for k in p} for p in params]
    dm = np.zeros_like(m)
    w_rec = 1.0 if alpha is None else alpha
    w_tri = 0.0 if alpha is None else 1.0 - alpha

    recon = 0.0
    batch = np.asarray(batch_rows, dtype=int)
    if batch.size:
        mb = m[batch]
        for i, p in enumerate(params):
            target = mats[i][batch]
            shat = mb @ p["wd"] + p["bd"]
            tn = np.maximum(np.linalg.norm(target, axis=1), _TINY)
            sn = np.maximum(np.linalg.norm(shat, axis=1), _TINY)
            dots = np.sum(target * shat, axis=1)
            cos = dots / (tn * sn)
            recon += float(np.sum(1.0 - cos))
            # d(1 - cos)/dshat = cos * shat / |shat|^2 - target / (|t||s|)
            dshat = (cos / (sn * sn))[:, None] * shat \
                - target / (tn * sn)[:, None]
            dshat *= w_rec / batch.size
            grads[i]["wd"] += mb.T @ dshat
            grads[i]["bd"] += dshat.sum(axis=0)
            np.add.at(dm, batch, dshat @ p["wd"].T)
        recon /= batch.size

    trip = 0.0
    if triplets:
        scale = w_tri / len(triplets)
        for t in triplets:
            ma = m[t.anchor]
            mp = t.positive_vec if t.positive is None else m[t.positive]
            mn = m[t.negative]
            dp_vec = ma - mp
            dn_vec = ma - mn
            dp = max(float(np.linalg.norm(dp_vec)), _TINY)
            dn = max(float(np.linalg.norm(dn_vec)), _TINY)
            value = triplet_value(dp, dn, margin)
            if value <= 0.0:
                continue
            trip += value / len(triplets)
            dm[t.anchor] += (dp_vec / dp - dn_vec / dn) * scale
            if t.positive is not None:
                dm[t.positive] -= (dp_vec / dp) * scale
            dm[t.negative] += (dn_vec / dn) * scale

    loss = w_rec * recon + w_tri * trip if alpha is not None else recon
    if not np.isfinite(loss):
        raise NonFiniteLossError(f"loss became {loss!r}")

    # backprop through row normalization: du = (dm - (dm . m) m) / |u|
    du = (dm - np.sum(dm * m, axis=1, keepdims=True) * m) / norms
    if mode == "caeme":
        start = 0
        for i, p in enumerate(params):
            width = p["we"].shape[1]
            dh = du[:, start:start + width]
            grads[i]["we"] += mats[i].T @ dh
            grads[i]["be"] += dh.sum(axis=0)
            start += width
    else:
        for i, p in enumerate(params):
            grads[i]["we"] += mats[i].T @ du
            grads[i]["be"] += du.sum(axis=0)
    return loss, grads


def related_words(taxonomy: Taxonomy, anchor: str) -> set:
    """Co-members of the anchor's synsets plus direct hypernym and hyponym
    lemmas; empty when the anchor is not a taxonomy lemma."""
    lemma = normalize_lemma(anchor)
    related: set = set()
    for sid in taxonomy.lemma_index.get(lemma, ()):
        syn = taxonomy.synsets[sid]
        related.update(syn.words)
        for hid in syn.hypernym_ids:
            related.update(taxonomy.synsets[hid].words)
        for cid in hyponyms(taxonomy, sid):
            related.update(taxonomy.synsets[cid].words)
    related.discard(lemma)
    return related


def sample_triplets(taxonomy: Taxonomy, vocab, anchor: str,
                    tcfg: TripletConfig, rng) -> list:
    """K (anchor, positive, negative) word triples for one anchor.

    Positives come from the related-word set; an anchor with no related
    words gets None positives, for which the trainer synthesizes a noised
    copy of the anchor's meta vector.  Negatives are drawn from the
    vocabulary minus the related set and the anchor itself.
    """
    vocab = list(vocab)
    related = related_words(taxonomy, anchor)
    pool = sorted(related.intersection(vocab))
    negatives_pool = [w for w in vocab if w not in related and w != anchor]
    if not negatives_pool:
        return []
    if pool:
        positives = [pool[int(rng.integers(len(pool)))]
                     for _ in range(tcfg.k)]
    else:
        positives = [None] * tcfg.k
    negatives = [negatives_pool[int(rng.integers(len(negatives_pool)))]
                 for _ in range(tcfg.k)]
    return list(zip([anchor] * tcfg.k, positives, negatives))


def _glorot(rng, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, (fan_in, fan_out))


def fit_autoencoder_meta(ss: SourceSet, mode: str,
                         tcfg: "TripletConfig | None" = None,
                         taxonomy: "Taxonomy | None" = None,
                         meta_dim: int = AAEME_DIM, epochs: int = EPOCHS,
                         batch_size: int = BATCH_SIZE, lr: float = STEP_SIZE,
                         seed: int = 0) -> MetaSpace:
    if mode not in ("caeme", "aaeme"):
        raise ConfigError(f"unknown autoencoder mode {mode!r}")
    if tcfg is not None and taxonomy is None:
        raise ConfigError("triplet training needs a taxonomy")
    mats = source_matrices(ss)
    n = len(ss.vocabulary)
    row_of = {w: i for i, w in enumerate(ss.vocabulary)}
    rng = np.random.default_rng(np.random.PCG64(seed))
    params = []
    for src in ss.sources:
        enc_dim = src.dim if mode == "caeme" else meta_dim
        total_dim = (sum(s.dim for s in ss.sources)
                     if mode == "caeme" else meta_dim)
        params.append({
            "we": _glorot(rng, src.dim, enc_dim),
            "be": np.zeros(enc_dim),
            "wd": _glorot(rng, total_dim, src.dim),
            "bd": np.zeros(src.dim),
        })
    dim = sum(src.dim for src in ss.sources) if mode == "caeme" else meta_dim

    for _epoch in range(epochs):
        triplets_of: dict[int, list[Triplet]] = {}
        if tcfg is not None:
            m_now, _ = meta_rows(params, mats, mode)
            for row, word in enumerate(ss.vocabulary):
                resolved = []
                for _anchor, pos, neg in sample_triplets(
                        taxonomy, ss.vocabulary, word, tcfg, rng):
                    if pos is None:
                        noise = rng.normal(0.0, tcfg.sigma, dim)
                        resolved.append(Triplet(row, None,
                                                m_now[row] + noise,
                                                row_of[neg]))
                    else:
                        resolved.append(Triplet(row, row_of[pos], None,
                                                row_of[neg]))
                triplets_of[row] = resolved
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            rows = order[start:start + batch_size]
            trips = []
            if tcfg is not None:
                for row in rows:
                    trips.extend(triplets_of[int(row)])
            margin = tcfg.margin if tcfg is not None else 0.1
            alpha = tcfg.alpha if tcfg is not None else None
            _, grads = batch_loss_and_grads(params, mats, mode, rows, trips,
                                            margin, alpha)
            for p, g in zip(params, grads):
                for key in p:
                    p[key] -= lr * g[key]
    return MetaSpace(mode=mode, dim=dim, sources=ss, params=params)


def encode(ms: MetaSpace, token: str) -> np.ndarray:
    """Meta vector of a token; unit norm for the autoencoded modes."""
    if ms.mode == "concat":
        return concat_meta(ms.sources, token)
    if ms.mode == "svd":
        return concat_meta(ms.sources, token) @ ms.projection
    vecs = _source_vectors(ms.sources, token)
    encoded = [vecs[i] @ p["we"] + p["be"] for i, p in enumerate(ms.params)]
    if ms.mode == "caeme":
        u = np.concatenate(encoded)
    else:
        u = encoded[0].copy()
        for enc in encoded[1:]:
            u += enc
    return u / max(float(np.linalg.norm(u)), _TINY)


def concat_space(ss: SourceSet) -> MetaSpace:
    """The no-training concat mode as a MetaSpace."""
    return MetaSpace(mode="concat", dim=sum(s.dim for s in ss.sources),
                     sources=ss)


_META_VERSION = 1


def save_meta(ms: MetaSpace, path) -> None:
    """JSON dump; float lists round-trip bit-identically."""
    doc = {
        "version": _META_VERSION,
        "mode": ms.mode,
        "dim": ms.dim,
        "sources": [{"name": s.name, "dim": s.dim, "path": s.path}
                    for s in ms.sources.sources],
        "projection": (None if ms.projection is None
                       else ms.projection.tolist()),
        "params": [{k: v.tolist() for k, v in p.items()}
                   for p in ms.params],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def load_meta(path, ss: SourceSet) -> MetaSpace:
    """Rebuild a MetaSpace over an already-reconstructed source set."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("version") != _META_VERSION:
        raise ConfigError(f"unsupported meta space version "
                          f"{doc.get('version')!r}")
    manifest = [(s["name"], s["dim"]) for s in doc["sources"]]
    actual = [(s.name, s.dim) for s in ss.sources]
    if manifest != actual:
        raise ConfigError(f"source set {actual} does not match saved "
                          f"manifest {manifest}")
    projection = (None if doc["projection"] is None
                  else np.array(doc["projection"], dtype=np.float64))
    params = [{k: np.array(v, dtype=np.float64) for k, v in p.items()}
              for p in doc["params"]]
    return MetaSpace(mode=doc["mode"], dim=doc["dim"], sources=ss,
                     projection=projection, params=params)
