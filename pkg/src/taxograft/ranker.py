"""Candidate generation and feature-based ranking of attachment points.

For a query word, the k most similar synsets (associates) seed a candidate
pool: each associate itself (level 0), its direct hypernyms (level 1), and
their direct hypernyms (level 2), merged so every synset appears once with
full provenance.  A logistic model over 22 features scores the pool; its
L2 strength is picked by 5-fold cross-validation on pseudo-queries built
from leaf lemmas.
"""

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import (DegenerateDataError, InsufficientDataError, ParseError,
                     SchemaMismatchError, ZeroQueryError)
from .taxonomy import Taxonomy, hypernyms, hyponyms, normalize_lemma
from .vectors import cosine, phrase_vector

FEATURE_NAMES = (
    "n_times_sim",
    "wikt_hypernym_hit",
    "wikt_synonym_hit",
    "wikt_definition_hit",
    "wikt_hypernym_text_sim",
    "n",
    "log2_2_plus_n",
    "level_min", "level_mean", "level_max",
    "lemma_sim_min", "lemma_sim_mean", "lemma_sim_max",
    "child_min_min", "child_min_mean", "child_min_max",
    "child_mean_min", "child_mean_mean", "child_mean_max",
    "child_max_min", "child_max_mean", "child_max_max",
)


@dataclass
class Candidate:
    synset_id: str
    # (associate synset id, level 0|1|2, associate similarity)
    provenance: list

    @property
    def n(self) -> int:
        return len(self.provenance)


@dataclass
class CandidateSet:
    query: str
    query_vec: np.ndarray
    candidates: list
    features: "np.ndarray | None" = None
    feature_names: tuple = FEATURE_NAMES


@dataclass(frozen=True)
class WiktionaryRecord:
    word: str
    hypernyms: tuple = ()
    synonyms: tuple = ()
    definition: tuple = ()


def load_wiktionary(path) -> dict:
    """word TAB |-joined hypernyms TAB |-joined synonyms TAB definition."""
    records = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            parts = raw.rstrip("\n").split("\t")
            if len(parts) != 4:
                raise ParseError(f"expected 4 tab-separated fields, got "
                                 f"{len(parts)}", line=lineno)
            word = normalize_lemma(parts[0])

            def split(cell):
                return tuple(normalize_lemma(x)
                             for x in cell.split("|") if x.strip())

            records[word] = WiktionaryRecord(
                word=word,
                hypernyms=split(parts[1]),
                synonyms=split(parts[2]),
                definition=tuple(parts[3].lower().split()),
            )
    return records


def generate_candidates(query: str, space, t: Taxonomy, k_assoc: int = 10,
                        exclude=frozenset()) -> CandidateSet:
    """Associates plus their one- and two-step hypernyms, merged."""
    qvec = space.query_vector(query)
    associates = space.top_k(qvec, k_assoc, exclude)
    provenance: dict[str, list] = {}

    def derive(sid, level, aid, sim):
        provenance.setdefault(sid, []).append((aid, level, sim))

    for aid, sim in associates:
        derive(aid, 0, aid, sim)
        parents = set(t.synsets[aid].hypernym_ids)
        for hid in sorted(parents):
            derive(hid, 1, aid, sim)
        grandparents = set()
        for hid in parents:
            grandparents.update(t.synsets[hid].hypernym_ids)
        for gid in sorted(grandparents):
            derive(gid, 2, aid, sim)

    candidates = [Candidate(sid, provenance[sid])
                  for sid in sorted(provenance)]
    return CandidateSet(query=query, query_vec=qvec, candidates=candidates)


def extract_features(c: Candidate, query: str, space, t: Taxonomy,
                     wikt: "WiktionaryRecord | None" = None,
                     query_vec: "np.ndarray | None" = None) -> np.ndarray:
    qvec = space.query_vector(query) if query_vec is None else query_vec
    syn = t.synsets[c.synset_id]
    lemmas = set(syn.words)

    sim = space.similarity(qvec, space.synset_vec(c.synset_id))
    feats = [c.n * sim]

    if wikt is not None:
        feats.append(1.0 if lemmas.intersection(wikt.hypernyms) else 0.0)
        feats.append(1.0 if lemmas.intersection(wikt.synonyms) else 0.0)
        feats.append(1.0 if lemmas.intersection(wikt.definition) else 0.0)
        if wikt.hypernyms:
            text_row = space.text_index.row(c.synset_id)
            sims = [cosine(text_row, phrase_vector(space.store, h).vector)
                    for h in wikt.hypernyms]
            feats.append(float(np.mean(sims)))
        else:
            feats.append(0.0)
    else:
        feats.extend([0.0, 0.0, 0.0, 0.0])

    feats.append(float(c.n))
    feats.append(math.log2(2 + c.n))

    levels = [level for _, level, _ in c.provenance]
    feats.extend([min(levels), float(np.mean(levels)), max(levels)])

    lemma_sims = [space.similarity(qvec, space.lemma_vector(w))
                  for w in syn.words]
    feats.extend([min(lemma_sims), float(np.mean(lemma_sims)),
                  max(lemma_sims)])

    mins, means, maxs = [], [], []
    for cid in hyponyms(t, c.synset_id):
        child_sims = [space.similarity(qvec, space.lemma_vector(w))
                      for w in t.synsets[cid].words]
        mins.append(min(child_sims))
        means.append(float(np.mean(child_sims)))
        maxs.append(max(child_sims))
    for stat in (mins, means, maxs):
        if stat:
            feats.extend([min(stat), float(np.mean(stat)), max(stat)])
        else:
            feats.extend([0.0, 0.0, 0.0])
    return np.array(feats, dtype=np.float64)


def featurize(cs: CandidateSet, space, t: Taxonomy,
              wikt: "WiktionaryRecord | None" = None) -> CandidateSet:
    rows = [extract_features(c, cs.query, space, t, wikt,
                             query_vec=cs.query_vec)
            for c in cs.candidates]
    cs.features = (np.stack(rows) if rows
                   else np.zeros((0, len(FEATURE_NAMES))))
    return cs


@dataclass(frozen=True)
class RankerTrainConfig:
    n_pseudo: int = 1000
    k_assoc: int = 10
    l2_grid: tuple = (0.01, 0.1, 1.0, 10.0)
    folds: int = 5
    gtol: float = 1e-6
    max_iter: int = 1000
    seed: int = 0


def leaf_lemmas(t: Taxonomy) -> list:
    """Lemmas all of whose synsets are leaves (no hyponyms)."""
    out = []
    for lemma, sids in t.lemma_index.items():
        if all(not t.children.get(sid) for sid in sids):
            out.append(lemma)
    return sorted(out)


def gold_hypernyms(t: Taxonomy, lemma: str) -> set:
    """Direct and order-2 hypernyms of every synset containing the lemma."""
    gold = set()
    for sid in t.lemma_index.get(normalize_lemma(lemma), ()):
        gold.update(hypernyms(t, sid, 2))
    return gold


def build_training_set(t: Taxonomy, space, wikt_table=None,
                       cfg: RankerTrainConfig = RankerTrainConfig()) -> list:
    """Labeled feature rows from leaf pseudo-queries with self-masking."""
    lemmas = leaf_lemmas(t)
    if not lemmas:
        raise InsufficientDataError("taxonomy has no leaf lemmas to train on")
    rng = np.random.default_rng(np.random.PCG64(cfg.seed))
    picked = [lemmas[i] for i in rng.permutation(len(lemmas))[:cfg.n_pseudo]]
    wikt_table = wikt_table or {}
    data = []
    for lemma in picked:
        own = set(t.lemma_index[lemma])
        gold = gold_hypernyms(t, lemma)
        if not gold:
            continue
        try:
            cs = generate_candidates(lemma, space, t, cfg.k_assoc,
                                     exclude=own)
        except ZeroQueryError:
            continue
        if not any(c.synset_id in gold for c in cs.candidates):
            continue
        featurize(cs, space, t, wikt_table.get(lemma))
        for c, row in zip(cs.candidates, cs.features):
            data.append((row, 1 if c.synset_id in gold else 0))
    if not data:
        raise InsufficientDataError("no pseudo-query produced any "
                                    "gold-bearing candidate list")
    return data


@dataclass
class Ranker:
    weights: np.ndarray
    bias: float
    means: np.ndarray
    stds: np.ndarray
    l2: float
    feature_names: tuple = FEATURE_NAMES

    def scores(self, features: np.ndarray) -> np.ndarray:
        scaled = (features - self.means) / self.stds
        z = scaled @ self.weights + self.bias
        return 1.0 / (1.0 + np.exp(-z))

    def save(self, path) -> None:
        doc = {
            "version": 1,
            "feature_names": list(self.feature_names),
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "means": self.means.tolist(),
            "stds": self.stds.tolist(),
            "l2": self.l2,
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh)

    @classmethod
    def load(cls, path) -> "Ranker":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        if doc.get("version") != 1:
            raise ParseError(f"unsupported ranker version "
                             f"{doc.get('version')!r}")
        return cls(weights=np.array(doc["weights"], dtype=np.float64),
                   bias=float(doc["bias"]),
                   means=np.array(doc["means"], dtype=np.float64),
                   stds=np.array(doc["stds"], dtype=np.float64),
                   l2=float(doc["l2"]),
                   feature_names=tuple(doc["feature_names"]))


def logistic_loss_and_grad(params, x, y, l2):
    """Mean log-loss + (l2 / 2n) |w|^2; bias unpenalized."""
    w = params[:-1]
    b = params[-1]
    n = x.shape[0]
    z = x @ w + b
    # y*softplus(-z) + (1-y)*softplus(z), stable at large |z|
    loss = float(np.mean(y * np.logaddexp(0.0, -z)
                         + (1.0 - y) * np.logaddexp(0.0, z)))
    loss += (l2 / (2.0 * n)) * float(w @ w)
    p = 1.0 / (1.0 + np.exp(-z))
    dw = x.T @ (p - y) / n + (l2 / n) * w
    db = float(np.mean(p - y))
    return loss, np.concatenate([dw, [db]])


def _fit_logistic(x, y, l2, gtol, max_iter):
    x0 = np.zeros(x.shape[1] + 1)
    res = minimize(logistic_loss_and_grad, x0, args=(x, y, l2),
                   jac=True, method="L-BFGS-B",
                   options={"gtol": gtol, "maxiter": max_iter})
    return res.x[:-1], float(res.x[-1])


def _held_out_log_loss(w, b, x, y):
    z = x @ w + b
    return float(np.mean(y * np.logaddexp(0.0, -z)
                         + (1.0 - y) * np.logaddexp(0.0, z)))


def train_ranker(data, cfg: RankerTrainConfig = RankerTrainConfig()
                 ) -> Ranker:
    if not data:
        raise DegenerateDataError("empty training data")
    x = np.stack([row for row, _ in data])
    y = np.array([label for _, label in data], dtype=np.float64)
    classes = set(np.unique(y))
    if classes != {0.0, 1.0}:
        raise DegenerateDataError(f"need both labels, got {sorted(classes)}")

    means = x.mean(axis=0)
    stds = x.std(axis=0)
    zero_var = stds == 0.0
    stds = np.where(zero_var, 1.0, stds)
    xs = (x - means) / stds

    rng = np.random.default_rng(np.random.PCG64(cfg.seed))
    order = rng.permutation(len(y))
    folds = np.array_split(order, cfg.folds)
    best_l2 = None
    best_loss = math.inf
    for l2 in cfg.l2_grid:
        losses = []
        for i in range(len(folds)):
            held = folds[i]
            train = np.concatenate([folds[j] for j in range(len(folds))
                                    if j != i])
            if held.size == 0 or train.size == 0:
                continue
            w, b = _fit_logistic(xs[train], y[train], l2, cfg.gtol,
                                 cfg.max_iter)
            losses.append(_held_out_log_loss(w, b, xs[held], y[held]))
        mean_loss = float(np.mean(losses)) if losses else math.inf
        if mean_loss < best_loss:
            best_loss = mean_loss
            best_l2 = l2
    if best_l2 is None:
        best_l2 = cfg.l2_grid[0]

    w, b = _fit_logistic(xs, y, best_l2, cfg.gtol, cfg.max_iter)
    w = np.where(zero_var, 0.0, w)
    return Ranker(weights=w, bias=b, means=means, stds=stds, l2=best_l2)


def rank(r: Ranker, cs: CandidateSet, k: int = 10) -> list:
    """Top-k (synset id, score), score-descending, id-ascending ties."""
    if cs.features is None:
        raise SchemaMismatchError("candidate set has no extracted features")
    if cs.feature_names != r.feature_names:
        raise SchemaMismatchError(f"feature schema {cs.feature_names} does "
                                  f"not match ranker {r.feature_names}")
    if cs.features.shape[1] != len(r.feature_names):
        raise SchemaMismatchError(f"{cs.features.shape[1]} feature columns "
                                  f"for {len(r.feature_names)} names")
    scores = r.scores(cs.features)
    ranked = sorted(zip((c.synset_id for c in cs.candidates), scores),
                    key=lambda pair: (-pair[1], pair[0]))
    return [(sid, float(score)) for sid, score in ranked[:k]]


def predict_for_query(query: str, space, t: Taxonomy, r: Ranker,
                      wikt: "WiktionaryRecord | None" = None, k: int = 10,
                      k_assoc: int = 10, exclude=frozenset()) -> list:
    cs = generate_candidates(query, space, t, k_assoc=k_assoc,
                             exclude=exclude)
    featurize(cs, space, t, wikt)
    return rank(r, cs, k)


def save_predictions(predictions: dict, path) -> None:
    """TSV lines: word TAB rank TAB synset id TAB score (rank 1-based)."""
    with open(path, "w", encoding="utf-8") as fh:
        for word in sorted(predictions):
            for pos, (sid, score) in enumerate(predictions[word], start=1):
                fh.write(f"{word}\t{pos}\t{sid}\t{repr(float(score))}\n")


def load_predictions(path) -> dict:
    preds: dict[str, list] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            parts = raw.rstrip("\n").split("\t")
            if len(parts) != 4:
                raise ParseError("expected word/rank/synset/score",
                                 line=lineno)
            word, pos, sid, score = parts
            rows = preds.setdefault(word, [])
            if int(pos) != len(rows) + 1:
                raise ParseError(f"rank column out of order for {word!r}",
                                 line=lineno)
            rows.append((sid, float(score)))
    return preds
