"""Ranking metrics: component-aware average precision, MAP, Precision@k,
and bootstrap standard deviations.

Gold hypernyms that are connected in the taxonomy (edges undirected) form
one creditable unit: the first prediction inside a component scores, later
predictions into the same component count as misses but still occupy rank
positions.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DuplicatePredictionError,
    EmptyGoldError,
    InsufficientDataError,
)
from .taxonomy import Taxonomy, connected_components


def average_precision_components(preds, gold, t: Taxonomy, k: int = 10) -> float:
    """AP where each connected component of the gold set is creditable once."""
    gold = set(gold)
    if not gold:
        raise EmptyGoldError("gold set is empty")
    preds = list(preds)[:k]
    if len(set(preds)) != len(preds):
        raise DuplicatePredictionError(f"duplicate prediction in {preds}")
    components = connected_components(t, gold)
    component_of = {}
    for ci, comp in enumerate(components):
        for sid in comp:
            component_of[sid] = ci
    hit_components: set[int] = set()
    hits = 0
    ap = 0.0
    for j, sid in enumerate(preds, start=1):
        ci = component_of.get(sid)
        if ci is not None and ci not in hit_components:
            hit_components.add(ci)
            hits += 1
            ap += hits / j
    return ap / len(components)


def map_score(query_results, t: Taxonomy, k: int = 10) -> float:
    """Mean of per-query AP over (preds, gold) pairs."""
    aps = [average_precision_components(preds, gold, t, k)
           for preds, gold in query_results]
    if not aps:
        raise ValueError("at least one query is required")
    return float(np.mean(aps))


def precision_at_k(preds, gold, k: int) -> float:
    """Fraction of the first k predictions that are gold synsets (flat set)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    gold = set(gold)
    top = list(preds)[:k]
    return len([p for p in top if p in gold]) / k


def bootstrap_std(per_query_aps, fraction: float = 0.8, reps: int = 30,
                  seed: int = 0) -> float:
    """Population std of subsample means (without replacement)."""
    aps = np.asarray(list(per_query_aps), dtype=np.float64)
    n = len(aps)
    if n < 2:
        raise InsufficientDataError("need at least 2 per-query AP values")
    size = math.ceil(fraction * n)
    rng = np.random.default_rng(seed)
    means = np.empty(reps)
    for r in range(reps):
        idx = rng.permutation(n)[:size]
        means[r] = aps[idx].mean()
    return float(means.std(ddof=0))


@dataclass
class EvalReport:
    map_score: float
    map_std: float
    precision_at: dict[int, float]
    per_query: list[tuple[str, float]] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps({
            "map": self.map_score,
            "map_std": self.map_std,
            "precision": {str(k): v for k, v in sorted(self.precision_at.items())},
            "n_queries": len(self.per_query),
        }, indent=2, sort_keys=True) + "\n"


def evaluate(predictions: dict[str, list[str]], gold: dict[str, set],
             t: Taxonomy, k: int = 10, precision_ks=(1, 2, 3),
             seed: int = 0) -> EvalReport:
    """Score predictions against gold; words with no predictions get AP 0."""
    if not gold:
        raise InsufficientDataError("no queries to evaluate")
    per_query = []
    prec_sums = {pk: 0.0 for pk in precision_ks}
    for word in sorted(gold):
        preds = predictions.get(word, [])
        ap = average_precision_components(preds, gold[word], t, k) if preds else 0.0
        per_query.append((word, ap))
        for pk in precision_ks:
            prec_sums[pk] += precision_at_k(preds, gold[word], pk)
    n = len(per_query)
    aps = [ap for _, ap in per_query]
    std = bootstrap_std(aps, seed=seed) if n >= 2 else 0.0
    return EvalReport(
        map_score=float(np.mean(aps)),
        map_std=std,
        precision_at={pk: prec_sums[pk] / n for pk in precision_ks},
        per_query=per_query,
    )
