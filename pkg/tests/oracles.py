"""Independent naive reimplementations used as ground truth.

Everything here is deliberately slow and simple: exact fractions, explicit
enumeration, repeated scans.  Nothing imports the package's own metric,
candidate, or Katz code paths.
"""

from fractions import Fraction

import numpy as np


def undirected_edges(t):
    """Frozenset edges straight from the synset fields."""
    edges = set()
    for sid, syn in t.synsets.items():
        for hid in syn.hypernym_ids:
            edges.add(frozenset((sid, hid)))
    return edges


def component_partition(gold, t):
    """Components of the gold set under direct gold-to-gold edges."""
    edges = undirected_edges(t)
    left = set(gold)
    comps = []
    while left:
        comp = {left.pop()}
        grew = True
        while grew:
            grew = False
            for other in sorted(left):
                if any(frozenset((other, member)) in edges
                       for member in comp):
                    comp.add(other)
                    left.discard(other)
                    grew = True
        comps.append(frozenset(comp))
    return comps


def brute_component_ap(preds, gold, t, k=10):
    """Walk predictions, credit each gold component once, exact fractions."""
    comps = component_partition(gold, t)
    m = len(comps)
    hit = set()
    hits = 0
    total = Fraction(0)
    for j, sid in enumerate(preds[:k], start=1):
        comp = next((c for c in comps if sid in c), None)
        if comp is not None and comp not in hit:
            hit.add(comp)
            hits += 1
            total += Fraction(hits, j)
    return float(total / m)


def classical_ap(preds, gold, k=10):
    """Textbook AP: flat membership, each gold id creditable once."""
    hits = 0
    credited = set()
    total = Fraction(0)
    for j, sid in enumerate(preds[:k], start=1):
        if sid in gold and sid not in credited:
            credited.add(sid)
            hits += 1
            total += Fraction(hits, j)
    return float(total / len(gold))


def recount_provenance(associates, t):
    """Naive derivation list per candidate from an associate list.

    associates: [(synset id, similarity)] in retrieval order.  Returns
    {candidate id: sorted list of (associate id, level)}.
    """
    derivations = {}

    def note(sid, aid, level):
        derivations.setdefault(sid, []).append((aid, level))

    for aid, _ in associates:
        note(aid, aid, 0)
        parents = sorted(set(t.synsets[aid].hypernym_ids))
        for pid in parents:
            note(pid, aid, 1)
        grandparents = set()
        for pid in parents:
            grandparents.update(t.synsets[pid].hypernym_ids)
        for gid in sorted(grandparents):
            note(gid, aid, 2)
    return {sid: sorted(v) for sid, v in derivations.items()}


def series_katz(a, beta, terms=10):
    """Sum of beta^l A^l for l = 1..terms, plain repeated multiplication."""
    a = np.asarray(a, dtype=np.float64)
    power = np.eye(a.shape[0])
    out = np.zeros_like(a)
    for ell in range(1, terms + 1):
        power = power @ a
        out += (beta ** ell) * power
    return out


def midpoint_reference(points):
    """Klein three-step aggregation evaluated in extended precision."""
    pts = [np.asarray(p, dtype=np.longdouble) for p in points]
    kleins = []
    gammas = []
    for x in pts:
        sq = np.dot(x, x)
        k = 2.0 * x / (1.0 + sq)
        gamma = 1.0 / np.sqrt(1.0 - np.dot(k, k))
        kleins.append(k)
        gammas.append(gamma)
    total = np.zeros_like(pts[0])
    for g, k in zip(gammas, kleins):
        total = total + g * k
    mid = total / np.sum(np.asarray(gammas))
    back = mid / (1.0 + np.sqrt(1.0 - np.dot(mid, mid)))
    return np.asarray(back, dtype=np.float64)


def central_diff(f, x, eps=1e-6):
    """Gradient of a scalar function of a flat array, central differences."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    for i in range(x.size):
        hi = x.copy()
        lo = x.copy()
        hi[i] += eps
        lo[i] -= eps
        grad[i] = (f(hi) - f(lo)) / (2.0 * eps)
    return grad


def rel_err(analytic, numeric):
    """Max elementwise relative error with an absolute floor."""
    analytic = np.asarray(analytic, dtype=np.float64).ravel()
    numeric = np.asarray(numeric, dtype=np.float64).ravel()
    scale = np.maximum(np.abs(numeric), 1e-8)
    return float(np.max(np.abs(analytic - numeric) / scale))
