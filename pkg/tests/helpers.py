"""Shared fixtures: toy taxonomies, hand-placed vectors, planted data."""

from dataclasses import dataclass

import numpy as np

from taxograft.dataset import QueryDataset, diff_versions
from taxograft.ranker import FEATURE_NAMES, Ranker
from taxograft.taxonomy import Synset, Taxonomy, build_taxonomy
from taxograft.vectors import VectorStore


def _t(pos, rows):
    synsets = {sid: Synset(id=sid, pos=pos, words=tuple(words),
                           hypernym_ids=tuple(parents))
               for sid, words, parents in rows}
    return build_taxonomy(pos, synsets)


def toy_taxonomy() -> Taxonomy:
    """Six synsets: s2->s1, s3->s2, s4->s2, s5->s1, s6->s5."""
    return _t("n", [
        ("s1", ("entity",), ()),
        ("s2", ("animal",), ("s1",)),
        ("s3", ("dog",), ("s2",)),
        ("s4", ("cat",), ("s2",)),
        ("s5", ("plant",), ("s1",)),
        ("s6", ("tree",), ("s5",)),
    ])


def diamond_taxonomy() -> Taxonomy:
    """x has two parents a, b that share the root r."""
    return _t("n", [
        ("r", ("stuff",), ()),
        ("a", ("alpha",), ("r",)),
        ("b", ("beta",), ("r",)),
        ("x", ("apex",), ("a", "b")),
    ])


TOY_VECTORS = {
    "entity": (1.0, 0.1, 0.0, 0.0),
    "animal": (0.8, 0.55, 0.0, 0.05),
    "dog": (0.45, 0.8, 0.35, 0.0),
    "cat": (0.5, 0.75, -0.4, 0.0),
    "plant": (0.3, -0.85, 0.15, 0.0),
    "tree": (0.25, -0.9, 0.25, 0.05),
    "puppy": (0.42, 0.81, 0.38, 0.05),
    "kitten": (0.47, 0.76, -0.43, 0.05),
}


def toy_store() -> VectorStore:
    """Hand-placed 4-dim vectors; puppy sits next to dog, kitten to cat."""
    return VectorStore(dim=4, vectors={w: np.array(v, dtype=np.float64)
                                       for w, v in TOY_VECTORS.items()})


def toy_ranker() -> Ranker:
    """Fixed-weight scorer dominated by query-to-lemma similarity.

    Makes the toy ranking stable by construction: for "puppy" the dog
    synset s3 outranks its ancestors.
    """
    weights = np.zeros(len(FEATURE_NAMES))
    weights[FEATURE_NAMES.index("lemma_sim_mean")] = 6.0
    return Ranker(weights=weights, bias=-3.0,
                  means=np.zeros(len(FEATURE_NAMES)),
                  stds=np.ones(len(FEATURE_NAMES)), l2=0.1)


def random_taxonomy(rng, n_nodes, lemmas_per_synset=1) -> Taxonomy:
    """Acyclic by construction: node i may only point at nodes < i."""
    rows = []
    for i in range(n_nodes):
        n_parents = int(rng.integers(0, min(i, 2) + 1))
        parents = sorted(rng.choice(i, size=n_parents, replace=False).tolist()
                         ) if n_parents else []
        words = tuple(f"w{i}x{j}" for j in range(lemmas_per_synset))
        rows.append((f"n{i:02d}", words, tuple(f"n{p:02d}" for p in parents)))
    return _t("n", rows)


@dataclass
class Planted:
    """A three-level synthetic taxonomy with held-out noisy query words."""

    old: Taxonomy
    new: Taxonomy
    store: VectorStore
    dataset: QueryDataset


N_MIDS = 6
N_GROUPS = 24
PLANTED_DIM = 24
N_QUERIES = 50


def planted(seed=7) -> Planted:
    """200 synsets: root <- 6 mids <- 24 groups <- 169 leaves.

    Leaf vectors cluster around their group's direction; each of the 50
    query vectors is a noisy copy of one leaf's vector (noise sigma = 0.1
    of that vector's norm per component).  The new release attaches every
    query word under the donor leaf's parent group, so diffing the two
    releases yields gold = {group, mid}.
    """
    rng = np.random.default_rng(seed)
    rows = [("root", ("thing",), ())]
    for m in range(N_MIDS):
        rows.append((f"mid{m}", (f"domain{m}",), ("root",)))
    group_dirs = {}
    leaf_vecs = {}
    leaves = []
    for g in range(N_GROUPS):
        direction = rng.normal(size=PLANTED_DIM)
        direction /= np.linalg.norm(direction)
        group_dirs[g] = direction
        rows.append((f"grp{g:02d}", (f"family{g:02d}",),
                     (f"mid{g % N_MIDS}",)))
        n_leaves = 8 if g == 0 else 7
        for i in range(n_leaves):
            lemma = f"item{g:02d}x{i}"
            rows.append((f"leaf{g:02d}x{i}", (lemma,), (f"grp{g:02d}",)))
            leaf_vecs[lemma] = direction + 0.05 * rng.normal(size=PLANTED_DIM)
            leaves.append((g, lemma))
    old = _t("n", rows)
    assert len(old.synsets) == 200

    vectors = dict(leaf_vecs)
    vectors["thing"] = 0.1 * rng.normal(size=PLANTED_DIM)
    for m in range(N_MIDS):
        members = [group_dirs[g] for g in range(N_GROUPS) if g % N_MIDS == m]
        vectors[f"domain{m}"] = np.mean(members, axis=0)
    for g in range(N_GROUPS):
        vectors[f"family{g:02d}"] = group_dirs[g]

    picks = rng.choice(len(leaves), size=N_QUERIES, replace=False)
    new_rows = list(rows)
    for j, pick in enumerate(sorted(picks.tolist())):
        g, donor = leaves[pick]
        word = f"q{j:02d}w"
        base = leaf_vecs[donor]
        sigma = 0.1 * float(np.linalg.norm(base))
        vectors[word] = base + rng.normal(0.0, sigma, size=PLANTED_DIM)
        new_rows.append((f"q{j:02d}s", (word,), (f"grp{g:02d}",)))
    new = _t("n", new_rows)

    store = VectorStore(dim=PLANTED_DIM, vectors=vectors)
    dataset = diff_versions(old, new)
    assert len(dataset.entries) == N_QUERIES
    return Planted(old=old, new=new, store=store, dataset=dataset)
