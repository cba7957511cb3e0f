"""Candidate pools, feature extraction, and the logistic ranker."""

import math

import numpy as np
import pytest

from helpers import random_taxonomy, toy_ranker, toy_store, toy_taxonomy
from oracles import central_diff, recount_provenance, rel_err
from taxograft.errors import (DegenerateDataError, ParseError,
                              SchemaMismatchError)
from taxograft.ranker import (FEATURE_NAMES, Candidate, CandidateSet, Ranker,
                              RankerTrainConfig, WiktionaryRecord,
                              build_training_set, extract_features, featurize,
                              generate_candidates, gold_hypernyms,
                              leaf_lemmas, load_predictions, load_wiktionary,
                              logistic_loss_and_grad, predict_for_query,
                              rank, save_predictions, train_ranker)
from taxograft.spaces import WordSynsetSpace
from taxograft.vectors import VectorStore, cosine, phrase_vector


def toy_space():
    return WordSynsetSpace(toy_store(), toy_taxonomy())


def sibling_space():
    """Store tuned so a 'pet' query retrieves the two leaves under s2."""
    vectors = {"entity": (-1.0, 0.1), "animal": (0.2, 1.0),
               "dog": (1.0, 0.2), "cat": (1.0, -0.2),
               "plant": (-0.8, -0.6), "tree": (-0.7, -0.7),
               "pet": (1.0, 0.0)}
    store = VectorStore(dim=2, vectors={w: np.array(v, dtype=np.float64)
                                        for w, v in vectors.items()})
    return WordSynsetSpace(store, toy_taxonomy())


class TestCandidates:
    def test_sibling_associates_share_parent(self):
        space = sibling_space()
        cs = generate_candidates("pet", space, space.taxonomy, k_assoc=2)
        assert [c.synset_id for c in cs.candidates] == ["s1", "s2", "s3",
                                                        "s4"]
        by_id = {c.synset_id: c for c in cs.candidates}
        # both associates are leaves under s2, so the shared parent and
        # grandparent each carry two derivations
        assert by_id["s3"].n == 1 and by_id["s4"].n == 1
        assert by_id["s2"].n == 2
        assert by_id["s1"].n == 2
        assert {lvl for _, lvl, _ in by_id["s2"].provenance} == {1}
        assert {lvl for _, lvl, _ in by_id["s1"].provenance} == {2}

    def test_associate_also_reached_as_parent(self):
        # puppy retrieves s3 then s2: s2 is both an associate and s3's
        # parent, so it carries one derivation per role
        space = toy_space()
        cs = generate_candidates("puppy", space, space.taxonomy, k_assoc=2)
        assert [c.synset_id for c in cs.candidates] == ["s1", "s2", "s3"]
        by_id = {c.synset_id: c for c in cs.candidates}
        assert sorted(lvl for _, lvl, _ in by_id["s2"].provenance) == [0, 1]
        assert sorted(lvl for _, lvl, _ in by_id["s1"].provenance) == [1, 2]

    def test_single_associate_chain(self):
        space = toy_space()
        cs = generate_candidates("tree", space, space.taxonomy, k_assoc=1)
        assert [c.synset_id for c in cs.candidates] == ["s1", "s5", "s6"]
        by_id = {c.synset_id: c for c in cs.candidates}
        assert by_id["s6"].provenance == [("s6", 0, pytest.approx(1.0))]
        assert by_id["s5"].provenance[0][1] == 1
        assert by_id["s1"].provenance[0][1] == 2

    def test_exclusion_masks_associate(self):
        space = toy_space()
        cs = generate_candidates("puppy", space, space.taxonomy, k_assoc=1,
                                 exclude=frozenset({"s3"}))
        level0 = [sid for c in cs.candidates
                  for sid, lvl, _ in c.provenance if lvl == 0
                  for sid in [c.synset_id]]
        assert "s3" not in level0

    def test_provenance_against_recount(self):
        rng = np.random.default_rng(404)
        for _ in range(100):
            n = int(rng.integers(3, 16))
            t = random_taxonomy(rng, n)
            words = sorted({w for syn in t.synsets.values()
                            for w in syn.words})
            dim = 6
            items = [(w, rng.normal(size=dim)) for w in words]
            items.append(("qq", rng.normal(size=dim)))
            store = VectorStore(dim=dim,
                                vectors={w: np.asarray(v) for w, v in items})
            space = WordSynsetSpace(store, t)
            k = int(rng.integers(1, 5))
            qvec = space.query_vector("qq")
            associates = space.top_k(qvec, k)
            cs = generate_candidates("qq", space, t, k_assoc=k)
            want = recount_provenance(associates, t)
            assert [c.synset_id for c in cs.candidates] == sorted(want)
            sim_of = dict(associates)
            for c in cs.candidates:
                got = sorted((aid, lvl) for aid, lvl, _ in c.provenance)
                assert got == want[c.synset_id]
                for aid, _, sim in c.provenance:
                    assert sim == sim_of[aid]


class TestFeatures:
    def test_schema_width(self):
        assert len(FEATURE_NAMES) == 22

    def test_count_and_similarity_product(self):
        space = toy_space()
        cs = featurize(generate_candidates("puppy", space, space.taxonomy,
                                           k_assoc=2),
                       space, space.taxonomy)
        for c, row in zip(cs.candidates, cs.features):
            sim = space.similarity(cs.query_vec,
                                   space.synset_vec(c.synset_id))
            assert row[0] == pytest.approx(c.n * sim, abs=1e-12)
            assert row[5] == c.n
            assert row[6] == pytest.approx(math.log2(2 + c.n), abs=1e-12)

    def test_level_stats(self):
        space = toy_space()
        cs = featurize(generate_candidates("puppy", space, space.taxonomy,
                                           k_assoc=2),
                       space, space.taxonomy)
        rows = {c.synset_id: row for c, row in zip(cs.candidates,
                                                   cs.features)}
        assert list(rows["s1"][7:10]) == [1.0, 1.5, 2.0]
        assert list(rows["s2"][7:10]) == [0.0, 0.5, 1.0]
        assert list(rows["s3"][7:10]) == [0.0, 0.0, 0.0]

    def test_level_stats_pure_hypernym_candidates(self):
        space = sibling_space()
        cs = featurize(generate_candidates("pet", space, space.taxonomy,
                                           k_assoc=2),
                       space, space.taxonomy)
        rows = {c.synset_id: row for c, row in zip(cs.candidates,
                                                   cs.features)}
        assert list(rows["s1"][7:10]) == [2.0, 2.0, 2.0]
        assert list(rows["s2"][7:10]) == [1.0, 1.0, 1.0]

    def test_lemma_stats_collapse_for_single_lemma(self):
        space = toy_space()
        t = space.taxonomy
        cs = featurize(generate_candidates("puppy", space, t, k_assoc=2),
                       space, t)
        for c, row in zip(cs.candidates, cs.features):
            if len(t.synsets[c.synset_id].words) == 1:
                assert row[10] == row[11] == row[12]
                lemma = t.synsets[c.synset_id].words[0]
                want = space.similarity(cs.query_vec,
                                        space.lemma_vector(lemma))
                assert row[11] == pytest.approx(want, abs=1e-12)

    def test_child_stats(self):
        space = toy_space()
        t = space.taxonomy
        cs = featurize(generate_candidates("puppy", space, t, k_assoc=2),
                       space, t)
        rows = {c.synset_id: row for c, row in zip(cs.candidates,
                                                   cs.features)}
        sims = sorted(space.similarity(cs.query_vec, space.lemma_vector(w))
                      for w in ("dog", "cat"))
        # single-lemma children collapse the three child aggregates
        for base in (13, 16, 19):
            assert rows["s2"][base] == pytest.approx(sims[0], abs=1e-12)
            assert rows["s2"][base + 1] == pytest.approx(
                float(np.mean(sims)), abs=1e-12)
            assert rows["s2"][base + 2] == pytest.approx(sims[1], abs=1e-12)
        assert list(rows["s3"][13:22]) == [0.0] * 9

    def test_wiktionary_features(self):
        space = toy_space()
        t = space.taxonomy
        wikt = WiktionaryRecord(word="puppy", hypernyms=("dog",),
                                synonyms=("pup",),
                                definition=("a", "young", "dog"))
        cs = generate_candidates("puppy", space, t, k_assoc=2)
        featurize(cs, space, t, wikt)
        rows = {c.synset_id: row for c, row in zip(cs.candidates,
                                                   cs.features)}
        assert rows["s3"][1] == 1.0  # lemma dog is a listed hypernym
        assert rows["s3"][2] == 0.0
        assert rows["s3"][3] == 1.0  # dog appears in the definition
        assert rows["s2"][1] == 0.0
        want = cosine(space.text_index.row("s3"),
                      phrase_vector(space.store, "dog").vector)
        assert rows["s3"][4] == pytest.approx(want, abs=1e-12)

    def test_without_wiktionary_block_is_zero(self):
        space = toy_space()
        cs = featurize(generate_candidates("puppy", space, space.taxonomy,
                                           k_assoc=2),
                       space, space.taxonomy)
        assert np.array_equal(cs.features[:, 1:5],
                              np.zeros((len(cs.candidates), 4)))

    def test_extract_matches_featurize(self):
        space = toy_space()
        t = space.taxonomy
        cs = generate_candidates("puppy", space, t, k_assoc=2)
        featurize(cs, space, t)
        for c, row in zip(cs.candidates, cs.features):
            alone = extract_features(c, "puppy", space, t,
                                     query_vec=cs.query_vec)
            assert np.array_equal(alone, row)


class TestWiktionaryFile:
    def test_parse(self, tmp_path):
        path = tmp_path / "wikt.tsv"
        path.write_text("Puppy\tdog|canine\tpup\ta young dog\n"
                        "\n"
                        "tree\t\t\twoody plant\n", encoding="utf-8")
        table = load_wiktionary(path)
        assert table["puppy"].hypernyms == ("dog", "canine")
        assert table["puppy"].synonyms == ("pup",)
        assert table["puppy"].definition == ("a", "young", "dog")
        assert table["tree"].hypernyms == ()

    def test_bad_field_count(self, tmp_path):
        path = tmp_path / "wikt.tsv"
        path.write_text("puppy\tdog\n", encoding="utf-8")
        with pytest.raises(ParseError, match="line 1"):
            load_wiktionary(path)


class TestLogisticLoss:
    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=(40, 6))
        y = (rng.random(40) < 0.5).astype(np.float64)
        params = rng.normal(size=7) * 0.5
        _, grad = logistic_loss_and_grad(params, x, y, 0.7)
        num = central_diff(
            lambda p: logistic_loss_and_grad(p, x, y, 0.7)[0], params)
        assert rel_err(grad, num) < 1e-6

    def test_bias_unpenalized(self):
        x = np.zeros((4, 2))
        y = np.array([0.0, 1.0, 0.0, 1.0])
        big_bias = np.array([0.0, 0.0, 5.0])
        for l2 in (0.0, 100.0):
            loss, _ = logistic_loss_and_grad(big_bias, x, y, l2)
            assert loss == pytest.approx(
                0.5 * (np.logaddexp(0, -5.0) + np.logaddexp(0, 5.0)))


class TestTrainRanker:
    def separable_data(self, n=60, seed=0):
        rng = np.random.default_rng(seed)
        data = []
        for _ in range(n):
            label = int(rng.random() < 0.5)
            row = np.zeros(len(FEATURE_NAMES))
            row[11] = (2.0 if label else -2.0) + rng.normal() * 0.1
            row[5] = rng.normal()
            data.append((row, label))
        return data

    def test_separable_data_fully_ordered(self):
        data = self.separable_data()
        r = train_ranker(data, RankerTrainConfig(folds=3))
        x = np.stack([row for row, _ in data])
        y = np.array([label for _, label in data])
        scores = r.scores(x)
        assert scores[y == 1].min() > scores[y == 0].max()
        assert r.l2 in (0.01, 0.1, 1.0, 10.0)

    def test_constant_feature_gets_zero_weight(self):
        data = self.separable_data()
        # column 5 varies, the rest are zero-variance except 11
        r = train_ranker(data, RankerTrainConfig(folds=3))
        for i in range(len(FEATURE_NAMES)):
            if i not in (5, 11):
                assert r.weights[i] == 0.0
                assert r.stds[i] == 1.0

    def test_deterministic(self):
        data = self.separable_data()
        a = train_ranker(data, RankerTrainConfig(folds=3))
        b = train_ranker(data, RankerTrainConfig(folds=3))
        assert np.array_equal(a.weights, b.weights)
        assert a.bias == b.bias and a.l2 == b.l2

    def test_empty_data(self):
        with pytest.raises(DegenerateDataError):
            train_ranker([])

    def test_single_label(self):
        row = np.zeros(len(FEATURE_NAMES))
        with pytest.raises(DegenerateDataError):
            train_ranker([(row, 1), (row.copy(), 1)])


class TestRank:
    def test_scores_descending_ties_by_id(self):
        r = toy_ranker()
        row = np.zeros(len(FEATURE_NAMES))
        cs = CandidateSet(query="q", query_vec=np.zeros(4),
                          candidates=[Candidate("s9", [("s9", 0, 0.5)]),
                                      Candidate("s2", [("s2", 0, 0.5)])],
                          features=np.stack([row, row.copy()]))
        ranked = rank(r, cs)
        assert [sid for sid, _ in ranked] == ["s2", "s9"]
        assert ranked[0][1] == ranked[1][1]

    def test_truncates_to_k(self):
        space = toy_space()
        cs = featurize(generate_candidates("puppy", space, space.taxonomy,
                                           k_assoc=2),
                       space, space.taxonomy)
        assert len(rank(toy_ranker(), cs, k=2)) == 2

    def test_requires_features(self):
        cs = CandidateSet(query="q", query_vec=np.zeros(4), candidates=[])
        with pytest.raises(SchemaMismatchError):
            rank(toy_ranker(), cs)

    def test_requires_matching_schema(self):
        cs = CandidateSet(query="q", query_vec=np.zeros(4), candidates=[],
                          features=np.zeros((0, 3)),
                          feature_names=("a", "b", "c"))
        with pytest.raises(SchemaMismatchError):
            rank(toy_ranker(), cs)

    def test_toy_state_puts_dog_first_for_puppy(self):
        space = toy_space()
        ranked = predict_for_query("puppy", space, space.taxonomy,
                                   toy_ranker(), k_assoc=2)
        assert ranked[0][0] == "s3"


class TestTrainingSet:
    def test_leaf_lemmas(self):
        assert leaf_lemmas(toy_taxonomy()) == ["cat", "dog", "tree"]

    def test_gold_hypernyms(self):
        assert gold_hypernyms(toy_taxonomy(), "dog") == {"s2", "s1"}
        assert gold_hypernyms(toy_taxonomy(), "entity") == set()

    def test_rows_labeled_and_complete(self):
        space = toy_space()
        cfg = RankerTrainConfig(n_pseudo=10, k_assoc=2)
        data = build_training_set(space.taxonomy, space, cfg=cfg)
        labels = {label for _, label in data}
        assert labels == {0, 1}
        for row, _ in data:
            assert row.shape == (len(FEATURE_NAMES),)

    def test_end_to_end_training_ranks_gold(self):
        space = toy_space()
        t = space.taxonomy
        cfg = RankerTrainConfig(n_pseudo=10, k_assoc=2, folds=2,
                                l2_grid=(0.1, 1.0))
        r = train_ranker(build_training_set(t, space, cfg=cfg), cfg)
        ranked = predict_for_query("puppy", space, t, r, k_assoc=2)
        assert {"s2", "s3"}.intersection(sid for sid, _ in ranked[:3])


class TestPredictionFiles:
    def test_round_trip(self, tmp_path):
        preds = {"puppy": [("s3", 0.9), ("s2", 0.5)],
                 "kitten": [("s4", 1.0 / 3.0)]}
        path = tmp_path / "preds.tsv"
        save_predictions(preds, path)
        assert load_predictions(path) == preds

    def test_rank_column_checked(self, tmp_path):
        path = tmp_path / "preds.tsv"
        path.write_text("puppy\t2\ts3\t0.9\n", encoding="utf-8")
        with pytest.raises(ParseError):
            load_predictions(path)

    def test_ranker_round_trip(self, tmp_path):
        data = TestTrainRanker().separable_data()
        r = train_ranker(data, RankerTrainConfig(folds=3))
        path = tmp_path / "ranker.json"
        r.save(path)
        back = Ranker.load(path)
        assert np.array_equal(back.weights, r.weights)
        assert back.bias == r.bias and back.l2 == r.l2
        x = np.stack([row for row, _ in data])
        assert np.array_equal(back.scores(x), r.scores(x))

    def test_ranker_version_checked(self, tmp_path):
        path = tmp_path / "ranker.json"
        path.write_text('{"version": 9}', encoding="utf-8")
        with pytest.raises(ParseError):
            Ranker.load(path)
