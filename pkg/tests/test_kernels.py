"""Compiled and pure training kernels must agree bit for bit."""

import numpy as np
import pytest

from taxograft import _kernels
from taxograft._kernels import _pure

fast = pytest.mark.skipif(_kernels._fast is None,
                          reason="compiled kernels unavailable")


def sgns_inputs(seed=11):
    rng = np.random.default_rng(seed)
    n, dim = 7, 5
    walks = rng.integers(0, n, size=30).astype(np.int32)
    offsets = np.array([0, 10, 18, 30], dtype=np.int32)
    syn0 = (rng.random((n, dim)) - 0.5) / dim
    syn1 = np.zeros((n, dim))
    counts = np.bincount(walks, minlength=n).astype(np.float64) + 1.0
    cum = np.cumsum(counts ** 0.75)
    cum /= cum[-1]
    return walks, offsets, syn0, syn1, cum


def poincare_inputs(seed=12):
    rng = np.random.default_rng(seed)
    n, dim = 9, 4
    children = np.array([1, 2, 3, 4, 5, 6, 7, 8], dtype=np.int32)
    parents = np.array([0, 0, 1, 1, 2, 2, 3, 4], dtype=np.int32)
    emb = rng.uniform(-0.001, 0.001, (n, dim))
    return children, parents, emb


class TestSplitMix64:
    def test_golden_sequence(self):
        rng = _pure.SplitMix64(1)
        got = [rng.next_uniform() for _ in range(3)]
        assert got == [0.5665615751722809, 0.7457817572627011,
                       0.9710027535867962]

    def test_range_and_determinism(self):
        a = _pure.SplitMix64(99)
        b = _pure.SplitMix64(99)
        for _ in range(200):
            u = a.next_uniform()
            assert 0.0 <= u < 1.0
            assert u == b.next_uniform()

    def test_seeds_differ(self):
        assert (_pure.SplitMix64(1).next_uniform()
                != _pure.SplitMix64(2).next_uniform())


class TestBackendSelection:
    def test_backend_reports(self):
        assert _kernels.backend() in ("pure", "cython")

    def test_dispatch_targets_exist(self):
        assert callable(_kernels.sgns_train)
        assert callable(_kernels.poincare_train)


class TestSgns:
    def test_pure_deterministic(self):
        walks, offsets, syn0, syn1, cum = sgns_inputs()
        a0, a1 = syn0.copy(), syn1.copy()
        b0, b1 = syn0.copy(), syn1.copy()
        _pure.sgns_train(walks, offsets, a0, a1, cum, 2, 3, 2, 0.05, 1e-4, 7)
        _pure.sgns_train(walks, offsets, b0, b1, cum, 2, 3, 2, 0.05, 1e-4, 7)
        assert np.array_equal(a0, b0) and np.array_equal(a1, b1)

    def test_pure_updates_vectors(self):
        walks, offsets, syn0, syn1, cum = sgns_inputs()
        before = syn0.copy()
        _pure.sgns_train(walks, offsets, syn0, syn1, cum, 2, 3, 1, 0.05,
                         1e-4, 7)
        assert not np.array_equal(syn0, before)

    def test_empty_corpus_noop(self):
        syn0 = np.full((3, 2), 0.5)
        syn1 = np.zeros((3, 2))
        _pure.sgns_train(np.array([], dtype=np.int32),
                         np.array([0], dtype=np.int32), syn0, syn1,
                         np.array([1.0]), 2, 3, 2, 0.05, 1e-4, 7)
        assert np.array_equal(syn0, np.full((3, 2), 0.5))

    @fast
    def test_backends_bit_identical(self):
        walks, offsets, syn0, syn1, cum = sgns_inputs()
        p0, p1 = syn0.copy(), syn1.copy()
        c0, c1 = syn0.copy(), syn1.copy()
        _pure.sgns_train(walks, offsets, p0, p1, cum, 2, 3, 2, 0.05, 1e-4, 7)
        _kernels._fast.sgns_train(walks, offsets, c0, c1, cum, 2, 3, 2,
                                  0.05, 1e-4, 7)
        assert np.array_equal(p0, c0)
        assert np.array_equal(p1, c1)

    @fast
    def test_backends_bit_identical_window_one(self):
        walks, offsets, syn0, syn1, cum = sgns_inputs(seed=31)
        p0, p1 = syn0.copy(), syn1.copy()
        c0, c1 = syn0.copy(), syn1.copy()
        _pure.sgns_train(walks, offsets, p0, p1, cum, 1, 5, 3, 0.025, 1e-4,
                         123)
        _kernels._fast.sgns_train(walks, offsets, c0, c1, cum, 1, 5, 3,
                                  0.025, 1e-4, 123)
        assert np.array_equal(p0, c0)
        assert np.array_equal(p1, c1)


class TestPoincare:
    def test_pure_deterministic(self):
        children, parents, emb = poincare_inputs()
        a = emb.copy()
        b = emb.copy()
        _pure.poincare_train(children, parents, a, 3, 3, 0.1, 1, 0.1,
                             1e-5, 5)
        _pure.poincare_train(children, parents, b, 3, 3, 0.1, 1, 0.1,
                             1e-5, 5)
        assert np.array_equal(a, b)

    def test_stays_inside_ball(self):
        children, parents, emb = poincare_inputs()
        _pure.poincare_train(children, parents, emb, 20, 5, 0.5, 2, 0.1,
                             1e-5, 5)
        norms = np.linalg.norm(emb, axis=1)
        assert np.all(norms <= 1.0 - 1e-5 + 1e-15)

    @fast
    def test_backends_bit_identical(self):
        children, parents, emb = poincare_inputs()
        p = emb.copy()
        c = emb.copy()
        _pure.poincare_train(children, parents, p, 4, 3, 0.1, 1, 0.1,
                             1e-5, 99)
        _kernels._fast.poincare_train(children, parents, c, 4, 3, 0.1, 1,
                                      0.1, 1e-5, 99)
        assert np.array_equal(p, c)

    @fast
    def test_backends_bit_identical_high_lr(self):
        children, parents, emb = poincare_inputs(seed=44)
        p = emb.copy()
        c = emb.copy()
        _pure.poincare_train(children, parents, p, 6, 4, 0.4, 2, 0.05,
                             1e-5, 17)
        _kernels._fast.poincare_train(children, parents, c, 6, 4, 0.4, 2,
                                      0.05, 1e-5, 17)
        assert np.array_equal(p, c)
