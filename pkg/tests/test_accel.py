import os
import subprocess
import sys

import numpy as np
import pytest

from subsel import accel

pytestmark = pytest.mark.skipif(not accel.HAVE_NUMBA, reason="numba unavailable")


@pytest.fixture(scope="module")
def rng():
    return np.random.default_rng(77)


class TestBackendAgreement:
    def test_shifted_cosine(self, rng):
        x = rng.standard_normal((40, 7))
        inv = 1.0 / np.sqrt((x ** 2).sum(axis=1))
        a = accel.pairwise_shifted_cosine_np(x, inv)
        b = accel.pairwise_shifted_cosine_nb(x, inv)
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)

    def test_euclidean(self, rng):
        x = rng.standard_normal((35, 5))
        a = accel.pairwise_euclidean_np(x)
        b = accel.pairwise_euclidean_nb(x)
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-9)

    def test_facility_gains_dense(self, rng):
        n = 30
        sim = rng.uniform(0, 1, (n, n))
        best = rng.uniform(0, 1, n)
        selected = np.zeros(n, dtype=bool)
        selected[[3, 11]] = True
        a = accel.facility_gains_dense_np(sim, best, selected)
        b = accel.facility_gains_dense_nb(sim, best, selected)
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)
        assert a[3] == b[3] == -1.0

    def test_facility_gains_sparse(self, rng):
        from conftest import random_features
        from subsel.kernels import cosine_similarity, sparsify_knn

        kernel = sparsify_knn(cosine_similarity(random_features(rng, 25, 4)), 6)
        col_ptr, rows, vals, cols = kernel.csc_arrays()
        best = rng.uniform(0, 1, 25)
        selected = np.zeros(25, dtype=bool)
        a = accel.facility_gains_sparse_np(25, col_ptr, rows, vals, cols, best,
                                           selected)
        b = accel.facility_gains_sparse_nb(25, col_ptr, rows, vals, cols, best,
                                           selected)
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)

    def test_knn_labels(self, rng):
        train = rng.standard_normal((50, 4))
        labels = rng.integers(0, 3, 50)
        queries = rng.standard_normal((20, 4))
        a = accel.knn_labels_np(train, labels, queries, 5, 3)
        b = accel.knn_labels_nb(train, labels, queries, 5, 3)
        assert np.array_equal(a, b)

    def test_knn_tie_rules_agree_on_exact_ties(self):
        train = np.array([[0.0], [2.0], [2.0], [4.0]])
        labels = np.array([0, 1, 2, 1])
        queries = np.array([[1.0], [3.0]])
        a = accel.knn_labels_np(train, labels, queries, 2, 3)
        b = accel.knn_labels_nb(train, labels, queries, 2, 3)
        assert np.array_equal(a, b)


def test_env_flag_selects_the_numpy_path():
    code = ("import subsel.accel as a; "
            "print(a.USE_NUMBA, a.knn_labels is a.knn_labels_np)")
    env = dict(os.environ, SUBSEL_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["False", "True"]


def test_default_flag_uses_numba_when_available():
    code = "import subsel.accel as a; print(a.USE_NUMBA)"
    env = {k: v for k, v in os.environ.items() if k != "SUBSEL_NUMBA"}
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "True"
