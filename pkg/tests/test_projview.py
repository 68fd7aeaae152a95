import math

import numpy as np
import pytest

from fdrbench.detest import TestResult, log2_transform, run_de_tests
from fdrbench.projview import (
    distribution_summary,
    ma_data,
    ma_values,
    pc1_separation,
    pca_projection,
    volcano_data,
)
from fdrbench.randgen import ParameterError, RngState
from fdrbench.simcore import (
    CountMatrix,
    GroundTruth,
    SimulationConfig,
    compute_mean_matrix,
    group_labels,
    simulate_counts,
    simulate_dataset,
)


def _tr(p, fc):
    p, fc = np.asarray(p, float), np.asarray(fc, float)
    return TestResult(p, np.zeros_like(p), fc, np.zeros_like(p))


def test_volcano_point():
    rows = volcano_data(_tr([0.001, 1.0], [2.0, -0.3]))
    assert rows[0].x == 2.0 and rows[0].y == pytest.approx(3.0, abs=1e-12)
    assert rows[1].y == 0.0
    assert not rows[0].is_de


def test_volcano_carries_truth():
    truth = GroundTruth(np.array([True, False]), np.array([1.0, 0.0]), np.array([10.0, 10.0]))
    rows = volcano_data(_tr([0.01, 0.5], [1.0, 0.0]), truth)
    assert [r.is_de for r in rows] == [True, False]
    with pytest.raises(ParameterError):
        volcano_data(_tr([0.01], [1.0]), truth)


def test_volcano_null_height_bounded():
    # the smallest attainable rank-sum p at n=10 per group sits near 1.8e-4
    worst = 0.0
    for seed in range(20):
        cm, truth = simulate_dataset(SimulationConfig(n_genes=500, prop_de=0.0, seed=seed))
        worst = max(worst, max(r.y for r in volcano_data(run_de_tests(cm), truth)))
    assert worst < 6.0


def _cm(counts, n):
    counts = np.asarray(counts)
    return CountMatrix(counts, group_labels(n), np.full(2 * n, 1000))


def test_ma_example():
    a, m = ma_values(_cm([[100, 100, 400, 400]], 2))
    assert m[0] == pytest.approx(math.log2(401 / 101), abs=1e-12)
    assert m[0] == pytest.approx(1.9893, abs=1e-4)
    assert a[0] == pytest.approx(0.5 * (math.log2(401) + math.log2(101)), abs=1e-12)
    assert a[0] == pytest.approx(7.6529, abs=1e-4)


def test_ma_zero_gene():
    a, m = ma_values(_cm([[0, 0, 0, 0]], 2))
    assert a[0] == 0.0 and m[0] == 0.0


def test_ma_label_swap():
    cm, _ = simulate_dataset(SimulationConfig(n_genes=200, seed=1))
    swapped = CountMatrix(cm.counts[:, ::-1], cm.group_labels, cm.library_sizes[::-1])
    a1, m1 = ma_values(cm)
    a2, m2 = ma_values(swapped)
    np.testing.assert_allclose(a1, a2, atol=1e-12)
    np.testing.assert_allclose(m1, -m2, atol=1e-12)


def test_ma_rows():
    rows = ma_data(_cm([[1, 1, 3, 3], [7, 7, 7, 7]], 2))
    assert len(rows) == 2 and rows[1].y == 0.0


def test_pca_identical_samples():
    x = np.tile(np.arange(5.0)[:, None], (1, 6))
    proj = pca_projection(x, group_labels(3))
    np.testing.assert_array_equal(proj.coords, 0.0)
    assert proj.variance_explained.sum() == pytest.approx(1.0)


def test_pca_variance_and_reconstruction():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(50, 8))
    proj = pca_projection(x)
    assert proj.variance_explained.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(proj.variance_explained) <= 1e-15)
    centred = x - x.mean(axis=1, keepdims=True)
    approx = proj.loadings @ proj.coords.T
    u, s, vt = np.linalg.svd(centred, full_matrices=False)
    best = (u[:, :2] * s[:2]) @ vt[:2]
    np.testing.assert_allclose(approx, best, atol=1e-10)


def test_pca_sign_convention():
    x = np.random.default_rng(1).normal(size=(30, 6))
    proj = pca_projection(x)
    for k in range(2):
        lead = np.argmax(np.abs(proj.loadings[:, k]))
        assert proj.loadings[lead, k] > 0


def test_pca_sample_reorder():
    x = np.random.default_rng(2).normal(size=(40, 7))
    perm = np.random.default_rng(3).permutation(7)
    a = pca_projection(x).coords
    b = pca_projection(x[:, perm]).coords
    np.testing.assert_allclose(np.abs(a[perm]), np.abs(b), atol=1e-10)


def test_pca_needs_two_samples():
    with pytest.raises(ParameterError):
        pca_projection(np.ones((5, 1)))


def test_pca_separates_groups(default_dataset):
    cm, _ = default_dataset
    proj = pca_projection(log2_transform(cm.counts), cm.group_labels)
    gap, spread = pc1_separation(proj)
    assert gap > spread


def test_distribution_constant_sample():
    x = np.column_stack([np.full(10, 3.0), np.arange(10.0)])
    dist = distribution_summary(x, group_labels(1))
    np.testing.assert_array_equal(dist.quantiles[0], [3.0] * 5)
    assert dist.hist_counts.shape == (2, 30)
    np.testing.assert_array_equal(dist.hist_counts.sum(axis=1), [10, 10])


def test_distribution_tracks_library_size():
    labels = group_labels(1)
    lib = np.array([40_000, 160_000])
    base = np.full(2000, 100.0)
    mu = compute_mean_matrix(base, np.ones(2000), np.zeros(2000, bool), lib, labels)
    counts = simulate_counts(mu, 0.05, RngState(5))
    dist = distribution_summary(log2_transform(counts), labels)
    assert dist.quantiles[1, 2] > dist.quantiles[0, 2]
    assert dist.quantiles[1, 2] - dist.quantiles[0, 2] == pytest.approx(2.0, abs=0.2)
