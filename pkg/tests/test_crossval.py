import numpy as np
import pytest

from graph_scattering.crossval import (
    SPLITS,
    ExperimentProtocol,
    Preprocessor,
    get_split,
    nested_cv,
    plan_splits,
    reduced_split_study,
    stratified_folds,
    tune_and_vote,
)
from graph_scattering.errors import FoldTooSmall
from graph_scattering.rng import named_rng

SMALL_GRID = dict(C_grid=(1.0, 100.0), gamma_grid=(0.1, 1.0))


def _blobs(rng, n_per=30, classes=2, p=4, sep=8.0):
    X = np.vstack([rng.normal(size=(n_per, p)) + sep * k for k in range(classes)])
    return X, np.repeat(np.arange(classes), n_per)


def test_named_rng_streams():
    a = named_rng(3, "x").integers(0, 1 << 30, size=4)
    b = named_rng(3, "x").integers(0, 1 << 30, size=4)
    c = named_rng(3, "y").integers(0, 1 << 30, size=4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_stratified_folds_cover_and_balance(rng):
    y = np.repeat([0, 1, 2], [23, 17, 10])
    folds = stratified_folds(y, 10, rng)
    np.testing.assert_array_equal(np.sort(np.concatenate(folds)), np.arange(50))
    for c in range(3):
        counts = [np.sum(y[f] == c) for f in folds]
        assert max(counts) - min(counts) <= 1
    with pytest.raises(FoldTooSmall):
        stratified_folds(np.array([0, 1, 0]), 5, rng)


@pytest.mark.parametrize("name", sorted(SPLITS))
def test_plans_partition(name):
    y = np.repeat([0, 1], 50)
    prof = get_split(name)
    plans = plan_splits(y, name, seed=1)
    assert len(plans) == (prof.pool_draws or prof.outer_folds)
    for test_idx, chunks in plans:
        assert len(chunks) == prof.chunks
        used = np.concatenate([test_idx] + list(chunks))
        assert len(used) == len(np.unique(used)) == 100
    expected_test = {"80-10-10": 0.1, "70-10-20": 0.2, "40-10-50": 0.5, "20-10-70": 0.7}[name]
    sizes = [len(t) for t, _ in plans]
    assert np.mean(sizes) == pytest.approx(100 * expected_test, abs=1)
    if prof.pool_draws is None:
        covered = np.sort(np.concatenate([t for t, _ in plans]))
        np.testing.assert_array_equal(covered, np.arange(100))


def test_split_name_aliases():
    assert get_split("20/10/70").name == "20-10-70"
    with pytest.raises(ValueError):
        get_split("50-50")


def test_separable_perfect(rng):
    X, y = _blobs(rng, classes=3)
    res = nested_cv(X, y, ExperimentProtocol(seed=0, **SMALL_GRID))
    assert res.mean == 1.0 and res.std == 0.0
    assert len(res.folds) == 10 and all(len(f.inner) == 9 for f in res.folds)


def test_shuffled_labels_near_chance(rng):
    X = rng.normal(size=(400, 5))
    y = rng.permutation(np.repeat([0, 1], 200))
    res = nested_cv(X, y, ExperimentProtocol(seed=2, C_grid=(1.0,), gamma_grid=(1.0,)))
    assert abs(res.mean - 0.5) <= 0.07


def test_deterministic(rng):
    X, y = _blobs(rng, sep=1.0)
    p = ExperimentProtocol(seed=5, **SMALL_GRID)
    a, b = nested_cv(X, y, p), nested_cv(X, y, p)
    np.testing.assert_array_equal(a.accuracies, b.accuracies)
    for fa, fb in zip(a.folds, b.folds):
        np.testing.assert_array_equal(fa.predictions, fb.predictions)


def test_no_test_leakage(rng):
    X, y = _blobs(rng, sep=2.0)
    test_idx = np.arange(0, 60, 10)
    rest = np.setdiff1d(np.arange(60), test_idx)
    chunks = [rest[k::3] for k in range(3)]
    p = ExperimentProtocol(**SMALL_GRID)
    a = tune_and_vote(X, y, test_idx, chunks, p)
    X2 = X.copy()
    X2[test_idx] = 1e6 * rng.normal(size=(len(test_idx), X.shape[1]))
    b = tune_and_vote(X2, y, test_idx, chunks, p)
    for ia, ib in zip(a.inner, b.inner):
        np.testing.assert_array_equal(ia.scaler_mean, ib.scaler_mean)
        np.testing.assert_array_equal(ia.scaler_scale, ib.scaler_scale)
        assert (ia.C, ia.gamma, ia.val_accuracy) == (ib.C, ib.gamma, ib.val_accuracy)


def test_preprocessor_train_statistics(rng):
    X = rng.normal(size=(40, 3)) * [1, 5, 0] + [0, 2, 7]
    pre = Preprocessor().fit(X)
    Z = pre.transform(X)
    np.testing.assert_allclose(Z.mean(axis=0), 0, atol=1e-12)
    np.testing.assert_allclose(Z.std(axis=0), [1, 1, 0], atol=1e-12)
    pca = Preprocessor(pca_threshold=0.9).fit(X)
    assert pca.transform(X).shape[1] == 1


def test_reduced_split_study_separable(rng):
    X, y = _blobs(rng, n_per=40)
    out = reduced_split_study(X, y, seed=0, **SMALL_GRID)
    assert set(out) == set(SPLITS)
    for name, res in out.items():
        assert res.mean == 1.0, name


def test_protocol_record():
    d = ExperimentProtocol(split="40-10-50", seed=9).to_dict()
    assert d["split"] == "40-10-50" and d["seed"] == 9
    assert d["C_grid"] == [0.01, 0.1, 1.0, 10.0, 100.0, 1000.0]
    assert d["gamma_grid"] == [1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0]
