import math

import numpy as np
import pytest

from icsa.errors import (
    DegenerateResponse,
    EmptyOutlierSet,
    ShapeError,
    SingularDesign,
    UndefinedNormalization,
    UndefinedRatio,
)
from icsa.linalg import rng_stream
from icsa.metrics import (
    INFINITE_EFFICIENCY,
    lambda_max,
    lasso_cv,
    lasso_path,
    median_difference_ci,
    ols,
    ore,
    rpe,
    rpe_ratio_ci,
    selection_metrics,
    utility_distance,
)


# ORE


def test_ore_verbatim_copy_is_zero(rng):
    X = rng.standard_normal((10, 3))
    assert ore(X, X[::-1], [2, 7]) == 0.0


def test_ore_hand_example():
    original = np.array([[3.0, 4.0], [0.0, 1.0]])
    anonymized = np.array([[3.0, 3.0], [10.0, 10.0]])
    assert ore(original, anonymized, [0]) == pytest.approx(0.04, abs=1e-15)


def test_ore_searches_every_row():
    original = np.array([[3.0, 4.0], [0.0, 1.0]])
    # the nearest row to the outlier is the one at the non-outlier position
    anonymized = np.array([[100.0, 100.0], [3.0, 4.0]])
    assert ore(original, anonymized, [0]) == 0.0


def test_ore_errors():
    X = np.array([[0.0, 0.0], [1.0, 1.0]])
    with pytest.raises(UndefinedNormalization):
        ore(X, X, [0])
    with pytest.raises(EmptyOutlierSet):
        ore(X, X, [])
    with pytest.raises(ShapeError):
        ore(X, X[:, :1], [1])


# OLS and utility distance


def test_ols_exact_line():
    x = np.arange(1.0, 6.0)
    assert ols(x, 2 * x) == pytest.approx([2.0])


def test_ols_normal_equations(rng):
    X = rng.standard_normal((40, 4))
    y = rng.standard_normal(40)
    b = ols(X, y)
    assert np.abs(X.T @ (y - X @ b)).max() <= 1e-8


def test_ols_square_system(rng):
    X = rng.standard_normal((3, 3)) + 3 * np.eye(3)
    y = rng.standard_normal(3)
    np.testing.assert_allclose(ols(X, y), np.linalg.solve(X, y), atol=1e-12)


def test_ols_singular():
    X = np.column_stack([np.arange(5.0), 2 * np.arange(5.0)])
    with pytest.raises(SingularDesign):
        ols(X, np.ones(5))


def test_utility_distance():
    assert utility_distance([1, 2], [1, 2]) == 0
    assert utility_distance([1, 0], [0, 1]) == pytest.approx(math.sqrt(2))
    a, b = np.array([1.0, -2.0, 0.5]), np.array([0.0, 3.0, 1.0])
    perm = [2, 0, 1]
    assert utility_distance(a[perm], b[perm]) == pytest.approx(utility_distance(a, b))
    with pytest.raises(ShapeError):
        utility_distance([1, 2], [1, 2, 3])


# Lasso


def _toy(rng, n=80, p=3):
    X = rng.standard_normal((n, p)) * [1.0, 3.0, 0.5] + [1.0, -2.0, 0.0]
    y = X @ np.array([1.5, 0.0, -2.0]) + 0.7 + rng.standard_normal(n)
    return X, y


def test_lambda_max_zeros_everything(rng):
    X, y = _toy(rng)
    lam = lambda_max(X, y)
    Xs = (X - X.mean(0)) / X.std(0)
    assert lam == pytest.approx(np.max(np.abs(Xs.T @ (y - y.mean()))) / len(y))
    coefs, _, _ = lasso_path(X, y, [lam * 1.5, lam])
    assert np.all(coefs == 0)
    coefs, _, _ = lasso_path(X, y, [lam * 0.99])
    assert np.count_nonzero(coefs) == 1


def test_lasso_zero_penalty_matches_ols(rng):
    X, y = _toy(rng)
    lam = lambda_max(X, y)
    grid = np.append(np.logspace(np.log10(lam), np.log10(lam * 1e-4), 100), 0.0)
    coefs, mean, sd = lasso_path(X, y, grid, tol=1e-14)
    b = coefs[-1] / sd
    design = np.column_stack([np.ones(len(y)), X])
    ref = np.linalg.lstsq(design, y, rcond=None)[0]
    np.testing.assert_allclose(b, ref[1:], atol=1e-4)
    assert y.mean() - mean @ b == pytest.approx(ref[0], abs=1e-4)


def test_lasso_kkt(rng):
    X, y = _toy(rng)
    lam = lambda_max(X, y)
    grid = np.logspace(np.log10(lam), np.log10(lam * 1e-4), 100)
    coefs, mean, sd = lasso_path(X, y, grid)
    Xs = (X - mean) / sd
    yc = y - y.mean()
    n = len(y)
    for lam_k, b in zip(grid, coefs):
        grad = Xs.T @ (yc - Xs @ b) / n
        active = b != 0
        assert np.abs(grad[active] - lam_k * np.sign(b[active])).max(initial=0) <= 1e-6
        assert np.abs(grad[~active]).max(initial=0) <= lam_k + 1e-6


def _kkt_worst(X, y, grid, coefs, mean, sd):
    Xs = (X - mean) / sd
    yc = y - y.mean()
    worst = 0.0
    for lam_k, b in zip(grid, coefs):
        grad = Xs.T @ (yc - Xs @ b) / len(y)
        active = b != 0
        worst = max(worst, np.abs(grad[active] - lam_k * np.sign(b[active])).max(initial=0),
                    (np.abs(grad[~active]) - lam_k).max(initial=0))
    return worst


def test_lasso_kkt_on_collinear_design():
    # radius, perimeter and area columns are nearly collinear; one of these
    # responses also sends LARS off the path, which exercises the fallback
    from sklearn.datasets import load_breast_cancer

    data = load_breast_cancer().data
    X = data[:, :20]
    for j in range(20, 30):
        y = data[:, j]
        lam = lambda_max(X, y)
        grid = np.logspace(np.log10(lam), np.log10(lam * 1e-4), 100)
        coefs, mean, sd = lasso_path(X, y, grid)
        assert _kkt_worst(X, y, grid, coefs, mean, sd) <= 1e-6


def test_lasso_path_matches_coordinate_descent(rng):
    from sklearn.linear_model import lasso_path as cd_path

    X, y = _toy(rng)
    lam = lambda_max(X, y)
    grid = np.logspace(np.log10(lam), np.log10(lam * 1e-4), 30)
    coefs, mean, sd = lasso_path(X, y, grid)
    _, ref, _ = cd_path((X - mean) / sd, y - y.mean(), alphas=grid, tol=1e-14, max_iter=1_000_000)
    np.testing.assert_allclose(coefs, ref.T, atol=1e-8)


def test_lasso_cv_recovers_support(rng):
    X, y = _toy(rng, n=200)
    fit = lasso_cv(X, y, rng_stream(3))
    assert {0, 2} <= set(fit.selected)
    assert fit.lam in fit.lambdas
    assert len(fit.lambdas) == 100
    assert fit.lambdas[-1] == pytest.approx(fit.lambdas[0] * 1e-4)
    assert fit.cv_error[list(fit.lambdas).index(fit.lam)] == fit.cv_error.min()
    np.testing.assert_allclose(fit.coef, [1.5, 0.0, -2.0], atol=0.3)


def test_lasso_cv_deterministic(rng):
    X, y = _toy(rng)
    a = lasso_cv(X, y, rng_stream(9))
    b = lasso_cv(X, y, rng_stream(9))
    assert np.array_equal(a.coef, b.coef) and a.lam == b.lam


def test_lasso_cv_constant_column_and_response(rng):
    X, y = _toy(rng)
    X[:, 1] = 4.0
    fit = lasso_cv(X, y, rng_stream(1))
    assert fit.coef[1] == 0
    with pytest.raises(DegenerateResponse):
        lasso_cv(X, np.full(len(y), 2.0), rng_stream(1))
    with pytest.raises(ShapeError):
        lasso_cv(X[:5], y[:5], rng_stream(1))


# selection metrics


def test_selection_identical():
    m = selection_metrics({1, 4}, {1, 4}, 6)
    assert (m.recall, m.fpr, m.precision, m.jaccard) == (1, 0, 1, 1)


def test_selection_hand_example():
    m = selection_metrics({1, 2, 3}, {1, 2, 4}, 10)
    assert m.recall == pytest.approx(2 / 3)
    assert m.fpr == pytest.approx(1 / 7)
    assert m.precision == pytest.approx(2 / 3)
    assert m.jaccard == pytest.approx(1 / 2)
    assert m.tp + m.fp + m.fn + m.tn == 10


def test_selection_empty_cases():
    m = selection_metrics({0, 1}, set(), 5)
    assert m.recall == 0 and m.fpr == 0 and m.precision == 0
    assert "precision" in m.degenerate
    m = selection_metrics(set(), set(), 5)
    assert (m.recall, m.fpr, m.precision, m.jaccard) == (1, 0, 1, 1)
    m = selection_metrics({0, 1, 2}, {0, 1}, 3)
    assert m.fpr == 0 and "fpr" in m.degenerate
    with pytest.raises(ShapeError):
        selection_metrics({7}, set(), 5)


# RPE and ratio intervals


def test_rpe_examples():
    assert rpe(0.04, 2.0, "distance") == pytest.approx(0.1)
    assert rpe(0.04, 0.5, "recall") == pytest.approx(0.4)
    assert rpe(0.0, 0.3, "fpr") == 0.0
    assert rpe(0.04, 1.0, "jaccard") == INFINITE_EFFICIENCY
    assert rpe(0.04, 0.0, "fpr") == INFINITE_EFFICIENCY
    with pytest.raises(ValueError):
        rpe(0.04, 0.5, "accuracy")


def test_rpe_monotone():
    assert rpe(0.09, 0.5, "distance") > rpe(0.04, 0.5, "distance")
    assert rpe(0.04, 0.6, "precision") > rpe(0.04, 0.5, "precision")
    assert rpe(0.04, 0.4, "fpr") < rpe(0.04, 0.3, "fpr")


def test_ratio_ci_identical(rng):
    x = rng.gamma(2.0, size=200)
    ci = rpe_ratio_ci(x, x, 2000, rng_stream(4))
    assert ci.ratio == 1.0
    assert ci.lower < 1 < ci.upper


def test_ratio_ci_double(rng):
    x = rng.gamma(2.0, size=30)
    ci = rpe_ratio_ci(2 * x, x, 2000, rng_stream(4))
    assert ci.ratio == pytest.approx(2.0)
    assert ci.lower > 1


def test_ratio_ci_deterministic_and_exclusions(rng):
    x = rng.gamma(2.0, size=50)
    y = np.append(x, [np.inf, np.inf])
    a = rpe_ratio_ci(y, x, 500, rng_stream(8))
    b = rpe_ratio_ci(y, x, 500, rng_stream(8))
    assert a == b
    assert a.excluded_icsa == 2 and a.excluded_sa == 0


def test_ratio_ci_undefined():
    with pytest.raises(UndefinedRatio):
        rpe_ratio_ci([1.0, 2.0], [0.0, 0.0], 100, rng_stream(0))
    with pytest.raises(UndefinedRatio):
        rpe_ratio_ci([np.inf], [1.0], 100, rng_stream(0))


def test_median_difference_ci(rng):
    a = rng.standard_normal(300) + 1.0
    b = rng.standard_normal(300)
    diff, lo, hi = median_difference_ci(a, b, 1000, rng_stream(2), level=0.90)
    assert lo < diff < hi
    assert lo > 0
