"""Privacy and utility measures for anonymized data."""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.exceptions import ConvergenceWarning
from sklearn.linear_model import lars_path as _sk_lars_path
from sklearn.linear_model import lasso_path as _sk_lasso_path

from .errors import (
    DegenerateResponse,
    EmptyOutlierSet,
    ShapeError,
    SingularDesign,
    UndefinedNormalization,
    UndefinedRatio,
)

INFINITE_EFFICIENCY = math.inf
RPE_KINDS = ("distance", "recall", "fpr", "precision", "jaccard")


def ore(original, anonymized, outliers) -> float:
    """Outlier replication error.

    Mean over outlier rows k of ``min_i ||z_k - z*_i||^2 / ||z_k||^2``, the
    minimum taken over every anonymized row. Larger means better hidden.
    """
    original = np.asarray(original, dtype=float)
    anonymized = np.asarray(anonymized, dtype=float)
    if original.ndim != 2 or anonymized.ndim != 2 or original.shape[1] != anonymized.shape[1]:
        raise ShapeError("original and anonymized data need the same number of columns")
    outliers = np.atleast_1d(np.asarray(outliers, dtype=int))
    if outliers.size == 0:
        raise EmptyOutlierSet("ORE needs at least one outlier")
    Z = original[outliers]
    norms = np.einsum("ij,ij->i", Z, Z)
    if np.any(norms == 0):
        raise UndefinedNormalization("an outlier row has zero norm")
    d2 = ((Z[:, None, :] - anonymized[None, :, :]) ** 2).sum(axis=2)
    return float(np.mean(d2.min(axis=1) / norms))


def ols(X, y) -> np.ndarray:
    """Least-squares coefficients without an intercept."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    ev = np.linalg.eigvalsh(X.T @ X)
    if ev[-1] <= 0 or ev[0] <= 1e-10 * ev[-1]:
        raise SingularDesign(f"design is singular (eigenvalue ratio {ev[0] / max(ev[-1], 1e-300):.2e})")
    return np.linalg.lstsq(X, y, rcond=None)[0]


def utility_distance(beta_true, beta_hat) -> float:
    beta_true = np.asarray(beta_true, dtype=float)
    beta_hat = np.asarray(beta_hat, dtype=float)
    if beta_true.shape != beta_hat.shape:
        raise ShapeError(f"coefficient shapes differ: {beta_true.shape} vs {beta_hat.shape}")
    return float(np.linalg.norm(beta_true - beta_hat))


# --------------------------------------------------------------------------
# Lasso with K-fold cross-validation


@dataclass
class LassoFit:
    coef: np.ndarray
    intercept: float
    selected: tuple[int, ...]
    lam: float
    lambdas: np.ndarray
    cv_error: np.ndarray


def _standardize(X):
    mean = X.mean(axis=0)
    sd = X.std(axis=0)
    sd = np.where(sd > 1e-12 * np.maximum(np.abs(mean), 1.0), sd, 1.0)
    return (X - mean) / sd, mean, sd


def lambda_max(X, y) -> float:
    """Smallest penalty with an all-zero solution, on standardized columns."""
    Xs, _, _ = _standardize(np.asarray(X, dtype=float))
    yc = np.asarray(y, dtype=float) - np.mean(y)
    return float(np.max(np.abs(Xs.T @ yc)) / len(yc))


def lasso_grid(lam_max: float, n_lambdas: int = 100, ratio: float = 1e-4) -> np.ndarray:
    return np.logspace(np.log10(lam_max), np.log10(lam_max * ratio), n_lambdas)


def _kkt_violation(G, c, n, b, lam) -> float:
    g = (c - G @ b) / n
    on = b != 0
    active = np.abs(g[on] - lam * np.sign(b[on])).max(initial=0.0)
    return float(max(active, (np.abs(g[~on]) - lam).max(initial=0.0)))


def _polish(G, c, n, b, lam):
    # exact solution for b's support and signs, if it keeps those signs
    on = np.flatnonzero(b)
    if on.size == 0:
        return b
    s = np.sign(b[on])
    try:
        sol = np.linalg.solve(G[np.ix_(on, on)], c[on] - n * lam * s)
    except np.linalg.LinAlgError:
        return b
    if np.any(np.sign(sol) != s):
        return b
    out = np.zeros_like(b)
    out[on] = sol
    return out


def lasso_path(X, y, lambdas, tol: float = 1e-10, max_iter: int = 100_000):
    """Coefficient path on standardized columns with centered response.

    Minimizes ``(1/2n)||y - ybar - Xs b||^2 + lam ||b||_1`` for each ``lam``
    (descending). Returns ``(coefs (k x p) on the standardized scale, mean, sd)``.

    The exact piecewise-linear path comes from LARS. Each grid point is then
    re-solved on its support and checked against the optimality conditions.
    Points that fail (LARS can lose track after degenerate knots) fall back
    to warm-started coordinate descent with ``tol`` and ``max_iter``.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    Xs, mean, sd = _standardize(X)
    yc = y - y.mean()
    lambdas = np.asarray(lambdas, dtype=float)
    n, p = Xs.shape
    G, c = Xs.T @ Xs, Xs.T @ yc
    accept = 1e-9 * max(np.abs(c).max() / n, np.finfo(float).tiny)
    coefs = np.zeros((len(lambdas), p))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        warnings.simplefilter("ignore", UserWarning)
        knots, _, path = _sk_lars_path(Xs, yc, method="lasso", alpha_min=lambdas.min(), eps=np.finfo(float).eps)
        prev = np.zeros(p)
        for k, lam in enumerate(lambdas):
            b = np.array([np.interp(lam, knots[::-1], path[j, ::-1]) for j in range(p)])
            b = _polish(G, c, n, b, lam)
            if _kkt_violation(G, c, n, b, lam) > accept:
                _, cd, _ = _sk_lasso_path(Xs, yc, alphas=[lam], coef_init=prev, tol=tol, max_iter=max_iter)
                cd = cd[:, 0]
                polished = _polish(G, c, n, cd, lam)
                b = min((b, cd, polished), key=lambda v: _kkt_violation(G, c, n, v, lam))
            coefs[k] = prev = b
    return coefs, mean, sd


def lasso_cv(X, y, rng: np.random.Generator, folds: int = 10, n_lambdas: int = 100, tol: float = 1e-7) -> LassoFit:
    """Lasso with the penalty chosen by K-fold cross-validation.

    Columns are standardized inside every fit and the intercept is
    unpenalized. The penalty grid is 100 log-spaced values from
    ``lambda_max`` down to ``1e-4 * lambda_max`` (full-data grid reused in
    every fold); the CV-error minimizer is selected. Coefficients are reported
    on the original scale.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < folds:
        raise ShapeError(f"need at least {folds} rows for {folds}-fold CV, got {n}")
    if np.ptp(y) == 0:
        raise DegenerateResponse("response is constant")
    lambdas = lasso_grid(lambda_max(X, y), n_lambdas)
    parts = np.array_split(rng.permutation(n), folds)
    err = np.zeros(len(lambdas))
    for test in parts:
        train = np.setdiff1d(np.arange(n), test)
        coefs, mean, sd = lasso_path(X[train], y[train], lambdas, tol=tol)
        pred = y[train].mean() + ((X[test] - mean) / sd) @ coefs.T
        err += ((y[test][:, None] - pred) ** 2).sum(axis=0)
    err /= n
    best = int(np.argmin(err))
    coefs, mean, sd = lasso_path(X, y, lambdas[: best + 1], tol=tol)
    b = coefs[-1] / sd
    intercept = float(y.mean() - mean @ b)
    selected = tuple(int(j) for j in np.flatnonzero(b != 0))
    return LassoFit(b, intercept, selected, float(lambdas[best]), lambdas, err)


# --------------------------------------------------------------------------
# Variable-selection stability


@dataclass(frozen=True)
class SelectionMetrics:
    recall: float
    fpr: float
    precision: float
    jaccard: float
    tp: int
    fp: int
    fn: int
    tn: int
    degenerate: tuple[str, ...] = ()


def selection_metrics(original, anonymized, universe: int) -> SelectionMetrics:
    """Recall, FPR, precision and Jaccard of ``anonymized`` against ``original``.

    Empty denominators: recall, precision and Jaccard are 1 when both sets are
    empty; an empty original set gives recall 1, an empty anonymized set gives
    precision 0, and FPR is 0 when every predictor was originally selected.
    Each such case is named in ``degenerate``.
    """
    orig, anon = set(original), set(anonymized)
    if not (orig | anon) <= set(range(universe)):
        raise ShapeError("selected indices fall outside the universe")
    tp = len(orig & anon)
    fp = len(anon - orig)
    fn = len(orig - anon)
    tn = universe - tp - fp - fn
    flags = []
    both_empty = not orig and not anon

    if tp + fn:
        recall = tp / (tp + fn)
    else:
        recall = 1.0
        flags.append("recall")
    if fp + tn:
        fpr = fp / (fp + tn)
    else:
        fpr = 0.0
        flags.append("fpr")
    if tp + fp:
        precision = tp / (tp + fp)
    else:
        precision = 1.0 if both_empty else 0.0
        flags.append("precision")
    if tp + fp + fn:
        jaccard = tp / (tp + fp + fn)
    else:
        jaccard = 1.0
        flags.append("jaccard")
    return SelectionMetrics(recall, fpr, precision, jaccard, tp, fp, fn, tn, tuple(flags))


# --------------------------------------------------------------------------
# Relative privacy efficiency


def rpe(ore_value: float, utility_value: float, kind: str) -> float:
    """sqrt(ORE) per unit of utility loss.

    The loss is the value itself for ``distance`` and ``fpr`` and
    ``1 - value`` for ``recall``, ``precision`` and ``jaccard``. A zero loss
    gives :data:`INFINITE_EFFICIENCY`.
    """
    if kind not in RPE_KINDS:
        raise ValueError(f"unknown utility kind {kind!r}")
    loss = utility_value if kind in ("distance", "fpr") else 1.0 - utility_value
    if loss <= 0:
        return INFINITE_EFFICIENCY
    return math.sqrt(ore_value) / loss


@dataclass(frozen=True)
class RatioCI:
    ratio: float
    lower: float
    upper: float
    excluded_icsa: int = 0
    excluded_sa: int = 0


def rpe_ratio_ci(icsa, sa, B: int = 2000, rng: np.random.Generator | None = None, level: float = 0.95) -> RatioCI:
    """Ratio of mean RPEs with a percentile bootstrap interval.

    Infinite RPEs are dropped and counted. The two samples are resampled
    independently of each other.
    """
    icsa = np.asarray(icsa, dtype=float)
    sa = np.asarray(sa, dtype=float)
    a, b = icsa[np.isfinite(icsa)], sa[np.isfinite(sa)]
    if a.size == 0 or b.size == 0:
        raise UndefinedRatio("no finite RPE values to compare")
    if b.mean() == 0:
        raise UndefinedRatio("mean SA efficiency is zero")
    rng = rng if rng is not None else np.random.default_rng(0)
    boot_a = a[rng.integers(0, a.size, (B, a.size))].mean(axis=1)
    boot_b = b[rng.integers(0, b.size, (B, b.size))].mean(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = boot_a / boot_b
    tail = 100 * (1 - level) / 2
    lo, hi = np.percentile(ratios, [tail, 100 - tail])
    return RatioCI(float(a.mean() / b.mean()), float(lo), float(hi), icsa.size - a.size, sa.size - b.size)


def median_difference_ci(a, b, B: int = 2000, rng: np.random.Generator | None = None, level: float = 0.95):
    """``median(a) - median(b)`` with a two-sided percentile bootstrap interval.

    Use ``level=0.90`` and read ``lower`` for a one-sided 5% test that the
    difference is positive.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    rng = rng if rng is not None else np.random.default_rng(0)
    ma = np.median(a[rng.integers(0, a.size, (B, a.size))], axis=1)
    mb = np.median(b[rng.integers(0, b.size, (B, b.size))], axis=1)
    tail = 100 * (1 - level) / 2
    lo, hi = np.percentile(ma - mb, [tail, 100 - tail])
    return float(np.median(a) - np.median(b)), float(lo), float(hi)
