"""Numerical checks of the spectral-anonymization breakdown result.

SA reproduces a single far outlier almost exactly: for inliers within norm M
and an outlier of norm H > (n + 2) M, every spectral anonymization places some
row within normalized squared distance

    2 (p - 1) M ((n - 4) M + 4 H) / H^2

of the outlier. The helpers here evaluate that bound, sample and enumerate
anonymizations against it, and verify the two supporting lemmas with
brute-force oracles.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .anonymize import SA, permute_columns
from .errors import ConditionNotMet, ValidationError
from .ics import back_transform, fit_ics
from .linalg import rng_stream, sym_eigen


@dataclass
class OutlierConstruction:
    inliers: np.ndarray
    direction: np.ndarray
    M: float
    H: float

    def __post_init__(self):
        norms = np.linalg.norm(self.inliers, axis=1)
        if np.any(norms > self.M * (1 + 1e-12)):
            raise ValidationError("an inlier exceeds the norm bound M")
        if not math.isclose(np.linalg.norm(self.direction), 1.0, rel_tol=1e-12):
            raise ValidationError("outlier direction must be a unit vector")

    @property
    def n(self) -> int:
        return self.inliers.shape[0]

    @property
    def p(self) -> int:
        return self.inliers.shape[1]

    @property
    def outlier(self) -> np.ndarray:
        return self.H * self.direction

    @property
    def data(self) -> np.ndarray:
        return np.vstack([self.inliers, self.outlier])


def make_construction(n: int, p: int, M: float, H: float, rng: np.random.Generator) -> OutlierConstruction:
    """Inliers uniform in the radius-M ball, outlier at ``H e_1``."""
    G = rng.standard_normal((n, p))
    G /= np.linalg.norm(G, axis=1, keepdims=True)
    radii = M * rng.random(n) ** (1.0 / p)
    e1 = np.zeros(p)
    e1[0] = 1.0
    return OutlierConstruction(G * radii[:, None], e1, float(M), float(H))


def theorem_bound(n: int, p: int, M: float, H: float) -> float:
    """Upper bound on the normalized min-distance over all SA outputs."""
    if not H > (n + 2) * M:
        raise ConditionNotMet(f"bound requires H > (n + 2) M, got H={H}, n={n}, M={M}")
    return 2 * (p - 1) * M * ((n - 4) * M + 4 * H) / H**2


def min_ratio(outlier, anonymized) -> float:
    d2 = ((anonymized - outlier) ** 2).sum(axis=1)
    return float(d2.min() / (outlier @ outlier))


@dataclass
class BoundReport:
    empirical_max: float
    bound: float
    trials: int
    passed: bool
    ratios: np.ndarray


def sa_min_ratio(construction: OutlierConstruction, trials: int, rng: np.random.Generator) -> BoundReport:
    """Largest normalized outlier-to-nearest-row distance over ``trials`` SA draws."""
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    X = construction.data
    x_out = construction.outlier
    model, Z = fit_ics(X, *SA)
    ratios = np.empty(trials)
    for t in range(trials):
        ratios[t] = min_ratio(x_out, back_transform(permute_columns(Z, rng), model))
    bound = theorem_bound(construction.n, construction.p, construction.M, construction.H)
    worst = float(ratios.max())
    return BoundReport(worst, bound, trials, worst <= bound, ratios)


def sa_svd(X, permutations) -> np.ndarray:
    """SA written through the SVD ``Xc = U D V'``: permute the columns of U.

    ``permutations[j]`` reorders column j. Gives the same output as permuting
    the principal component scores with the same permutations.
    """
    X = np.asarray(X, dtype=float)
    mean = X.mean(axis=0)
    U, d, Vt = np.linalg.svd(X - mean, full_matrices=False)
    U_star = np.column_stack([U[perm, j] for j, perm in enumerate(permutations)])
    return U_star @ np.diag(d) @ Vt + mean


def sa_exhaustive_max(X, outlier_index: int = -1, full: bool = False) -> float:
    """Exact maximum of the normalized min-distance over every SA output.

    Only feasible for p <= 2 and a handful of rows. A joint row relabelling
    leaves the min-distance unchanged, so with ``full=False`` the first
    component's permutation is fixed to the identity and only the relative
    permutation of the second is enumerated. ``full=True`` walks all pairs.
    """
    X = np.asarray(X, dtype=float)
    m, p = X.shape
    if p > 2:
        raise ValidationError("exhaustive enumeration supports p <= 2 only")
    if m > 8:
        raise ValidationError("exhaustive enumeration supports at most 8 rows")
    x_out = X[outlier_index]
    norm2 = x_out @ x_out
    _, Z = fit_ics(X, *SA)
    if p == 1:
        return 0.0
    z_out = Z[outlier_index]
    A = (Z[:, 0] - z_out[0]) ** 2
    B = (Z[:, 1] - z_out[1]) ** 2
    perms = np.array(list(itertools.permutations(range(m))))
    if not full:
        return float((A[None, :] + B[perms]).min(axis=1).max() / norm2)
    best = 0.0
    for first in perms:
        best = max(best, float((A[first][None, :] + B[perms]).min(axis=1).max()))
    return best / norm2


# --------------------------------------------------------------------------
# Lemma 1: extremes of the sample variance with one point pinned at H


def sample_variance(x, H: float) -> np.ndarray:
    """Divisor-(n + 1) variance of ``(x_1, ..., x_n, H)`` along the last axis."""
    x = np.asarray(x, dtype=float)
    full = np.concatenate([x, np.full(x.shape[:-1] + (1,), H)], axis=-1)
    return full.var(axis=-1)


def lemma1_extremes(n: int, M: float, H: float) -> tuple[float, float, float]:
    """``(max variance, generic upper bound, min variance)`` in closed form.

    The maximum formula holds only when H > n M.
    """
    max_var = n * (H + M) ** 2 / (n + 1) ** 2
    upper = (n * M**2 + H**2) / (n + 1)
    min_var = n * (H - M) ** 2 / (n + 1) ** 2
    return max_var, upper, min_var


def lemma1_oracle(n: int, M: float, H: float, grid_points: int = 21) -> tuple[float, float]:
    """Brute-force ``(max, min)`` variance over a grid on ``[-M, M]^n`` plus all vertices."""
    if n > 4:
        raise ValidationError("oracle limited to n <= 4")
    if grid_points < 21:
        raise ValidationError("grid_points must be >= 21")
    axis = np.linspace(-M, M, grid_points)
    grid = np.array(list(itertools.product(axis, repeat=n)))
    vertices = np.array(list(itertools.product((-M, M), repeat=n)))
    v_grid = sample_variance(grid, H)
    v_vert = sample_variance(vertices, H)
    return float(max(v_grid.max(), v_vert.max())), float(v_grid.min())


# --------------------------------------------------------------------------
# Lemma 2: the leading principal axis follows the outlier


def leading_pc_cosine(X, outlier_index: int = -1) -> float:
    """|cos| between the outlier and the first principal axis (mean-centered)."""
    X = np.asarray(X, dtype=float)
    Xc = X - X.mean(axis=0)
    u = sym_eigen(Xc.T @ Xc / X.shape[0]).vectors[:, 0]
    x = X[outlier_index]
    return float(abs(x @ u) / np.linalg.norm(x))


def lemma2_check(construction: OutlierConstruction) -> bool:
    n, M, H = construction.n, construction.M, construction.H
    if not H > (n + 2) * M:
        raise ConditionNotMet(f"lemma requires H > (n + 2) M, got H={H}, n={n}, M={M}")
    return leading_pc_cosine(construction.data) >= 1 - 2 * M / H


def check_theorem(n: int, p: int, M: float, Hs, trials: int, seed: int) -> list[dict]:
    """One row per H: sampled worst case over ``trials`` SA draws against the bound.

    The same inlier cloud is reused for every H so the rows are comparable.
    """
    base = make_construction(n, p, M, Hs[0], rng_stream(seed, 0))
    rows = []
    for k, H in enumerate(Hs):
        c = OutlierConstruction(base.inliers, base.direction, M, float(H))
        rep = sa_min_ratio(c, trials, rng_stream(seed, k + 1))
        rows.append(dict(H=float(H), empirical_max=rep.empirical_max, bound=rep.bound, passed=rep.passed))
    return rows


__all__ = [
    "BoundReport",
    "OutlierConstruction",
    "check_theorem",
    "lemma1_extremes",
    "lemma1_oracle",
    "lemma2_check",
    "leading_pc_cosine",
    "make_construction",
    "min_ratio",
    "sa_exhaustive_max",
    "sa_min_ratio",
    "sa_svd",
    "sample_variance",
    "theorem_bound",
]
