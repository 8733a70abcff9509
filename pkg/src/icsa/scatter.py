"""Affine-equivariant location and scatter estimators.

Estimators are grouped by how many outliers they tolerate:

* class I   -- covariance (``mean-cov``) and fourth-moment covariance (``cov4``)
* class II  -- Tyler's shape matrix and the Hettmansperger-Randles estimator
* class III -- minimum covariance determinant (FastMCD)

``identity`` is the data-independent choice that turns ICS into PCA.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import (
    DegenerateRow,
    InsufficientSubsetSize,
    NotConverged,
    SingularScatter,
    TooFewRows,
    ValidationError,
)
from .linalg import RANK_TOL, sym_eigen, sym_pow

KINDS = ("mean-cov", "cov4", "tyler", "hr", "mcd", "identity")
CLASS_OF = {
    "mean-cov": "I",
    "cov4": "I",
    "tyler": "II",
    "hr": "II",
    "mcd": "III",
    "identity": "Fixed",
}
TYLER_LOCATIONS = ("spatial-median", "hr", "mean")


@dataclass(frozen=True)
class ScatterSpec:
    """Which estimator to run and how.

    ``alpha`` is the MCD coverage fraction and must be omitted for every other
    kind. ``location`` only applies to Tyler's shape matrix, which does not
    estimate a location of its own.
    """

    kind: str
    alpha: float | None = None
    max_iter: int = 200
    tol: float = 1e-6
    location: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown scatter kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "mcd":
            if self.alpha is None or not 0.5 <= self.alpha <= 1.0:
                raise ValidationError(f"MCD needs alpha in [0.5, 1], got {self.alpha}")
        elif self.alpha is not None:
            raise ValidationError(f"alpha only applies to MCD, not {self.kind}")
        if self.location is not None:
            if self.kind != "tyler":
                raise ValidationError("location option only applies to Tyler")
            if self.location not in TYLER_LOCATIONS:
                raise ValidationError(f"unknown Tyler location {self.location!r}")
        if not self.tol > 0:
            raise ValidationError("tol must be positive")
        if self.max_iter < 1:
            raise ValidationError("max_iter must be positive")

    @property
    def label(self) -> str:
        if self.kind == "mcd":
            return f"mcd{round(100 * self.alpha)}"
        if self.kind == "tyler" and self.location not in (None, "spatial-median"):
            return f"tyler@{self.location}"
        return self.kind


@dataclass
class ScatterEstimate:
    location: np.ndarray
    scatter: np.ndarray
    cls: str
    converged: bool = True
    iterations: int = 0
    support: np.ndarray | None = field(default=None, repr=False)


def _as_data(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValidationError(f"data must be 2-D, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValidationError("data contain non-finite values")
    return X


def mean_cov(X) -> ScatterEstimate:
    """Sample mean and covariance (divisor n - 1)."""
    X = _as_data(X)
    n = X.shape[0]
    if n < 2:
        raise TooFewRows(f"need at least 2 rows, got {n}")
    T = X.mean(axis=0)
    Xc = X - T
    return ScatterEstimate(T, Xc.T @ Xc / (n - 1), "I")


def cov4(X) -> ScatterEstimate:
    """Covariance matrix of fourth moments.

    ``(1 / (n (p + 2))) * sum_i r_i^2 (x_i - xbar)(x_i - xbar)'`` where ``r_i``
    is the Mahalanobis distance under the divisor-n covariance. Consistent
    for the covariance at the normal model.
    """
    X = _as_data(X)
    n, p = X.shape
    if n < p + 2:
        raise TooFewRows(f"cov4 needs n >= p + 2, got n={n}, p={p}")
    T = X.mean(axis=0)
    Xc = X - T
    S = Xc.T @ Xc / n
    Sinv = sym_pow(S, -1.0)
    r2 = np.einsum("ij,jk,ik->i", Xc, Sinv, Xc)
    C = (Xc * r2[:, None]).T @ Xc / (n * (p + 2))
    return ScatterEstimate(T, (C + C.T) / 2, "I")


def spatial_median(X, tol: float = 1e-9, max_iter: int = 2000) -> np.ndarray:
    """Weiszfeld iteration with the Vardi-Zhang safeguard for data-point iterates.

    Stops once the norm of the (sub)gradient of ``sum_i ||x_i - m||`` drops to
    ``tol``. Raises :class:`NotConverged` with the last iterate otherwise.
    """
    X = _as_data(X)
    n = X.shape[0]
    if n < 1:
        raise TooFewRows("spatial median of an empty sample")
    if n == 1:
        return X[0].copy()
    m = X.mean(axis=0)
    grad = np.inf
    for _ in range(max_iter):
        diff = X - m
        d = np.linalg.norm(diff, axis=1)
        scale = max(d.max(), 1e-300)
        at = d <= 1e-14 * scale
        w = 1.0 / d[~at]
        R = (diff[~at] * w[:, None]).sum(axis=0)
        eta = int(at.sum())
        rnorm = np.linalg.norm(R)
        grad = max(rnorm - eta, 0.0)
        if grad <= tol:
            return m
        T = (X[~at] * w[:, None]).sum(axis=0) / w.sum()
        if eta == 0:
            m = T
        else:
            gamma = min(1.0, eta / rnorm)
            m = (1 - gamma) * T + gamma * m
    raise NotConverged(
        f"spatial median did not converge in {max_iter} iterations (gradient {grad:.2e})",
        last=m,
    )


def _tyler_map(S: np.ndarray, V: np.ndarray) -> np.ndarray:
    n, p = S.shape
    d = np.einsum("ij,jk,ik->i", S, np.linalg.inv(V), S)
    W = (S / d[:, None]).T @ S * (p / n)
    return (W + W.T) / 2


def tyler_residual(X, est: ScatterEstimate) -> float:
    """Relative fixed-point residual ``||RHS(V) - V||_F / ||V||_F``."""
    S = _as_data(X) - est.location
    V = est.scatter
    return float(np.linalg.norm(_tyler_map(S, V) - V) / np.linalg.norm(V))


def tyler_shape(X, location, spec: ScatterSpec | None = None) -> ScatterEstimate:
    """Tyler's shape matrix about a fixed location, normalized to trace p."""
    spec = spec or ScatterSpec("tyler")
    X = _as_data(X)
    n, p = X.shape
    if n <= p:
        raise TooFewRows(f"Tyler's shape needs n > p, got n={n}, p={p}")
    location = np.asarray(location, dtype=float)
    S = X - location
    norms = np.linalg.norm(S, axis=1)
    if np.any(norms <= 1e-12 * max(norms.max(), 1e-300)):
        raise DegenerateRow("a data row coincides with the location")
    V = np.eye(p)
    for it in range(1, spec.max_iter + 1):
        # stop on the fixed-point residual of the iterate that is returned
        V_new = _tyler_map(S, V)
        if np.linalg.norm(V_new - V) / np.linalg.norm(V) <= spec.tol:
            return ScatterEstimate(location, V, "II", True, it)
        V = V_new * (p / np.trace(V_new))
    raise NotConverged(
        f"Tyler's shape did not converge in {spec.max_iter} iterations",
        last=ScatterEstimate(location, V, "II", False, spec.max_iter),
    )


def _hr_step(X, T, V):
    p = X.shape[1]
    values, vectors = sym_eigen(V)
    if values[-1] <= RANK_TOL * values[0]:
        raise SingularScatter("H-R shape became singular", eigenvalue=values[-1])
    root = (vectors * np.sqrt(values)) @ vectors.T
    inv_root = (vectors / np.sqrt(values)) @ vectors.T
    E = (X - T) @ inv_root
    r = np.linalg.norm(E, axis=1)
    if np.any(r <= 1e-12 * max(r.max(), 1e-300)):
        raise DegenerateRow("a data row coincides with the H-R location")
    w = 1.0 / r
    step = (E * w[:, None]).sum(axis=0) / w.sum()
    T_new = T + root @ step
    U = E / r[:, None]
    V_new = p * root @ (U.T @ U / X.shape[0]) @ root
    V_new = (V_new + V_new.T) / 2
    V_new *= p / np.trace(V_new)
    return T_new, V_new, inv_root


def hr_residual(X, est: ScatterEstimate) -> tuple[float, float]:
    """Fixed-point residuals (location, shape) of an H-R estimate."""
    X = _as_data(X)
    T_new, V_new, inv_root = _hr_step(X, est.location, est.scatter)
    loc = np.linalg.norm(inv_root @ (T_new - est.location))
    shape = np.linalg.norm(V_new - est.scatter) / np.linalg.norm(est.scatter)
    return float(loc), float(shape)


def hr_estimate(X, spec: ScatterSpec | None = None) -> ScatterEstimate:
    """Hettmansperger-Randles simultaneous location and Tyler-type shape.

    Starts from the spatial median and the identity. Each sweep whitens the
    data with the current shape, takes a weighted spatial-median step for the
    location and a Tyler step for the shape. The location change is measured
    in the whitened metric, so the stopping rule is affine invariant.
    """
    spec = spec or ScatterSpec("hr")
    X = _as_data(X)
    n, p = X.shape
    if n <= p:
        raise TooFewRows(f"H-R needs n > p, got n={n}, p={p}")
    try:
        T = spatial_median(X)
    except NotConverged as exc:
        T = exc.last
    V = np.eye(p)
    for it in range(1, spec.max_iter + 1):
        T_new, V_new, inv_root = _hr_step(X, T, V)
        loc_change = np.linalg.norm(inv_root @ (T_new - T))
        shape_change = np.linalg.norm(V_new - V) / np.linalg.norm(V)
        if loc_change <= spec.tol and shape_change <= spec.tol:
            return ScatterEstimate(T, V, "II", True, it)
        T, V = T_new, V_new
    raise NotConverged(
        f"H-R estimator did not converge in {spec.max_iter} iterations",
        last=ScatterEstimate(T, V, "II", False, spec.max_iter),
    )


def mcd_consistency_factor(alpha: float, p: int) -> float:
    """Factor making the raw MCD scatter consistent at the normal model."""
    if alpha >= 1.0:
        return 1.0
    q = stats.chi2.ppf(alpha, p)
    return alpha / stats.chi2.cdf(q, p + 2)


def mcd_subset_size(n: int, alpha: float) -> int:
    return min(n, math.ceil(alpha * n - 1e-9))


def _subset_moments(X, subsets):
    Xs = X[subsets]
    mu = Xs.mean(axis=1)
    C = Xs - mu[:, None, :]
    cov = np.einsum("kip,kiq->kpq", C, C) / subsets.shape[1]
    return mu, cov


def _logdets(cov):
    sign, logdet = np.linalg.slogdet(cov)
    # relative rank check against the trace keeps the test scale free
    scale = np.trace(cov, axis1=1, axis2=2) / cov.shape[1]
    p = cov.shape[1]
    bad = (sign <= 0) | (logdet <= p * np.log(np.maximum(scale, 1e-300)) + p * np.log(RANK_TOL))
    logdet = np.where(bad, -np.inf, logdet)
    return logdet


def _concentrate(X, mu, cov, h, elemental=None):
    diff = X[None, :, :] - mu[:, None, :]
    sol = np.linalg.solve(cov, np.swapaxes(diff, 1, 2))
    d2 = np.einsum("knp,kpn->kn", diff, sol)
    if elemental is not None:
        # members of a (p + 1)-point start all sit at distance exactly p; pin the
        # tie so rounding cannot break it differently for transformed data
        rows, members = elemental
        d2[rows[:, None], members] = X.shape[1]
    return np.sort(np.argsort(d2, axis=1, kind="stable")[:, :h], axis=1)


def _initial_subsets(X, h, rng, n_starts):
    n, p = X.shape
    if math.comb(n, p + 1) <= n_starts:
        starts = np.array(list(itertools.combinations(range(n), p + 1)))
    else:
        starts = np.argsort(rng.random((n_starts, n)), axis=1)[:, : p + 1]
    mu, cov = _subset_moments(X, starts)
    singular = np.flatnonzero(~np.isfinite(_logdets(cov)))
    elemental = np.setdiff1d(np.arange(len(starts)), singular)
    for k in singular:
        # grow a singular elemental start with random extra points
        order = np.concatenate([starts[k], rng.permutation(np.setdiff1d(np.arange(n), starts[k]))])
        for size in range(p + 2, n + 1):
            m, c = _subset_moments(X, order[None, :size])
            if np.isfinite(_logdets(c)[0]):
                mu[k], cov[k] = m[0], c[0]
                break
    ok = np.isfinite(_logdets(cov))
    if not ok.any():
        raise SingularScatter("every MCD starting subset is singular")
    keep = np.flatnonzero(ok)
    pinned = np.flatnonzero(np.isin(keep, elemental))
    return _concentrate(X, mu[keep], cov[keep], h, (pinned, starts[keep[pinned]]))


def _pick_best(subsets, logdets):
    best = None
    for sub, ld in zip(subsets, logdets):
        if not np.isfinite(ld):
            continue
        key = tuple(sub)
        if best is None or ld < best[1] - 1e-10 or (abs(ld - best[1]) <= 1e-10 and key < best[0]):
            best = (key, ld)
    return best


def mcd(
    X,
    alpha: float,
    rng: np.random.Generator,
    n_starts: int = 500,
    n_best: int = 10,
    initial_csteps: int = 2,
    max_csteps: int = 200,
) -> ScatterEstimate:
    """Raw FastMCD location and scatter.

    Elemental (p + 1)-subsets seed the search; all of them are used when there
    are at most ``n_starts``, otherwise ``n_starts`` are drawn from ``rng``.
    Every start gets ``initial_csteps`` concentration steps, the ``n_best``
    lowest-determinant subsets are iterated to convergence and the best is
    kept. Equal determinants resolve to the lexicographically smallest subset.
    The subset covariance (divisor h) is multiplied by the chi-square
    consistency factor for ``alpha``.
    """
    X = _as_data(X)
    n, p = X.shape
    h = mcd_subset_size(n, alpha)
    if h <= p or n <= p:
        raise InsufficientSubsetSize(f"MCD needs h = ceil(alpha n) > p, got h={h}, p={p}")
    if h == n:
        subset = np.arange(n)
    else:
        subsets = _initial_subsets(X, h, rng, n_starts)
        for _ in range(initial_csteps - 1):
            mu, cov = _subset_moments(X, subsets)
            ld = _logdets(cov)
            ok = np.isfinite(ld)
            if not ok.any():
                break
            subsets = subsets[ok]
            subsets = _concentrate(X, mu[ok], cov[ok], h)
        subsets = np.unique(subsets, axis=0)
        _, cov = _subset_moments(X, subsets)
        ld = _logdets(cov)
        order = np.lexsort((np.arange(len(ld)), ld))
        subsets = subsets[order[: min(n_best, len(order))]]
        for _ in range(max_csteps):
            mu, cov = _subset_moments(X, subsets)
            ld = _logdets(cov)
            ok = np.isfinite(ld)
            if not ok.all():
                # exact-fit subsets cannot be concentrated further
                subsets = subsets[ok]
                if not len(subsets):
                    break
                mu, cov = mu[ok], cov[ok]
            new = _concentrate(X, mu, cov, h)
            if np.array_equal(new, subsets):
                break
            subsets = new
        if not len(subsets):
            raise SingularScatter("all candidate MCD subsets are singular")
        _, cov = _subset_moments(X, subsets)
        best = _pick_best(subsets, _logdets(cov))
        if best is None:
            raise SingularScatter("all candidate MCD subsets are singular")
        subset = np.array(best[0])
    mu, cov = _subset_moments(X, subset[None, :])
    scatter = cov[0] * mcd_consistency_factor(alpha, p)
    return ScatterEstimate(mu[0], (scatter + scatter.T) / 2, "III", True, 0, support=subset)


def estimate(X, spec: ScatterSpec, rng: np.random.Generator | None = None) -> ScatterEstimate:
    """Run the estimator described by ``spec``."""
    X = _as_data(X)
    if spec.kind == "identity":
        if X.shape[0] < 1:
            raise TooFewRows("empty data")
        return ScatterEstimate(X.mean(axis=0), np.eye(X.shape[1]), "Fixed")
    if spec.kind == "mean-cov":
        return mean_cov(X)
    if spec.kind == "cov4":
        return cov4(X)
    if spec.kind == "hr":
        return hr_estimate(X, spec)
    if spec.kind == "tyler":
        where = spec.location or "spatial-median"
        if where == "hr":
            T = hr_estimate(X, ScatterSpec("hr", max_iter=spec.max_iter, tol=spec.tol)).location
        elif where == "mean":
            T = X.mean(axis=0)
        else:
            try:
                T = spatial_median(X)
            except NotConverged as exc:
                T = exc.last
        return tyler_shape(X, T, spec)
    if rng is None:
        raise ValidationError("MCD needs a random generator")
    return mcd(X, spec.alpha, rng)
