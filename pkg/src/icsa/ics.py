"""Invariant coordinate selection: whiten by one scatter, rotate by another."""

from dataclasses import dataclass

import numpy as np

from .errors import NotConverged, ShapeError, SingularScatter
from .linalg import sym_eigen, sym_pow
from .scatter import ScatterSpec, _as_data, estimate


@dataclass(frozen=True)
class IcsModel:
    """Fitted transform ``Z = (X - location) @ whiten @ rotation``.

    ``whiten`` satisfies ``whiten' S1 whiten = I`` and ``unwhiten`` is its
    inverse. Both equal symmetric roots of S1 unless the fit standardized
    the columns first.
    """

    location: np.ndarray
    whiten: np.ndarray
    unwhiten: np.ndarray
    rotation: np.ndarray
    eigenvalues: np.ndarray
    spec1: ScatterSpec
    spec2: ScatterSpec

    @property
    def p(self) -> int:
        return self.location.shape[0]

    def transform(self, X) -> np.ndarray:
        """Latent ICS components of ``X`` under this fitted model."""
        X = _as_data(X)
        if X.shape[1] != self.p:
            raise ShapeError(f"expected {self.p} columns, got {X.shape[1]}")
        return (X - self.location) @ self.whiten @ self.rotation


def _staged(stage, fn, *args):
    try:
        return fn(*args)
    except SingularScatter as exc:
        raise SingularScatter(str(exc), eigenvalue=exc.eigenvalue, stage=stage) from exc
    except NotConverged as exc:
        raise NotConverged(str(exc), last=exc.last, stage=stage) from exc


def _needs_raw_units(spec: ScatterSpec) -> bool:
    # these first scatters are not affine equivariant, so rescaling the
    # columns would change the result
    return spec.kind == "identity" or (spec.kind == "tyler" and spec.location in (None, "spatial-median"))


def _check_rank(S):
    # rank does not depend on column scale, so test the correlation form:
    # raw-unit covariances (SA) can span 1e11 without being degenerate
    d = np.sqrt(np.diag(S))
    sym_pow(S / np.outer(d, d) if np.all(d > 0) else S, -0.5)


def fit_ics(X, spec1: ScatterSpec, spec2: ScatterSpec, rng: np.random.Generator | None = None):
    """Fit the ICS transform and return ``(model, scores)``.

    The location comes from ``spec1``'s estimator. The second scatter is
    computed on the standardized data, about the location that ``spec2``'s own
    estimator finds there.

    When the first scatter is affine equivariant the fit runs on columns
    divided by their standard deviations. The scores are unchanged in exact
    arithmetic, but mixed units (areas next to ratios, say) no longer make a
    well-posed scatter look singular.
    """
    X = _as_data(X)
    if rng is None:
        rng = np.random.default_rng(0)
    rng1, rng2 = rng.spawn(2)
    scale = np.ones(X.shape[1])
    if not _needs_raw_units(spec1):
        sd = X.std(axis=0)
        scale = np.where(sd > 0, sd, 1.0)
    Xs = X / scale
    first = _staged("S1", estimate, Xs, spec1, rng1)
    inv_root = _staged("S1", sym_pow, first.scatter, -0.5)
    root = _staged("S1", sym_pow, first.scatter, 0.5)
    X_st = (Xs - first.location) @ inv_root
    second = _staged("S2", estimate, X_st, spec2, rng2)
    _staged("S2", _check_rank, second.scatter)
    values, V = sym_eigen(second.scatter)
    model = IcsModel(first.location * scale, inv_root / scale[:, None], root * scale, V, values, spec1, spec2)
    return model, X_st @ V


def back_transform(scores, model: IcsModel) -> np.ndarray:
    """Map latent scores back to the data scale: ``Z V' unwhiten + 1 T'``."""
    Z = np.asarray(scores, dtype=float)
    if Z.ndim != 2 or Z.shape[1] != model.p:
        raise ShapeError(f"scores must have {model.p} columns, got shape {Z.shape}")
    return Z @ model.rotation.T @ model.unwhiten + model.location
