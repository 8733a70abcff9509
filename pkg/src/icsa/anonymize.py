"""Spectral anonymization (SA) and its ICS generalization (ICSA)."""

from dataclasses import dataclass, field

import numpy as np

from .data import DataMatrix
from .errors import InvalidColumnKind, ValidationError
from .ics import IcsModel, back_transform, fit_ics
from .scatter import ScatterSpec

SA = (ScatterSpec("identity"), ScatterSpec("mean-cov"))

# The eight scatter pairings (S1, S2); the location always comes from S1.
PAIRINGS = {
    "i-i": (ScatterSpec("mean-cov"), ScatterSpec("cov4")),
    "ii-i": (ScatterSpec("hr"), ScatterSpec("mean-cov")),
    "ii-ii": (ScatterSpec("hr"), ScatterSpec("tyler")),
    "iii75-i": (ScatterSpec("mcd", alpha=0.75), ScatterSpec("mean-cov")),
    "iii50-i": (ScatterSpec("mcd", alpha=0.5), ScatterSpec("mean-cov")),
    "iii75-ii": (ScatterSpec("mcd", alpha=0.75), ScatterSpec("hr")),
    "iii50-ii": (ScatterSpec("mcd", alpha=0.5), ScatterSpec("hr")),
    "iii-iii": (ScatterSpec("mcd", alpha=0.5), ScatterSpec("mcd", alpha=0.75)),
}
METHODS = {"sa": SA, **PAIRINGS}


def method_specs(name: str) -> tuple[ScatterSpec, ScatterSpec]:
    try:
        return METHODS[name]
    except KeyError:
        raise ValidationError(f"unknown method {name!r}; choose from {', '.join(METHODS)}") from None


@dataclass(frozen=True)
class AnonymizationRequest:
    spec1: ScatterSpec
    spec2: ScatterSpec
    binary: tuple[int, ...] = field(default=())

    @classmethod
    def named(cls, name: str, binary=()) -> "AnonymizationRequest":
        s1, s2 = method_specs(name)
        return cls(s1, s2, tuple(binary))


def fisher_yates(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform permutation of ``range(n)``.

    Draws ``j_i ~ U{0..i}`` for ``i = n-1, ..., 1`` in one call, then swaps
    positions ``i`` and ``j_i`` in that order.
    """
    perm = np.arange(n)
    if n < 2:
        return perm
    draws = rng.integers(0, np.arange(n, 1, -1))
    for i, j in zip(range(n - 1, 0, -1), draws):
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def permute_columns(Z, rng: np.random.Generator) -> np.ndarray:
    """Shuffle every column independently (column 0 first)."""
    Z = np.asarray(Z, dtype=float)
    n, p = Z.shape
    out = np.empty_like(Z)
    for j in range(p):
        out[:, j] = Z[fisher_yates(n, rng), j]
    return out


def rediscretize_binary(values, original) -> np.ndarray:
    """Top-k rule: the k largest anonymized values become 1.

    k is the number of ones in ``original``. Ties go to the lower row index.
    """
    original = np.asarray(original)
    if not np.all(np.isin(original, (0, 1))):
        raise InvalidColumnKind("original column is not binary")
    values = np.asarray(values, dtype=float)
    k = int(original.sum())
    out = np.zeros(values.shape[0])
    out[np.argsort(-values, kind="stable")[:k]] = 1.0
    return out


def anonymize(
    X,
    request: AnonymizationRequest,
    rng: np.random.Generator,
    model: IcsModel | None = None,
    permute=permute_columns,
) -> np.ndarray:
    """Anonymize the rows of ``X`` by permuting its ICS components.

    Pass a previously fitted ``model`` to reuse it across draws; otherwise the
    transform is fitted here. ``permute`` is the latent shuffling step and
    exists so tests can force particular permutations.
    """
    if isinstance(X, DataMatrix):
        return anonymize_table(X, request, rng, model=model)
    X = np.asarray(X, dtype=float)
    if model is None:
        model, Z = fit_ics(X, request.spec1, request.spec2, rng.spawn(1)[0])
    else:
        Z = model.transform(X)
    X_star = back_transform(permute(Z, rng), model)
    for j in request.binary:
        X_star[:, j] = rediscretize_binary(X_star[:, j], X[:, j])
    return X_star


def anonymize_table(
    data: DataMatrix, request: AnonymizationRequest, rng: np.random.Generator, model=None
) -> DataMatrix:
    """Like :func:`anonymize` but keeps names and kinds; binary columns come from ``data``."""
    binary = tuple(sorted(set(request.binary) | set(data.binary_columns)))
    for j in binary:
        if not 0 <= j < data.p:
            raise ValidationError(f"binary column index {j} out of range")
    req = AnonymizationRequest(request.spec1, request.spec2, binary)
    values = anonymize(data.values, req, rng, model=model)
    return DataMatrix(values, data.columns, data.kinds)
