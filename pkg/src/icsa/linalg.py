"""Dense symmetric linear algebra and random-stream helpers."""

from typing import NamedTuple

import numpy as np

from .errors import InvalidDimension, InvalidMatrix, SingularScatter

RANK_TOL = 1e-10


class EigenPair(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


def rng_stream(seed: int, stream: int | tuple = 0) -> np.random.Generator:
    """Independent, reproducible generator for a ``(seed, stream)`` pair.

    ``stream`` may be a tuple of non-negative integers, which is handy for
    keying streams by experiment coordinates.
    """
    key = tuple(stream) if isinstance(stream, tuple) else (stream,)
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))


def _check_symmetric(S):
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise InvalidMatrix("matrix has non-finite entries")
    scale = max(np.abs(S).max(), 1.0)
    if np.abs(S - S.T).max() > 1e-12 * scale:
        raise InvalidMatrix("matrix is not symmetric")
    return (S + S.T) / 2


def sym_eigen(S) -> EigenPair:
    """Eigendecomposition of a symmetric matrix.

    Eigenvalues are returned in descending order. Each eigenvector is
    sign-fixed so that its entry of largest absolute value is nonnegative,
    which makes the output a deterministic function of ``S``.
    """
    S = _check_symmetric(S)
    values, vectors = np.linalg.eigh(S)
    lead = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[lead, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    vectors = vectors * signs
    # descending values; exact ties ordered by the first coordinate
    order = np.lexsort((-vectors[0], -values))
    return EigenPair(values[order], vectors[:, order])


def sym_pow(S, exponent: float) -> np.ndarray:
    """Symmetric power of an SPD matrix for exponent in {-1, -1/2, 1/2}."""
    if exponent not in (-1.0, -0.5, 0.5):
        raise ValueError(f"unsupported exponent {exponent}")
    values, vectors = sym_eigen(S)
    largest = values[0]
    smallest = values[-1]
    if largest <= 0 or smallest <= RANK_TOL * largest:
        raise SingularScatter(
            f"scatter is not positive definite: smallest eigenvalue {smallest:.3e} "
            f"vs largest {largest:.3e}",
            eigenvalue=smallest,
        )
    out = (vectors * values**exponent) @ vectors.T
    return (out + out.T) / 2


def random_orthogonal(p: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR of a Gaussian, sign-fixed R)."""
    if p < 1:
        raise InvalidDimension(f"dimension must be >= 1, got {p}")
    G = rng.standard_normal((p, p))
    Q, R = np.linalg.qr(G)
    d = np.sign(np.diag(R))
    d[d == 0] = 1.0
    return Q * d
