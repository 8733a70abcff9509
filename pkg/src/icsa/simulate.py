"""Contaminated regression scenarios and the replication grid."""

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .anonymize import METHODS, AnonymizationRequest, anonymize, permute_columns
from .errors import IcsaError, InvalidDimension, TooFewRows
from .linalg import random_orthogonal, rng_stream
from .metrics import ols, ore, utility_distance

GRID_N = (20, 40, 120, 240, 480)
GRID_P = (3, 7, 15, 31)  # features; the anonymized data have p + 1 columns
GRID_KAPPA = (0, 2, 4, 8, 16)
DESK_GRID = {"n": (40, 120), "p": (3, 7), "kappa": (0, 8, 16)}
DELTA_SD = 0.4
OUTLIER_FRACTION = 0.1
CSV_COLUMNS = ("scenario", "n", "p", "kappa", "method", "metric", "median", "q1", "q3", "failures")


@dataclass
class ScenarioInstance:
    X: np.ndarray
    y: np.ndarray
    y_tilde: np.ndarray
    outliers: np.ndarray
    beta: np.ndarray
    sigma: np.ndarray
    kappa: float
    rotation: np.ndarray | None = None
    eigenvalues: np.ndarray | None = None

    @property
    def data(self) -> np.ndarray:
        """Features and contaminated response stacked into one matrix."""
        return np.column_stack([self.X, self.y_tilde])


def true_beta(p: int) -> np.ndarray:
    j = np.arange(1, p + 1)
    return (-1.0) ** (j + 1) / np.sqrt(j)


def gen_scenario1(n: int, p: int, kappa: float, rng: np.random.Generator) -> ScenarioInstance:
    """Independent features with variances p, ..., 1 and one response outlier (the last row)."""
    if n < 2:
        raise TooFewRows(f"scenario 1 needs n >= 2, got {n}")
    if p < 1:
        raise InvalidDimension(f"p must be >= 1, got {p}")
    variances = np.arange(p, 0, -1, dtype=float)
    X = rng.standard_normal((n, p)) * np.sqrt(variances)
    beta = true_beta(p)
    y = X @ beta + rng.standard_normal(n)
    y_tilde = y.copy()
    y_tilde[-1] += kappa + rng.normal(0.0, DELTA_SD)
    return ScenarioInstance(X, y, y_tilde, np.array([n - 1]), beta, np.diag(variances), kappa)


def gen_scenario2(n: int, p: int, kappa: float, rng: np.random.Generator) -> ScenarioInstance:
    """Correlated features ``Sigma = Q diag(lambda) Q'`` and a shifted 10% cluster of responses."""
    if n < 10:
        raise TooFewRows(f"scenario 2 needs n >= 10, got {n}")
    if p < 1:
        raise InvalidDimension(f"p must be >= 1, got {p}")
    Q = random_orthogonal(p, rng)
    j = np.arange(1, p + 1)
    lam = np.sort((p - j + 1) / p + rng.uniform(0.0, 0.05, p))[::-1]
    sigma = (Q * lam) @ Q.T
    sigma = (sigma + sigma.T) / 2
    X = (rng.standard_normal((n, p)) * np.sqrt(lam)) @ Q.T
    beta = true_beta(p)
    y = X @ beta + rng.standard_normal(n)
    m = math.ceil(OUTLIER_FRACTION * n - 1e-9)
    outliers = np.sort(rng.permutation(n)[:m])
    y_tilde = y.copy()
    y_tilde[outliers] += kappa + rng.normal(0.0, DELTA_SD, m)
    return ScenarioInstance(X, y, y_tilde, outliers, beta, sigma, kappa, Q, lam)


GENERATORS = {1: gen_scenario1, 2: gen_scenario2}


@dataclass(frozen=True)
class MetricsRecord:
    ore: float = math.nan
    utility_distance: float = math.nan
    failed: bool = False
    error: str = ""


def _kappa_key(kappa: float) -> int:
    return int(round(kappa * 1000))


def data_stream(seed: int, scenario: int, n: int, p: int, kappa: float, rep: int):
    return rng_stream(seed, (0, scenario, n, p, _kappa_key(kappa), rep))


def method_stream(seed: int, scenario: int, n: int, p: int, kappa: float, method: str, rep: int):
    index = list(METHODS).index(method)
    return rng_stream(seed, (1 + index, scenario, n, p, _kappa_key(kappa), rep))


def run_replication(
    instance: ScenarioInstance, method: str, rng: np.random.Generator, permute=permute_columns
) -> MetricsRecord:
    """Anonymize ``(X, y~)`` jointly, then score privacy (ORE) and utility (OLS error).

    Estimator failures come back as a failed record rather than an exception.
    """
    data = instance.data
    p = instance.X.shape[1]
    try:
        anon = anonymize(data, AnonymizationRequest.named(method), rng, permute=permute)
        score = ore(data, anon, instance.outliers)
        beta_hat = ols(anon[:, :p], anon[:, p])
    except (IcsaError, np.linalg.LinAlgError) as exc:
        return MetricsRecord(failed=True, error=f"{type(exc).__name__}: {exc}")
    return MetricsRecord(score, utility_distance(instance.beta, beta_hat))


def simulate_cell(scenario: int, n: int, p: int, kappa: float, methods, reps: int, seed: int):
    """Raw per-replication records for one grid cell, keyed by method.

    Every method sees the same generated data in replication ``r``; only the
    anonymization randomness differs between methods.
    """
    out = {m: [] for m in methods}
    gen = GENERATORS[scenario]
    for rep in range(reps):
        instance = gen(n, p, kappa, data_stream(seed, scenario, n, p, kappa, rep))
        for m in methods:
            out[m].append(run_replication(instance, m, method_stream(seed, scenario, n, p, kappa, m, rep)))
    return out


def summarize(records) -> dict:
    """Median and quartiles of ORE and utility over the successful replications."""
    ok = [r for r in records if not r.failed]
    failures = len(records) - len(ok)
    rows = {}
    for metric, attr in (("ore", "ore"), ("utility", "utility_distance")):
        values = np.array([getattr(r, attr) for r in ok])
        if values.size:
            q1, med, q3 = np.percentile(values, [25, 50, 75])
        else:
            q1 = med = q3 = math.nan
        rows[metric] = (float(med), float(q1), float(q3), failures)
    return rows


def _cell_job(args):
    scenario, n, p, kappa, methods, reps, seed = args
    return args, simulate_cell(scenario, n, p, kappa, methods, reps, seed)


def run_grid(scenarios, ns, ps, kappas, methods, reps: int, seed: int, jobs: int = 1) -> list[dict]:
    """Aggregate table with one row per (scenario, n, p, kappa, method, metric)."""
    methods = list(methods)
    for m in methods:
        if m not in METHODS:
            raise KeyError(m)
    cells = [(s, n, p, k, tuple(methods), reps, seed) for s in scenarios for n in ns for p in ps for k in kappas]
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = dict(pool.map(_cell_job, cells))
    else:
        results = dict(map(_cell_job, cells))
    table = []
    for cell in cells:
        s, n, p, k = cell[:4]
        for m in methods:
            for metric, (med, q1, q3, failures) in summarize(results[cell][m]).items():
                table.append(
                    dict(scenario=s, n=n, p=p, kappa=k, method=m, metric=metric,
                         median=med, q1=q1, q3=q3, failures=failures)
                )
    return table


def write_grid_csv(path, table) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        w.writeheader()
        for row in table:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
