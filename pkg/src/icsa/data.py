"""Named data tables and CSV ingestion."""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import IngestError, ShapeError

OUTLIER_TRUE = {"1", "yes", "y", "true", "o", "outlier"}
OUTLIER_FALSE = {"0", "no", "n", "false", "i", "inlier"}


@dataclass
class DataMatrix:
    """An n x p numeric table with column names and kinds (numeric | binary)."""

    values: np.ndarray
    columns: list[str]
    kinds: list[str]
    outliers: np.ndarray | None = None
    labels: dict[str, list[str]] | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ShapeError("DataMatrix values must be 2-D")
        if len(self.columns) != self.values.shape[1] or len(self.kinds) != self.values.shape[1]:
            raise ShapeError("column names/kinds do not match the number of columns")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @property
    def binary_columns(self) -> list[int]:
        return [j for j, k in enumerate(self.kinds) if k == "binary"]

    @classmethod
    def from_array(cls, values, columns=None) -> "DataMatrix":
        values = np.asarray(values, dtype=float)
        columns = list(columns) if columns is not None else [f"x{j + 1}" for j in range(values.shape[1])]
        return cls(values, columns, [_kind(values[:, j]) for j in range(values.shape[1])])


def _kind(col) -> str:
    return "binary" if np.all(np.isin(col, (0.0, 1.0))) else "numeric"


def load_csv(
    path,
    numeric=(),
    binary=(),
    outlier_column: str | None = "outlier",
    drop=("id",),
    text=(),
    allow_nan: bool = False,
) -> DataMatrix:
    """Read a headered CSV into a :class:`DataMatrix`.

    Columns whose values are all 0/1 are tagged binary unless listed in
    ``numeric``; names in ``binary`` are forced binary. If ``outlier_column``
    is present it is removed from the data and parsed into an outlier mask.
    Columns named in ``drop`` (case-insensitive) are skipped and columns named
    in ``text`` are kept verbatim in ``labels``. ``allow_nan`` admits NaN
    cells, which result tables use for undefined summaries; infinities are
    always rejected.
    """
    path = Path(path)
    if not path.exists():
        raise IngestError(f"no such file: {path}")
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise IngestError("empty file")
    header = [h.strip() for h in rows[0]]
    body = [r for r in rows[1:] if any(c.strip() for c in r)]
    lowered = [h.lower() for h in header]
    flag_at = lowered.index(outlier_column.lower()) if outlier_column and outlier_column.lower() in lowered else None
    drop = {d.lower() for d in drop}
    text_at = [j for j, h in enumerate(header) if h in set(text)]
    keep = [j for j, h in enumerate(lowered) if j != flag_at and h not in drop and j not in text_at]
    labels = {header[j]: [] for j in text_at}

    values = np.empty((len(body), len(keep)))
    flags = np.zeros(len(body), dtype=bool)
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise IngestError(f"expected {len(header)} fields, found {len(row)}", row=i)
        for j in text_at:
            labels[header[j]].append(row[j])
        for out_j, j in enumerate(keep):
            try:
                values[i - 2, out_j] = float(row[j])
            except ValueError:
                raise IngestError(f"cannot parse {row[j]!r} as a number", row=i, column=header[j]) from None
        if flag_at is not None:
            cell = row[flag_at].strip().strip("'\"").lower()
            if cell in OUTLIER_TRUE:
                flags[i - 2] = True
            elif cell not in OUTLIER_FALSE:
                raise IngestError(f"unrecognized outlier flag {row[flag_at]!r}", row=i, column=header[flag_at])
    bad = np.isinf(values) if allow_nan else ~np.isfinite(values)
    if bad.any():
        i, j = map(int, np.argwhere(bad)[0])
        raise IngestError("non-finite value in data", row=i + 2, column=header[keep[j]])

    columns = [header[j] for j in keep]
    unknown = (set(numeric) | set(binary)) - set(columns) | set(text) - set(labels)
    if unknown:
        raise IngestError(f"unknown columns in schema hints: {sorted(unknown)}")
    kinds = []
    for j, name in enumerate(columns):
        if name in binary:
            if not np.all(np.isin(values[:, j], (0.0, 1.0))):
                raise IngestError("column forced binary holds non-0/1 values", column=name)
            kinds.append("binary")
        elif name in numeric:
            kinds.append("numeric")
        else:
            kinds.append(_kind(values[:, j]))
    return DataMatrix(
        values, columns, kinds, outliers=flags if flag_at is not None else None, labels=labels or None
    )


def write_csv(path, data: DataMatrix, digits: int = 17) -> None:
    """Write a :class:`DataMatrix` (plus outlier flags when present)."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        header = list(data.columns) + (["outlier"] if data.outliers is not None else [])
        w.writerow(header)
        for i, row in enumerate(data.values):
            cells = [format(float(v), f".{digits}g") for v in row]
            if data.outliers is not None:
                cells.append("1" if data.outliers[i] else "0")
            w.writerow(cells)
