"""Privacy-utility comparison on a breast-cancer outlier table.

The published benchmark keeps all 357 benign tumours and 10 malignant ones
as outliers. Its exact malignant rows are not recoverable here, so this demo
rebuilds a table of the same shape from the copy of the original diagnostic
data that ships with scikit-learn, picking 10 malignant rows at random. The
numbers are therefore indicative only; pass the real file with --input.

    python3 demos/05_real_data_proxy.py [--runs 20] [--input wbcd.csv]
"""

import argparse
import csv
from pathlib import Path

import numpy as np
from sklearn.datasets import load_breast_cancer

from icsa import evaluate_real, load_csv, rng_stream


def build_proxy(path, seed=0):
    bunch = load_breast_cancer()
    benign = np.flatnonzero(bunch.target == 1)
    malignant = rng_stream(seed).choice(np.flatnonzero(bunch.target == 0), 10, replace=False)
    rows = np.sort(np.concatenate([benign, malignant]))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", *bunch.feature_names, "outlier"])
        for i in rows:
            w.writerow([i, *map(repr, bunch.data[i].tolist()), "yes" if bunch.target[i] == 0 else "no"])
    return path


parser = argparse.ArgumentParser()
parser.add_argument("--runs", type=int, default=20)
parser.add_argument("--bootstrap", type=int, default=500)
parser.add_argument("--input")
args = parser.parse_args()

path = Path(args.input) if args.input else build_proxy(Path(__file__).with_name("wbcd_proxy.csv"))
data = load_csv(path)
print(f"{path.name}: {data.n} rows, {data.p} attributes, {int(data.outliers.sum())} flagged outliers\n")

report = evaluate_real(data, runs=args.runs, bootstrap=args.bootstrap, seed=1)
print("ICSA (MCD 50%, MCD 75%) over SA, ratio of mean relative privacy efficiency:\n")
print(report.table())
print(f"\n{report.ratios_above_one} of 50 per-variable ratios exceed 1; {report.undefined} undefined")
for label, stats in report.summary.items():
    print(f"mean ORE {label}: {stats['ore'][0]:.4f}")
