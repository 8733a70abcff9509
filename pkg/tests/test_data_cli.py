import csv

import numpy as np
import pytest

from icsa.cli import main, parse_args, parse_spec
from icsa.data import DataMatrix, load_csv, write_csv
from icsa.errors import IngestError, SchemaError
from icsa.evaluate import evaluate_real, write_report_csv
from icsa.linalg import rng_stream
from synthetic import write_wbcd_like


def _write(path, text):
    path.write_text(text)
    return path


# ingestion


def test_load_small_numeric(tmp_path):
    f = _write(tmp_path / "a.csv", "u,v\n1.5,2\n3,-4\n0.25,7e-1\n")
    d = load_csv(f)
    assert d.values.shape == (3, 2)
    assert d.kinds == ["numeric", "numeric"]
    assert d.outliers is None
    np.testing.assert_array_equal(d.values[:, 1], [2.0, -4.0, 0.7])


def test_binary_autodetect_and_override(tmp_path):
    f = _write(tmp_path / "b.csv", "x,flag\n0.3,1\n1.2,0\n-0.4,1\n")
    assert load_csv(f).kinds == ["numeric", "binary"]
    assert load_csv(f, numeric=("flag",)).kinds == ["numeric", "numeric"]
    with pytest.raises(IngestError):
        load_csv(f, binary=("x",))


@pytest.mark.parametrize(
    "body,row,column",
    [("1,2\n3\n", 3, None), ("1,2\n3,abc\n", 3, "b"), ("1,x\n", 2, "b")],
)
def test_ingest_error_locations(tmp_path, body, row, column):
    f = _write(tmp_path / "bad.csv", "a,b\n" + body)
    with pytest.raises(IngestError) as info:
        load_csv(f)
    assert info.value.row == row
    assert info.value.column == column


def test_nan_cells(tmp_path):
    f = _write(tmp_path / "n.csv", "a,b\n1,nan\n2,3\n")
    with pytest.raises(IngestError) as info:
        load_csv(f)
    assert (info.value.row, info.value.column) == (2, "b")
    assert np.isnan(load_csv(f, allow_nan=True).values[0, 1])
    with pytest.raises(IngestError):
        load_csv(_write(tmp_path / "i.csv", "a\ninf\n"), allow_nan=True)


def test_missing_file(tmp_path):
    with pytest.raises(IngestError):
        load_csv(tmp_path / "nope.csv")


def test_wbcd_format(tmp_path):
    f = write_wbcd_like(tmp_path / "wbcd.csv", rng_stream(1))
    d = load_csv(f)
    assert (d.n, d.p) == (367, 30)
    assert int(d.outliers.sum()) == 10
    assert "id" not in d.columns


def test_write_round_trip(tmp_path, rng):
    d = DataMatrix.from_array(np.column_stack([rng.standard_normal(6), [0, 1, 1, 0, 1, 0]]), ["a", "b"])
    d.outliers = np.array([0, 0, 1, 0, 0, 0], dtype=bool)
    write_csv(tmp_path / "o.csv", d)
    back = load_csv(tmp_path / "o.csv")
    np.testing.assert_array_equal(back.values, d.values)
    np.testing.assert_array_equal(back.outliers, d.outliers)
    assert back.kinds == ["numeric", "binary"]


# evaluation on the synthetic table


def test_evaluate_smoke(tmp_path):
    d = load_csv(write_wbcd_like(tmp_path / "wbcd.csv", rng_stream(1)))
    report = evaluate_real(d, runs=2, bootstrap=50, seed=0)
    assert len(report.rows) == 55
    assert {r["metric"] for r in report.rows} == {"distance", "recall", "fpr", "precision", "jaccard"}
    overall = [r for r in report.rows if r["variable"] == "Overall"]
    assert len(overall) == 5
    assert np.isfinite(next(r for r in overall if r["metric"] == "distance")["ratio"])
    for r in report.rows:
        assert np.isnan(r["ratio"]) or (np.isfinite(r["ratio"]) and r["lower"] <= r["upper"])
    assert report.undefined == sum(np.isnan(r["ratio"]) for r in report.rows)
    assert "Overall" in report.table()
    write_report_csv(tmp_path / "r.csv", report)
    assert load_csv(tmp_path / "r.csv", text=("variable", "metric"), allow_nan=True).n == 55


def test_evaluate_schema(rng):
    d = DataMatrix.from_array(rng.standard_normal((40, 5)))
    with pytest.raises(SchemaError):
        evaluate_real(d, runs=1)
    d = DataMatrix.from_array(rng.standard_normal((40, 30)))
    with pytest.raises(SchemaError):
        evaluate_real(d, runs=1)


# command line


def test_parse_spec():
    assert parse_spec("mcd50").alpha == 0.5
    assert parse_spec("mcd:0.75").alpha == 0.75
    assert parse_spec("tyler@hr").location == "hr"
    assert parse_spec("Cov4").kind == "cov4"


def _data_file(tmp_path, rng, name="in.csv"):
    X = rng.standard_normal((40, 3)) @ rng.standard_normal((3, 3))
    d = DataMatrix.from_array(np.column_stack([X, rng.integers(0, 2, 40)]), ["a", "b", "c", "flag"])
    write_csv(tmp_path / name, d)
    return tmp_path / name


def test_cli_anonymize_is_bit_identical(tmp_path, rng):
    src = _data_file(tmp_path, rng)
    for out in ("o1.csv", "o2.csv"):
        assert main(["anonymize", "--input", str(src), "--method", "iii-iii", "--seed", "7",
                     "--output", str(tmp_path / out)]) == 0
    assert (tmp_path / "o1.csv").read_bytes() == (tmp_path / "o2.csv").read_bytes()
    before, after = load_csv(src), load_csv(tmp_path / "o1.csv")
    assert after.columns == before.columns and after.kinds == before.kinds
    assert after.values[:, 3].sum() == before.values[:, 3].sum()
    np.testing.assert_allclose(after.values.mean(0)[:3], before.values.mean(0)[:3], atol=1e-10)
    assert main(["anonymize", "--input", str(src), "--seed", "8", "--output", str(tmp_path / "o3.csv")]) == 0
    assert (tmp_path / "o3.csv").read_bytes() != (tmp_path / "o1.csv").read_bytes()


def test_cli_explicit_specs(tmp_path, rng):
    src = _data_file(tmp_path, rng)
    assert main(["anonymize", "--input", str(src), "--spec1", "mcd75", "--spec2", "hr",
                 "--output", str(tmp_path / "o.csv")]) == 0
    assert main(["anonymize", "--input", str(src), "--spec1", "mcd75", "--output", str(tmp_path / "o.csv")]) == 2


def test_cli_exit_codes(tmp_path, rng, capsys):
    assert main(["anonymize", "--input", str(tmp_path / "missing.csv"), "--output", str(tmp_path / "o.csv")]) == 2
    ragged = _write(tmp_path / "ragged.csv", "a,b\n1,2\n3\n")
    assert main(["anonymize", "--input", str(ragged), "--output", str(tmp_path / "o.csv")]) == 2
    X = rng.standard_normal((30, 3))
    X[:, 2] = 5.0
    write_csv(tmp_path / "const.csv", DataMatrix.from_array(X))
    assert main(["anonymize", "--input", str(tmp_path / "const.csv"), "--method", "i-i",
                 "--output", str(tmp_path / "o.csv")]) == 3
    assert "numerical failure" in capsys.readouterr().err
    assert main(["simulate", "--methods", "bogus", "--output", str(tmp_path / "g.csv")]) == 2
    with pytest.raises(SystemExit):
        main(["anonymize", "--input", "x.csv"])


def test_cli_simulate_and_round_trip(tmp_path):
    args = ["simulate", "--scenario", "1,2", "--n", "20", "--p", "3", "--kappa", "8", "--reps", "3",
            "--methods", "sa,iii-iii", "--seed", "4"]
    assert main(args + ["--output", str(tmp_path / "g1.csv")]) == 0
    assert main(args + ["--output", str(tmp_path / "g2.csv"), "--jobs", "2"]) == 0
    assert (tmp_path / "g1.csv").read_bytes() == (tmp_path / "g2.csv").read_bytes()
    with open(tmp_path / "g1.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2 * 2 * 2
    assert load_csv(tmp_path / "g1.csv", text=("method", "metric")).n == 8


def test_cli_check_theorem(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["check-theorem", "--n", "20", "--p", "4", "--H", "100,1000", "--trials", "50",
                 "--output", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert [r["pass"] for r in rows] == ["1", "1"]
    assert float(rows[0]["bound"]) == pytest.approx(2 * 3 * (16 + 400) / 1e4)
    assert load_csv(out, outlier_column=None).n == 2


def test_cli_evaluate(tmp_path):
    src = write_wbcd_like(tmp_path / "wbcd.csv", rng_stream(2))
    assert main(["evaluate", "--input", str(src), "--runs", "1", "--bootstrap", "20",
                 "--method", "i-i", "--output", str(tmp_path / "r.csv")]) == 0
    assert load_csv(tmp_path / "r.csv", text=("variable", "metric"), allow_nan=True).n == 55
    bad = _write(tmp_path / "small.csv", "a,b,outlier\n1,2,1\n3,4,0\n")
    assert main(["evaluate", "--input", str(bad), "--runs", "1"]) == 2


def test_config_precedence(tmp_path):
    cfg = _write(tmp_path / "run.cfg", "# defaults\nn = 25\ntrials = 7\nH = 300\n")
    args = parse_args(["check-theorem", "--config", str(cfg), "--trials", "9"])
    assert (args.n, args.trials, args.H) == (25, 9, "300")
    cfg2 = _write(tmp_path / "sim.cfg", "output = x.csv\nmethods = sa\nfull-grid = true\n")
    args = parse_args(["simulate", "--config", str(cfg2)])
    assert args.output == "x.csv" and args.full_grid is True
    bad = _write(tmp_path / "bad.cfg", "colour = blue\n")
    assert main(["check-theorem", "--config", str(bad)]) == 2
