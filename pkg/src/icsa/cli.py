"""Command-line front end.

    icsa anonymize --input data.csv --method iii-iii --seed 7 --output anon.csv
    icsa simulate --scenario 1 --n 40 --p 3 --kappa 16 --reps 200 --methods sa,iii-iii --output grid.csv
    icsa evaluate --input wbcd.csv --runs 200 --bootstrap 500
    icsa check-theorem --n 20 --p 4 --M 1 --H 100,1000,10000 --trials 1000

Any subcommand accepts ``--config FILE`` with ``key = value`` lines named
after the long flags; flags given on the command line take precedence.
Exit status is 0 on success, 2 on invalid input and 3 on numerical failure.
"""

import argparse
import csv
import logging
import sys
from pathlib import Path

from .anonymize import METHODS, AnonymizationRequest, anonymize_table
from .data import load_csv, write_csv
from .errors import NumericalError, ValidationError
from .evaluate import evaluate_real, write_report_csv
from .linalg import rng_stream
from .scatter import ScatterSpec
from .simulate import DESK_GRID, GRID_KAPPA, GRID_N, GRID_P, run_grid, write_grid_csv
from .theory import check_theorem

log = logging.getLogger("icsa")

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


def _ints(text):
    return [int(v) for v in str(text).split(",") if v.strip()]


def _floats(text):
    return [float(v) for v in str(text).split(",") if v.strip()]


def _names(text):
    return [v.strip() for v in str(text).split(",") if v.strip()]


def parse_spec(text: str) -> ScatterSpec:
    """``mean-cov``, ``cov4``, ``hr``, ``tyler``, ``identity``, ``mcd50`` or ``mcd:0.75``."""
    text = text.strip().lower()
    if text.startswith("mcd"):
        rest = text[3:].lstrip(":")
        alpha = float(rest) if rest else 0.5
        return ScatterSpec("mcd", alpha=alpha / 100 if alpha > 1 else alpha)
    if text.startswith("tyler@"):
        return ScatterSpec("tyler", location=text.split("@", 1)[1])
    return ScatterSpec(text)


def read_config(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def cmd_anonymize(args) -> int:
    binary = _names(args.binary) if args.binary else ()
    data = load_csv(args.input, binary=binary, outlier_column=None)
    if args.spec1 or args.spec2:
        if not (args.spec1 and args.spec2):
            raise ValidationError("--spec1 and --spec2 must be given together")
        request = AnonymizationRequest(parse_spec(args.spec1), parse_spec(args.spec2))
    else:
        request = AnonymizationRequest.named(args.method)
    out = anonymize_table(data, request, rng_stream(args.seed))
    write_csv(args.output, out)
    log.info("wrote %d anonymized rows to %s", out.n, args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    methods = _names(args.methods)
    for m in methods:
        if m not in METHODS:
            raise ValidationError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    if args.full_grid:
        ns, ps, kappas = GRID_N, GRID_P, GRID_KAPPA
    elif args.desk_grid:
        ns, ps, kappas = DESK_GRID["n"], DESK_GRID["p"], DESK_GRID["kappa"]
    else:
        ns, ps, kappas = _ints(args.n), _ints(args.p), _floats(args.kappa)
    scenarios = _ints(args.scenario)
    if any(s not in (1, 2) for s in scenarios):
        raise ValidationError("scenario must be 1 or 2")
    table = run_grid(scenarios, ns, ps, kappas, methods, args.reps, args.seed, jobs=args.jobs)
    write_grid_csv(args.output, table)
    log.info("wrote %d rows to %s", len(table), args.output)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    data = load_csv(args.input, outlier_column=args.outlier_column)
    report = evaluate_real(data, runs=args.runs, bootstrap=args.bootstrap, seed=args.seed, method=args.method)
    if args.output:
        write_report_csv(args.output, report)
    print(report.table())
    print(f"ratios above 1: {report.ratios_above_one} of {len(report.rows) - 5}; undefined: {report.undefined}")
    return EXIT_OK


def cmd_check_theorem(args) -> int:
    rows = check_theorem(args.n, args.p, args.M, _floats(args.H), args.trials, args.seed)
    fh = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow(["H", "empirical_max", "bound", "pass"])
        for r in rows:
            w.writerow([repr(r["H"]), repr(r["empirical_max"]), repr(r["bound"]), int(r["passed"])])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="icsa", description="ICS-based anonymization toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--config", help="key = value file with defaults for the flags")
        p.add_argument("--seed", type=int, default=0)
        p.set_defaults(func=func)
        return p

    p = add("anonymize", cmd_anonymize, "anonymize a CSV file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--method", default="iii-iii", choices=list(METHODS))
    p.add_argument("--spec1", help="explicit first scatter, e.g. mcd50 or hr")
    p.add_argument("--spec2", help="explicit second scatter")
    p.add_argument("--binary", help="comma-separated columns to treat as binary")

    p = add("simulate", cmd_simulate, "run the simulation grid")
    p.add_argument("--scenario", default="1")
    p.add_argument("--n", default="40")
    p.add_argument("--p", default="3", help="number of features (data have p + 1 columns)")
    p.add_argument("--kappa", default="16")
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--methods", default="sa,iii-iii")
    p.add_argument("--output", required=True)
    p.add_argument("--jobs", type=int, default=1)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--full-grid", action="store_true", help="all n, p and kappa values of the study")
    g.add_argument("--desk-grid", action="store_true", help="a small grid that runs in minutes")

    p = add("evaluate", cmd_evaluate, "compare ICSA with SA on a real data table")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--runs", type=int, default=2000)
    p.add_argument("--bootstrap", type=int, default=2000)
    p.add_argument("--method", default="iii-iii", choices=[m for m in METHODS if m != "sa"])
    p.add_argument("--outlier-column", default="outlier")

    p = add("check-theorem", cmd_check_theorem, "sample SA against the outlier bound")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--p", type=int, default=4)
    p.add_argument("--M", type=float, default=1.0)
    p.add_argument("--H", default="100,1000,10000")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--output")
    return parser


def _config_path(argv):
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def parse_args(argv=None) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    path = _config_path(argv)
    command = next((a for a in argv if a in parser._subparsers._group_actions[0].choices), None)
    if path and command:
        config = read_config(path)
        subparser = parser._subparsers._group_actions[0].choices[command]
        actions = {a.dest: a for a in subparser._actions}
        unknown = set(config) - set(actions)
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        for key, value in config.items():
            action = actions[key]
            if isinstance(action, argparse._StoreTrueAction):
                value = value.lower() in ("1", "true", "yes")
            elif action.type is not None:
                value = action.type(value)
            action.default = value
            action.required = False
    return parser.parse_args(argv)


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValidationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
