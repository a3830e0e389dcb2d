"""Command-line front end.

Exit codes: 0 success, 2 input or format error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace

import numpy as np

from . import __version__, embio, experiments, linalg, metrics, ot
from .errors import InputError, NumericalError
from .stats import JointStats, estimate_cond_pair

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, default=_jsonable) + "\n"


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _emit(text: str, out) -> None:
    if out:
        embio.atomic_write(out, text.encode("utf-8"))
    else:
        sys.stdout.write(text)


def _report_rows(reports):
    for r in reports:
        d = r.to_dict()
        yield [d["metric"], repr(d["value"]), d["n"], d["dim_x"], d["dim_y"], d["seed"]]


REPORT_HEADER = ["metric", "value", "n", "dim_x", "dim_y", "seed"]


def cmd_metrics(args) -> int:
    x = embio.load_table(args.x)
    y = embio.load_table(args.y)
    yhat = embio.load_table(args.yhat)
    if y.shape[1] != yhat.shape[1]:
        raise InputError(f"{args.y} has width {y.shape[1]} but {args.yhat} has width {yhat.shape[1]}")
    ps = estimate_cond_pair(x, y, yhat)
    reports = [
        metrics.mfid(ps, args.clamp_tol),
        metrics.rfid(ps, args.clamp_tol),
        metrics.cfid(ps, args.eps, args.clamp_tol),
        metrics.jfd(
            JointStats(ps.mean_x, ps.mean_y, ps.c_xx, ps.c_yx, ps.c_yy, ps.n_samples),
            JointStats(ps.mean_x, ps.mean_yhat, ps.c_xx, ps.c_yhatx, ps.c_yhatyhat, ps.n_samples),
            args.clamp_tol,
        ),
    ]
    reports = [_with_seed(r, args.seed) for r in reports]
    if args.format == "json":
        text = _dumps({"command": "metrics", "label": args.label, "reports": [r.to_dict() for r in reports]})
    elif args.format == "csv":
        text = _csv(REPORT_HEADER, _report_rows(reports))
    else:
        # one row per model: "<label>: MFID, RFID, CFID"
        v = {r.metric: r.value for r in reports}
        text = f"{args.label}: {v['MFID']:.2f}, {v['RFID']:.2f}, {v['CFID']:.2f}\n"
    _emit(text, args.out)
    return EXIT_OK


def _with_seed(report, seed):
    return report if seed is None else replace(report, seed=seed)


def _oracle_instance(args):
    if args.instance:
        try:
            with open(args.instance, encoding="utf-8") as fh:
                spec = json.load(fh)
        except OSError as exc:
            raise InputError(f"{args.instance}: cannot read ({exc.strerror})") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.instance}: invalid JSON at line {exc.lineno}") from exc
        if not isinstance(spec, dict) or "a" not in spec or "b" not in spec:
            raise InputError(f"{args.instance}: expected an object with joints 'a' and 'b'")
        return ot.DiscreteJoint.from_dict(spec["a"]), ot.DiscreteJoint.from_dict(spec["b"])
    if args.builtin == "identical":
        a, _ = ot.shuffled_pairing_instance()
        return a, a
    return ot.shuffled_pairing_instance()


def cmd_oracle(args) -> int:
    if args.random:
        return _oracle_random(args)
    a, b = _oracle_instance(args)
    s = ot.chain_slacks(a, b)
    reports = [
        ot.mwd_discrete(a, b, method="lp"), ot.rwd_discrete(a, b),
        ot.rwd3_discrete(a, b), ot.cwd_discrete(a, b),
    ]
    reports = [_with_seed(r, args.seed) for r in reports]
    slacks = {k: v for k, v in s.items() if k.startswith("slack")}
    if args.format == "json":
        text = _dumps({"command": "oracle", "backend": ot.BACKEND,
                       "reports": [r.to_dict() for r in reports], "slacks": slacks})
    else:
        rows = list(_report_rows(reports))
        rows += [[k, repr(v), "", "", "", ""] for k, v in slacks.items()]
        text = _csv(REPORT_HEADER, rows)
    _emit(text, args.out)
    return EXIT_OK if min(slacks.values()) >= -1e-9 else EXIT_NUMERIC


def _oracle_random(args) -> int:
    seed = 0 if args.seed is None else args.seed
    min_slack = {"slack_rwd_mwd": np.inf, "slack_rwd3_rwd": np.inf, "slack_cwd_rwd3": np.inf}
    violations = 0
    rwd3_eq_cwd = 0
    for i in range(args.random):
        a, b = ot.random_instance(experiments.rng_for(seed, i))
        s = ot.chain_slacks(a, b)
        for k in min_slack:
            min_slack[k] = min(min_slack[k], s[k])
        if min(s[k] for k in min_slack) < -1e-9:
            violations += 1
        if abs(s["CWD"] - s["RWD3"]) <= 1e-9:
            rwd3_eq_cwd += 1
    summary = {
        "command": "oracle", "backend": ot.BACKEND, "instances": args.random, "seed": seed,
        "violations": violations, "min_slack": min_slack, "rwd3_equals_cwd": rwd3_eq_cwd,
        "slack_tol": 1e-9,
    }
    if args.format == "json":
        text = _dumps(summary)
    else:
        text = _csv(["instances", "seed", "violations", "rwd3_equals_cwd", *min_slack],
                    [[args.random, seed, violations, rwd3_eq_cwd, *map(repr, min_slack.values())]])
    _emit(text, args.out)
    return EXIT_OK if violations == 0 else EXIT_NUMERIC


def cmd_experiment(args) -> int:
    if args.kind == "synthetic":
        seed = 0 if args.seed is None else args.seed
        table = experiments.run_synthetic(args.rho, args.n, args.trials, seed, args.cxx)
        if args.format == "json":
            text = _dumps(table.to_dict())
        else:
            text = _csv(["trial", "estimator", "metric", "value"],
                        ([t, k, m, repr(v)] for t, k, m, v in table.rows()))
    elif args.kind == "contour":
        grid = experiments.contour_grid(args.resolution)
        if args.format == "json":
            text = _dumps(grid.to_dict())
        else:
            text = _csv(["rho", "rhohat", "squared_diff", "RFID", "CFID"],
                        ([repr(float(v)) for v in r] for r in grid.rows()))
    else:
        alphas = args.alphas or experiments.DEFAULT_ALPHAS
        sweep = experiments.alpha_sweep(args.rho, args.rhohat, alphas)
        if args.format == "json":
            text = _dumps({"experiment": "alpha", "rho": args.rho, "rhohat": args.rhohat, "rows": sweep})
        else:
            text = _csv(["alpha", "MFID", "RFID", "CFID"],
                        ([repr(r[k]) for k in ("alpha", "MFID", "RFID", "CFID")] for r in sweep))
    _emit(text, args.out)
    return EXIT_OK


def cmd_convert(args) -> int:
    embio.save_table(args.dst, embio.load_table(args.src))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="PATH", help="write here (atomically) instead of stdout")
    common.add_argument("--seed", type=int, default=None)

    p = argparse.ArgumentParser(prog="cfid", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"cfid {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("metrics", parents=[common], help="MFID/RFID/CFID/JFD from embedding files")
    m.add_argument("x", help="input embeddings (.csv or binary)")
    m.add_argument("y", help="true output embeddings")
    m.add_argument("yhat", help="generated output embeddings")
    m.add_argument("--eps", type=float, default=linalg.PINV_EPS, help="pseudo-inverse cutoff")
    m.add_argument("--clamp-tol", type=float, default=linalg.CLAMP_TOL)
    m.add_argument("--format", choices=["json", "csv", "table"], default="json")
    m.add_argument("--label", default="model", help="row label for --format table")
    m.set_defaults(func=cmd_metrics)

    o = sub.add_parser("oracle", parents=[common], help="exact discrete MWD/RWD/RWD3/CWD")
    src = o.add_mutually_exclusive_group()
    src.add_argument("--instance", metavar="JSON", help='file with {"a": joint, "b": joint}')
    src.add_argument("--builtin", choices=["shuffled", "identical"], default="shuffled")
    src.add_argument("--random", type=int, metavar="N", help="check the chain on N random instances")
    o.add_argument("--format", choices=["json", "csv"], default="json")
    o.set_defaults(func=cmd_oracle)

    e = sub.add_parser("experiment", help="bivariate Gaussian studies")
    esub = e.add_subparsers(dest="kind", required=True)
    syn = esub.add_parser("synthetic", parents=[common], help="SC/NSC1/NSC2 estimator comparison")
    syn.add_argument("--rho", type=float, default=0.5)
    syn.add_argument("--format", choices=["json", "csv"], default="json")
    syn.add_argument("--n", type=int, default=50)
    syn.add_argument("--trials", type=int, default=200)
    cx = syn.add_mutually_exclusive_group()
    cx.add_argument("--true-cxx", dest="cxx", action="store_const", const="true")
    cx.add_argument("--est-cxx", dest="cxx", action="store_const", const="estimated")
    syn.set_defaults(cxx="true")
    con = esub.add_parser("contour", parents=[common], help="metric grids over (rho, rhohat)")
    con.add_argument("--resolution", type=int, default=41)
    con.add_argument("--format", choices=["json", "csv"], default="json")
    al = esub.add_parser("alpha", parents=[common], help="metrics after scaling x by alpha")
    al.add_argument("--rho", type=float, default=0.3)
    al.add_argument("--rhohat", type=float, default=0.7)
    al.add_argument("--alphas", type=float, nargs="+")
    al.add_argument("--format", choices=["json", "csv"], default="json")
    e.set_defaults(func=cmd_experiment)

    c = sub.add_parser("convert", help="convert between CSV and the binary embedding format")
    c.add_argument("src")
    c.add_argument("dst")
    c.set_defaults(func=cmd_convert)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"cfid: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"cfid: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
