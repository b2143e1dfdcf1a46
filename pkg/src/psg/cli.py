"""Command-line entry point: ``psg recover | mc | bounds | css``.

Exit codes: 0 success, 2 invalid flags or config, 3 runtime failure.
"""

import argparse
import json
import sys

import numpy as np

from psg.bounds import BoundParams, all_bounds
from psg.experiments import ConfigError, ExperimentConfig, rows_to_csv, run_experiment
from psg.greedy import METHODS, run_selector
from psg.instances import gen_instance, sample_size_n
from psg.plot import rows_chart

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 2, 3


class UsageError(Exception):
    pass


def read_matrix(path):
    """Plain-text matrix: first line ``rows cols``, then row-major values."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise UsageError(f"{path}: first line must be 'rows cols'")
        try:
            rows, cols = int(header[0]), int(header[1])
            values = np.array(fh.read().split(), dtype=np.float64)
        except ValueError as exc:
            raise UsageError(f"{path}: {exc}") from exc
    if rows < 1 or cols < 1 or values.size != rows * cols:
        raise UsageError(f"{path}: expected {rows}x{cols} = {rows * cols} values, found {values.size}")
    if not np.all(np.isfinite(values)):
        raise UsageError(f"{path}: non-finite entries")
    return values.reshape(rows, cols)


def write_matrix(D, path):
    D = np.asarray(D)
    with open(path, "w") as fh:
        fh.write(f"{D.shape[0]} {D.shape[1]}\n")
        for row in D:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from exc


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from exc


def cmd_recover(args):
    n = args.n
    if n is None:
        try:
            n = sample_size_n(args.k, args.m, args.beta)
        except ValueError as exc:
            raise UsageError(f"cannot derive n: {exc}") from exc
    try:
        inst = gen_instance(args.m, n, args.k, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    extra = {"replacement": args.replacement}
    if args.method == "psg":
        extra["epsilon"] = args.eps if args.eps is not None else args.beta / args.k
    if args.method == "restricted":
        if args.r is None:
            raise UsageError("--r is required for --method restricted")
        extra["r"] = args.r
    try:
        trace = run_selector(args.method, inst.A, inst.y, args.k, seed=args.seed + 1, **extra)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = {
        "method": args.method,
        "m": args.m,
        "n": n,
        "k": args.k,
        "seed": args.seed,
        "selected": [int(j) for j in trace.selected],
        "support": list(inst.support),
        "success": trace.matches(inst.support),
        "oracle_calls": trace.oracle_calls,
        "early_stopped": trace.early_stopped,
        "failed": trace.failed,
    }
    if trace.epsilon is not None:
        out["epsilon"] = trace.epsilon
    print(json.dumps(out))


def _emit(rows, out, svg, log_y):
    text = rows_to_csv(rows)
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if svg:
        with open(svg, "w") as fh:
            fh.write(rows_chart(rows, log_y=log_y))


def cmd_mc(args):
    try:
        config = ExperimentConfig.load(args.config)
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    rows = run_experiment(config, workers=args.workers)
    _emit(rows, args.out or config.output, args.svg, args.log_y)


def cmd_bounds(args):
    params = BoundParams(
        m=args.m, n=args.n, k=args.k, epsilon=args.eps, beta=args.beta,
        gamma=args.gamma, delta=args.delta, r=args.r, alpha1=args.alpha1,
    )
    try:
        print(json.dumps(all_bounds(params), indent=2))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_css(args):
    matrix = read_matrix(args.input) if args.input else None
    config = ExperimentConfig.from_dict(
        {
            "kind": "css-sweep",
            "k_values": args.k_list,
            "epsilons": args.eps_list,
            "trials": args.trials,
            "master_seed": args.seed,
            "n_rows": args.n_rows,
            "m_cols": args.m_cols,
            "span_size": args.span,
            "perturbation": args.perturbation,
        }
    )
    rows = run_experiment(config, workers=args.workers, matrix=matrix)
    _emit(rows, args.out, args.svg, args.log_y)


def build_parser():
    parser = argparse.ArgumentParser(prog="psg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("recover", help="run one selector on one seeded instance")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, help="measurements (default: sample-size rule with --beta)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", choices=METHODS, default="psg")
    p.add_argument("--eps", type=float, help="psg epsilon (default beta/k)")
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--r", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replacement", action="store_true")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("mc", help="Monte Carlo sweep from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="CSV path (default: config output, else stdout)")
    p.add_argument("--svg")
    p.add_argument("--log-y", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("bounds", help="evaluate closed-form bounds as JSON")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--r", type=int)
    p.add_argument("--alpha1", type=float, default=0.5)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("css", help="column subset selection sweep")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="matrix file ('rows cols' header, row-major values)")
    src.add_argument("--synthetic", action="store_true", help="planted Gaussian instances")
    p.add_argument("--n-rows", type=int, default=200)
    p.add_argument("--m-cols", type=int, default=1000)
    p.add_argument("--span", type=int, default=20)
    p.add_argument("--perturbation", type=float, default=0.1)
    p.add_argument("--k-list", type=_int_list, required=True)
    p.add_argument("--eps-list", type=_float_list, default=[0.1, 0.01])
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.add_argument("--log-y", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_css)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if getattr(args, "workers", 1) < 1:
        print("psg: --workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"psg: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        print(f"psg: runtime failure: {exc!r}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
