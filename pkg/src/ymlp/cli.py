"""Command line entry point ``ymlp``.

Exit codes: 0 success, 1 usage or configuration error, 2 solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .errors import ConfigError, YmlpError
from .results import RunFormatError

EXIT_OK, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser():
    p = _Parser(prog="ymlp", description="Young-measure LP schemes for random conservation laws")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config")
    r.add_argument("--out", help="output directory (overrides output.dir)")
    r.add_argument("--workers", type=int, help="LP worker processes (overrides run.workers)")
    r.add_argument("--plots", action="store_true", help="also write SVG figures")
    r.add_argument("--quiet", action="store_true")

    pl = sub.add_parser("plot", help="write SVG figures for a run directory")
    pl.add_argument("dir")
    pl.add_argument("--row", type=int, default=0, help="parameter row for the support plot")

    c = sub.add_parser("compare", help="difference norms between two runs")
    c.add_argument("dir_a")
    c.add_argument("dir_b")

    s = sub.add_parser("lp-selftest", help="check the simplex against vertex enumeration")
    s.add_argument("--count", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)

    v = sub.add_parser("convergence", help="grid-refinement study against the exact solution")
    v.add_argument("config")
    v.add_argument("--levels", type=int, default=2)
    return p


def _run(args):
    from .config import load_config
    from .driver import run_experiment

    cfg = load_config(args.config)
    changes = {}
    if args.workers is not None:
        changes["workers"] = args.workers
    if args.plots:
        changes["plots"] = True
    if args.out is not None:
        changes["output_dir"] = args.out
    if changes:
        cfg = cfg.with_updates(**changes)

    start = time.perf_counter()

    def progress(step, t, dt, res):
        if not args.quiet and step % 50 == 0:
            print(f"step {step:6d}  t = {t:.6g}  dt = {dt:.3g}  residual = {res:.2e}",
                  file=sys.stderr)

    run_experiment(cfg, progress=progress)
    print(f"wrote {cfg.output_dir} in {time.perf_counter() - start:.1f} s")
    return EXIT_OK


def _plot(args):
    from .plots import emit_plots

    for path in emit_plots(args.dir, args.row):
        print(path)
    return EXIT_OK


def _compare(args):
    from .results import compare_runs, format_report

    print(format_report(compare_runs(args.dir_a, args.dir_b)))
    return EXIT_OK


def _selftest(args):
    from .lp_oracle import selftest

    bad, worst = selftest(args.count, args.seed)
    print(json.dumps({"count": args.count, "mismatches": bad, "worst_gap": worst}))
    return EXIT_OK if bad == 0 else EXIT_SOLVER


def _convergence(args):
    from .config import load_config
    from .convergence import convergence_study

    rows = convergence_study(load_config(args.config), args.levels)
    print(f"{'n_x':>6} {'L1 error':>12} {'rate':>6}")
    for r in rows:
        print(f"{r['n_x']:6d} {r['error']:12.4e} {r['rate']:6.2f}")
    return EXIT_OK


_COMMANDS = {
    "run": _run,
    "plot": _plot,
    "compare": _compare,
    "lp-selftest": _selftest,
    "convergence": _convergence,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as err:
        print(f"ymlp: configuration error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except RunFormatError as err:
        print(f"ymlp: {err}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as err:
        print(f"ymlp: {err}", file=sys.stderr)
        return EXIT_USAGE
    except YmlpError as err:
        ctx = getattr(err, "context", None)
        print(f"ymlp: solver failure: {err}", file=sys.stderr)
        if ctx:
            print(f"ymlp: context: {ctx}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
