"""Command-line front end.

Exit codes: 0 success, 1 a lemma check failed, 2 bad arguments,
3 infeasible construction, 4 I/O or file-format error. Data goes to stdout
or files; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys

from . import bounds, channel, harness, matrices, numkit
from .errors import (
    ConfigError,
    DomainError,
    InfeasibleError,
    InvalidMatrixError,
    MatrixParseError,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4

CONSTRUCT_KINDS = ("min-binary", "grid-packing", "identity", "gaussian", "bisection-plan")


def _emit(out, key, value):
    if isinstance(value, float):
        value = repr(value)
    print(f"{key}={value}", file=out)


def _resolve_m(args, default):
    if args.m is not None:
        return args.m
    if args.t is not None:
        return harness.measurement_count(args.n, args.t)
    return default


def _read_matrix(path):
    with open(path, "rb") as fh:
        return matrices.parse(fh.read())


def _packing(args):
    missing = [flag for flag in ("tau", "eps", "mu") if getattr(args, flag) is None]
    if missing:
        raise ConfigError("missing " + ", ".join("--" + f for f in missing))
    return bounds.PackingParams.from_target(args.tau, args.eps, args.mu)


def cmd_construct(args, out, err):
    n = args.n
    kind = args.kind
    if kind == "min-binary":
        m = _resolve_m(args, n.bit_length())
        a = matrices.min_cost_binary(n, m)
    elif kind == "grid-packing":
        p = _packing(args)
        m = _resolve_m(args, harness.measurement_count(max(n, 2), 1.0))
        for weight, levels, count in matrices.grid_capacity(m, p.tau, p.d):
            print(
                f"weight {weight}: {levels} grid levels per axis "
                f"(packing bound {p.ratio:.6g}), {count} columns",
                file=err,
            )
        a = matrices.grid_packing(n, m, p.tau, p.d)
    elif kind == "identity":
        a = matrices.baseline_matrix("identity", n, _resolve_m(args, n), args.seed)
    elif kind == "gaussian":
        m = _resolve_m(args, harness.measurement_count(max(n, 2), 1.0))
        a = matrices.baseline_matrix("gaussian", n, m, args.seed)
    else:
        plan = matrices.bisection_plan(n)
        print(
            f"bisection plan: {plan.step_count} steps, worst-case l0 cost {plan.total_cost}",
            file=err,
        )
        a = plan.realized_matrix(0)
    data = matrices.serialize(a)
    if args.out is None:
        out.write(data.decode("ascii"))
        target = "stdout"
    else:
        with open(args.out, "wb") as fh:
            fh.write(data)
        target = args.out
    print(f"wrote {target}: {a.rows}x{a.cols} {a.kind}, l0 cost {matrices.l0_cost(a)}", file=err)
    return EXIT_OK


def cmd_cost(args, out, err):
    report = matrices.cost_report(_read_matrix(args.matrix))
    _emit(out, "l0_cost", report.l0_cost)
    if report.r0 is not None:
        _emit(out, "reference_r0", report.r0)
        _emit(out, "reference_c_m", report.c_m)
    for weight, count in report.per_weight_counts:
        print(f"weight {weight}: {count}", file=out)
    return EXIT_OK


def _print_report(report, out):
    _emit(out, "regime", report.regime)
    _emit(out, "n", report.n)
    _emit(out, "m", report.m)
    _emit(out, "r0", report.r0)
    _emit(out, "c_m", report.c_m)
    _emit(out, "lower_bound", report.lower_bound)
    for key in sorted(report.diagnostics):
        _emit(out, key, report.diagnostics[key])


def cmd_bounds(args, out, err):
    if args.regime == "binary":
        _print_report(bounds.exact_min_binary_cost(args.n, args.m), out)
    elif args.regime == "noisy":
        _print_report(bounds.noisy_lower_bound(args.n, args.m, _packing(args)), out)
    elif args.regime == "ksparse":
        _print_report(bounds.ksparse_lower_bound(args.n, args.m, args.k), out)
    else:
        c_m = args.c_m
        if c_m is None:
            c_m = 1.0
        value, best_d = bounds.higher_m_bound(args.n, args.m, c_m, args.scale_c)
        _emit(out, "regime", "higher-m")
        _emit(out, "n", args.n)
        _emit(out, "m", args.m)
        _emit(out, "c_m", float(c_m))
        _emit(out, "scale_c", float(args.scale_c))
        _emit(out, "lower_bound", value)
        _emit(out, "argmax_d", best_d)
    return EXIT_OK


def cmd_simulate(args, out, err):
    if args.strategy == "bisection":
        strategy = matrices.bisection_plan(args.n)
    elif args.matrix is not None:
        strategy = _read_matrix(args.matrix)
        if strategy.cols != args.n:
            raise DomainError(f"--n {args.n} does not match the matrix's {strategy.cols} columns")
    else:
        strategy = matrices.min_cost_binary(args.n, _resolve_m(args, args.n.bit_length()))
    est = channel.monte_carlo(strategy, args.mu, args.eps, args.trials, args.seed, args.noisy)
    for key in ("trials", "failures", "rate", "ci_low", "ci_high"):
        _emit(out, key, getattr(est, key))
    if args.eps is not None:
        _emit(out, "target", est.target)
        _emit(out, "meets_target", str(est.meets_target).lower())
    return EXIT_OK


def cmd_sweep(args, out, err):
    if args.n_values:
        n_values = tuple(int(v) for v in args.n_values.split(","))
    else:
        if args.n_min is None or args.n_max is None:
            raise ConfigError("give --n-min and --n-max, or --n-values")
        n_values = tuple(harness.powers_of_two(args.n_min, args.n_max))
    strategies = tuple(s.strip() for s in args.strategies.split(",") if s.strip())
    packing = None
    if "grid-packing" in strategies:
        packing = _packing(args)
    cfg = harness.SweepConfig(
        n_values=n_values,
        t_factor=args.t,
        strategies=strategies,
        packing=packing,
        seed=args.seed,
        output_path=args.out,
    )
    rows = harness.run_sweep(cfg)
    print(f"wrote {len(rows)} rows to {args.out}", file=err)
    return EXIT_OK


def lemma_summary(m_max: int):
    """Counts of (checked, failed) for each lemma up to ``m_max``."""
    l1 = [numkit.lemma1_verdict(m, r) for m in range(3, m_max + 1) for r in range(1, (m + 1) // 2)]
    l2 = [numkit.lemma2_verdict(m, r) for m in range(2, m_max + 1) for r in range(1, m)]
    l3 = []
    for i in range(1000):
        p = 0.001 + (0.499 - 0.001) * i / 999
        l3.append(numkit.lemma3_verdict(p, 2 + i % 9))
    return {
        name: (len(vs), sum(not v.holds for v in vs))
        for name, vs in (("lemma1", l1), ("lemma2", l2), ("lemma3", l3))
    }


def cmd_lemmas(args, out, err):
    if args.m_max < 2:
        raise DomainError(f"--m-max must be at least 2, got {args.m_max}")
    ok = True
    for name, (checked, failed) in lemma_summary(args.m_max).items():
        verdict = "pass" if failed == 0 else "FAIL"
        ok = ok and failed == 0
        print(f"{name}: {verdict} ({checked} checked, {failed} failed)", file=out)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_chart(args, out, err):
    svg = harness.render_chart(harness.read_sweep_csv(args.csv))
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="l0sense",
        description="l0 cost of one-sparse sensing: constructions, bounds and simulation",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("construct", help="build a sensing matrix and write it as SENSEMAT")
    p.add_argument("--kind", required=True, choices=CONSTRUCT_KINDS)
    p.add_argument("--n", type=int, required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--m", type=int)
    group.add_argument("--t", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("cost", help="l0 cost and column-weight histogram of a matrix file")
    p.add_argument("--matrix", required=True)
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("bounds", help="evaluate a lower bound")
    p.add_argument("--regime", required=True, choices=("binary", "noisy", "higher-m", "ksparse"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--tau", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--c-m", dest="c_m", type=float)
    p.add_argument("--scale-c", dest="scale_c", type=float, default=1.0)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("simulate", help="Monte Carlo support-recovery error rate")
    p.add_argument("--strategy", required=True, choices=("nonadaptive", "bisection"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--matrix")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--m", type=int)
    group.add_argument("--t", type=float)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--noisy", action="store_true")
    p.add_argument("--eps", type=float, help="target error rate to compare against")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="cost sweep over powers of two, written as CSV")
    p.add_argument("--n-min", dest="n_min", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--n-values", dest="n_values", help="explicit comma-separated N list")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--strategies", required=True)
    p.add_argument("--tau", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("lemmas", help="exhaustive checks of the binomial/entropy brackets")
    p.add_argument("--m-max", dest="m_max", type=int, required=True)
    p.set_defaults(func=cmd_lemmas)

    p = sub.add_parser("chart", help="SVG chart of a sweep CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_chart)
    return parser


def cli_main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args, out, err)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=err)
        return EXIT_INFEASIBLE
    except (MatrixParseError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_IO
    except (DomainError, ConfigError, InvalidMatrixError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
