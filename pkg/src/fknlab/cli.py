"""Command-line surface: analyze, decompose, check, sweep, example, probe.

Exit codes: 0 = everything checked holds, 1 = usage or input error,
2 = an inequality violation was found.  All numbers print as exact
rationals unless --decimal asks for 15 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from . import bounds, cube, rv, sweep
from .errors import FknLabError, ParseError

_CHECK_IDS = ("lemma4", "lemma5", "lemma7", "claim8", "claim9", "theorem1")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 1
        raise _UsageError(message)


def _formatter(decimal: bool):
    def fmt(value):
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, (Fraction, float)) and decimal:
            return f"{float(value):.15g}"
        return str(value)

    return fmt


def _print_report(report: bounds.BoundReport, fmt) -> None:
    print(f"lhs={fmt(report.lhs)}")
    print(f"rhs={fmt(report.rhs)}")
    ratio = report.ratio
    print(f"ratio={fmt(ratio) if ratio is not None else ''}")
    print(f"holds={fmt(report.holds)}")
    for key, value in report.witness.items():
        print(f"witness.{key}={fmt(value)}")


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc}") from None


def _read_partition(args, m: int) -> cube.Partition:
    if args.partition is not None:
        return cube.parse_partition(args.partition, m)
    if args.partition_file is not None:
        for line in _read_text(args.partition_file).splitlines():
            stripped = line.strip()
            if stripped and not stripped.startswith("#"):
                return cube.parse_partition(stripped, m)
        raise ParseError(f"no partition line in {args.partition_file}")
    raise _UsageError("need --partition or --partition-file")


def _constants(args) -> bounds.Constants:
    defaults = bounds.DEFAULT_CONSTANTS
    return bounds.Constants(
        k0=Fraction(args.K0) if args.K0 else defaults.k0,
        k1=Fraction(args.K1) if args.K1 else defaults.k1,
        k2=Fraction(args.K2) if args.K2 else defaults.k2,
    )


def _add_constant_flags(parser) -> None:
    parser.add_argument("--K0", help="override the abs-variance transfer constant (default 4)")
    parser.add_argument("--K1", help="override the two-variable constant (default 20480)")
    parser.add_argument("--K2", help="override the sequence constant (default 61440)")


def _cmd_analyze(args) -> int:
    fmt = _formatter(args.decimal)
    f = cube.parse_boolean_function(_read_text(args.table))
    partition = _read_partition(args, f.m)
    outcome = bounds.corollary2_apply(f, partition, _constants(args))
    print(f"m={f.m}")
    print(f"coeff_empty={fmt(outcome.coeff_empty)}")
    print(f"variance={fmt(outcome.var_f)}")
    print(f"cross_weight={fmt(outcome.cross_weight)}")
    print(f"epsilon={fmt(outcome.epsilon)}")
    print(f"k={outcome.k + 1}")
    block = ",".join(str(i) for i in sorted(partition.blocks[outcome.k]))
    print(f"k_block={block}")
    print(f"dist={fmt(outcome.dist)}")
    print(f"bound={fmt(outcome.bound)}")
    print(f"holds={fmt(outcome.holds)}")
    return 0 if outcome.holds else 2


def _cmd_decompose(args) -> int:
    fmt = _formatter(args.decimal)
    variable = rv.parse_rv(_read_text(args.rv_file))
    components = rv.two_point_decompose(variable)
    print(f"components={len(components)}")
    for i, (weight, component) in enumerate(components, start=1):
        atoms = rv.format_rv_inline(component.to_rv())
        print(
            f"component={i} weight={fmt(weight)} d={fmt(component.d)}"
            f" p={fmt(component.p)} atoms={atoms}"
        )
    return 0


def _cmd_check(args) -> int:
    fmt = _formatter(args.decimal)
    constants = _constants(args)
    e = Fraction(args.E) if args.E is not None else Fraction(0)
    files = args.rv_files
    target = args.inequality

    def load(path):
        return rv.parse_rv(_read_text(path))

    if target == "claim8":
        if len(files) != 1:
            raise _UsageError("claim8 takes one two-point RV file plus --x1/--x2")
        if args.x1 is None or args.x2 is None:
            raise _UsageError("claim8 requires --x1 and --x2")
        ybar = rv.TwoPointBalancedRV.from_rv(load(files[0]))
        report = bounds.claim8_check(Fraction(args.x1), Fraction(args.x2), ybar)
    elif target == "theorem1":
        if len(files) < 2:
            raise _UsageError("theorem1 needs at least two RV files")
        xs = [load(p) for p in files]
        report = bounds.theorem1_check(xs, constants)
        report = bounds.BoundReport(
            report.lhs,
            report.rhs,
            report.holds,
            {**report.witness, "k_file": files[report.witness["k"]]},
        )
    else:
        if len(files) != 2:
            raise _UsageError(f"{target} needs exactly two RV files")
        x, y = load(files[0]), load(files[1])
        if target == "lemma4":
            report = bounds.lemma4_bound(x, y, constants)
        elif target == "lemma5":
            report = bounds.lemma5_bound(x, y, constants)
        elif target == "lemma7":
            report = bounds.lemma7_bound(x, y, e, constants)
        else:
            report = bounds.claim9_bound(x, y, e)
    _print_report(report, fmt)
    return 0 if report.holds else 2


def _cmd_sweep(args) -> int:
    fmt = _formatter(args.decimal)
    if args.config:
        cfg = sweep.parse_sweep_config(_read_text(args.config))
    else:
        if not args.target:
            raise _UsageError("need --target or --config")
        cfg = sweep.SweepConfig(
            target=args.target,
            instance_count=args.n,
            seed=args.seed,
            support_min=args.support_min,
            support_max=args.support_max,
            value_lo=Fraction(args.value_lo),
            value_hi=Fraction(args.value_hi),
            denom_cap=args.denom_cap,
            constants=_constants(args),
            include_claim6=args.include_claim6,
            exhaustive_m=args.exhaustive_m,
        )
    if args.csv:
        cfg = replace(cfg, collect_rows=True)
    result = sweep.run_sweep(cfg)
    print(f"target={result.target}")
    print(f"instances={result.instances_run}")
    print(f"violations={len(result.violations)}")
    for line in result.violations[:20]:
        print(f"violation: {line}")
    if len(result.violations) > 20:
        print(f"... and {len(result.violations) - 20} more")
    if result.min_ratio is not None:
        print(f"min_ratio={fmt(result.min_ratio)}")
        print(f"min_ratio_instance={result.min_ratio_witness}")
    if result.empirical_constant is not None:
        print(f"empirical_constant={fmt(result.empirical_constant)}")
    if result.errors:
        print(f"errors={len(result.errors)}")
        for index, message in result.errors[:10]:
            print(f"error: instance={index} {message}")
    if args.csv:
        with open(args.csv, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["instance_id", "lhs", "rhs", "ratio", "holds", "witness"])
            writer.writerows(result.rows or ())
        print(f"csv={args.csv}")
    return 0 if not result.violations else 2


def _cmd_example(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if args.name == "tribes":
        if args.m is None or args.m < 1:
            raise _UsageError("tribes needs --m >= 1")
        f, partition = bounds.tribes_example(args.m)
        stem = f"tribes_m{args.m}"
        table_path = out_dir / f"{stem}.table"
        table_path.write_text(
            cube.format_boolean_function(
                f,
                comments=[
                    f"OR of two ANDs on disjoint {args.m}-variable blocks (-1 = true)",
                    f"generated by: fknlab example tribes --m {args.m}",
                ],
            )
        )
        partition_path = out_dir / f"{stem}.partition"
        partition_path.write_text(
            f"# block 1 = AND inputs, block 2 = AND inputs\n{cube.format_partition(partition)}\n"
        )
        written = [table_path, partition_path]
    elif args.name == "claim6":
        x, y = bounds.claim6_example()
        x_path = out_dir / "claim6_x.rv"
        y_path = out_dir / "claim6_y.rv"
        x_path.write_text(
            rv.format_rv(
                x,
                comments=[
                    "balanced pair forcing the abs-variance transfer constant >= 4/3",
                    "generated by: fknlab example claim6",
                ],
            )
        )
        y_path.write_text(
            rv.format_rv(y, comments=["generated by: fknlab example claim6"])
        )
        written = [x_path, y_path]
    else:
        raise _UsageError(f"unknown example {args.name!r}")
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_probe(args) -> int:
    fmt = _formatter(args.decimal)
    f = cube.parse_boolean_function(_read_text(args.table))
    partition = _read_partition(args, f.m)
    g, hs, dist = sweep.conjecture_probe(f, partition, budget=args.budget)
    print("experimental: exhaustive composition search; a result proves nothing")
    print(f"dist={fmt(dist)}")
    print(f"g={''.join('+' if v > 0 else '-' for v in g.table)}")
    for j, h in enumerate(hs, start=1):
        block = ",".join(str(i) for i in sorted(partition.blocks[j - 1]))
        print(f"h{j}[{block}]={''.join('+' if v > 0 else '-' for v in h.table)}")
    if dist == 0:
        print("note: exact composition found")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="fknlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="partition analysis of a truth table")
    analyze.add_argument("table", help="truth-table file (m=<int> header, +/- row)")
    analyze.add_argument("--partition", help="blocks like 1,2|3,4")
    analyze.add_argument("--partition-file")
    analyze.add_argument("--decimal", action="store_true")
    _add_constant_flags(analyze)
    analyze.set_defaults(func=_cmd_analyze)

    decompose = sub.add_parser("decompose", help="two-point decomposition of a balanced RV")
    decompose.add_argument("rv_file")
    decompose.add_argument("--decimal", action="store_true")
    decompose.set_defaults(func=_cmd_decompose)

    check = sub.add_parser("check", help="evaluate one inequality on explicit inputs")
    check.add_argument("inequality", choices=_CHECK_IDS)
    check.add_argument("rv_files", nargs="+")
    check.add_argument("--E", help="shift constant (rational), default 0")
    check.add_argument("--x1", help="claim8 evaluation point")
    check.add_argument("--x2", help="claim8 evaluation point")
    check.add_argument("--decimal", action="store_true")
    _add_constant_flags(check)
    check.set_defaults(func=_cmd_check)

    sweep_cmd = sub.add_parser("sweep", help="randomized/exhaustive inequality sweep")
    sweep_cmd.add_argument("--config", help="key=value config file")
    sweep_cmd.add_argument("--target", choices=sweep.TARGETS)
    sweep_cmd.add_argument("--n", type=int, default=10_000)
    sweep_cmd.add_argument("--seed", type=int, default=0)
    sweep_cmd.add_argument("--support-min", type=int, default=1)
    sweep_cmd.add_argument("--support-max", type=int, default=5)
    sweep_cmd.add_argument("--value-lo", default="-3")
    sweep_cmd.add_argument("--value-hi", default="3")
    sweep_cmd.add_argument("--denom-cap", type=int, default=12)
    sweep_cmd.add_argument("--include-claim6", action="store_true")
    sweep_cmd.add_argument("--exhaustive-m", type=int, default=3)
    sweep_cmd.add_argument("--csv", help="write per-instance rows to this file")
    sweep_cmd.add_argument("--decimal", action="store_true")
    _add_constant_flags(sweep_cmd)
    sweep_cmd.set_defaults(func=_cmd_sweep)

    example = sub.add_parser("example", help="write the extremal example files")
    example.add_argument("name", choices=("tribes", "claim6"))
    example.add_argument("--m", type=int)
    example.add_argument("--out-dir", default=".")
    example.set_defaults(func=_cmd_example)

    probe = sub.add_parser("probe", help="experimental composition search")
    probe.add_argument("table")
    probe.add_argument("--partition")
    probe.add_argument("--partition-file")
    probe.add_argument("--budget", type=int, default=10**7)
    probe.add_argument("--decimal", action="store_true")
    probe.set_defaults(func=_cmd_probe)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FknLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
