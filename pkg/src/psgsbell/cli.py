"""Command line entry point: ``psgsbell <subcommand>``.

Exit codes: 0 success, 1 failed oracle checks, 2 configuration error,
3 physics-domain error, 4 no converged optimizer row.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import bell, sweep
from .fidelity import max_fidelity_curve
from .oracle import CutoffError, DEFAULT_CUTOFF
from .quasiprob import PhysicsDomainError

EXIT_OK = 0
EXIT_CHECKS = 1
EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_NOT_CONVERGED = 4

# axis used when a single point is evaluated with ``bell``
DEFAULT_AXIS = {
    "vacuum": "alpha",
    "psgs": "alpha",
    "scs": "alpha",
    "kim": "T",
    "lossy": "T",
    "dark": "pm",
}

LABELS = {
    bell.CHSH: "|B_CHSH| max (classical bound 2)",
    bell.CH: "B_CH max, signed (violation if > 0)",
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="optimizer seed")
    p.add_argument("--starts", type=int, default=None, help="Sobol starts per optimization")
    p.add_argument("--out", default=None, help="output CSV path (stdout if omitted)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    p.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF, help="Fock cutoff for oracle checks")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="psgsbell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fidelity", help="maximized cat-state fidelity curve as alpha,F CSV")
    p.add_argument("--grid", default="0.01:2.5:0.01", help="alpha grid, list or start:stop:step")
    _common(p)

    p = sub.add_parser("bell", help="optimize one Bell functional for one state")
    p.add_argument("functional", choices=bell.FUNCTIONALS)
    p.add_argument("--state", required=True, choices=sweep.STATES)
    p.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE",
        help="state parameter, repeatable (e.g. --set r=0.3 --set T=0.9)",
    )
    _common(p)

    p = sub.add_parser("sweep", help="run every scenario of an INI config file")
    p.add_argument("config")
    _common(p)

    p = sub.add_parser("fig", help="data for a figure panel")
    p.add_argument("n", type=int, choices=sorted(sweep.FIGURE_VARIANTS))
    p.add_argument("variant", nargs="?", default=None)
    _common(p)

    p = sub.add_parser("oracle", help="closed forms versus the Fock oracle")
    p.add_argument("action", choices=["check"])
    p.add_argument("--no-normalization", action="store_true", help="skip the quadrature checks")
    _common(p)
    return parser


def _parse_sets(items: list[str]) -> dict[str, str]:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise sweep.ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _convergence_code(rows) -> int:
    rows = list(rows)
    if rows and not any(r.converged for r in rows):
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _write_rows(rows, out: str | None) -> None:
    if out:
        sweep.emit_csv(rows, out)
    else:
        sys.stdout.write(sweep.csv_text(rows))


def cmd_fidelity(args) -> int:
    pairs = max_fidelity_curve(sweep.parse_grid(args.grid))
    if args.out:
        sweep.emit_fidelity_csv(pairs, args.out)
    else:
        print(",".join(sweep.FIDELITY_HEADER))
        for a, f in pairs:
            print(f"{sweep.fmt(a)},{sweep.fmt(f)}")
    return EXIT_OK


def cmd_bell(args) -> int:
    params = _parse_sets(args.set)
    axis = DEFAULT_AXIS[args.state]
    value = params.pop(axis, "0" if args.state == "vacuum" else None)
    if value is None:
        raise sweep.ConfigError(f"state {args.state} needs --set {axis}=VALUE")
    mapping = {"state": args.state, "functional": args.functional, "axis": axis, "grid": value}
    if args.starts is not None:
        mapping["starts"] = str(args.starts)
    if args.seed is not None:
        mapping["seed"] = str(args.seed)
    mapping.update(params)
    s = sweep.scenario_from_mapping("bell", mapping)
    rows = sweep.run_scenario(s)
    row = rows[0]
    print(f"# {LABELS[args.functional]}: {sweep.fmt(row.bell_value)}", file=sys.stderr)
    _write_rows(rows, args.out)
    return _convergence_code(rows)


def _scenario_output(s: sweep.Scenario, args, many: bool) -> str | None:
    if args.out and many:
        os.makedirs(args.out, exist_ok=True)
        return os.path.join(args.out, f"{s.name}.csv")
    return args.out or s.output


def cmd_sweep(args) -> int:
    scenarios = sweep.load_config(args.config)
    many = len(scenarios) > 1
    all_rows = []
    for s in scenarios:
        s = sweep.with_overrides(s, args.starts, args.seed)
        out = _scenario_output(s, args, many)
        rows = sweep.run_scenario(s, jobs=args.jobs, out=out)
        if out is None:
            if many:
                print(f"# [{s.name}]")
            sys.stdout.write(sweep.csv_text(rows))
        all_rows.extend(rows)
    return _convergence_code(all_rows)


def cmd_fig(args) -> int:
    if args.n == 1:
        pairs = sweep.figure(1, args.variant, out=args.out)
        if not args.out:
            print(",".join(sweep.FIDELITY_HEADER))
            for a, f in pairs:
                print(f"{sweep.fmt(a)},{sweep.fmt(f)}")
        return EXIT_OK
    kw = {}
    if args.starts is not None:
        kw["starts"] = args.starts
    if args.seed is not None:
        kw["seed"] = args.seed
    try:
        s = sweep.figure_scenario(args.n, args.variant, **kw)
    except ValueError as exc:
        raise sweep.ConfigError(str(exc)) from None
    rows = sweep.run_scenario(s, jobs=args.jobs, out=args.out)
    if not args.out:
        sys.stdout.write(sweep.csv_text(rows))
    return _convergence_code(rows)


def cmd_oracle(args) -> int:
    from .checks import click_probability_check, format_table, run_all

    results = run_all(args.cutoff, normalization=not args.no_normalization)
    results.append(click_probability_check(cutoff=args.cutoff))
    print(format_table(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECKS


COMMANDS = {
    "fidelity": cmd_fidelity,
    "bell": cmd_bell,
    "sweep": cmd_sweep,
    "fig": cmd_fig,
    "oracle": cmd_oracle,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except sweep.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PhysicsDomainError, CutoffError) as exc:
        print(f"physics domain error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


if __name__ == "__main__":
    sys.exit(main())
