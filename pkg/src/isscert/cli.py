"""Command line entry point: ``isscert {build-map,certify,bench,compare}``.

Values come from three layers, later ones winning: built-in defaults, the
``--config`` TOML file, then flags given explicitly on the command line.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .config import SCHEMA, apply_config, read_config
from .decline import DeclineBudget, DeclineKind
from .errors import ConfigurationError, InvariantViolation
from .harness import (COMPARE_COLUMNS, PER_INPUT_COLUMNS, ExperimentConfig, compare_reports,
                      run_experiment)
from .mapping import DEFAULT_DELTA, atomic_write_text, build_mapping, read_mapping, write_mapping
from .oracle import PopulationKind

EXIT_ERROR = 1
EXIT_INVARIANT = 3

_CSV_HELP = f"""\
output files (written to --out-dir):
  per_input.csv  {', '.join(PER_INPUT_COLUMNS)}
  summary.csv    method, avg_samples, ACR, MAD, CA@<r> per radius, abstain_rate, expected_MAD
  summary.json   the same numbers plus the resolved config
  timing.json    wall-clock seconds (kept apart so the CSVs are reproducible)
  compare.csv    {', '.join(COMPARE_COLUMNS)}

config keys (flat TOML): {', '.join(SCHEMA)}, law_<name>
"""


def _common(p):
    p.add_argument("--config", metavar="FILE", help="flat TOML config; explicit flags win over it")
    p.add_argument("--seed", type=int, default=None, help="master seed")
    p.add_argument("--out-dir", default=None, help="output directory")


def _experiment_flags(p):
    p.add_argument("--population", choices=[k.value for k in PopulationKind], default=None)
    p.add_argument("--count", type=int, default=None, help="number of simulated inputs")
    p.add_argument("--labels", type=int, default=None, help="label count")
    p.add_argument("--accuracy", type=float, default=None)
    p.add_argument("--population-seed", type=int, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--budget", action="append", default=None, metavar="KIND:U",
                   help="decline budget such as ad:0.05 or rd:0.1 (repeatable)")
    p.add_argument("--k-bar", type=int, default=None)
    p.add_argument("--k0-fraction", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--table", action="append", default=None, metavar="FILE",
                   help="prebuilt mapping table to use instead of building one (repeatable)")
    p.add_argument("--workers", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isscert", description="Input-specific sampling certification for randomized smoothing.",
        epilog=_CSV_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-map", help="build and save a sample-size mapping table")
    _common(p)
    p.add_argument("--kind", choices=["ad", "rd"], default=None)
    p.add_argument("--bound", type=float, default=None)
    p.add_argument("--k-bar", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--out", default=None, help="table file (default: <out-dir>/map-<kind>-<bound>.json)")

    p = sub.add_parser("certify", help="certify one population and write per_input.csv",
                       epilog=_CSV_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    _common(p)
    _experiment_flags(p)

    p = sub.add_parser("bench", help="run the paired ISS/IAS protocol and write all reports",
                       epilog=_CSV_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    _common(p)
    _experiment_flags(p)
    p.add_argument("--ias-size", type=int, action="append", default=None,
                   help="extra fixed IAS sample size to compare (repeatable)")
    p.add_argument("--no-match-iss", action="store_true", default=None,
                   help="skip IAS at the realized ISS average sample size")
    p.add_argument("--radii", type=float, nargs="+", default=None, help="CA(r) radius grid")

    p = sub.add_parser("compare", help="join two bench reports into compare.csv")
    _common(p)
    p.add_argument("reports", nargs=2, metavar="REPORT_DIR")
    return parser


def _resolve(args) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config:
        cfg = apply_config(cfg, read_config(args.config))
    pop = cfg.population
    pop_flags = {"kind": args.population, "count": args.count, "label_count": args.labels,
                 "accuracy": args.accuracy, "seed": args.population_seed}
    pop = replace(pop, **{k: v for k, v in pop_flags.items() if v is not None})
    flags = {
        "sigma": args.sigma, "alpha": args.alpha, "k_bar": args.k_bar,
        "k0_fraction": args.k0_fraction, "delta": args.delta, "workers": args.workers,
        "master_seed": args.seed, "out_dir": args.out_dir,
    }
    if args.budget is not None:
        flags["budgets"] = tuple(DeclineBudget.parse(b) for b in args.budget)
    if getattr(args, "ias_size", None) is not None:
        flags["ias_sizes"] = tuple(args.ias_size)
    if getattr(args, "no_match_iss", None):
        flags["match_iss"] = False
    if getattr(args, "radii", None) is not None:
        flags["radii"] = tuple(args.radii)
    cfg = replace(cfg, population=pop, **{k: v for k, v in flags.items() if v is not None})
    return cfg.validate()


def _load_tables(paths, cfg):
    tables = {}
    for path in paths or ():
        try:
            table = read_mapping(path, expect_k_bar=cfg.k_bar, expect_alpha=cfg.alpha)
        except OSError as exc:
            raise ConfigurationError(f"cannot read table {path}: {exc}") from None
        if table.budget.kind is DeclineKind.ABSOLUTE and table.sigma != cfg.sigma:
            raise ConfigurationError(f"table {path} was built for sigma={table.sigma}")
        if table.delta != cfg.delta:
            raise ConfigurationError(f"table {path} was built for delta={table.delta}")
        tables[table.budget] = table
    missing = set(tables) - set(cfg.budgets)
    if missing:
        raise ConfigurationError(f"tables supplied for budgets not in the config: "
                                 f"{sorted(str(b) for b in missing)}")
    return tables


def _out_dir(cfg_out):
    return Path(cfg_out) if cfg_out else Path(".")


def cmd_build_map(args):
    cfg = ExperimentConfig()
    if args.config:
        cfg = apply_config(cfg, read_config(args.config))
    budget = cfg.budgets[0]
    kind = DeclineKind.parse(args.kind) if args.kind else budget.kind
    bound = args.bound if args.bound is not None else budget.bound
    budget = DeclineBudget(kind, bound)
    k_bar = args.k_bar if args.k_bar is not None else cfg.k_bar
    alpha = args.alpha if args.alpha is not None else cfg.alpha
    sigma = args.sigma if args.sigma is not None else cfg.sigma
    delta = args.delta if args.delta is not None else (cfg.delta or DEFAULT_DELTA)
    table = build_mapping(delta, budget, k_bar, sigma, alpha)
    out = args.out or _out_dir(args.out_dir or cfg.out_dir) / f"map-{kind.short.lower()}-{bound:g}.json"
    write_mapping(table, out)
    print(out)


def cmd_certify(args):
    cfg = replace(_resolve(args), ias_sizes=(), match_iss=False)
    report = run_experiment(replace(cfg, out_dir=None), _load_tables(args.table, cfg))
    out = _out_dir(cfg.out_dir) / "per_input.csv"
    atomic_write_text(out, report.per_input_csv())
    print(out)


def cmd_bench(args):
    cfg = _resolve(args)
    cfg = replace(cfg, out_dir=str(_out_dir(cfg.out_dir)))
    report = run_experiment(cfg, _load_tables(args.table, cfg))
    sys.stdout.write(report.summary_csv())


def cmd_compare(args):
    text = compare_reports(*args.reports)
    out_dir = args.out_dir
    if out_dir is None and args.config:
        out_dir = read_config(args.config).get("out_dir")
    out = _out_dir(out_dir) / "compare.csv"
    atomic_write_text(out, text)
    sys.stdout.write(text)


COMMANDS = {"build-map": cmd_build_map, "certify": cmd_certify, "bench": cmd_bench,
            "compare": cmd_compare}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except InvariantViolation as exc:
        print(f"isscert: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ValueError, OSError) as exc:
        print(f"isscert: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
