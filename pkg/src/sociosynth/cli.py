"""Command-line front end.

    sociosynth validate   --config CONFIG
    sociosynth generate   --config CONFIG --n N --seed S --out DIR [--dump-level-3]
    sociosynth analyze    --edges FILE [--levels 1,2] [--out FILE]
    sociosynth experiment --config CONFIG [--sizes 1e3,1e4] [--reps R] --out DIR

CONFIG is a YAML file or the name of a bundled config (``example-city``).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import yaml

from . import io
from .config import (
    ConfigError,
    ConfigValidationError,
    config_from_dict,
    example_config_text,
    resolve_config,
    serialize,
    validate,
)
from .experiment import ExperimentPlan, format_csv, run_experiment, write_results
from .metrics import DEFAULT_ECCENTRICITY_CUTOFF, DisconnectedGraphError, measure
from .pipeline import generate

COMMANDS = ("validate", "generate", "analyze", "experiment")
ANALYZE_COLUMNS = ("n", "seed", "mean_deg", "max_deg", "exponent", "r_squared", "fit_lo",
                   "fit_hi", "radius", "diameter", "cc_local", "cc_global")


class CliError(ValueError):
    pass


@dataclass(frozen=True)
class CommandSpec:
    command: str
    config: str = "example-city"
    out: Path | None = None
    seed: int = 0
    n: int | None = None
    edges: Path | None = None
    levels: tuple[int, ...] = (1, 2)
    dump_level_3: bool = False
    ecc_cutoff: int = DEFAULT_ECCENTRICITY_CUTOFF
    reps: int | None = None
    sizes: tuple[int, ...] | None = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(f"{self.prog}: {message}")


def _size(text: str) -> int:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value.is_integer():
        raise argparse.ArgumentTypeError(f"not an integer size: {text!r}")
    return int(value)


def _sizes(text: str) -> tuple[int, ...]:
    return tuple(sorted({_size(x) for x in text.split(",") if x.strip()}))


def _levels(text: str) -> tuple[int, ...]:
    try:
        levels = tuple(sorted({int(x) for x in text.split(",") if x.strip()}))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad level list: {text!r}") from None
    if not levels or not set(levels) <= {1, 2, 3}:
        raise argparse.ArgumentTypeError("levels must be a non-empty subset of 1,2,3")
    return levels


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sociosynth", description="Synthetic social graphs from demographic tables.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    def config_arg(p):
        p.add_argument("--config", default="example-city",
                       help="YAML config file or bundled config name (default: example-city)")

    p = sub.add_parser("validate", help="check a config and list violations")
    config_arg(p)

    p = sub.add_parser("generate", help="generate one graph and dump it")
    config_arg(p)
    p.add_argument("--n", type=_size, required=True, help="number of individuals (>= 2)")
    p.add_argument("--seed", type=int, default=0, help="run seed (default: 0)")
    p.add_argument("--out", type=Path, default=Path("sociosynth-out"),
                   help="output directory (default: sociosynth-out)")
    p.add_argument("--dump-level-3", action="store_true",
                   help="also write expanded school/company cliques as level-3 edges")

    p = sub.add_parser("analyze", help="measure a dumped edge list")
    p.add_argument("--edges", type=Path, required=True, help="edge-list dump to read")
    p.add_argument("--levels", type=_levels, default=(1, 2), help="levels to analyze (default: 1,2)")
    p.add_argument("--ecc-cutoff", type=int, default=DEFAULT_ECCENTRICITY_CUTOFF,
                   help=f"skip radius/diameter above this size (default: {DEFAULT_ECCENTRICITY_CUTOFF})")
    p.add_argument("--out", type=Path, help="CSV file to write (default: stdout)")

    p = sub.add_parser("experiment", help="multi-size, multi-run metrics")
    config_arg(p)
    p.add_argument("--sizes", type=_sizes, help="comma-separated sizes, e.g. 1e3,1e4 "
                   "(default: 7 sizes log-uniform in 1e3..1e6)")
    p.add_argument("--reps", type=int, help="runs per size (default: 30 at 1e3 down to 5 at 1e6)")
    p.add_argument("--seed", type=int, default=0, help="base seed (default: 0)")
    p.add_argument("--levels", type=_levels, default=(1, 2), help="levels to analyze (default: 1,2)")
    p.add_argument("--ecc-cutoff", type=int, default=DEFAULT_ECCENTRICITY_CUTOFF,
                   help=f"skip radius/diameter above this size (default: {DEFAULT_ECCENTRICITY_CUTOFF})")
    p.add_argument("--out", type=Path, default=Path("sociosynth-experiment"),
                   help="output directory (default: sociosynth-experiment)")
    return parser


def _config_exists(ref: str) -> bool:
    if Path(ref).is_file():
        return True
    try:
        example_config_text(ref)
    except (FileNotFoundError, OSError):
        return False
    return True


def parse_cli(argv: Sequence[str]) -> CommandSpec:
    args = build_parser().parse_args(list(argv))
    fields = {k: v for k, v in vars(args).items() if v is not None}
    spec = CommandSpec(**fields)
    if spec.command == "generate" and spec.n < 2:
        raise CliError(f"--n must be at least 2, got {spec.n}")
    if spec.command in ("validate", "generate", "experiment") and not _config_exists(spec.config):
        raise CliError(f"cannot read config {spec.config!r}")
    if spec.sizes is not None and (not spec.sizes or spec.sizes[0] < 2):
        raise CliError("--sizes must list sizes of at least 2")
    if spec.reps is not None and spec.reps < 1:
        raise CliError("--reps must be at least 1")
    if spec.ecc_cutoff < 0:
        raise CliError("--ecc-cutoff must be non-negative")
    return spec


def _validate(spec: CommandSpec) -> int:
    path = Path(spec.config)
    text = path.read_text(encoding="utf-8") if path.is_file() else example_config_text(spec.config)
    try:
        config = config_from_dict(yaml.safe_load(text))
    except yaml.YAMLError as exc:
        raise ConfigError("", f"parse error: {exc}") from None
    violations = validate(config)
    for v in violations:
        print(v)
    if not violations:
        print(f"{spec.config}: ok")
    return 1 if violations else 0


def _generate(spec: CommandSpec) -> int:
    config = resolve_config(spec.config)
    gen = generate(config, spec.n, spec.seed)
    spec.out.mkdir(parents=True, exist_ok=True)
    io.write_edge_list(spec.out / "edges.csv", gen.graph, spec.dump_level_3)
    io.write_memberships(spec.out / "members.csv", gen.groups)
    report = {"n": spec.n, "seed": spec.seed, "config": config.name, **gen.report()}
    io.write_report(spec.out / "report.json", report)
    (spec.out / "config.yaml").write_text(serialize(config), encoding="utf-8", newline="\n")
    print(f"wrote {spec.out}/edges.csv ({sum(len(e) for e in gen.graph.levels.values())} edges), "
          f"members.csv, report.json, config.yaml")
    return 0


def _analyze(spec: CommandSpec) -> int:
    dump = io.read_edge_list(spec.edges)
    view = dump.view(spec.levels)
    rec = measure(view, dump.seed, eccentricity_cutoff=spec.ecc_cutoff)
    lo, hi = rec.fit_range or (None, None)
    row = (rec.n, rec.seed, rec.mean_degree, rec.max_degree, rec.exponent, rec.r_squared, lo, hi,
           rec.radius, rec.diameter, rec.cc_local, rec.cc_global)
    text = format_csv(ANALYZE_COLUMNS, [row])
    if spec.out is None:
        sys.stdout.write(text)
    else:
        spec.out.write_text(text, encoding="utf-8", newline="\n")
    return 0


def _experiment(spec: CommandSpec) -> int:
    config = resolve_config(spec.config)
    kwargs = {} if spec.sizes is None else {"sizes": spec.sizes}
    plan = ExperimentPlan(repetitions=spec.reps, eccentricity_cutoff=spec.ecc_cutoff,
                          base_seed=spec.seed, levels=spec.levels, **kwargs)
    summaries = run_experiment(plan, config)
    write_results(spec.out, summaries)
    (spec.out / "config.yaml").write_text(serialize(config), encoding="utf-8", newline="\n")
    for s in summaries:
        row = s.row()
        parts = [f"n={s.n}", f"runs={row['runs']}", f"mean_deg={row['mean_deg']:.3f}"]
        if row["exponent"] is not None:
            parts.append(f"exponent={row['exponent']:.2f}")
        if row["diameter"] is not None:
            parts.append(f"radius={row['radius']:.2f} diameter={row['diameter']:.2f}")
        parts.append(f"cc_local={row['cc_local']:.4f}")
        print(" ".join(parts))
    return 0


def run_command(spec: CommandSpec) -> int:
    handler = {"validate": _validate, "generate": _generate,
               "analyze": _analyze, "experiment": _experiment}[spec.command]
    return handler(spec)


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        spec = parse_cli(argv)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return run_command(spec)
    except ConfigValidationError as exc:
        for v in exc.violations:
            print(v, file=sys.stderr)
        return 1
    except (ConfigError, io.DumpFormatError, DisconnectedGraphError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
