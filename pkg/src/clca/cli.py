"""Command-line entry point.

Every subcommand loads a project, runs one step of the pipeline and prints
a table (CSV or JSON) to stdout or to ``--out``. Failures print a JSON
object on stderr and exit with status 1.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from . import io as dio
from .engine import THREE_STAGE_GROUPS, stage_shares
from .errors import ClcaError, SchemaError
from .mode_factors import NO_SERVICING, STAGES
from .scenarios import (
    Scenario,
    break_even_ffes_ef,
    default_lifetime_grid,
    mix_model,
    sweep_lifetime,
    sweep_mix,
    sweep_servicing,
)
from .street_inventory import FLOW_ROWS, annualized_flows
from .survey_shift import aggregate, clean

DEFAULT_PROJECT = "paris-2019"


class Table:
    """Header, rows and optional scalar metadata of one command result."""

    def __init__(self, header: Sequence[str], rows: Sequence[Sequence[Any]], meta: dict | None = None):
        self.header = list(header)
        self.rows = [list(r) for r in rows]
        self.meta = meta or {}

    def render(self, fmt: str, fixture_diff: bool) -> str:
        if fmt == "json":
            def conv(v):
                if isinstance(v, float) and fixture_diff:
                    return dio.round_sig(v)
                return v

            payload = {
                "columns": self.header,
                "rows": [[conv(v) for v in r] for r in self.rows],
            }
            if self.meta:
                payload["meta"] = {k: conv(v) for k, v in self.meta.items()}
            return json.dumps(payload, indent=2) + "\n"
        return dio.table_to_text(self.header, self.rows, fixture_diff)


# ---------------------------------------------------------------- commands

def cmd_shift(args, project: dio.Project) -> Table:
    if args.survey:
        cfg = project.config
        kept, stats = clean(dio.load_survey(args.survey), cfg.walk_speed)
        population = cfg.population if args.population is None else args.population
        delta = aggregate(kept, None, population, cfg.walk_speed, project.kinematics, ffes_mode=cfg.ffes_mode)
        meta = {"records": stats.input_count, "kept": stats.kept, "fallbacks": delta.fallback_count}
    else:
        delta = project.delta(args.population)
        meta = {}
    meta.update(n=delta.n, population=float(delta.population))
    rows = [(m, float(delta[m]), float(delta.survey_sums[m])) for m in delta.modes]
    return Table(("mode", "delta_pkt_km", "survey_sum_km"), rows, meta)


def cmd_factors(args, project: dio.Project) -> Table:
    factors = project.factors()
    header = ["mode"] + [f"{s}_kg_pkt" for s in STAGES] + ["total_kg_pkt"]
    rows = [[m] + [float(v) for v in f.stages().values()] + [float(f.total)] for m, f in factors.items()]
    return Table(header, rows)


def cmd_assess(args, project: dio.Project) -> Table:
    study = project.study(args.population)
    report = study.assess()
    header = ["mode"] + [f"{s}_kg" for s in STAGES] + ["total_kg"]
    rows = [[m] + [float(c[s]) for s in STAGES] + [float(report.per_mode[m])]
            for m, c in report.contributions.items()]
    stages = report.stage_totals()
    rows.append(["total"] + [float(stages[s]) for s in STAGES] + [float(report.total)])
    meta = {"population": float(report.population), "period": report.period, "scenario": report.scenario}
    meta.update({f"share_{g}": v for g, v in stage_shares(report, THREE_STAGE_GROUPS).items()})
    return Table(header, rows, meta)


def cmd_sweep(args, project: dio.Project) -> Table:
    study = project.study(args.population)
    if args.parameter == "lifetime":
        grid = args.values or default_lifetime_grid(args.points)
        result = sweep_lifetime(study, grid, max_workers=args.workers)
        return Table(("lifetime_km", "total_kg"), [(float(v), float(t)) for v, t in result.rows()],
                     {"c0": result.fit["c0"], "c1": result.fit["c1"]})
    if args.parameter == "servicing":
        scenarios = list(project.servicing.values())
        if args.include_none:
            scenarios.append(NO_SERVICING)
        result = sweep_servicing(study, scenarios, max_workers=args.workers)
        return Table(("servicing", "total_kg"), [(v, float(t)) for v, t in result.rows()])
    mixes = project.mixes()
    codes = args.codes or list(mixes)
    unknown = [c for c in codes if c not in mixes]
    if unknown:
        raise dio.ConfigurationError("unknown electricity mix(es): " + ", ".join(unknown))
    chosen = [mixes[c] for c in codes]
    result = sweep_mix(study, chosen, max_workers=args.workers)
    rows = [(mx.code, float(mx.intensity), float(t)) for mx, t in zip(chosen, result.totals)]
    return Table(("mix", "intensity_kg_kwh", "total_kg"), rows,
                 {"alpha": result.fit["alpha"], "beta": result.fit["beta"]})


def cmd_breakeven(args, project: dio.Project) -> Table:
    study = project.study(args.population)
    if args.target == "mix":
        model = mix_model(study)
        value = model.break_even()
        return Table(("quantity", "value"), [("break_even_intensity_kg_kwh", float(value)),
                                             ("alpha_kg", float(model.alpha)),
                                             ("beta_kg_per_kg_kwh", float(model.beta))])
    value = break_even_ffes_ef(study)
    current = study.factors()[study.ffes_mode].total
    return Table(("quantity", "value"), [("break_even_ffes_ef_kg_pkt", float(value)),
                                         ("current_ffes_ef_kg_pkt", float(current))])


def cmd_infra(args, project: dio.Project) -> Table:
    key = args.street.replace("-", "_")
    if key not in project.streets:
        known = ", ".join(sorted(project.streets)) or "none"
        raise dio.ConfigurationError(f"unknown street {args.street!r} (known: {known})")
    spec = project.streets[key]
    flows = annualized_flows(spec)
    return Table(("flow", key), [(name, float(flows[name])) for name in FLOW_ROWS],
                 {"functional_unit": spec.functional_unit})


# ---------------------------------------------------------------- parser

def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--project", default=DEFAULT_PROJECT,
                        help="project file, directory or bundled fixture name (default: %(default)s)")
    common.add_argument("--out", type=Path, help="write the result to this file instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), help="output format (default: project setting)")
    common.add_argument("--fixture-diff", action="store_true",
                        help="round numbers to 3 significant figures for comparison with reference tables")

    parser = argparse.ArgumentParser(prog="clca", description="Consequential LCA of a modal shift.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("shift", parents=[common], help="population-scaled pkt shift per mode")
    p.add_argument("--population", type=_positive_float)
    p.add_argument("--survey", type=Path, help="raw survey records to aggregate instead of the project's")
    p.set_defaults(func=cmd_shift)

    p = sub.add_parser("factors", parents=[common], help="emission factor table per mode and stage")
    p.set_defaults(func=cmd_factors)

    p = sub.add_parser("assess", parents=[common], help="marginal impact per mode and stage")
    p.add_argument("--population", type=_positive_float)
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("sweep", parents=[common], help="one-at-a-time sensitivity sweep")
    p.add_argument("parameter", choices=("lifetime", "servicing", "mix"))
    p.add_argument("--population", type=_positive_float)
    p.add_argument("--values", type=_positive_float, nargs="+", help="lifetime grid in km")
    p.add_argument("--points", type=int, default=25, help="size of the default lifetime grid")
    p.add_argument("--codes", nargs="+", help="electricity mixes to include")
    p.add_argument("--include-none", action="store_true", help="add a scenario without servicing")
    p.add_argument("--workers", type=int, default=None, help="evaluate sweep points in parallel")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("breakeven", parents=[common], help="value that zeroes the marginal impact")
    p.add_argument("target", choices=("mix", "ffes"))
    p.add_argument("--population", type=_positive_float)
    p.set_defaults(func=cmd_breakeven)

    p = sub.add_parser("infra", help="street inventory")
    infra = p.add_subparsers(dest="infra_command", required=True)
    q = infra.add_parser("flows", parents=[common], help="annualized flows of a street structure")
    q.add_argument("street")
    q.set_defaults(func=cmd_infra)
    return parser


def _error_payload(exc: BaseException) -> dict:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, SchemaError):
        payload.update(path=exc.path, row=exc.row, column=exc.column)
    record_id = getattr(exc, "record_id", None)
    if record_id is not None:
        payload["record"] = str(record_id)
    return payload


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        project = dio.load_project(args.project)
        table = args.func(args, project)
        fmt = args.format or project.config.output_format
        text = table.render(fmt, args.fixture_diff)
        if args.out:
            args.out.parent.mkdir(parents=True, exist_ok=True)
            args.out.write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    except (ClcaError, ValueError, KeyError, OSError) as exc:
        sys.stderr.write(json.dumps(_error_payload(exc), sort_keys=True) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
