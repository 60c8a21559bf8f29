"""Command-line front end.

Verbs: validate, gauges, collapse, metrics, classify, sweep, catalog.
Reports are machine-readable JSON (schema "gaugesim/1"); sweeps can also be
CSV.  Exit codes: 0 success, 2 validation failure, 3 infeasible, 64 usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction

from . import catalog, collapse, metrics, solver
from .errors import GaugeSimError, Infeasible, ValidationError
from .ignition import bell_support
from .model import ProbabilitySystem, load_system
from .scalars import format_value

SCHEMA = "gaugesim/1"

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_USAGE = 64


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; remap to the documented code
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.handler(args)
    except Infeasible as exc:
        _emit({"schema": SCHEMA, "error": "infeasible", "detail": str(exc),
               "gammas": list(exc.gammas)}, args)
        return EXIT_INFEASIBLE
    except GaugeSimError as exc:
        _emit({"schema": SCHEMA, "error": type(exc).__name__, "detail": str(exc)}, args)
        return EXIT_INVALID
    except FileNotFoundError as exc:
        _emit({"schema": SCHEMA, "error": "file-not-found", "detail": str(exc)}, args)
        return EXIT_INVALID


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="gaugesim",
        description="contextual probability systems: validation, gauges, collapse, metrics",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_common(p, system=True):
        if system:
            group = p.add_mutually_exclusive_group(required=True)
            group.add_argument("--system", help="path to a system JSON file")
            group.add_argument("--catalog", help="catalog system name")
            p.add_argument("--param", action="append", default=[],
                           metavar="NAME=VALUE", help="catalog parameter override")
        p.add_argument("--out", help="write the report to this path")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("validate", help="structural and consistency checks")
    add_common(p)
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("gauges", help="solve gauge distributions")
    add_common(p)
    p.add_argument("--support", default="full",
                   help="full | double-plateau | path to a JSON list of states")
    p.add_argument("--steps", default="auto",
                   help="1 forces one-step; auto searches for the minimum")
    p.set_defaults(handler=_cmd_gauges)

    p = sub.add_parser("collapse", help="simulate collapses")
    add_common(p)
    p.add_argument("--settings", required=True, help="comma-separated setting per region")
    p.add_argument("--runs", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plan", help="collapse plan, e.g. '2,final'")
    p.add_argument("--force-gauge", type=int, dest="force_gauge",
                   help="fixed gauge configuration index")
    p.set_defaults(handler=_cmd_collapse)

    p = sub.add_parser("metrics", help="entropy and inequality report")
    add_common(p)
    p.add_argument("--settings", help="comma-separated setting per region")
    p.set_defaults(handler=_cmd_metrics)

    p = sub.add_parser("classify", help="separable / quantum-compatible / super-quantum")
    add_common(p)
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("sweep", help="sweep a catalog parameter")
    add_common(p)
    p.add_argument("--parameter", default="eps")
    p.add_argument("--values", help="comma-separated parameter values")
    p.add_argument("--locate-tsirelson", action="store_true",
                   help="bisect the parameter where conditioned CHSH crosses 2*sqrt(2)")
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("catalog", help="list, show or emit catalog systems")
    p.add_argument("action", choices=("list", "show", "emit"))
    p.add_argument("name", nargs="?")
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--out", help="write the report to this path")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(handler=_cmd_catalog)

    return parser


def _load(args):
    if getattr(args, "system", None):
        return load_system(args.system)
    params = _parse_params(args.param)
    return catalog.build(args.catalog, **params)


def _parse_params(pairs):
    params = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValidationError(f"parameter override must be NAME=VALUE, got {pair!r}")
        name, value = pair.split("=", 1)
        params[name.strip()] = value.strip()
    return params


def _emit(payload, args):
    out_path = getattr(args, "out", None)
    if getattr(args, "format", "json") == "csv" and "rows" in payload:
        text = _rows_to_csv(payload["rows"])
    else:
        text = json.dumps(payload, indent=2, default=_jsonable) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _jsonable(value):
    if isinstance(value, Fraction):
        return format_value(value)
    raise TypeError(f"cannot serialize {value!r}")


def _rows_to_csv(rows):
    buffer = io.StringIO()
    if rows:
        writer = csv.DictWriter(buffer, fieldnames=list(rows[0]))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: format_value(v) if isinstance(v, Fraction) else v
                             for k, v in row.items()})
    return buffer.getvalue()


def _settings_vector(system, text):
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != system.n:
        raise ValidationError(f"expected {system.n} settings, got {len(parts)}")
    out = []
    for p in parts:
        out.append(system.setting_index(int(p) if p.isdigit() else p))
    return tuple(out)


def _cmd_validate(args):
    from .model import is_locally_consistent

    system = _load(args)
    report = is_locally_consistent(system)
    _emit({
        "schema": SCHEMA,
        "verb": "validate",
        "n": system.n,
        "k": system.num_settings,
        "scalar": system.backend,
        "locally_consistent": bool(report),
        "max_deviation": report.max_deviation,
    }, args)
    return EXIT_OK if report else EXIT_INVALID


def _cmd_gauges(args):
    system = _load(args)
    support = _resolve_support(args.support, system)
    if args.steps == "auto":
        certificate = collapse.find_min_steps(system)
        payload = {
            "schema": SCHEMA,
            "verb": "gauges",
            "steps": certificate.steps,
            **certificate.as_dict(),
        }
        _emit(payload, args)
        return EXIT_OK
    try:
        steps = int(args.steps)
    except ValueError:
        raise ValidationError("--steps accepts 1 or auto") from None
    if steps != 1:
        raise ValidationError("--steps accepts 1 or auto")
    gauges = solver.solve_all_gauges(system, support)
    _emit({
        "schema": SCHEMA,
        "verb": "gauges",
        "steps": 1,
        "gauges": [d.to_dict() for d in gauges],
    }, args)
    return EXIT_OK


def _resolve_support(policy, system):
    if policy == "full":
        return None
    if policy == "double-plateau":
        if system.n != 2:
            raise ValidationError("double-plateau supports are defined for 2 regions")
        return bell_support(system.num_settings)
    with open(policy, "r", encoding="utf-8") as fh:
        return [int(j) for j in json.load(fh)]


def _cmd_collapse(args):
    system = _load(args)
    u = _settings_vector(system, args.settings)
    plan = collapse.CollapsePlan.parse(args.plan) if args.plan else None
    streams = max(1, int(os.environ.get("GAUGESIM_THREADS", "1")))
    rng = collapse.make_rng(args.seed)
    if plan is not None and plan.leaders:
        table = collapse.simulate(
            system, u, args.runs, args.seed,
            plan=plan, force_gamma=args.force_gauge, streams=streams,
        )
        _x, trace = collapse.multi_step_run(system, plan, u, rng)
    else:
        gauges = solver.solve_all_gauges(system)
        table = collapse.simulate(
            system, u, args.runs, args.seed,
            gauges=gauges, force_gamma=args.force_gauge, streams=streams,
        )
        _x, trace = collapse.one_step_run(system, gauges, u, rng,
                                          force_gamma=args.force_gauge)
    _emit({
        "schema": SCHEMA,
        "verb": "collapse",
        "settings": list(u),
        "runs": args.runs,
        "seed": args.seed,
        **table.as_dict(),
        "tv_distance": table.tv_distance(system, u),
        "trace_sample": trace.as_dict(),
    }, args)
    return EXIT_OK


def _cmd_metrics(args):
    system = _load(args)
    vectors = ([_settings_vector(system, args.settings)]
               if args.settings else list(system.setting_vectors()))
    payload = {
        "schema": SCHEMA,
        "verb": "metrics",
        "n": system.n,
        "k": system.num_settings,
        "s1": {},
        "s_n": {},
        "total_entanglement": {},
        "atoms": {},
    }
    for u in vectors:
        key = ",".join(str(s) for s in u)
        payload["s1"][key] = metrics.measurement_entropy(system, None, u)
        payload["s_n"][key] = metrics.s_n(system, u)
        payload["total_entanglement"][key] = metrics.total_entanglement(system, u)
        payload["atoms"][key] = {
            str(mask): value
            for mask, value in metrics.atom_measures(system, u).atoms.items()
        }
    if system.n == 2:
        payload["s2_matrix"] = metrics.s2_matrix(system)
        if system.num_settings >= 2:
            best = metrics.chsh_max(system)
            payload["chsh_max"] = {"value": best.value, "settings": list(best.settings)}
    scheme = metrics.entanglement_scheme(system)
    payload["scheme"] = scheme.as_dict()
    payload["classification"] = metrics.classify(system).as_dict()
    _emit(payload, args)
    return EXIT_OK


def _cmd_classify(args):
    system = _load(args)
    result = metrics.classify(system)
    _emit({"schema": SCHEMA, "verb": "classify", **result.as_dict()}, args)
    return EXIT_OK


def _sweep_point(name, parameter, value):
    system = catalog.build(name, **{parameter: str(value)})
    certificate = None
    try:
        certificate = collapse.find_min_steps(system)
        steps = certificate.steps
    except Infeasible:
        steps = None
    best = _max_conditioned_chsh(system)
    first_u = next(iter(system.setting_vectors()))
    return {
        "value": float(Fraction(str(value))),
        "min_steps": steps,
        "max_conditioned_chsh": best,
        "total_entanglement": metrics.total_entanglement(system, first_u),
    }


def _max_conditioned_chsh(system):
    """Largest CHSH value over all single-region conditioned subsystems."""
    from .model import condition

    best = 0.0
    if system.n == 2:
        return metrics.chsh_max(system).value
    for region in range(system.n):
        for setting in range(system.num_settings):
            for outcome in (0, 1):
                prob = system.region_marginal(region, setting)[outcome]
                if float(prob) <= 0:
                    continue
                sub = condition(system, region, setting, outcome).system
                if sub.n == 2:
                    best = max(best, metrics.chsh_max(sub).value)
    return best


def _cmd_sweep(args):
    if not getattr(args, "catalog", None):
        raise ValidationError("sweep requires --catalog")
    entry = catalog.get(args.catalog)
    if args.parameter not in entry.params:
        raise ValidationError(
            f"{args.catalog} has no parameter {args.parameter!r}"
        )
    rows = []
    if args.values:
        for raw in args.values.split(","):
            rows.append(_sweep_point(args.catalog, args.parameter, raw.strip()))
    payload = {"schema": SCHEMA, "verb": "sweep", "parameter": args.parameter,
               "rows": rows}
    if args.locate_tsirelson:
        payload["tsirelson_crossing"] = _bisect_tsirelson(args.catalog, args.parameter)
    _emit(payload, args)
    return EXIT_OK


def _bisect_tsirelson(name, parameter, lo=0.0, hi=0.125, tol=1e-4):
    """Bisect the parameter value where conditioned CHSH meets 2*sqrt(2).

    The default bracket ends at the separable midpoint of the smoothed
    family; past it the conditioned CHSH rises again by symmetry.
    """
    target = metrics.TSIRELSON_BOUND

    def excess(value):
        system = catalog.build(name, **{parameter: str(Fraction(value).limit_denominator(10**9))})
        return _max_conditioned_chsh(system) - target

    f_lo, f_hi = excess(lo), excess(hi)
    if f_lo * f_hi > 0:
        raise ValidationError("no sign change on the sweep interval")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if excess(mid) * f_lo > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _cmd_catalog(args):
    if args.action == "list":
        _emit({
            "schema": SCHEMA,
            "verb": "catalog",
            "systems": [
                {"name": name, "summary": catalog.get(name).summary,
                 "parameters": sorted(catalog.get(name).params)}
                for name in catalog.names()
            ],
        }, args)
        return EXIT_OK
    if not args.name:
        raise ValidationError(f"catalog {args.action} needs a system name")
    entry = catalog.get(args.name)
    if args.action == "show":
        _emit({
            "schema": SCHEMA,
            "verb": "catalog",
            "name": entry.name,
            "summary": entry.summary,
            "parameters": {
                pname: default for pname, (default, _parser) in entry.params.items()
            },
            "has_reference_gauges": entry.reference_gauges is not None,
        }, args)
        return EXIT_OK
    system = entry.make(**_parse_params(args.param))
    _emit(system.to_dict(), args)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
