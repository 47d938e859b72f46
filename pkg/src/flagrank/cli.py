"""Command-line front end: load models, run analyses, emit deterministic reports.

``flagrank analyze`` accepts a model file, ``-`` for stdin, or ``--builtin``;
``flagrank models list`` / ``flagrank models emit NAME`` expose the catalog.
JSON reports are canonical (sorted keys, no timing) so identical requests
produce byte-identical output; wall-clock timing appears in text mode only.

Exit codes: 0 success, 2 model-text errors, 3 precondition failures,
4 unknown builtin model.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__
from .algebra import PointQ
from .classification import classify_at, classify_generic, regularity_scan
from .distribution import derived_flag, growth_at
from .dsl import ModelSource, load_model
from .errors import FlagrankError, ModelError, PreconditionError, UnknownModel
from .models import catalog_list, get_model, lift_pair
from .parabolic import branch_classify, parabolic_flag, symbol_algebra_at, \
    symbol_d_function, verify_flag_relations

_EXIT_OK = 0
_EXIT_MODEL = 2
_EXIT_PRECONDITION = 3
_EXIT_UNKNOWN_MODEL = 4

DEFAULT_TASKS = ("branch",)


def _parse_point_text(chart, text):
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    parts = [p.strip() for p in body.split(",")] if body else []
    coords = [Fraction(p) for p in parts]
    return PointQ(chart, coords)


def _json_dump(payload):
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _task_growth(model, dist, request):
    steps, growth = derived_flag(dist)
    out = {
        "generic": growth.render(),
        "ranks": list(growth.ranks),
        "steps": [{"rank": s.generic_rank,
                   "frame": [f.render() for f in s.frame]} for s in steps],
    }
    if request["point"] is not None:
        point = _parse_point_text(model.chart, request["point"])
        out["at_point"] = {"point": point.render(),
                           "ranks": list(growth_at(dist, point, steps))}
    return out


def _task_classify(model, dist, request):
    out = {"generic": classify_generic(dist).value}
    if request["point"] is not None:
        point = _parse_point_text(model.chart, request["point"])
        out["at_point"] = {"point": point.render(),
                           "class": classify_at(dist, point).value}
    return out


def _task_scan(model, dist, request):
    report = regularity_scan(dist, n_samples=request["samples"],
                             seed=request["seed"])
    return report.to_json_dict()


def _task_flag(model, dist, request):
    flag = parabolic_flag(dist)
    return {"flag": flag.to_json_dict(),
            "relations": [{"name": r.name, "holds": r.holds}
                          for r in verify_flag_relations(flag)]}


def _task_symbol(model, dist, request):
    flag = parabolic_flag(dist)
    d_function = symbol_d_function(dist, flag)
    out = {"class": "g0" if d_function.is_zero() else "g1",
           "d_function": d_function.render()}
    if request["point"] is not None:
        point = _parse_point_text(model.chart, request["point"])
        algebra, sym_class = symbol_algebra_at(dist, point)
        out["at_point"] = {"class": sym_class.value,
                           "algebra": algebra.to_json_dict()}
    return out


def _task_branch(model, dist, request):
    report = branch_classify(dist, samples=request["samples"],
                             seed=request["seed"])
    return report.to_json_dict()


def _task_lift(model, args, request):
    if args:
        names = list(args)
    else:
        names = [name for kind, name in model.order if kind == "field"]
    if len(names) < 3:
        raise PreconditionError(
            "task lift needs three declared fields (line, complement, third)")
    names = names[:3]
    fields = [model.fields[n] for n in names]
    lifted = lift_pair(*fields)
    report = branch_classify(lifted, samples=request["samples"],
                             seed=request["seed"])
    return {"pair": names,
            "lifted_chart": {"name": lifted.chart.name,
                             "variables": list(lifted.chart.variables)},
            "frame": [f.render() for f in lifted.frame],
            "branch": report.to_json_dict()}


def _run_tasks(model, request):
    dist_name, dist = model.primary_dist()
    results = {}
    for task, args in request["tasks"]:
        if task == "lift":
            results["lift"] = _task_lift(model, args, request)
            continue
        target_name, target = dist_name, dist
        if args:
            target_name = args[0]
            target = model.dists[target_name]
        if target is None:
            raise PreconditionError("model declares no distribution to analyze")
        runner = {
            "growth": _task_growth,
            "classify": _task_classify,
            "scan": _task_scan,
            "flag": _task_flag,
            "symbol": _task_symbol,
            "branch": _task_branch,
        }[task]
        fragment = runner(model, target, request)
        fragment["dist"] = target_name
        results[task] = fragment
    return results


def _build_report(model, model_name, request, results):
    return {
        "schema": 1,
        "tool": {"name": "flagrank", "version": __version__},
        "model": {
            "name": model_name,
            "origin": model.origin,
            "chart": {"name": model.chart.name,
                      "variables": list(model.chart.variables)},
        },
        "request": {
            "tasks": [t for t, _ in request["tasks"]],
            "samples": request["samples"],
            "seed": request["seed"],
            "point": request["point"],
        },
        "results": results,
    }


def _render_text_report(report, elapsed):
    lines = [f"flagrank {report['tool']['version']} report"]
    model = report["model"]
    lines.append(f"model: {model['name']} ({model['origin']})")
    chart = model["chart"]
    lines.append(f"chart: {chart['name']}({', '.join(chart['variables'])})")
    for task, fragment in sorted(report["results"].items()):
        lines.append(f"-- {task} --")
        lines.append(json.dumps(fragment, sort_keys=True, indent=2))
    lines.append(f"timing: {elapsed:.3f}s")
    return "\n".join(lines) + "\n"


def _emit_error(exc, fmt, out):
    if fmt == "json":
        out.write(_json_dump({"schema": 1,
                              "error": {"type": type(exc).__name__,
                                        "message": str(exc)}}))
    else:
        out.write(f"error [{type(exc).__name__}]: {exc}\n")


def _exit_code_for(exc):
    if isinstance(exc, UnknownModel):
        return _EXIT_UNKNOWN_MODEL
    if isinstance(exc, ModelError):
        return _EXIT_MODEL
    if isinstance(exc, PreconditionError):
        return _EXIT_PRECONDITION
    return _EXIT_PRECONDITION


def _load_request_model(ns):
    if ns.builtin is not None:
        spec = get_model(ns.builtin)
        return ns.builtin, load_model(ModelSource(spec.source,
                                                  f"<builtin:{ns.builtin}>"))
    if ns.source is None:
        raise PreconditionError("nothing to analyze: give a file, '-', or --builtin")
    if ns.source == "-":
        text = sys.stdin.read()
        return "<stdin>", load_model(ModelSource(text, "<stdin>"))
    with open(ns.source, "r", encoding="utf-8") as handle:
        text = handle.read()
    name = os.path.basename(ns.source)
    return name, load_model(ModelSource(text, ns.source))


def _default_seed():
    env = os.environ.get("FLAGRANK_SEED")
    if env is None:
        return 0
    return int(env)


def _cmd_analyze(ns, out):
    started = time.monotonic()
    model_name, model = _load_request_model(ns)
    if ns.tasks:
        tasks = [(t.strip(), ()) for t in ns.tasks.split(",") if t.strip()]
    elif model.tasks:
        tasks = list(model.tasks)
    else:
        tasks = [(t, ()) for t in DEFAULT_TASKS]
    if not tasks:
        raise PreconditionError("no analysis tasks requested")
    if ns.samples < 1:
        raise PreconditionError("--samples must be >= 1")
    request = {"tasks": tasks, "samples": ns.samples, "seed": ns.seed,
               "point": ns.point}
    results = _run_tasks(model, request)
    report = _build_report(model, model_name, request, results)
    if ns.format == "json":
        out.write(_json_dump(report))
    else:
        out.write(_render_text_report(report, time.monotonic() - started))
    return _EXIT_OK


def _cmd_models(ns, out):
    if ns.models_command == "list":
        if ns.format == "json":
            payload = [{"name": s.name, "title": s.title, "expected": s.expected}
                       for s in catalog_list()]
            out.write(_json_dump({"schema": 1, "models": payload}))
        else:
            for s in catalog_list():
                verdict = s.expected.get("verdict", s.expected.get("point_class", ""))
                out.write(f"{s.name:12s} {verdict:12s} {s.title}\n")
        return _EXIT_OK
    if ns.models_command == "emit":
        out.write(get_model(ns.name).source)
        return _EXIT_OK
    raise PreconditionError("choose a models subcommand: list or emit")


def build_arg_parser():
    parser = argparse.ArgumentParser(
        prog="flagrank",
        description="Exact classification of rank-3 distributions on six-charts.")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="analyze a model file or builtin")
    analyze.add_argument("source", nargs="?", default=None,
                         help="model file path, or '-' for stdin")
    analyze.add_argument("--builtin", default=None,
                         help="name of a bundled model (see 'models list')")
    analyze.add_argument("--tasks", default=None,
                         help="comma-separated: growth,classify,scan,flag,symbol,branch,lift")
    analyze.add_argument("--samples", type=int, default=20)
    analyze.add_argument("--seed", type=int, default=_default_seed())
    analyze.add_argument("--format", choices=("text", "json"), default="text")
    analyze.add_argument("--point", default=None,
                         help="evaluate pointwise tasks at '(q, ..., q)'")

    models = sub.add_parser("models", help="inspect bundled models")
    models_sub = models.add_subparsers(dest="models_command", required=True)
    models_list = models_sub.add_parser("list")
    models_list.add_argument("--format", choices=("text", "json"), default="text")
    models_emit = models_sub.add_parser("emit")
    models_emit.add_argument("name")
    return parser


def main(argv=None, out=None):
    out = out if out is not None else sys.stdout
    parser = build_arg_parser()
    ns = parser.parse_args(argv)
    fmt = getattr(ns, "format", "text")
    try:
        if ns.command == "analyze":
            return _cmd_analyze(ns, out)
        if ns.command == "models":
            return _cmd_models(ns, out)
        parser.error("unknown command")
    except FlagrankError as exc:
        _emit_error(exc, fmt, out)
        return _exit_code_for(exc)
    return _EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
