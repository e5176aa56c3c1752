"""Command line interface: ``plan``, ``bound``, ``validate`` and ``bench``.

Exit codes: 0 success, 1 usage error, 2 input error, 3 numerical-convergence
error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import heuristics
from .errors import ConvergenceError, InputError, UnsupportedRenderError
from .planner import SearchMode, build_graph, search
from .render import render_svg
from .scenario_io import (
    load_scenario,
    make_result_file,
    read_result_file,
    scenario_digest,
    seed_override,
    write_result_file,
)

log = logging.getLogger("clearbound")

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_CONVERGENCE = 0, 1, 2, 3

BENCH_COLUMNS = ["scenario", "mode", "cost", "expansions", "exact_edge_evals",
                 "heuristic_evals", "wall_time"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def format_value(x: float) -> str:
    """12 significant digits, trailing zeros kept, independent of locale."""
    return format(x, "#.12g") if x == x and abs(x) != float("inf") else repr(x)


def _parse_samples(text: str) -> list[tuple[float, float]]:
    out = []
    for item in text.split(","):
        try:
            t, d = item.split(":")
            out.append((float(t), float(d)))
        except ValueError:
            raise UsageError(f"bad sample {item!r}; expected T:D pairs separated by commas") from None
    return out


def _cmd_bound(args) -> int:
    need = {
        "one-endpoint": ("d1", "lhat"),
        "two-endpoint": ("d1", "d2", "lhat"),
        "single-sample": ("d1", "t1", "l"),
        "multi-sample": ("samples", "l"),
        "chain": ("samples", "l"),
    }[args.kind]
    missing = [f"--{n}" for n in need if getattr(args, n) is None]
    if missing:
        raise UsageError(f"bound --kind {args.kind} requires {', '.join(missing)}")
    if args.kind == "one-endpoint":
        b = heuristics.bound_one_endpoint(args.d1, args.lhat)
    elif args.kind == "two-endpoint":
        b = heuristics.bound_two_endpoint(args.d1, args.d2, args.lhat)
    elif args.kind == "single-sample":
        b = heuristics.bound_single_sample(args.d1, args.t1, args.l)
    elif args.kind == "multi-sample":
        b = heuristics.bound_multi_sample(_parse_samples(args.samples), args.l, strict=args.strict)
    else:
        b = heuristics.bound_endpoint_chain(_parse_samples(args.samples), args.l, strict=args.strict)
    print(format_value(b.value))
    return EXIT_OK


def _cmd_validate(args) -> int:
    sc = load_scenario(args.scenario)
    print(f"ok {args.scenario} {scenario_digest(sc)}")
    return EXIT_OK


def _run_scenario(path, modes, seed=None, log_edges=False):
    sc = load_scenario(path)
    world = sc.world()
    graph = build_graph(world, sc.start, sc.goal, sc.graph_params(seed))
    results = [search(graph, world, m, sc.quadrature_config(), sc.heuristic.k_interior,
                      log_edges=log_edges)
               for m in modes]
    return sc, world, graph, results


def _cmd_plan(args) -> int:
    sc = load_scenario(args.scenario)
    mode = SearchMode(args.mode) if args.mode else sc.heuristic.mode
    sc, world, graph, results = _run_scenario(args.scenario, [mode], seed_override(),
                                              args.edge_log)
    write_result_file(make_result_file(sc, graph, results), args.out)
    res = results[0]
    print(f"{mode.value} cost={format_value(res.cost)} expansions={res.stats.expansions} "
          f"exact_edge_evals={res.stats.exact_edge_evals}")
    if args.svg:
        try:
            render_svg(world, graph, res.path, out=args.svg)
        except UnsupportedRenderError as exc:
            print(f"warning: {exc}; no SVG written", file=sys.stderr)
    return EXIT_OK


def _bench_one(path: str, seed):
    sc, _, graph, results = _run_scenario(path, list(SearchMode), seed)
    return make_result_file(sc, graph, results)


def _cmd_bench(args) -> int:
    paths = sorted(Path(args.scenario_dir).glob("*.json"))
    if not paths:
        raise InputError(f"no *.json scenarios in {args.scenario_dir}")
    results_dir = Path(args.results_dir) if args.results_dir else None
    if results_dir is not None:
        results_dir.mkdir(parents=True, exist_ok=True)
        # Refuse before doing any work if a stored result belongs to another scenario.
        for p in paths:
            stored = results_dir / f"{p.stem}.result.json"
            if stored.exists():
                digest = read_result_file(stored)["scenario_digest"]
                if digest != scenario_digest(load_scenario(p)):
                    raise InputError(f"{stored} was produced from a different scenario "
                                     f"(digest {digest}); refusing to mix results")
    seed = seed_override()
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            docs = list(pool.map(_bench_one, [str(p) for p in paths], [seed] * len(paths)))
    else:
        docs = [_bench_one(str(p), seed) for p in paths]

    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(BENCH_COLUMNS)
        for p, doc in zip(paths, docs):
            for mode in SearchMode:
                rec = doc["results"][mode.value]
                st = rec["stats"]
                cost = rec["cost"] if rec["found"] else float("inf")
                writer.writerow([p.stem, mode.value, repr(float(cost)), st["expansions"],
                                 st["exact_edge_evals"], st["heuristic_evals"],
                                 f"{st['wall_time']:.6f}"])
    if results_dir is not None:
        for p, doc in zip(paths, docs):
            write_result_file(doc, results_dir / f"{p.stem}.result.json")
    print(f"wrote {len(paths) * len(SearchMode)} rows to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="clearbound", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("plan", help="search one scenario and write a result file")
    p.add_argument("--scenario", required=True)
    p.add_argument("--mode", choices=[m.value for m in SearchMode],
                   help="defaults to the scenario's heuristic.mode")
    p.add_argument("--out", required=True)
    p.add_argument("--svg")
    p.add_argument("--edge-log", action="store_true", help="record every exact edge evaluation")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("bound", help="evaluate one lower bound")
    p.add_argument("--kind", required=True, choices=[k.value for k in heuristics.BoundKind])
    for name in ("d1", "d2", "lhat", "t1", "l"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--samples", help="T:D pairs, e.g. 0:1,1:2,2:1")
    p.add_argument("--strict", action="store_true", help="reject inconsistent samples")
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("validate", help="check a scenario's schema and invariants")
    p.add_argument("--scenario", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("bench", help="run all modes on every scenario in a directory")
    p.add_argument("--scenario-dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--results-dir", help="store per-scenario result files here")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_bench)
    return parser


def run_cli(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (InputError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run_cli())
