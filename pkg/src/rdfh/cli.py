"""``rdfh`` command line: build a workspace, then query, tune and benchmark it.

Structured output goes to stdout as JSON; logs go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

from rdfh import bench, metrics, synthetic
from rdfh.engine import MODES
from rdfh.graph import ParseError, classify, parse_ntriples, serialize_ntriples
from rdfh.idmap import build_idmap
from rdfh.matcher import RowLimitExceeded
from rdfh.ni_index import build_ni_index, build_vc_ni_index
from rdfh.planner import DEFAULT_NGRAM, compute_stats, tune_thresholds
from rdfh.query import QueryError, QueryTemplate, dump_query, parse_query
from rdfh.workload import GenConfig, generate_query
from rdfh.workspace import Workspace, WorkspaceError

log = logging.getLogger("rdfh")

DEFAULT_WORKSPACE = "rdfh-ws"


def _emit(doc: object) -> None:
    json.dump(doc, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def load_templates(directory: str) -> list[tuple[str, QueryTemplate]]:
    root = Path(directory)
    if not root.is_dir():
        raise WorkspaceError(f"query directory {root} does not exist; create one with `rdfh gen-queries --out {root}`")
    files = sorted(p for p in root.glob("*.json") if p.name != "manifest.json")
    if not files:
        raise WorkspaceError(f"no query files in {root}")
    out = []
    for p in files:
        try:
            out.append((p.stem, parse_query(p.read_text())))
        except QueryError as exc:
            raise QueryError(f"{p}: {exc}") from exc
    return out


# --- commands -----------------------------------------------------------------


def cmd_ingest(args: argparse.Namespace) -> int:
    path = Path(args.file)
    with path.open(encoding="utf-8") as fh:
        graph = parse_ntriples(fh)
    ws = Workspace(args.workspace)
    ws.save_graph(graph, source=str(path))
    log.info("ingested %d triples (%d nodes) into %s", graph.num_edges, graph.num_nodes, ws.root)
    _emit({"workspace": str(ws.root), "nodes": graph.num_nodes, "edges": graph.num_edges, **classify(graph).as_dict()})
    return 0


def cmd_classify(args: argparse.Namespace) -> int:
    _emit(classify(Workspace(args.workspace).load_graph()).as_dict())
    return 0


def cmd_index(args: argparse.Namespace) -> int:
    ws = Workspace(args.workspace)
    graph = ws.load_graph()
    idmap = build_idmap(graph)
    if args.vertex_cover:
        index = build_vc_ni_index(graph, idmap, args.binning)
    else:
        index = build_ni_index(graph, idmap, args.dmax, args.binning)
    name = ws.save_index(index)
    log.info("built index %s with %d entries", name, index.entry_count())
    _emit({"index": name, "entries": index.entry_count(), "stored_ids": index.stored_ids(), **index.header()})
    return 0


def cmd_profile(args: argparse.Namespace) -> int:
    graph = Workspace(args.workspace).load_graph()
    report = metrics.profile(graph, args.sample, args.seed, args.side, args.include_zero)
    _emit(report.to_dict())
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    ws = Workspace(args.workspace)
    stats = compute_stats(ws.load_graph(), args.ngram, args.sample, args.seed)
    ws.save_stats(stats)
    _emit(
        {
            "edges": stats.edge_total,
            "sampled": stats.sampled,
            "predicates": len(stats.pred_sel),
            "attribute_predicates": len(stats.lit_sel),
            "pred_sel": stats.pred_sel,
            "lit_sel": stats.lit_sel,
        }
    )
    return 0


def cmd_gen_queries(args: argparse.Namespace) -> int:
    ws = Workspace(args.workspace)
    graph = ws.load_graph()
    idmap = build_idmap(graph)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for i in range(args.count):
        cfg = GenConfig(
            size=args.size,
            seed=args.seed + i,
            match_cap=(args.match_cap[0], args.match_cap[1]),
            connection_edge_prob=args.cedge_prob,
        )
        template, origin = generate_query(graph, cfg, idmap)
        name = f"q{args.size}_{args.seed + i:05d}"
        (out / f"{name}.json").write_text(dump_query(template) + "\n")
        entries.append({"name": name, "seed": cfg.seed, "origin": [graph.labels[v] for v in origin]})
    manifest = {"size": args.size, "count": args.count, "seed": args.seed, "cedge_prob": args.cedge_prob, "queries": entries}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    _emit({"written": args.count, "directory": str(out)})
    return 0


def cmd_tune(args: argparse.Namespace) -> int:
    ws = Workspace(args.workspace)
    engine = ws.engine(args.index)
    templates = [t for _, t in load_templates(args.queries)]
    engine.stats  # computed up front so it is not charged to the first timing

    def run(t: QueryTemplate, prune: bool) -> float:
        # a branch that overflows the row limit is one the planner must avoid
        try:
            return bench.timed(engine, t, "prune" if prune else "noprune", args.row_limit)[0]
        except RowLimitExceeded:
            return math.inf

    thresholds, timings = tune_thresholds(templates, engine.plan, run, args.repeats)
    usable = sum(1 for qt in timings if qt.usable)
    ws.save_thresholds(thresholds, {"queries": usable})
    _emit({"thresholds": thresholds.to_dict(), "queries": usable})
    return 0


def cmd_query(args: argparse.Namespace) -> int:
    engine = Workspace(args.workspace).engine(args.index)
    template = parse_query(Path(args.template).read_text())
    if args.explain:
        _emit({"plan": engine.plan(template).to_dict(), "thresholds": engine.thresholds.to_dict()})
        return 0
    out = engine.query(template, args.mode, args.paths, args.invert_cedge_order, args.hops, args.row_limit)
    for doc in engine.canonical(template, out.results):
        sys.stdout.write(json.dumps(doc, sort_keys=True, ensure_ascii=False) + "\n")
    trailer = {"stats": out.stats.as_dict(), "mode": args.mode, "index": engine.index.name}
    if out.plan is not None:
        trailer["plan"] = out.plan.to_dict()
    sys.stdout.write(json.dumps(trailer, sort_keys=True) + "\n")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    ws = Workspace(args.workspace)
    engine = ws.engine(args.index)
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    bad = [m for m in modes if m not in MODES]
    if bad or not modes:
        raise ValueError(f"unknown mode(s) {bad}; choose from {', '.join(MODES)}")
    templates = load_templates(args.queries)
    engine.stats
    if args.jobs > 1:
        report = bench.check_consistency(engine, templates, modes, args.jobs)
    else:
        report = bench.run_bench(engine, templates, modes, args.repeats, args.row_limit, args.summary)
    if args.out:
        Path(args.out).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    _emit(report)
    return 0 if report["consistent"] else 1


def cmd_synth(args: argparse.Namespace) -> int:
    make = {"regular": synthetic.regular_graph, "diverse": synthetic.diverse_graph, "path": synthetic.path_graph}
    graph = make[args.kind](seed=args.seed)
    with open(args.output, "w", encoding="utf-8") as fh:
        for line in serialize_ntriples(graph):
            fh.write(line + "\n")
    _emit({"file": args.output, "nodes": graph.num_nodes, "edges": graph.num_edges})
    return 0


# --- parser -------------------------------------------------------------------


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rdfh", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging on stderr")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-w", "--workspace", default=DEFAULT_WORKSPACE, help="workspace directory (default: %(default)s)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse an N-Triples file into a new workspace")
    p.add_argument("file")
    p.add_argument("-o", "-w", "--workspace", dest="workspace", default=DEFAULT_WORKSPACE)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("classify", parents=[common], help="count resource/literal nodes and edge kinds")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("index", parents=[common], help="build a neighborhood index")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--dmax", type=int, choices=(1, 2, 3), default=3)
    g.add_argument("--vertex-cover", action="store_true", help="2 hops for cover nodes, 1 hop elsewhere")
    p.add_argument("--binning", type=_positive, default=5, help="max neighbor IDs per entry (m)")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("profile", parents=[common], help="coherence, relationship specialty, literal diversity")
    p.add_argument("--sample", type=_positive, default=metrics.DEFAULT_SAMPLE)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--side", choices=("subject", "object", "both"), default="subject")
    p.add_argument("--include-zero", action="store_true", help="count non-participating resources as zeros")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("stats", parents=[common], help="compute planner statistics")
    p.add_argument("--ngram", type=_positive, default=DEFAULT_NGRAM)
    p.add_argument("--sample", type=_positive, default=None, help="sample this many edges")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("gen-queries", parents=[common], help="generate random query templates")
    p.add_argument("--size", type=_positive, required=True)
    p.add_argument("--count", type=_positive, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cedge-prob", type=float, default=0.0)
    p.add_argument("--match-cap", type=_positive, nargs=2, default=(1, 200), metavar=("LO", "HI"))
    p.add_argument("--out", default="queries")
    p.set_defaults(func=cmd_gen_queries)

    p = sub.add_parser("tune", parents=[common], help="grid-search planner thresholds")
    p.add_argument("--queries", required=True)
    p.add_argument("--repeats", type=_positive, default=3)
    p.add_argument("--index", default=None)
    p.add_argument("--row-limit", type=_positive, default=None, help="charge a branch that exceeds this many intermediate rows infinite time")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("query", parents=[common], help="run one query template")
    p.add_argument("--template", required=True)
    p.add_argument("--mode", choices=MODES, default="auto")
    p.add_argument("--paths", action="store_true", help="list shortest paths for connection edges")
    p.add_argument("--explain", action="store_true", help="print the plan decision without executing")
    p.add_argument("--invert-cedge-order", action="store_true")
    p.add_argument("--index", default=None)
    p.add_argument("--hops", type=_positive, default=None, help="pruning depth (default: index depth)")
    p.add_argument("--row-limit", type=_positive, default=None, help="abort past this many intermediate rows")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("bench", parents=[common], help="time a query directory under several modes")
    p.add_argument("--queries", required=True)
    p.add_argument("--modes", default=",".join(MODES))
    p.add_argument("--repeats", type=_positive, default=3)
    p.add_argument("--index", default=None)
    p.add_argument("--row-limit", type=_positive, default=None)
    p.add_argument("--summary", choices=sorted(bench.SUMMARIES), default="median", help="how repeats are condensed")
    p.add_argument("--jobs", type=_positive, default=1, help="parallel correctness-only run (no timings)")
    p.add_argument("--out", default=None, help="also write the report here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("synth", help="write a synthetic dataset as N-Triples")
    p.add_argument("kind", choices=("regular", "diverse", "path"))
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        code = args.func(args)
        sys.stdout.flush()
        return code
    except BrokenPipeError:
        # stdout closed early (e.g. piped into head); silence the exit-time flush
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except (WorkspaceError, QueryError, ParseError, RowLimitExceeded, ValueError, OSError) as exc:
        print(f"rdfh: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
