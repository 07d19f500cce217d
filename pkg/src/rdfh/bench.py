"""Timing harness: run templates under several modes and report JSON-ready records."""

from __future__ import annotations

import gc
import logging
import statistics
import time
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from rdfh.engine import MODES, Engine, QueryOutcome
from rdfh.matcher import RowLimitExceeded
from rdfh.query import QueryTemplate

log = logging.getLogger(__name__)


@dataclass
class ModeRecord:
    seconds: float
    runs: list[float]
    results: int
    use_pruning: bool
    candidates: int
    pruned_candidates: int | None
    dtree_iterations: int
    joins: int
    join_rows: int
    connectivity_checks: int
    connectivity_seconds: float


@dataclass
class QueryRecord:
    name: str
    nodes: int
    modes: dict[str, ModeRecord] = field(default_factory=dict)
    consistent: bool = True
    skipped: str | None = None


def timed(engine: Engine, template: QueryTemplate, mode: str, row_limit: int | None = None) -> tuple[float, QueryOutcome]:
    """One run with the collector paused, so timings do not absorb GC pauses from earlier work.

    Only the young generations are collected first: a full pass over a large
    long-lived heap can cost more than the query being timed.
    """
    gc.collect(1)
    gc.disable()
    try:
        t0 = time.perf_counter()
        out = engine.query(template, mode, row_limit=row_limit)
        return time.perf_counter() - t0, out
    finally:
        gc.enable()


SUMMARIES = {"median": statistics.median, "min": min}


def _record(runs: list[float], out: QueryOutcome, summary: str) -> ModeRecord:
    st = out.stats
    return ModeRecord(
        seconds=SUMMARIES[summary](runs),
        runs=runs,
        results=st.results,
        use_pruning=st.use_pruning,
        candidates=sum(st.candidates),
        pruned_candidates=sum(st.pruned_candidates) if st.pruned_candidates else None,
        dtree_iterations=sum(st.dtree_iterations),
        joins=st.joins,
        join_rows=st.join_rows,
        connectivity_checks=st.connectivity_checks,
        connectivity_seconds=st.connectivity_seconds,
    )


def bench_query(
    engine: Engine,
    name: str,
    template: QueryTemplate,
    modes: Sequence[str] = MODES,
    repeats: int = 3,
    row_limit: int | None = None,
    summary: str = "median",
) -> QueryRecord:
    """Time ``template`` in every mode; ``summary`` ("median" or "min") condenses the repeats."""
    rec = QueryRecord(name, len(template.nodes))
    runs: dict[str, list[float]] = {m: [] for m in modes}
    last: dict[str, QueryOutcome] = {}
    try:
        for r in range(repeats):
            # rotate the mode order so no mode always runs on a cold cache
            for i in range(len(modes)):
                mode = modes[(i + r) % len(modes)]
                secs, last[mode] = timed(engine, template, mode, row_limit)
                runs[mode].append(secs)
    except RowLimitExceeded as exc:
        rec.skipped = str(exc)
        return rec
    sets = {m: {r.binding for r in out.results} for m, out in last.items()}
    rec.consistent = all(s == sets[modes[0]] for s in sets.values())
    rec.modes = {m: _record(runs[m], last[m], summary) for m in modes}
    return rec


def run_bench(
    engine: Engine,
    templates: Sequence[tuple[str, QueryTemplate]],
    modes: Sequence[str] = MODES,
    repeats: int = 3,
    row_limit: int | None = None,
    summary: str = "median",
) -> dict:
    records = []
    for name, t in templates:
        rec = bench_query(engine, name, t, modes, repeats, row_limit, summary)
        if rec.skipped:
            log.warning("%s skipped: %s", name, rec.skipped)
        elif not rec.consistent:
            log.error("%s: modes disagree on the result set", name)
        records.append(rec)
    done = [r for r in records if not r.skipped]
    totals = {m: sum(r.modes[m].seconds for r in done) for m in modes}
    return {
        "index": engine.index.name,
        "thresholds": engine.thresholds.to_dict(),
        "repeats": repeats,
        "summary": summary,
        "modes": list(modes),
        "totals": totals,
        "queries": [asdict(r) for r in records],
        "consistent": all(r.consistent for r in done),
        "skipped": sum(1 for r in records if r.skipped),
    }


# --- correctness-only parallel runs ---------------------------------------------

_worker_engine: Engine | None = None


def _init_worker(engine: Engine) -> None:
    global _worker_engine
    _worker_engine = engine


def _check_one(args: tuple[str, QueryTemplate, tuple[str, ...]]) -> tuple[str, bool, dict[str, int]]:
    name, template, modes = args
    assert _worker_engine is not None
    sets = {m: {r.binding for r in _worker_engine.query(template, m).results} for m in modes}
    first = sets[modes[0]]
    return name, all(s == first for s in sets.values()), {m: len(s) for m, s in sets.items()}


def check_consistency(
    engine: Engine, templates: Sequence[tuple[str, QueryTemplate]], modes: Sequence[str] = MODES, jobs: int = 2
) -> dict:
    """Compare result sets across modes in worker processes; no timings are reported."""
    work = [(name, t, tuple(modes)) for name, t in templates]
    with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(engine,)) as pool:
        rows = list(pool.map(_check_one, work))
    return {
        "modes": list(modes),
        "queries": [{"name": n, "consistent": ok, "results": counts} for n, ok, counts in rows],
        "consistent": all(ok for _, ok, _ in rows),
    }
