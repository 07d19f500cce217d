"""On-disk workspace: graph and index snapshots plus JSON sidecars.

Layout::

    manifest.json        format version, graph summary, index catalog
    graph.pkl            RdfGraph snapshot
    index-<name>.pkl     NiIndex snapshots (d1, d2, d3, vc, ...)
    stats.json           predicate/literal selectivity statistics
    thresholds.json      tuned planner thresholds

Snapshots are pickles; only open workspaces you created yourself.
"""

from __future__ import annotations

import json
import logging
import os
import pickle
from pathlib import Path

from rdfh.engine import Engine
from rdfh.graph import RdfGraph
from rdfh.idmap import build_idmap
from rdfh.ni_index import NiIndex
from rdfh.planner import DatasetStats, Thresholds

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
MANIFEST = "manifest.json"
GRAPH_FILE = "graph.pkl"
STATS_FILE = "stats.json"
THRESHOLDS_FILE = "thresholds.json"


class WorkspaceError(RuntimeError):
    pass


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


class Workspace:
    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)

    # --- manifest ------------------------------------------------------------

    @property
    def exists(self) -> bool:
        return (self.root / MANIFEST).is_file()

    def manifest(self) -> dict:
        path = self.root / MANIFEST
        if not path.is_file():
            raise WorkspaceError(f"no workspace at {self.root}; run `rdfh ingest <file.nt> -o {self.root}` first")
        doc = json.loads(path.read_text())
        version = doc.get("format_version")
        if version != FORMAT_VERSION:
            raise WorkspaceError(
                f"workspace {self.root} has format version {version}, this build reads {FORMAT_VERSION}; re-run ingest"
            )
        return doc

    def _write_manifest(self, doc: dict) -> None:
        _atomic_write(self.root / MANIFEST, json.dumps(doc, indent=2, sort_keys=True).encode())

    def _dump(self, name: str, obj: object) -> None:
        _atomic_write(self.root / name, pickle.dumps(obj, protocol=pickle.HIGHEST_PROTOCOL))

    def _load(self, name: str, hint: str) -> object:
        path = self.root / name
        if not path.is_file():
            raise WorkspaceError(f"{path} is missing; {hint}")
        with path.open("rb") as fh:
            return pickle.load(fh)

    # --- graph ---------------------------------------------------------------

    def save_graph(self, graph: RdfGraph, source: str | None = None) -> None:
        """Start a fresh workspace around ``graph``; older indexes and sidecars are dropped."""
        self.root.mkdir(parents=True, exist_ok=True)
        if self.exists:
            old = json.loads((self.root / MANIFEST).read_text())
            for entry in old.get("indexes", {}).values():
                (self.root / entry["file"]).unlink(missing_ok=True)
        for name in (STATS_FILE, THRESHOLDS_FILE):
            (self.root / name).unlink(missing_ok=True)
        self._dump(GRAPH_FILE, {"format_version": FORMAT_VERSION, "graph": graph})
        self._write_manifest(
            {
                "format_version": FORMAT_VERSION,
                "graph": {"file": GRAPH_FILE, "source": source, "nodes": graph.num_nodes, "edges": graph.num_edges},
                "indexes": {},
                "default_index": None,
            }
        )

    def load_graph(self) -> RdfGraph:
        self.manifest()
        doc = self._load(GRAPH_FILE, "run `rdfh ingest` again")
        return doc["graph"]

    # --- indexes -------------------------------------------------------------

    def save_index(self, index: NiIndex, make_default: bool = True) -> str:
        doc = self.manifest()
        name = index.name if index.m == 5 else f"{index.name}-m{index.m}"
        fname = f"index-{name}.pkl"
        self._dump(fname, {"format_version": FORMAT_VERSION, "header": index.header(), "index": index})
        doc["indexes"][name] = {"file": fname, "entries": index.entry_count(), **index.header()}
        if make_default or doc.get("default_index") is None:
            doc["default_index"] = name
        self._write_manifest(doc)
        return name

    def index_names(self) -> list[str]:
        return sorted(self.manifest()["indexes"])

    def load_index(self, name: str | None = None) -> NiIndex:
        doc = self.manifest()
        name = name or doc.get("default_index")
        if name is None:
            raise WorkspaceError("no index built yet; run `rdfh index --dmax 3` (or --vertex-cover) first")
        entry = doc["indexes"].get(name)
        if entry is None:
            known = ", ".join(sorted(doc["indexes"])) or "none"
            raise WorkspaceError(f"no index named {name!r} (available: {known}); build it with `rdfh index`")
        blob = self._load(entry["file"], "rebuild it with `rdfh index`")
        return blob["index"]

    # --- sidecars ------------------------------------------------------------

    def save_stats(self, stats: DatasetStats) -> None:
        self.manifest()
        _atomic_write(self.root / STATS_FILE, json.dumps(stats.to_dict(), sort_keys=True).encode())

    def load_stats(self) -> DatasetStats | None:
        path = self.root / STATS_FILE
        if not path.is_file():
            return None
        return DatasetStats.from_dict(json.loads(path.read_text()))

    def save_thresholds(self, thresholds: Thresholds, extra: dict | None = None) -> None:
        self.manifest()
        doc = {**thresholds.to_dict(), **(extra or {})}
        _atomic_write(self.root / THRESHOLDS_FILE, json.dumps(doc, indent=2, sort_keys=True).encode())

    def load_thresholds(self) -> Thresholds | None:
        path = self.root / THRESHOLDS_FILE
        if not path.is_file():
            return None
        doc = json.loads(path.read_text())
        return Thresholds(doc["iteration"], doc["join"], doc["selectivity"])

    # --- assembly ------------------------------------------------------------

    def engine(self, index: str | None = None) -> Engine:
        graph = self.load_graph()
        ni = self.load_index(index)
        stats = self.load_stats()
        if stats is None:
            log.info("no stats.json yet; computing statistics in memory (run `rdfh stats` to cache them)")
        thresholds = self.load_thresholds()
        if thresholds is None:
            log.info("no thresholds.json; using default planner thresholds")
        return Engine(graph, ni, build_idmap(graph), stats, thresholds)
