from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rdfh.engine import Engine  # noqa: E402
from rdfh.graph import RdfGraph, parse_ntriples  # noqa: E402
from rdfh.idmap import IdMap, build_idmap  # noqa: E402
from rdfh.query import QueryTemplate, parse_query  # noqa: E402

DATA = Path(__file__).parent / "data"

_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config: pytest.Config) -> None:
    config.stash[_ACCEPTANCE_KEY] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config: pytest.Config) -> None:
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def report(request: pytest.FixtureRequest):
    """Record a one-line verdict shown in the terminal summary (and printed for -s runs)."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def emit(line: str) -> None:
        print(line)
        lines.append(line)

    return emit


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def g1() -> RdfGraph:
    return parse_ntriples((DATA / "g1.nt").read_text())


@pytest.fixture(scope="session")
def g1_idmap(g1: RdfGraph) -> IdMap:
    return build_idmap(g1)


@pytest.fixture(scope="session")
def g1_query() -> QueryTemplate:
    return parse_query((DATA / "g1_query.json").read_text())


@pytest.fixture(scope="session")
def biblio() -> RdfGraph:
    return parse_ntriples((DATA / "biblio.nt").read_text())


@pytest.fixture(scope="session")
def biblio_query() -> QueryTemplate:
    return parse_query((DATA / "biblio_query.json").read_text())


@pytest.fixture(scope="session")
def g1_engine(g1: RdfGraph) -> Engine:
    return Engine(g1, d_max=2)
