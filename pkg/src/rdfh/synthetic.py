"""Synthetic RDF datasets with controlled structure.

``regular_graph``   university data where every instance carries each of its
                    type's predicates exactly once (coherence 1, specialty 1).
``diverse_graph``   bibliography data with optional predicates, Zipf-skewed
                    authorship, heavy-tailed citation counts and a large
                    literal vocabulary.
``path_graph``      layered DAG with small fan-out, for connection edges.
"""

from __future__ import annotations

import itertools
import random

from rdfh.graph import GraphBuilder, RdfGraph

TYPE = "rdf:type"

_ONSETS = ["b", "c", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w", "z", "br", "ch", "st", "tr"]
_VOWELS = ["a", "e", "i", "o", "u", "ai", "ou"]


def _words(rng: random.Random, count: int, syllables: tuple[int, int] = (2, 3)) -> list[str]:
    out: set[str] = set()
    while len(out) < count:
        n = rng.randint(*syllables)
        out.add("".join(rng.choice(_ONSETS) + rng.choice(_VOWELS) for _ in range(n)))
    return sorted(out)


def _zipf_cum(n: int, s: float) -> list[float]:
    return list(itertools.accumulate(1.0 / (i + 1) ** s for i in range(n)))


def regular_graph(universities: int = 4, departments: int = 15, seed: int = 0) -> RdfGraph:
    """Perfectly regular university graph; literals come from a handful of words."""
    rng = random.Random(seed)
    first = ["Ann", "Bob", "Cid", "Dee", "Eve", "Fay"]
    last = ["Lee", "Kim", "Roe", "Poe"]
    b = GraphBuilder()

    def name() -> str:
        return f"{rng.choice(first)} {rng.choice(last)}"

    for u in range(universities):
        univ = f"lubm:Univ{u}"
        b.add(univ, TYPE, "lubm:University")
        b.add(univ, "lubm:name", f"University {first[u % len(first)]}", True)
        for d in range(departments):
            dept = f"{univ}/Dept{d}"
            b.add(dept, TYPE, "lubm:Department")
            b.add(dept, "lubm:name", f"Department {last[d % len(last)]}", True)
            b.add(dept, "lubm:subOrganizationOf", univ)
            profs = [f"{dept}/Professor{i}" for i in range(8)]
            courses = [f"{dept}/Course{i}" for i in range(16)]
            for i, c in enumerate(courses):
                b.add(c, TYPE, "lubm:Course")
                b.add(c, "lubm:name", f"Course {rng.choice(last)}", True)
            for i, p in enumerate(profs):
                b.add(p, TYPE, "lubm:Professor")
                b.add(p, "lubm:name", name(), True)
                b.add(p, "lubm:worksFor", dept)
                b.add(p, "lubm:teacherOf", courses[i])
            for i in range(40):
                s = f"{dept}/Student{i}"
                b.add(s, TYPE, "lubm:Student")
                b.add(s, "lubm:name", name(), True)
                b.add(s, "lubm:memberOf", dept)
                b.add(s, "lubm:takesCourse", rng.choice(courses))
                b.add(s, "lubm:advisor", rng.choice(profs))
    # class nodes are plain resources without outgoing edges
    return b.build()


def diverse_graph(papers: int = 14000, persons: int = 6000, seed: int = 0) -> RdfGraph:
    """Irregular bibliography graph (roughly 7-9 triples per paper)."""
    rng = random.Random(seed)
    vocab = _words(rng, 12000)
    firsts = [w.capitalize() for w in _words(rng, 600, (1, 2))]
    lasts = [w.capitalize() for w in _words(rng, 2500, (2, 3))]
    venue_keys = _words(rng, 200, (1, 2))
    b = GraphBuilder()

    venues = []
    for key in venue_keys:
        v = f"dblp:venue/{key}"
        venues.append(v)
        if rng.random() < 0.7:
            b.add(v, TYPE, "dblp:Venue")
        b.add(v, "dblp:name", f"Conference on {rng.choice(vocab)} {rng.choice(vocab)}", True)
    orgs = [f"dblp:org/{rng.choice(vocab).capitalize()}{i}" for i in range(300)]
    for o in orgs:
        b.add(o, "dblp:name", f"{rng.choice(vocab).capitalize()} University", True)

    people = []
    for i in range(persons):
        f, la = rng.choice(firsts), rng.choice(lasts)
        uri = f"dblp:pers/{la[0]}/p{i}"
        people.append(uri)
        b.add(uri, "dblp:name", f"{f} {la}", True)
        if rng.random() < 0.6:
            b.add(uri, TYPE, "dblp:Person")
        if rng.random() < 0.25:
            b.add(uri, "dblp:homepage", f"http://{rng.choice(vocab)}.org/~{la.lower()}", True)
        if rng.random() < 0.35:
            b.add(uri, "dblp:affiliation", rng.choice(orgs))
    rng.shuffle(people)
    person_cum = _zipf_cum(len(people), 0.9)
    venue_cum = _zipf_cum(len(venues), 0.8)

    paper_uris: list[str] = []
    cite_cum: list[float] = []
    for i in range(papers):
        venue = rng.choices(venues, cum_weights=venue_cum)[0]
        authors = list(dict.fromkeys(rng.choices(people, cum_weights=person_cum, k=rng.choice((1, 1, 2, 2, 3, 3, 4, 6)))))
        paper = f"dblp:{venue.rsplit('/', 1)[1]}/p{i}"
        if rng.random() < 0.75:
            b.add(paper, TYPE, rng.choice(("dblp:Article", "dblp:Inproceedings")))
        b.add(paper, "dblp:title", " ".join(rng.choices(vocab, k=rng.randint(3, 9))).capitalize(), True)
        if rng.random() < 0.9:
            b.add(paper, "dblp:year", str(rng.randint(1980, 2015)), True)
        if rng.random() < 0.5:
            start = rng.randint(1, 900)
            b.add(paper, "dblp:pages", f"{start}-{start + rng.randint(4, 20)}", True)
        if rng.random() < 0.85:
            b.add(paper, "dblp:venue", venue)
        for a in authors:
            b.add(paper, "dblp:author", a)
        if paper_uris and rng.random() < 0.45:
            # Pareto-tailed reference lists: most cite a few, surveys cite hundreds
            n_refs = min(int(rng.paretovariate(1.3)), 300, len(paper_uris))
            for target in dict.fromkeys(rng.choices(paper_uris, cum_weights=cite_cum, k=n_refs)):
                b.add(paper, "dblp:cites", target)
        paper_uris.append(paper)
        weight = 1.0 / (1 + len(paper_uris)) ** 0.2
        cite_cum.append((cite_cum[-1] if cite_cum else 0.0) + weight)
    return b.build()


def path_graph(levels: int = 40, width: int = 60, fanout: tuple[int, int] = (2, 5), seed: int = 0) -> RdfGraph:
    """Layered DAG: every ``path:lK/nI`` links to a few random nodes of level K+1."""
    rng = random.Random(seed)
    words = _words(rng, 40)
    b = GraphBuilder()
    for lvl in range(levels):
        for i in range(width):
            node = f"path:l{lvl}/n{i}"
            b.add(node, "path:label", f"{rng.choice(words)} {rng.choice(words)}", True)
            if lvl + 1 < levels:
                for j in rng.sample(range(width), rng.randint(*fanout)):
                    b.add(node, "path:next", f"path:l{lvl + 1}/n{j}")
    return b.build()
