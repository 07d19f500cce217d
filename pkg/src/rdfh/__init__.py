"""Keyword subgraph queries over RDF graphs with neighborhood-index pruning."""

from rdfh.engine import Engine
from rdfh.graph import RdfGraph, from_triples, parse_ntriples
from rdfh.query import QueryTemplate, parse_query

__all__ = ["Engine", "RdfGraph", "QueryTemplate", "from_triples", "parse_ntriples", "parse_query"]
__version__ = "0.1.0"
