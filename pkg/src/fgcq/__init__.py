"""Fine-grained evaluation of conjunctive queries."""

from .query import ConjunctiveQuery, Atom, parse_query, render_query
from .storage import Database, Domain, Relation, load_database

__all__ = [
    "Atom",
    "ConjunctiveQuery",
    "Database",
    "Domain",
    "Relation",
    "load_database",
    "parse_query",
    "render_query",
]
