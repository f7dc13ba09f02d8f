"""Relational storage over an interned domain.

Values are interned to dense integer ids in first-appearance order, so that
runs over the same input files are reproducible.  Relations are immutable
sets of id tuples.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Hashable, Iterable, Mapping

from .errors import DataError, UnknownValue


class Domain:
    """Bijection between external values and dense ids."""

    def __init__(self, values: Iterable[Hashable] = ()):
        self._values: list[Hashable] = []
        self._ids: dict[Hashable, int] = {}
        for v in values:
            self.intern(v)

    def intern(self, value: Hashable) -> int:
        i = self._ids.get(value)
        if i is None:
            i = len(self._values)
            self._ids[value] = i
            self._values.append(value)
        return i

    def id_of(self, value: Hashable) -> int:
        try:
            return self._ids[value]
        except KeyError:
            raise UnknownValue(f"value {value!r} is not in the domain") from None

    def value(self, i: int) -> Hashable:
        if not 0 <= i < len(self._values):
            raise UnknownValue(f"id {i} is not in the domain")
        return self._values[i]

    def __contains__(self, value) -> bool:
        return value in self._ids

    def __len__(self) -> int:
        return len(self._values)

    def __eq__(self, other) -> bool:
        return isinstance(other, Domain) and self._values == other._values

    def values(self) -> list[Hashable]:
        return list(self._values)


@dataclass(frozen=True)
class Relation:
    """Set of id tuples.  ``rows`` lists them sorted, freshly allocated in that
    order so scans walk memory sequentially; ``tuples`` is the membership set."""

    arity: int
    tuples: frozenset[tuple[int, ...]] = frozenset()
    rows: tuple[tuple[int, ...], ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if self.arity < 1:
            raise DataError("relations need positive arity")
        distinct = set(tuple(t) for t in self.tuples)
        for t in distinct:
            if len(t) != self.arity:
                raise DataError(f"tuple {t} does not have arity {self.arity}")
        rows = tuple(tuple(list(t)) for t in sorted(distinct))
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "tuples", frozenset(rows))

    def __len__(self) -> int:
        return len(self.tuples)

    def __iter__(self):
        return iter(self.rows)


@dataclass
class Database:
    relations: dict[str, Relation] = field(default_factory=dict)
    domain: Domain = field(default_factory=Domain)

    @classmethod
    def from_values(
        cls, data: Mapping[str, Iterable[tuple]], arities: Mapping[str, int] | None = None,
        domain: Domain | None = None,
    ) -> "Database":
        """Build from external values; ``arities`` fixes arity for possibly empty relations."""
        domain = domain if domain is not None else Domain()
        rels = {}
        for sym, rows in data.items():
            ids = [tuple(domain.intern(v) for v in row) for row in rows]
            arity = (arities or {}).get(sym)
            if arity is None:
                if not ids:
                    raise DataError(f"cannot infer arity of empty relation {sym}")
                arity = len(ids[0])
            rels[sym] = Relation(arity, frozenset(ids))
        for sym, arity in (arities or {}).items():
            rels.setdefault(sym, Relation(arity))
        return cls(rels, domain)

    @property
    def size(self) -> int:
        """m: total number of stored tuples."""
        return sum(len(r) for r in self.relations.values())

    def relation(self, symbol: str, arity: int) -> Relation:
        """Relation for ``symbol``; absent symbols read as empty."""
        rel = self.relations.get(symbol)
        if rel is None:
            return Relation(arity)
        if rel.arity != arity:
            raise DataError(f"relation {symbol} has arity {rel.arity}, atom expects {arity}")
        return rel

    def with_relations(self, relations: Mapping[str, Relation]) -> "Database":
        """Same domain, relations replaced/added."""
        rels = dict(self.relations)
        rels.update(relations)
        return Database(rels, self.domain)

    def extern(self, t: tuple[int, ...]) -> tuple:
        return tuple(self.domain.value(i) for i in t)

    def intern_tuple(self, t) -> tuple[int, ...]:
        return tuple(self.domain.id_of(v) for v in t)

    def active_domain(self) -> set[int]:
        return {v for r in self.relations.values() for t in r for v in t}

    def degrees(self) -> Counter:
        """Tuples each value occurs in; a tuple counts once even with repeats."""
        c: Counter = Counter()
        for r in self.relations.values():
            for t in r:
                c.update(set(t))
        return c

    def __eq__(self, other) -> bool:
        if not isinstance(other, Database):
            return NotImplemented
        mine = {s: {self.extern(t) for t in r} for s, r in self.relations.items()}
        theirs = {s: {other.extern(t) for t in r} for s, r in other.relations.items()}
        return mine == theirs


def load_database(directory, schema: Iterable[tuple[str, int]]) -> Database:
    directory = Path(directory)
    domain = Domain()
    rels = {}
    for symbol, arity in schema:
        path = directory / f"{symbol}.csv"
        if not path.exists():
            raise DataError(f"missing relation file {path}")
        rows = set()
        with path.open(newline="", encoding="utf-8") as fh:
            for lineno, row in enumerate(csv.reader(fh), 1):
                if not row:
                    continue
                if len(row) != arity:
                    raise DataError(f"{path}:{lineno}: expected {arity} values, got {len(row)}")
                rows.add(tuple(domain.intern(v.strip()) for v in row))
        rels[symbol] = Relation(arity, frozenset(rows))
    return Database(rels, domain)


def write_database(db: Database, directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for sym, rel in db.relations.items():
        with (directory / f"{sym}.csv").open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            for t in sorted(rel.tuples):
                w.writerow(db.extern(t))


def degree(db: Database, v: int) -> int:
    if not 0 <= v < len(db.domain):
        raise UnknownValue(f"id {v} is not interned")
    return sum(1 for r in db.relations.values() for t in r if v in t)


@dataclass(frozen=True)
class DegreeSplit:
    threshold: float
    light: frozenset[int]
    heavy: frozenset[int]


def degree_split(db: Database, threshold: float) -> DegreeSplit:
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    degs = db.degrees()
    light = frozenset(v for v, d in degs.items() if d <= threshold)
    heavy = frozenset(v for v, d in degs.items() if d > threshold)
    return DegreeSplit(threshold, light, heavy)


class WeightMap(dict):
    """Domain id -> integer weight; lookups of unlisted ids raise UnknownValue."""

    def __missing__(self, key):
        raise UnknownValue(f"no weight for domain id {key!r}")

    def tuple_weight(self, t) -> int:
        return sum(self[v] for v in t)


def load_weights(path, domain: Domain) -> WeightMap:
    """Read ``value,integer`` rows.  Values not yet in ``domain`` are interned."""
    weights = WeightMap()
    with Path(path).open(newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row:
                continue
            if len(row) != 2:
                raise DataError(f"{path}:{lineno}: expected value,weight")
            value, raw = row[0].strip(), row[1].strip()
            try:
                w = int(raw)
            except ValueError:
                raise DataError(f"{path}:{lineno}: weight {raw!r} is not an integer") from None
            i = domain.intern(value)
            if i in weights:
                raise DataError(f"{path}:{lineno}: duplicate weight for {value!r}")
            weights[i] = w
    return weights
