"""Streaming filter over a Wikidata JSON dump.

The dump is one JSON entity per line inside a top-level array, optionally
gzip-compressed. Selection is a two-pass scan: pass 1 collects the
subclass-of (P279) edges into an in-memory graph, pass 2 re-streams the
dump and emits records for entities whose transitive subclass closure
reaches one of the configured root classes. Memory is bounded by the size
of the subclass graph, never by the dump.
"""

from __future__ import annotations

import gzip
import json
import logging
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

from .records import EntityRecord, FilterStage, Verdict

logger = logging.getLogger(__name__)

SUBCLASS_PROPERTY = "P279"
# Wikidata property linking an item to its WordNet 3.1 synset id.
DEFAULT_SYNSET_PROPERTY = "P8814"


class DumpError(Exception):
    pass


class TruncatedDumpError(DumpError):
    """The dump ended before the closing bracket of the top-level array."""


@dataclass
class StreamReport:
    """Counters accumulated while scanning a dump."""

    lines: int = 0
    malformed: int = 0
    emitted: int = 0


def _open_dump(path: str | Path) -> IO[str]:
    path = Path(path)
    raw = open(path, "rb")
    magic = raw.read(2)
    raw.seek(0)
    if magic == b"\x1f\x8b":
        import io

        return io.TextIOWrapper(gzip.GzipFile(fileobj=raw), encoding="utf-8")
    import io

    return io.TextIOWrapper(raw, encoding="utf-8")


def _iter_entity_lines(handle: IO[str], report: StreamReport) -> Iterator[str]:
    """Yield raw entity lines, enforcing the top-level array framing."""
    saw_close = False
    for line in handle:
        stripped = line.strip()
        if not stripped:
            continue
        report.lines += 1
        if stripped == "[":
            continue
        if stripped == "]":
            saw_close = True
            continue
        yield stripped.rstrip(",")
    if not saw_close:
        raise TruncatedDumpError("dump ended without the closing ']'")


def _parse_entity(line: str, line_no: int, report: StreamReport) -> dict | None:
    try:
        entity = json.loads(line)
    except json.JSONDecodeError as exc:
        report.malformed += 1
        logger.warning("skipping malformed dump line %d: %s", line_no, exc)
        return None
    if not isinstance(entity, dict) or "id" not in entity:
        report.malformed += 1
        logger.warning("skipping dump line %d: not an entity object", line_no)
        return None
    return entity


def _statement_targets(entity: dict, prop: str) -> list[str]:
    targets = []
    for statement in entity.get("claims", {}).get(prop, []) or []:
        snak = statement.get("mainsnak", {})
        value = snak.get("datavalue", {}).get("value")
        if isinstance(value, dict) and "id" in value:
            targets.append(value["id"])
    return targets


def _statement_strings(entity: dict, prop: str) -> list[str]:
    values = []
    for statement in entity.get("claims", {}).get(prop, []) or []:
        value = statement.get("mainsnak", {}).get("datavalue", {}).get("value")
        if isinstance(value, str):
            values.append(value)
    return values


@dataclass
class SubclassGraph:
    """The P279 graph: child class id -> direct superclass ids."""

    parents: dict[str, tuple[str, ...]] = field(default_factory=dict)
    _children: dict[str, list[str]] | None = None

    def add(self, child: str, parent_ids: Iterable[str]) -> None:
        self.parents[child] = tuple(parent_ids)
        self._children = None

    def _reverse(self) -> dict[str, list[str]]:
        if self._children is None:
            children: dict[str, list[str]] = {}
            for child, parent_ids in self.parents.items():
                for parent in parent_ids:
                    children.setdefault(parent, []).append(child)
            self._children = children
        return self._children

    def down_closure(self, seeds: Iterable[str]) -> set[str]:
        """Seeds plus every class reachable downward through subclass edges.

        Terminates on cyclic graphs; the visited set breaks every cycle.
        """
        children = self._reverse()
        closure: set[str] = set()
        queue = deque(seeds)
        while queue:
            node = queue.popleft()
            if node in closure:
                continue
            closure.add(node)
            for child in children.get(node, ()):
                if child not in closure:
                    queue.append(child)
        return closure

    def cycle_edges(self, within: set[str]) -> list[tuple[str, str]]:
        """Back edges among ``within``, found by an iterative three-color DFS."""
        children = self._reverse()
        color: dict[str, int] = {}  # missing=white, 1=gray, 2=black
        back_edges: list[tuple[str, str]] = []
        for root in within:
            if color.get(root):
                continue
            stack: list[tuple[str, Iterator[str]]] = [
                (root, iter(children.get(root, ())))
            ]
            color[root] = 1
            while stack:
                node, it = stack[-1]
                advanced = False
                for child in it:
                    if child not in within:
                        continue
                    state = color.get(child, 0)
                    if state == 1:
                        back_edges.append((node, child))
                    elif state == 0:
                        color[child] = 1
                        stack.append((child, iter(children.get(child, ()))))
                        advanced = True
                        break
                if not advanced:
                    color[node] = 2
                    stack.pop()
        return back_edges


def subclass_exclude(graph: SubclassGraph, excluded: Iterable[str]) -> set[str]:
    """Excluded classes plus all their descendant classes.

    Subclass cycles are broken by the traversal's visited set and reported
    once per closing edge through the module logger.
    """
    excluded = set(excluded)
    if not excluded:
        return set()
    removed = graph.down_closure(excluded)
    for parent, child in graph.cycle_edges(removed):
        logger.warning("subclass cycle via %s <-> %s; broken by traversal", parent, child)
    return removed


def build_subclass_graph(
    path: str | Path, report: StreamReport | None = None
) -> SubclassGraph:
    """Pass 1: scan the dump and keep only the P279 edges."""
    report = report if report is not None else StreamReport()
    graph = SubclassGraph()
    with _open_dump(path) as handle:
        for line_no, line in enumerate(_iter_entity_lines(handle, report), start=1):
            entity = _parse_entity(line, line_no, report)
            if entity is None:
                continue
            parents = _statement_targets(entity, SUBCLASS_PROPERTY)
            if parents:
                graph.add(entity["id"], parents)
    return graph


def record_from_entity(
    entity: dict, synset_property: str = DEFAULT_SYNSET_PROPERTY
) -> EntityRecord:
    sitelink = entity.get("sitelinks", {}).get("enwiki", {})
    title = sitelink.get("title") if isinstance(sitelink, dict) else None
    aliases = [
        alias.get("value")
        for alias in entity.get("aliases", {}).get("en", []) or []
        if isinstance(alias, dict) and alias.get("value")
    ]
    synsets = _statement_strings(entity, synset_property)
    record = EntityRecord(
        wikidata_id=entity["id"],
        wikipedia_title=title,
        wordnet_synset=synsets[0] if synsets else None,
        synonyms=aliases,
        superclass_ids=_statement_targets(entity, SUBCLASS_PROPERTY),
    )
    record.verdicts[FilterStage.ROOT_SUBCLASS] = Verdict.PASS
    return record


def stream_filter_dump(
    path: str | Path,
    roots: Iterable[str],
    *,
    synset_property: str = DEFAULT_SYNSET_PROPERTY,
    graph: SubclassGraph | None = None,
    report: StreamReport | None = None,
) -> Iterator[EntityRecord]:
    """Emit a record for every entity whose subclass closure reaches a root.

    The closure is reflexive: a root class that appears in the dump is
    itself emitted. Malformed lines are logged, counted on ``report`` and
    skipped (the report covers the emission pass; the graph pass keeps its
    own counters); a dump that ends mid-array raises
    :class:`TruncatedDumpError`.
    """
    report = report if report is not None else StreamReport()
    if graph is None:
        graph = build_subclass_graph(path, StreamReport())
    matched = graph.down_closure(set(roots))
    with _open_dump(path) as handle:
        for line_no, line in enumerate(_iter_entity_lines(handle, report), start=1):
            entity = _parse_entity(line, line_no, report)
            if entity is None:
                continue
            if entity["id"] not in matched:
                continue
            report.emitted += 1
            yield record_from_entity(entity, synset_property)
