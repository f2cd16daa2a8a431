"""Repository of entity trees: assembly, indexing, statistics, persistence.

One repository holds the trees of a single provenance (the mined and
human-annotated datasets are compared, never merged). On disk a repository
is a directory of kb/1 JSON documents plus a manifest; entities are stored
sorted by normalized name and children keep their emission order, so
saving the same repository twice is byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .kbmodel import (
    EntityMarker,
    KbNode,
    KbValidationError,
    Level,
    MaterialExpr,
    Part,
    SCHEMA_VERSION,
    entity_from_document,
    entity_to_document,
    normalize_name,
)


class KbStoreError(Exception):
    pass


class DuplicateEntityError(KbStoreError):
    pass


class NotFoundError(KbStoreError):
    pass


class Question(Enum):
    PARTS = "parts"
    MATERIALS = "materials"
    SUBTYPES = "subtypes"


@dataclass(frozen=True)
class IndexEntry:
    path: tuple[str, ...]
    node: KbNode


@dataclass(frozen=True)
class PartEntry:
    path: tuple[str, ...]
    node: KbNode
    part: Part


@dataclass
class Repository:
    """Assembled trees with a name index over every node and part."""

    entities: tuple[KbNode, ...] = ()
    index: dict[str, list[IndexEntry]] = field(default_factory=dict)
    part_index: dict[str, list[PartEntry]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entities)

    def entity(self, name: str) -> KbNode | None:
        key = normalize_name(name)
        for node in self.entities:
            if node.name == key:
                return node
        return None

    def items(self) -> list[IndexEntry]:
        """Every node that carries parts and/or materials of its own."""
        out = []
        for entries in self.index.values():
            out.extend(e for e in entries if e.node.is_item())
        out.sort(key=lambda e: e.path)
        return out


def assemble(trees: Iterable[KbNode]) -> Repository:
    """Index a list of entity trees into one repository."""
    entities = sorted(trees, key=lambda t: t.name)
    seen: set[tuple[str, str]] = set()
    for tree in entities:
        key = (tree.provenance.value, tree.name)
        if key in seen:
            raise DuplicateEntityError(f"entity {tree.name!r} appears twice")
        seen.add(key)
    index: dict[str, list[IndexEntry]] = {}
    part_index: dict[str, list[PartEntry]] = {}

    def visit(node: KbNode, path: tuple[str, ...]) -> None:
        path = path + (node.name,)
        index.setdefault(node.name, []).append(IndexEntry(path=path, node=node))
        for part in node.parts:
            part_index.setdefault(part.name, []).append(
                PartEntry(path=path, node=node, part=part)
            )
        for child in node.children:
            visit(child, path)

    for tree in entities:
        visit(tree, ())
    return Repository(entities=tuple(entities), index=index, part_index=part_index)


# --- statistics -------------------------------------------------------------


@dataclass
class LevelPartGap:
    """How many terminal nodes at one level lack parts."""

    without_parts: int = 0
    total: int = 0


@dataclass
class RepoStats:
    total_items: int = 0
    entities_without_subtypes: int = 0
    unique_subtypes_global: int = 0
    unique_subtypes_per_entity: int = 0
    unique_subsubtypes_global: int = 0
    unique_subsubtypes_per_entity: int = 0
    unique_subsubtypes_per_entity_subtype: int = 0
    items_without_parts: dict[str, LevelPartGap] = field(default_factory=dict)
    avg_parts_per_item: float = 0.0
    avg_materials_per_item: float = 0.0
    empty: bool = False

    def to_dict(self) -> dict:
        return {
            "total_items": self.total_items,
            "entities_without_subtypes": self.entities_without_subtypes,
            "unique_subtypes": {
                "global": self.unique_subtypes_global,
                "per_entity": self.unique_subtypes_per_entity,
            },
            "unique_subsubtypes": {
                "global": self.unique_subsubtypes_global,
                "per_entity": self.unique_subsubtypes_per_entity,
                "per_entity_and_subtype": self.unique_subsubtypes_per_entity_subtype,
            },
            "items_without_parts": {
                level: {"without_parts": gap.without_parts, "total": gap.total}
                for level, gap in self.items_without_parts.items()
            },
            "avg_parts_per_item": self.avg_parts_per_item,
            "avg_materials_per_item": self.avg_materials_per_item,
            "empty": self.empty,
        }


def _distinct_materials(node: KbNode) -> int:
    atoms: set[str] = set()
    if node.whole_materials is not None:
        atoms.update(normalize_name(a) for a in node.whole_materials.atoms)
    for part in node.parts:
        if isinstance(part.materials, MaterialExpr):
            atoms.update(normalize_name(a) for a in part.materials.atoms)
    return len(atoms)


def compute_stats(repo: Repository) -> RepoStats:
    """Counts and averages over the assembled repository.

    Subsubtypes are counted three ways: unique names across the whole
    repository, unique per entity, and unique per (entity, subtype) path;
    overlapping paths make these differ. An item is any node carrying at
    least one part or a whole-object material expression; averages are
    arithmetic means over items.
    """
    stats = RepoStats()
    if not repo.entities:
        stats.empty = True
        stats.items_without_parts = {
            level.value: LevelPartGap() for level in Level
        }
        return stats

    subtype_names: set[str] = set()
    subtype_pairs: set[tuple[str, str]] = set()
    subsub_names: set[str] = set()
    subsub_pairs: set[tuple[str, str]] = set()
    subsub_triples: set[tuple[str, str, str]] = set()
    gaps = {level.value: LevelPartGap() for level in Level}
    item_part_counts: list[int] = []
    item_material_counts: list[int] = []

    for entity in repo.entities:
        if entity.no_distinct_subtypes:
            stats.entities_without_subtypes += 1
        for entry in _walk_with_paths(entity):
            node = entry.node
            if node.level is Level.SUBTYPE:
                subtype_names.add(node.name)
                subtype_pairs.add((entity.name, node.name))
            elif node.level is Level.SUBSUBTYPE:
                subsub_names.add(node.name)
                subsub_pairs.add((entity.name, node.name))
                subsub_triples.add((entity.name, entry.path[1], node.name))
            if not node.children:
                gap = gaps[node.level.value]
                gap.total += 1
                if not node.parts:
                    gap.without_parts += 1
            if node.is_item():
                item_part_counts.append(len(node.parts))
                item_material_counts.append(_distinct_materials(node))

    stats.total_items = len(item_part_counts)
    stats.unique_subtypes_global = len(subtype_names)
    stats.unique_subtypes_per_entity = len(subtype_pairs)
    stats.unique_subsubtypes_global = len(subsub_names)
    stats.unique_subsubtypes_per_entity = len(subsub_pairs)
    stats.unique_subsubtypes_per_entity_subtype = len(subsub_triples)
    stats.items_without_parts = gaps
    if item_part_counts:
        stats.avg_parts_per_item = sum(item_part_counts) / len(item_part_counts)
        stats.avg_materials_per_item = sum(item_material_counts) / len(
            item_material_counts
        )
    else:
        stats.empty = True
    return stats


def _walk_with_paths(entity: KbNode) -> list[IndexEntry]:
    out: list[IndexEntry] = []

    def visit(node: KbNode, path: tuple[str, ...]) -> None:
        path = path + (node.name,)
        out.append(IndexEntry(path=path, node=node))
        for child in node.children:
            visit(child, path)

    visit(entity, ())
    return out


def format_stats(stats: RepoStats) -> str:
    """Aligned, human-readable layout of the repository statistics."""
    lines = [
        f"Total items:                     {stats.total_items}",
        f"Entities without subtypes:       {stats.entities_without_subtypes}",
        "Unique subtypes:",
        f"  across all entities:           {stats.unique_subtypes_global}",
        f"  per entity:                    {stats.unique_subtypes_per_entity}",
        "Unique subsubtypes:",
        f"  across all entities:           {stats.unique_subsubtypes_global}",
        f"  per entity:                    {stats.unique_subsubtypes_per_entity}",
        f"  per entity and subtype:        {stats.unique_subsubtypes_per_entity_subtype}",
        "Items without parts:",
    ]
    for level, gap in stats.items_without_parts.items():
        lines.append(
            f"  {level + ':':<16}               {gap.without_parts} (out of {gap.total})"
        )
    lines.append(f"Average parts per item:          {stats.avg_parts_per_item:.2f}")
    lines.append(
        f"Average materials per item:      {stats.avg_materials_per_item:.2f}"
    )
    if stats.empty:
        lines.append("(repository is empty; averages reported as 0)")
    return "\n".join(lines)


# --- queries ----------------------------------------------------------------


@dataclass(frozen=True)
class QueryAnswer:
    path: tuple[str, ...]
    kind: Question
    parts: tuple[str, ...] = ()
    subtypes: tuple[str, ...] = ()
    materials: MaterialExpr | EntityMarker | None = None
    per_part: tuple[tuple[str, MaterialExpr | EntityMarker | None], ...] = ()


def query(repo: Repository, name: str, question: Question) -> list[QueryAnswer]:
    """Answer PARTS/SUBTYPES/MATERIALS for a node (or, for MATERIALS, a part).

    Every path carrying the name is answered; more than one answer means
    the name was ambiguous. Unknown names raise :class:`NotFoundError`.
    """
    key = normalize_name(name)
    answers: list[QueryAnswer] = []
    for entry in repo.index.get(key, ()):
        if question is Question.PARTS:
            answers.append(
                QueryAnswer(
                    path=entry.path,
                    kind=question,
                    parts=tuple(p.name for p in entry.node.parts),
                )
            )
        elif question is Question.SUBTYPES:
            answers.append(
                QueryAnswer(
                    path=entry.path,
                    kind=question,
                    subtypes=tuple(c.name for c in entry.node.children),
                )
            )
        else:
            answers.append(
                QueryAnswer(
                    path=entry.path,
                    kind=question,
                    materials=entry.node.whole_materials,
                    per_part=tuple(
                        (p.name, entry.node.part_materials(p.name))
                        for p in entry.node.parts
                    ),
                )
            )
    if question is Question.MATERIALS:
        for entry in repo.part_index.get(key, ()):
            answers.append(
                QueryAnswer(
                    path=entry.path + (entry.part.name,),
                    kind=question,
                    materials=entry.node.part_materials(entry.part.name),
                )
            )
    if not answers:
        raise NotFoundError(f"{name!r} is not in the repository")
    return answers


# --- persistence ------------------------------------------------------------

_SLUG_RE = re.compile(r"[^a-z0-9]+")


def entity_filename(name: str) -> str:
    key = normalize_name(name)
    slug = _SLUG_RE.sub("_", key.lower()).strip("_") or "entity"
    digest = hashlib.sha256(key.encode("utf-8")).hexdigest()[:8]
    return f"{slug}-{digest}.json"


def _dump_json(obj: object) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def save_entity(node: KbNode, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / entity_filename(node.name)
    path.write_text(_dump_json(entity_to_document(node)), encoding="utf-8")
    return path


def save(repo: Repository, directory: str | Path) -> None:
    """Write one kb/1 document per entity plus a manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest: dict[str, object] = {"schema": SCHEMA_VERSION, "entities": {}}
    entries: dict[str, str] = {}
    for node in sorted(repo.entities, key=lambda n: n.name):
        filename = entity_filename(node.name)
        (directory / filename).write_text(
            _dump_json(entity_to_document(node)), encoding="utf-8"
        )
        entries[node.name] = filename
    manifest["entities"] = dict(sorted(entries.items()))
    (directory / "manifest.json").write_text(_dump_json(manifest), encoding="utf-8")


def load(directory: str | Path) -> Repository:
    """Load and re-validate a saved repository."""
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.is_file():
        raise KbStoreError(f"no manifest.json under {directory}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    if manifest.get("schema") != SCHEMA_VERSION:
        raise KbValidationError(f"unsupported schema {manifest.get('schema')!r}")
    trees = []
    for name, filename in manifest.get("entities", {}).items():
        path = directory / filename
        if not path.is_file():
            raise KbStoreError(f"manifest references missing file {filename}")
        doc = json.loads(path.read_text(encoding="utf-8"))
        node = entity_from_document(doc)
        if node.name != name:
            raise KbValidationError(
                f"{filename} holds {node.name!r}, manifest says {name!r}"
            )
        trees.append(node)
    return assemble(trees)


def load_entity_files(paths: Sequence[str | Path]) -> Repository:
    trees = []
    for path in paths:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        trees.append(entity_from_document(doc))
    return assemble(trees)
