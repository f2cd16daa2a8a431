"""Domain model for the object-composition knowledge base.

Holds the material-conjunction algebra (names joined by ``and``, ``or`` or
``and/or``), parts with optional/internal-mechanism flags, the three-level
entity > subtype > subsubtype hierarchy, and the ``kb/1`` JSON encoding
shared by every other module. All values are immutable after construction
and safe to share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, Mapping


class KbModelError(ValueError):
    """Base class for domain-model violations."""


class EmptyNameError(KbModelError):
    pass


class EmptyMaterialListError(KbModelError):
    pass


class MixedConjunctionsError(KbModelError):
    """A single material list used two different conjunctions."""


class KbValidationError(KbModelError):
    """A node loaded from disk violates a structural invariant."""


class Connective(Enum):
    SINGLE = "single"
    AND = "and"
    OR = "or"
    AND_OR = "and/or"


class Level(Enum):
    ENTITY = "entity"
    SUBTYPE = "subtype"
    SUBSUBTYPE = "subsubtype"

    @property
    def child_level(self) -> "Level | None":
        if self is Level.ENTITY:
            return Level.SUBTYPE
        if self is Level.SUBTYPE:
            return Level.SUBSUBTYPE
        return None


class Provenance(Enum):
    FEW_SHOT = "few_shot"
    ZERO_SHOT = "zero_shot"
    HUMAN = "human"


class MaterialClass(Enum):
    """Origin of a material in human-annotated data."""

    PROPER = "proper"
    FOUND = "found"
    INFERRED = "inferred"


INTERNAL_MECHANISM = "internal mechanism"

SCHEMA_VERSION = "kb/1"

# Matches a standalone conjunction word; "sand" or "android" never match.
_CONNECTIVE_RE = re.compile(r"\b(and/or|and|or)\b")

_CONNECTIVE_BY_WORD = {
    "and": Connective.AND,
    "or": Connective.OR,
    "and/or": Connective.AND_OR,
}


def normalize_name(raw: str) -> str:
    """Canonicalize a name: trim, collapse whitespace, lowercase.

    Content inside parentheses keeps its case so disambiguators like
    "(ice hockey)" survive round trips to external article titles.
    Idempotent.
    """
    if raw is None or not raw.strip():
        raise EmptyNameError("name is empty")
    collapsed = " ".join(raw.split())
    out = []
    depth = 0
    for ch in collapsed:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth = max(0, depth - 1)
        out.append(ch if depth > 0 else ch.lower())
    return "".join(out)


@dataclass(frozen=True)
class MaterialExpr:
    """An ordered list of material names joined by one conjunction.

    ``and`` means the materials are used together, ``or`` means each is
    used exclusively, and ``and/or`` means they typically appear in
    combination. Atoms may not contain commas or standalone conjunction
    words, so printing and re-parsing an expression is the identity.
    """

    atoms: tuple[str, ...]
    connective: Connective

    def __post_init__(self) -> None:
        raw = tuple(self.atoms)
        if not raw:
            raise EmptyMaterialListError("material list is empty")
        if (self.connective is Connective.SINGLE) != (len(raw) == 1):
            raise KbModelError(
                f"connective {self.connective.value!r} does not fit {len(raw)} atom(s)"
            )
        atoms = []
        for atom in raw:
            if not atom or not atom.strip():
                raise EmptyMaterialListError("material name is empty")
            if "," in atom or _CONNECTIVE_RE.search(atom):
                raise KbModelError(f"material name {atom!r} is not printable")
            atoms.append(normalize_name(atom))
        if len(set(atoms)) != len(atoms):
            raise KbModelError(f"duplicate material in {raw!r}")
        object.__setattr__(self, "atoms", tuple(atoms))

    def __str__(self) -> str:
        return print_material_expr(self)


def parse_material_expr(text: str) -> MaterialExpr:
    """Parse a material list as emitted by the prompts.

    Accepts ``"a"``, ``"a or b"``, ``"a, b, and c"`` and the variants with
    or without the comma before the final conjunction. A list mixing two
    different conjunctions is rejected rather than guessed at.
    """
    cleaned = text.strip().rstrip(".").strip()
    if not cleaned or cleaned == "-":
        raise EmptyMaterialListError(f"no materials in {text!r}")
    atoms: list[str] = []
    connectives: list[str] = []
    for piece in cleaned.split(","):
        segments = _CONNECTIVE_RE.split(piece)
        for i, segment in enumerate(segments):
            if i % 2 == 1:
                connectives.append(segment)
            else:
                atom = segment.strip()
                if atom:
                    atoms.append(normalize_name(atom))
    distinct = set(connectives)
    if len(distinct) > 1:
        raise MixedConjunctionsError(
            f"mixed conjunctions {sorted(distinct)} in {text!r}"
        )
    if not atoms:
        raise EmptyMaterialListError(f"no materials in {text!r}")
    if not connectives:
        if len(atoms) == 1:
            return MaterialExpr(tuple(atoms), Connective.SINGLE)
        raise KbModelError(f"multi-material list without a conjunction: {text!r}")
    if len(atoms) == 1:
        raise KbModelError(f"conjunction without two materials: {text!r}")
    return MaterialExpr(tuple(atoms), _CONNECTIVE_BY_WORD[connectives[0]])


def print_material_expr(expr: MaterialExpr) -> str:
    """Render the canonical text form; inverse of :func:`parse_material_expr`."""
    if expr.connective is Connective.SINGLE:
        return expr.atoms[0]
    word = expr.connective.value
    if len(expr.atoms) == 2:
        return f"{expr.atoms[0]} {word} {expr.atoms[1]}"
    head = ", ".join(expr.atoms[:-1])
    return f"{head}, {word} {expr.atoms[-1]}"


class EntityMarker:
    """Sentinel used instead of materials when a part consists of further parts."""

    _instance: "EntityMarker | None" = None

    def __new__(cls) -> "EntityMarker":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ENTITY_MARKER"


ENTITY_MARKER = EntityMarker()


@dataclass(frozen=True)
class Part:
    """A named component of an item.

    ``materials`` is a :class:`MaterialExpr`, ``ENTITY_MARKER`` (the part
    decomposes into further parts), or ``None`` when unknown or inherited
    via uniform materials. ``material_classes`` carries the per-material
    provenance used by human-annotated trees.
    """

    name: str
    optional: bool = False
    materials: MaterialExpr | EntityMarker | None = None
    internal_mechanism: bool = False
    material_classes: Mapping[str, MaterialClass] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "name", normalize_name(self.name))
        if self.internal_mechanism and self.name != INTERNAL_MECHANISM:
            raise KbModelError(
                f"internal-mechanism flag on part named {self.name!r}"
            )
        if self.material_classes is not None:
            if not isinstance(self.materials, MaterialExpr):
                raise KbModelError(
                    f"material classes on part {self.name!r} without materials"
                )
            atoms = {normalize_name(a) for a in self.materials.atoms}
            unknown = set(self.material_classes) - atoms
            if unknown:
                raise KbModelError(
                    f"material classes for unknown materials {sorted(unknown)}"
                )


@dataclass(frozen=True)
class KbNode:
    """One node of the entity > subtype > subsubtype hierarchy.

    Invariants are enforced at construction time, so any node reachable
    from Python code (including ones loaded from disk) is structurally
    valid: levels strictly increase along edges, the sentinel flags imply
    empty children/parts, and whole-object materials appear only on
    partless or uniform-material nodes.
    """

    name: str
    level: Level
    provenance: Provenance
    children: tuple["KbNode", ...] = ()
    parts: tuple[Part, ...] = ()
    whole_materials: MaterialExpr | None = None
    no_distinct_subtypes: bool = False
    no_distinct_parts: bool = False
    uniform_materials: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "name", normalize_name(self.name))
        object.__setattr__(self, "children", tuple(self.children))
        object.__setattr__(self, "parts", tuple(self.parts))
        child_level = self.level.child_level
        for child in self.children:
            if child_level is None:
                raise KbValidationError(
                    f"{self.level.value} node {self.name!r} cannot have children"
                )
            if child.level is not child_level:
                raise KbValidationError(
                    f"child {child.name!r} of {self.name!r} has level "
                    f"{child.level.value}, expected {child_level.value}"
                )
            if child.provenance is not self.provenance:
                raise KbValidationError(
                    f"child {child.name!r} of {self.name!r} changes provenance"
                )
        if self.no_distinct_subtypes and self.children:
            raise KbValidationError(
                f"node {self.name!r} flagged subtype-less but has children"
            )
        if self.no_distinct_parts and self.parts:
            raise KbValidationError(
                f"node {self.name!r} flagged part-less but has parts"
            )
        if self.whole_materials is not None and self.parts and not self.uniform_materials:
            raise KbValidationError(
                f"node {self.name!r} has whole-object materials alongside "
                "parts without the uniform-materials flag"
            )
        if self.uniform_materials:
            has_reference = any(
                isinstance(p.materials, MaterialExpr) for p in self.parts
            )
            if not has_reference and self.whole_materials is None:
                raise KbValidationError(
                    f"uniform-materials node {self.name!r} has no reference materials"
                )
        if self.provenance is not Provenance.HUMAN:
            for part in self.parts:
                if part.material_classes is not None:
                    raise KbValidationError(
                        f"material classes on part {part.name!r} of "
                        f"non-human node {self.name!r}"
                    )

    def walk(self) -> Iterable["KbNode"]:
        """Yield this node and all descendants, depth first."""
        yield self
        for child in self.children:
            yield from child.walk()

    def is_item(self) -> bool:
        """True when this node carries parts and/or materials of its own."""
        return bool(self.parts) or self.whole_materials is not None

    def find_part(self, name: str) -> Part | None:
        key = normalize_name(name)
        for part in self.parts:
            if part.name == key:
                return part
        return None

    def part_materials(self, name: str) -> MaterialExpr | EntityMarker | None:
        """Materials of one part, following the uniform-materials fallback.

        A blank part on a uniform-materials node inherits the materials of
        the first sibling that states any, or the whole-object materials.
        """
        part = self.find_part(name)
        if part is None:
            return None
        if part.materials is not None:
            return part.materials
        if self.uniform_materials:
            for sibling in self.parts:
                if isinstance(sibling.materials, MaterialExpr):
                    return sibling.materials
            return self.whole_materials
        return None


# --- kb/1 JSON encoding ---------------------------------------------------


def material_expr_to_dict(expr: MaterialExpr) -> dict[str, Any]:
    return {"atoms": list(expr.atoms), "connective": expr.connective.value}


def material_expr_from_dict(obj: Any) -> MaterialExpr:
    try:
        atoms = tuple(obj["atoms"])
        connective = Connective(obj["connective"])
    except (KeyError, TypeError, ValueError) as exc:
        raise KbValidationError(f"bad materials object {obj!r}") from exc
    try:
        return MaterialExpr(atoms, connective)
    except KbModelError as exc:
        raise KbValidationError(str(exc)) from exc


def _part_to_dict(part: Part) -> dict[str, Any]:
    materials: Any
    if isinstance(part.materials, MaterialExpr):
        materials = material_expr_to_dict(part.materials)
    elif part.materials is ENTITY_MARKER:
        materials = "entity"
    else:
        materials = None
    out: dict[str, Any] = {
        "name": part.name,
        "optional": part.optional,
        "materials": materials,
        "internal_mechanism": part.internal_mechanism,
    }
    if part.material_classes is not None:
        out["material_classes"] = {
            atom: cls.value for atom, cls in sorted(part.material_classes.items())
        }
    return out


def _part_from_dict(obj: Any) -> Part:
    if not isinstance(obj, dict) or "name" not in obj:
        raise KbValidationError(f"bad part object {obj!r}")
    raw_materials = obj.get("materials")
    materials: MaterialExpr | EntityMarker | None
    if raw_materials is None:
        materials = None
    elif raw_materials == "entity":
        materials = ENTITY_MARKER
    else:
        materials = material_expr_from_dict(raw_materials)
    classes = None
    if obj.get("material_classes") is not None:
        try:
            classes = {
                atom: MaterialClass(value)
                for atom, value in obj["material_classes"].items()
            }
        except (AttributeError, ValueError) as exc:
            raise KbValidationError(f"bad material classes in {obj!r}") from exc
    try:
        return Part(
            name=obj["name"],
            optional=bool(obj.get("optional", False)),
            materials=materials,
            internal_mechanism=bool(obj.get("internal_mechanism", False)),
            material_classes=classes,
        )
    except KbModelError as exc:
        raise KbValidationError(str(exc)) from exc


def node_to_dict(node: KbNode) -> dict[str, Any]:
    return {
        "name": node.name,
        "no_distinct_subtypes": node.no_distinct_subtypes,
        "no_distinct_parts": node.no_distinct_parts,
        "uniform_materials": node.uniform_materials,
        "whole_materials": (
            material_expr_to_dict(node.whole_materials)
            if node.whole_materials is not None
            else None
        ),
        "parts": [_part_to_dict(p) for p in node.parts],
        "children": [node_to_dict(c) for c in node.children],
    }


def node_from_dict(
    obj: Any, level: Level, provenance: Provenance
) -> KbNode:
    if not isinstance(obj, dict) or "name" not in obj:
        raise KbValidationError(f"bad node object {obj!r}")
    child_level = level.child_level
    raw_children = obj.get("children") or []
    if raw_children and child_level is None:
        raise KbValidationError(
            f"node {obj.get('name')!r} nests deeper than three levels"
        )
    children = tuple(
        node_from_dict(c, child_level, provenance) for c in raw_children
    )
    whole = obj.get("whole_materials")
    try:
        return KbNode(
            name=obj["name"],
            level=level,
            provenance=provenance,
            children=children,
            parts=tuple(_part_from_dict(p) for p in (obj.get("parts") or [])),
            whole_materials=(
                material_expr_from_dict(whole) if whole is not None else None
            ),
            no_distinct_subtypes=bool(obj.get("no_distinct_subtypes", False)),
            no_distinct_parts=bool(obj.get("no_distinct_parts", False)),
            uniform_materials=bool(obj.get("uniform_materials", False)),
        )
    except KbModelError as exc:
        raise KbValidationError(str(exc)) from exc


def entity_to_document(node: KbNode) -> dict[str, Any]:
    """Encode one entity tree as a standalone kb/1 document."""
    if node.level is not Level.ENTITY:
        raise KbValidationError(f"{node.name!r} is not an entity-level node")
    doc: dict[str, Any] = {"schema": SCHEMA_VERSION, "provenance": node.provenance.value}
    doc.update(node_to_dict(node))
    return doc


def entity_from_document(doc: Any) -> KbNode:
    """Decode and validate a kb/1 document; raises on any invariant violation."""
    if not isinstance(doc, dict):
        raise KbValidationError("document is not an object")
    if doc.get("schema") != SCHEMA_VERSION:
        raise KbValidationError(f"unsupported schema {doc.get('schema')!r}")
    try:
        provenance = Provenance(doc.get("provenance"))
    except ValueError as exc:
        raise KbValidationError(f"bad provenance {doc.get('provenance')!r}") from exc
    return node_from_dict(doc, Level.ENTITY, provenance)
