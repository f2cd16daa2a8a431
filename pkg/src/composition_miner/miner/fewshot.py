"""Two-stage mining with in-context demonstrations.

Stage 1 asks for subtypes (and nested subsubtypes) with their parts; stage 2
asks, item by item, for the materials of those parts. Responses follow a
rigid numbered-line grammar; anything that deviates quarantines the whole
response rather than being repaired.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from ..kbmodel import (
    INTERNAL_MECHANISM,
    KbNode,
    Level,
    MaterialExpr,
    KbModelError,
    Part,
    Provenance,
    normalize_name,
    parse_material_expr,
)
from ..llmclient import LlmClient
from .jobs import GrammarError, MiningResult, QuarantineRecord
from .prompts import render_fewshot_stage1, render_fewshot_stage2

_SUBSUB_RE = re.compile(r"^(\d+)\.([a-z])\)\s*(.+)$")
_SUBTYPE_RE = re.compile(r"^(\d+)[.)]\s*(.+)$")
_HEADER_RE = re.compile(r"^subtypes(?:\s+\d+)?\s*:\s*(.*)$", re.IGNORECASE)
_PARTS_HEADER_RE = re.compile(r"^physical parts\s*:\s*(.*)$", re.IGNORECASE)
_OPTIONAL_RE = re.compile(r"\s*\(optional\)\s*$", re.IGNORECASE)
_NO_SUBTYPES = "no distinct subtypes"
_NO_PARTS = "no distinct parts"


def _parse_part_token(token: str) -> Part | None:
    token = token.strip()
    if not token or token == "-":
        return None
    optional = False
    stripped = _OPTIONAL_RE.sub("", token)
    if stripped != token:
        optional = True
    name = normalize_name(stripped)
    return Part(
        name=name,
        optional=optional,
        internal_mechanism=(name == INTERNAL_MECHANISM),
    )


def _parse_parts_list(text: str, line_no: int) -> tuple[Part, ...]:
    parts: list[Part] = []
    seen: set[str] = set()
    for token in text.split(","):
        part = _parse_part_token(token)
        if part is None:
            continue
        if part.name in seen:
            raise GrammarError(f"duplicate part {part.name!r}", line_no)
        seen.add(part.name)
        parts.append(part)
    return tuple(parts)


def _split_name_parts(body: str, line_no: int) -> tuple[str, tuple[Part, ...]]:
    name, sep, rest = body.partition(":")
    if not name.strip():
        raise GrammarError("missing name before ':'", line_no)
    parts = _parse_parts_list(rest, line_no) if sep else ()
    return name.strip(), parts


def parse_fewshot_subtypes(
    text: str, entity: str, provenance: Provenance = Provenance.FEW_SHOT
) -> KbNode:
    """Parse a stage-1 response into an entity tree without materials.

    Recognizes numbered subtype lines, ``N.a)`` subsubtype lines, the
    ``(optional)`` part marker, and the two sentinel lines for entities
    without subtypes or parts. Raises :class:`GrammarError` (with the line
    number) on anything else; the caller quarantines the whole response.
    """
    no_distinct_subtypes = False
    no_distinct_parts = False
    entity_parts: tuple[Part, ...] = ()
    saw_entity_parts = False
    subtypes: list[dict] = []

    pending = [(i, line) for i, line in enumerate(text.splitlines(), start=1)]
    while pending:
        line_no, raw = pending.pop(0)
        line = raw.strip()
        if not line:
            continue
        header = _HEADER_RE.match(line)
        if header:
            remainder = header.group(1).strip()
            if remainder:
                pending.insert(0, (line_no, remainder))
            continue
        if _NO_SUBTYPES in line.lower():
            no_distinct_subtypes = True
            continue
        parts_header = _PARTS_HEADER_RE.match(line)
        if parts_header:
            if subtypes:
                raise GrammarError("part list alongside subtype list", line_no)
            saw_entity_parts = True
            rest = parts_header.group(1).strip()
            if rest.rstrip(".").strip().lower() == _NO_PARTS:
                no_distinct_parts = True
            else:
                entity_parts = _parse_parts_list(rest, line_no)
                if not entity_parts:
                    raise GrammarError("empty part list", line_no)
            continue
        subsub = _SUBSUB_RE.match(line)
        if subsub:
            number = int(subsub.group(1))
            if not subtypes or subtypes[-1]["number"] != number:
                raise GrammarError(
                    f"subsubtype {subsub.group(1)}.{subsub.group(2)}) without "
                    "a matching subtype",
                    line_no,
                )
            name, parts = _split_name_parts(subsub.group(3), line_no)
            subtypes[-1]["children"].append(
                KbNode(
                    name=name,
                    level=Level.SUBSUBTYPE,
                    provenance=provenance,
                    parts=parts,
                )
            )
            continue
        subtype = _SUBTYPE_RE.match(line)
        if subtype:
            if no_distinct_subtypes or saw_entity_parts:
                raise GrammarError("subtype after a sentinel line", line_no)
            name, parts = _split_name_parts(subtype.group(2), line_no)
            subtypes.append(
                {"number": int(subtype.group(1)), "name": name, "parts": parts, "children": []}
            )
            continue
        raise GrammarError(f"unrecognized line {line!r}", line_no)

    if subtypes and no_distinct_subtypes:
        raise GrammarError("both subtypes and the no-subtype sentinel present")
    children = tuple(
        KbNode(
            name=s["name"],
            level=Level.SUBTYPE,
            provenance=provenance,
            children=tuple(s["children"]),
            parts=s["parts"],
        )
        for s in subtypes
    )
    return KbNode(
        name=entity,
        level=Level.ENTITY,
        provenance=provenance,
        children=children,
        parts=entity_parts,
        no_distinct_subtypes=no_distinct_subtypes,
        no_distinct_parts=no_distinct_parts,
    )


_MATERIALS_LINE_RE = re.compile(r"^(\d+)[.)]\s*(.+)$")
_MATERIALS_HEADER_RE = re.compile(r"^materials\s*:\s*(.*)$", re.IGNORECASE)


@dataclass
class FewshotMaterials:
    """Stage-2 parse result, keyed by normalized part name."""

    by_part: dict[str, MaterialExpr] = field(default_factory=dict)
    whole: MaterialExpr | None = None
    unknown_parts: list[str] = field(default_factory=list)
    missing_parts: list[str] = field(default_factory=list)


def parse_fewshot_materials(text: str, expected_parts: list[str]) -> FewshotMaterials:
    """Parse a stage-2 response and reconcile it against the expected parts.

    Parts the response names but stage 1 did not are collected in
    ``unknown_parts``; expected parts without materials end up in
    ``missing_parts``. Both flag the job instead of failing it.
    """
    expected = {normalize_name(p): p for p in expected_parts}
    result = FewshotMaterials()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        header = _MATERIALS_HEADER_RE.match(line)
        if header:
            rest = header.group(1).strip()
            if rest:
                try:
                    result.whole = parse_material_expr(rest)
                except KbModelError as exc:
                    raise GrammarError(str(exc), line_no)
            continue
        numbered = _MATERIALS_LINE_RE.match(line)
        if numbered:
            name, sep, expr_text = numbered.group(2).partition(":")
            if not sep:
                raise GrammarError("part line without ':'", line_no)
            try:
                key = normalize_name(name)
                expr = parse_material_expr(expr_text)
            except KbModelError as exc:
                raise GrammarError(str(exc), line_no)
            if key in result.by_part:
                raise GrammarError(f"duplicate materials for {key!r}", line_no)
            result.by_part[key] = expr
            if key not in expected:
                result.unknown_parts.append(key)
            continue
        raise GrammarError(f"unrecognized line {line!r}", line_no)
    result.missing_parts = [
        key for key in expected if key not in result.by_part
    ]
    return result


def qualified_item_name(item: str, entity: str) -> str:
    """Render a subtype the way the material stage expects it.

    The entity's parenthesized disambiguator (or, failing that, the entity
    name itself) is appended: "Skater's gloves (ice hockey)",
    "Peripheral webcam (Webcam)".
    """
    if normalize_name(item) == normalize_name(entity):
        return entity
    match = re.search(r"\(([^)]*)\)", entity)
    qualifier = match.group(1) if match else entity
    return f"{item} ({qualifier})"


class FewShotMiner:
    """Runs the two-stage protocol for one entity at a time."""

    def __init__(self, client: LlmClient, model_id: str) -> None:
        self.client = client
        self.model_id = model_id

    def mine(self, entity: str) -> MiningResult:
        result = MiningResult(entity=entity)
        response = self.client.complete(render_fewshot_stage1(entity, self.model_id))
        result.prompts_used += 1
        try:
            tree = parse_fewshot_subtypes(response, entity)
        except GrammarError as exc:
            result.quarantines.append(
                QuarantineRecord(stage="subtypes", reason=str(exc), text=response)
            )
            return result
        result.audit.append(
            {
                "step": "subtypes",
                "no_distinct_subtypes": tree.no_distinct_subtypes,
                "subtype_count": len(tree.children),
            }
        )
        result.tree = self._attach_materials(tree, entity, is_root=True, result=result)
        return result

    def _attach_materials(
        self, node: KbNode, entity: str, *, is_root: bool, result: MiningResult
    ) -> KbNode:
        if node.children:
            children = tuple(
                self._attach_materials(child, entity, is_root=False, result=result)
                for child in node.children
            )
            return replace(node, children=children)
        item_name = entity if is_root else qualified_item_name(node.name, entity)
        request = render_fewshot_stage2(
            item_name, [p.name for p in node.parts], self.model_id
        )
        response = self.client.complete(request)
        result.prompts_used += 1
        try:
            materials = parse_fewshot_materials(response, [p.name for p in node.parts])
        except GrammarError as exc:
            result.quarantines.append(
                QuarantineRecord(
                    stage=f"materials/{normalize_name(item_name)}",
                    reason=str(exc),
                    text=response,
                )
            )
            return node
        for name in materials.unknown_parts:
            result.flags.append(f"unknown part {name!r} on {item_name!r}")
        for name in materials.missing_parts:
            result.flags.append(f"no materials for part {name!r} on {item_name!r}")
        if node.parts and materials.whole is not None:
            result.flags.append(f"stray whole-item materials on {item_name!r}")
        result.audit.append(
            {
                "step": "materials",
                "item": normalize_name(item_name),
                "parts": len(node.parts),
                "whole": materials.whole is not None,
            }
        )
        parts = tuple(
            replace(part, materials=materials.by_part.get(part.name, part.materials))
            for part in node.parts
        )
        whole = materials.whole if not node.parts else None
        return replace(node, parts=parts, whole_materials=whole)
