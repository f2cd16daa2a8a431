"""Multi-step zero-shot mining.

Each node is classified by a short sequence of single-purpose prompts:
subtype existence, subtype listing, a recognizability filter, a part
count, a same-materials check, and finally one of three material prompts.
Kept subtypes recurse once (entity > subtype > subsubtype); nodes at the
bottom level skip straight to the part-count question.
"""

from __future__ import annotations

import re

from ..kbmodel import (
    INTERNAL_MECHANISM,
    KbModelError,
    KbNode,
    Level,
    MaterialExpr,
    Part,
    Provenance,
    normalize_name,
    parse_material_expr,
)
from ..llmclient import ChatRequest, LlmClient
from .jobs import (
    CountParseError,
    GrammarError,
    KEPT_TAGS,
    MiningResult,
    QuarantineRecord,
    RecognizabilityTag,
    StateMachineStall,
    YesNoParseError,
)
from . import prompts

MAX_PROMPTS_PER_ENTITY = 64

_LEVELS = (Level.ENTITY, Level.SUBTYPE, Level.SUBSUBTYPE)

_YES_NO_RE = re.compile(r"^\W*(yes|no)\b", re.IGNORECASE)
_LIST_ITEM_RE = re.compile(r"^\s*(?:\d+[.)]|[-*•])\s*(.+?)\s*$")
_NUMBER_RE = re.compile(r"\d+")
_PART_LINE_RE = re.compile(r"^(\d+)[.)]\s*(.+)$")
_OPTIONAL_LINE_RE = re.compile(r"^-?\s*optional\s*:\s*(.+)$", re.IGNORECASE)
_MATERIALS_LINE_RE = re.compile(r"^-?\s*materials\s*:\s*(.+)$", re.IGNORECASE)
_WHOLE_FOOTER_RE = re.compile(r"^<materials>\s*:\s*(.+)$", re.IGNORECASE)
_PARTS_HEADER_RE = re.compile(r"^<parts>\s*$", re.IGNORECASE)
_OPTIONAL_SUFFIX_RE = re.compile(r"\s*\(optional\)\s*$", re.IGNORECASE)
_TAG_SUFFIX_RE = re.compile(
    r"\s*-?\s*\[?(likely|probably likely|probably unlikely|unlikely)\]?"
    r"(\s+recognized by most people)?\s*\.?\s*$",
    re.IGNORECASE,
)

_WORD_NUMBERS = {
    "zero": 0, "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11,
    "twelve": 12,
}


def parse_yes_no(text: str) -> bool | None:
    match = _YES_NO_RE.match(text.strip())
    if match is None:
        return None
    return match.group(1).lower() == "yes"


def parse_count(text: str) -> int | None:
    match = _NUMBER_RE.search(text)
    if match:
        return int(match.group(0))
    for word in re.findall(r"[a-z]+", text.lower()):
        if word in _WORD_NUMBERS:
            return _WORD_NUMBERS[word]
    return None


def clean_subtype_name(raw: str) -> str:
    """Strip enumeration markers and recognizability suffixes, keep the
    parenthesized disambiguators."""
    name = raw.strip()
    item = _LIST_ITEM_RE.match(name)
    if item:
        name = item.group(1)
    name = _TAG_SUFFIX_RE.sub("", name)
    return name.strip().rstrip(".").strip()


def parse_subtype_list(text: str) -> list[str]:
    """Names from a numbered or bulleted list; header lines ending in ':'
    are ignored, anything else unexpected fails the parse."""
    names: list[str] = []
    seen: set[str] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.endswith(":") and not names:
            continue
        item = _LIST_ITEM_RE.match(line)
        if item is None:
            raise GrammarError(f"unrecognized list line {line!r}", line_no)
        name = clean_subtype_name(item.group(1))
        if not name:
            raise GrammarError("empty list entry", line_no)
        key = normalize_name(name)
        if key not in seen:
            seen.add(key)
            names.append(name)
    if not names:
        raise GrammarError("no list entries found")
    return names


def parse_recognizability(text: str) -> dict[str, RecognizabilityTag]:
    """Map normalized subtype names to their recognizability tags."""
    tags: dict[str, RecognizabilityTag] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        match = _TAG_SUFFIX_RE.search(line)
        if match is None:
            continue
        tag_text = match.group(1).lower()
        name = clean_subtype_name(line[: match.start()])
        if not name:
            continue
        tags[normalize_name(name)] = RecognizabilityTag(tag_text)
    return tags


def _new_part(body: str, line_no: int) -> Part:
    name = body.partition(":")[0].strip()
    if not name:
        raise GrammarError("part line without a name", line_no)
    optional = False
    stripped = _OPTIONAL_SUFFIX_RE.sub("", name)
    if stripped != name:
        optional = True
        name = stripped
    key = normalize_name(name)
    return Part(
        name=key, optional=optional, internal_mechanism=(key == INTERNAL_MECHANISM)
    )


def _parse_flag(value: str, line_no: int) -> bool:
    flag = parse_yes_no(value)
    if flag is None:
        raise GrammarError(f"expected yes/no, got {value!r}", line_no)
    return flag


def parse_parts_block(text: str) -> tuple[tuple[Part, ...], MaterialExpr | None, list[str]]:
    """Parse the parts-plus-whole-materials response (uniform materials).

    Returns (parts, whole materials, warnings); a part without an explicit
    ``- Optional:`` line defaults to non-optional with a warning.
    """
    parts: list[Part] = []
    optional_seen: set[int] = set()
    whole: MaterialExpr | None = None
    warnings: list[str] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or _PARTS_HEADER_RE.match(line):
            continue
        footer = _WHOLE_FOOTER_RE.match(line)
        if footer:
            if whole is not None:
                raise GrammarError("second whole-materials footer", line_no)
            try:
                whole = parse_material_expr(footer.group(1))
            except KbModelError as exc:
                raise GrammarError(str(exc), line_no)
            continue
        optional = _OPTIONAL_LINE_RE.match(line)
        if optional:
            if not parts or len(parts) in optional_seen:
                raise GrammarError("optional flag without a part", line_no)
            flag = _parse_flag(optional.group(1), line_no)
            parts[-1] = Part(
                name=parts[-1].name,
                optional=flag,
                internal_mechanism=parts[-1].internal_mechanism,
            )
            optional_seen.add(len(parts))
            continue
        numbered = _PART_LINE_RE.match(line)
        if numbered:
            if whole is not None:
                raise GrammarError("part after the whole-materials footer", line_no)
            part = _new_part(numbered.group(2), line_no)
            if any(p.name == part.name for p in parts):
                raise GrammarError(f"duplicate part {part.name!r}", line_no)
            parts.append(part)
            continue
        raise GrammarError(f"unrecognized line {line!r}", line_no)
    if whole is None:
        raise GrammarError("missing whole-materials footer")
    for index, part in enumerate(parts, start=1):
        if index not in optional_seen:
            warnings.append(f"part {part.name!r} missing optional flag")
    return tuple(parts), whole, warnings


def parse_parts_materials_block(text: str) -> tuple[tuple[Part, ...], list[str]]:
    """Parse the per-part materials response; every part needs materials."""
    parts: list[Part] = []
    optional_seen: set[int] = set()
    warnings: list[str] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or _PARTS_HEADER_RE.match(line):
            continue
        optional = _OPTIONAL_LINE_RE.match(line)
        if optional:
            if not parts or len(parts) in optional_seen:
                raise GrammarError("optional flag without a part", line_no)
            flag = _parse_flag(optional.group(1), line_no)
            parts[-1] = Part(
                name=parts[-1].name,
                optional=flag,
                materials=parts[-1].materials,
                internal_mechanism=parts[-1].internal_mechanism,
            )
            optional_seen.add(len(parts))
            continue
        materials = _MATERIALS_LINE_RE.match(line)
        if materials:
            if not parts:
                raise GrammarError("materials line without a part", line_no)
            if parts[-1].materials is not None:
                raise GrammarError(
                    f"second materials line for {parts[-1].name!r}", line_no
                )
            try:
                expr = parse_material_expr(materials.group(1))
            except KbModelError as exc:
                raise GrammarError(str(exc), line_no)
            parts[-1] = Part(
                name=parts[-1].name,
                optional=parts[-1].optional,
                materials=expr,
                internal_mechanism=parts[-1].internal_mechanism,
            )
            continue
        numbered = _PART_LINE_RE.match(line)
        if numbered:
            part = _new_part(numbered.group(2), line_no)
            if any(p.name == part.name for p in parts):
                raise GrammarError(f"duplicate part {part.name!r}", line_no)
            parts.append(part)
            continue
        raise GrammarError(f"unrecognized line {line!r}", line_no)
    if not parts:
        raise GrammarError("no parts found")
    for index, part in enumerate(parts, start=1):
        if part.materials is None:
            raise GrammarError(f"part {part.name!r} has no materials line")
        if index not in optional_seen:
            warnings.append(f"part {part.name!r} missing optional flag")
    return tuple(parts), warnings


def parse_whole_materials(text: str) -> MaterialExpr:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise GrammarError("empty materials response")
    if len(lines) > 1:
        raise GrammarError("expected a single materials line")
    line = re.sub(r"^materials\s*:\s*", "", lines[0], flags=re.IGNORECASE)
    try:
        return parse_material_expr(line)
    except KbModelError as exc:
        raise GrammarError(str(exc), 1)


class ZeroShotMiner:
    """Drives the multi-step classification for one entity at a time."""

    def __init__(
        self,
        client: LlmClient,
        model_id: str,
        max_prompts: int = MAX_PROMPTS_PER_ENTITY,
    ) -> None:
        self.client = client
        self.model_id = model_id
        self.max_prompts = max_prompts

    def mine(self, entity: str) -> MiningResult:
        result = MiningResult(entity=entity)
        try:
            result.tree = self._classify(entity, depth=0, result=result)
        except (GrammarError, YesNoParseError, CountParseError) as exc:
            result.quarantines.append(
                QuarantineRecord(
                    stage=getattr(exc, "stage", "response"),
                    reason=str(exc),
                    text=getattr(exc, "text", ""),
                )
            )
        except StateMachineStall as exc:
            result.flags.append(str(exc))
            result.quarantines.append(
                QuarantineRecord(stage="budget", reason=str(exc), text="")
            )
        return result

    # -- prompt plumbing ---------------------------------------------------

    def _ask(self, request: ChatRequest, result: MiningResult) -> str:
        if result.prompts_used >= self.max_prompts:
            raise StateMachineStall(
                f"prompt budget of {self.max_prompts} exhausted for {result.entity!r}"
            )
        result.prompts_used += 1
        return self.client.complete(request)

    def _ask_yes_no(
        self, request: ChatRequest, step: str, result: MiningResult
    ) -> bool:
        response = self._ask(request, result)
        answer = parse_yes_no(response)
        if answer is None:
            retry = prompts.with_retry_suffix(request, prompts.YES_NO_RETRY_SUFFIX)
            response = self._ask(retry, result)
            answer = parse_yes_no(response)
            if answer is None:
                error = YesNoParseError(
                    f"{step}: not a yes/no answer after one re-ask", text=response
                )
                error.stage = step
                raise error
        return answer

    def _ask_count(self, request: ChatRequest, result: MiningResult) -> int:
        response = self._ask(request, result)
        count = parse_count(response)
        if count is None:
            retry = prompts.with_retry_suffix(request, prompts.COUNT_RETRY_SUFFIX)
            response = self._ask(retry, result)
            count = parse_count(response)
            if count is None:
                error = CountParseError(
                    "part count: not a number after one re-ask", text=response
                )
                error.stage = "part_count"
                raise error
        return count

    # -- the state machine ---------------------------------------------------

    def _classify(self, name: str, depth: int, result: MiningResult) -> KbNode:
        level = _LEVELS[depth]
        no_distinct_subtypes = False
        if depth < len(_LEVELS) - 1:
            has_subtypes = self._ask_yes_no(
                prompts.render_has_subtypes(name, self.model_id),
                "has_subtypes",
                result,
            )
            result.audit.append(
                {"node": name, "depth": depth, "step": "has_subtypes",
                 "answer": has_subtypes}
            )
            if has_subtypes:
                node = self._classify_subtypes(name, depth, level, result)
                if node is not None:
                    return node
                # every listed subtype was filtered out; classify the node
                # itself instead
            else:
                no_distinct_subtypes = True
        return self._classify_parts(name, level, no_distinct_subtypes, result)

    def _classify_subtypes(
        self, name: str, depth: int, level: Level, result: MiningResult
    ) -> KbNode | None:
        listing = self._ask(prompts.render_list_subtypes(name, self.model_id), result)
        try:
            subtype_names = parse_subtype_list(listing)
        except GrammarError as exc:
            exc.stage = "list_subtypes"
            exc.text = listing
            raise
        tag_response = self._ask(
            prompts.render_recognizability(name, subtype_names, self.model_id), result
        )
        tags = parse_recognizability(tag_response)
        kept = []
        for subtype in subtype_names:
            tag = tags.get(normalize_name(subtype))
            if tag is None:
                result.flags.append(f"no recognizability tag for {subtype!r}")
            elif tag in KEPT_TAGS:
                kept.append(subtype)
        result.audit.append(
            {"node": name, "depth": depth, "step": "subtypes",
             "listed": len(subtype_names), "kept": len(kept)}
        )
        if not kept:
            return None
        children = tuple(
            self._classify(subtype, depth + 1, result) for subtype in kept
        )
        return KbNode(
            name=name,
            level=level,
            provenance=Provenance.ZERO_SHOT,
            children=children,
        )

    def _classify_parts(
        self,
        name: str,
        level: Level,
        no_distinct_subtypes: bool,
        result: MiningResult,
    ) -> KbNode:
        count = self._ask_count(prompts.render_part_count(name, self.model_id), result)
        result.audit.append(
            {"node": name, "step": "part_count", "answer": count}
        )
        if count < 2:
            response = self._ask(
                prompts.render_whole_materials(name, self.model_id), result
            )
            try:
                whole = parse_whole_materials(response)
            except GrammarError as exc:
                exc.stage = "whole_materials"
                exc.text = response
                raise
            result.audit.append({"node": name, "step": "whole_materials"})
            return KbNode(
                name=name,
                level=level,
                provenance=Provenance.ZERO_SHOT,
                whole_materials=whole,
                no_distinct_subtypes=no_distinct_subtypes,
                no_distinct_parts=True,
            )
        same = self._ask_yes_no(
            prompts.render_same_materials(name, self.model_id),
            "same_materials",
            result,
        )
        if same:
            response = self._ask(
                prompts.render_parts_and_whole_materials(name, self.model_id), result
            )
            try:
                parts, whole, warnings = parse_parts_block(response)
            except GrammarError as exc:
                exc.stage = "parts_and_whole_materials"
                exc.text = response
                raise
            result.flags.extend(warnings)
            result.audit.append(
                {"node": name, "step": "parts_and_whole_materials",
                 "parts": len(parts)}
            )
            return KbNode(
                name=name,
                level=level,
                provenance=Provenance.ZERO_SHOT,
                parts=parts,
                whole_materials=whole,
                uniform_materials=bool(parts),
                no_distinct_subtypes=no_distinct_subtypes,
            )
        response = self._ask(
            prompts.render_parts_with_materials(name, self.model_id), result
        )
        try:
            parts, warnings = parse_parts_materials_block(response)
        except GrammarError as exc:
            exc.stage = "parts_with_materials"
            exc.text = response
            raise
        result.flags.extend(warnings)
        result.audit.append(
            {"node": name, "step": "parts_with_materials", "parts": len(parts)}
        )
        return KbNode(
            name=name,
            level=level,
            provenance=Provenance.ZERO_SHOT,
            parts=parts,
            no_distinct_subtypes=no_distinct_subtypes,
        )


def run_zeroshot(
    entity: str,
    client: LlmClient,
    model_id: str,
    max_prompts: int = MAX_PROMPTS_PER_ENTITY,
) -> MiningResult:
    return ZeroShotMiner(client, model_id, max_prompts).mine(entity)
