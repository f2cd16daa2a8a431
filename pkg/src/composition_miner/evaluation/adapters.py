"""Ingestion adapters for the external reference datasets.

Each adapter lowers one upstream file format into :class:`ReferenceItem`
rows; nothing here judges matches. ConceptNet rows sourced from WordNet
are dropped to avoid double counting, and WordNet items can be pulled from
explicit meronym pointers while glosses are surfaced for manual curation.
"""

from __future__ import annotations

import csv
import json
import re
from pathlib import Path
from typing import Iterable

from ..curation.wordnet import WordNetLexicon
from ..kbmodel import normalize_name
from .recall import Credit, Dataset, Overlay, OverlayKey, RefKind, ReferenceItem


class AdapterError(Exception):
    pass


def load_reference_tsv(path: str | Path) -> list[ReferenceItem]:
    """Generic format: dataset, entity, kind, value [, from_gloss]."""
    items = []
    for line_no, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) < 4:
            raise AdapterError(f"{path}:{line_no}: expected at least 4 columns")
        dataset, entity, kind, value = fields[:4]
        from_gloss = len(fields) > 4 and fields[4].strip().lower() in ("1", "true", "yes")
        try:
            items.append(
                ReferenceItem(
                    dataset=Dataset(dataset.strip().lower()),
                    entity=entity,
                    kind=RefKind(kind.strip().lower()),
                    value=value,
                    from_gloss=from_gloss,
                )
            )
        except ValueError as exc:
            raise AdapterError(f"{path}:{line_no}: {exc}") from exc
    return items


def load_overlay_tsv(path: str | Path) -> Overlay:
    """Adjudication overlay: dataset, entity, kind, value, credit."""
    overlay: dict[OverlayKey, Credit] = {}
    for line_no, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 5:
            raise AdapterError(f"{path}:{line_no}: expected 5 columns")
        dataset, entity, kind, value, credit = (f.strip() for f in fields)
        try:
            key = (
                Dataset(dataset.lower()).value,
                normalize_name(entity),
                RefKind(kind.lower()).value,
                normalize_name(value),
            )
            overlay[key] = Credit(credit.lower())
        except ValueError as exc:
            raise AdapterError(f"{path}:{line_no}: {exc}") from exc
    return overlay


# --- ConceptNet --------------------------------------------------------------

_CONCEPT_RE = re.compile(r"^/c/en/([^/]+)")

_PART_RELATION = "/r/PartOf"
_MADE_OF_RELATION = "/r/MadeOf"


def _concept_term(uri: str) -> str | None:
    match = _CONCEPT_RE.match(uri)
    if match is None:
        return None
    return match.group(1).replace("_", " ")


def _is_wordnet_sourced(metadata: str) -> bool:
    if not metadata:
        return False
    try:
        info = json.loads(metadata)
    except json.JSONDecodeError:
        return "wordnet" in metadata.lower()
    return "wordnet" in json.dumps(info).lower()


def load_conceptnet_assertions(path: str | Path) -> list[ReferenceItem]:
    """English PartOf/MadeOf assertions; WordNet-sourced rows are excluded."""
    items = []
    with open(path, encoding="utf-8") as handle:
        for row in csv.reader(handle, delimiter="\t"):
            if len(row) < 4:
                continue
            _, relation, start, end = row[:4]
            metadata = row[4] if len(row) > 4 else ""
            if relation not in (_PART_RELATION, _MADE_OF_RELATION):
                continue
            if _is_wordnet_sourced(metadata):
                continue
            start_term = _concept_term(start)
            end_term = _concept_term(end)
            if start_term is None or end_term is None:
                continue
            if relation == _PART_RELATION:
                # (part, PartOf, whole)
                items.append(
                    ReferenceItem(Dataset.CONCEPTNET, end_term, RefKind.PART, start_term)
                )
            else:
                # (whole, MadeOf, material)
                items.append(
                    ReferenceItem(
                        Dataset.CONCEPTNET, start_term, RefKind.MATERIAL, end_term
                    )
                )
    return items


# --- WordNet ------------------------------------------------------------------


def load_wordnet_references(
    lexicon: WordNetLexicon, entities: Iterable[str]
) -> tuple[list[ReferenceItem], dict[str, list[str]]]:
    """Meronym-pointer items for the given entities, plus their glosses.

    Part and substance meronyms become PART and MATERIAL items. Glosses
    often carry extra composition facts in prose; they are returned for
    manual curation (gloss-derived items enter via the generic TSV with the
    from_gloss flag set).
    """
    items: list[ReferenceItem] = []
    glosses: dict[str, list[str]] = {}
    for entity in entities:
        gloss_list: list[str] = []
        for synset in lexicon.synsets_for(entity):
            gloss_list.append(synset.gloss)
            for target in synset.part_meronyms:
                for word in lexicon.words_of(target):
                    items.append(
                        ReferenceItem(Dataset.WORDNET, entity, RefKind.PART, word)
                    )
            for target in synset.substance_meronyms:
                for word in lexicon.words_of(target):
                    items.append(
                        ReferenceItem(Dataset.WORDNET, entity, RefKind.MATERIAL, word)
                    )
        glosses[normalize_name(entity)] = gloss_list
    return items, glosses


# --- McRae / CSLB property norms ---------------------------------------------

_MCRAE_PART_RE = re.compile(r"^has_(?:a_|an_)?(.+)$")
_MCRAE_MATERIAL_RE = re.compile(r"^made_of_(.+)$")


def load_mcrae_norms(path: str | Path) -> list[ReferenceItem]:
    """Feature-norm TSV with Concept and Feature columns."""
    items = []
    with open(path, encoding="utf-8") as handle:
        reader = csv.DictReader(handle, delimiter="\t")
        if reader.fieldnames is None:
            raise AdapterError(f"{path}: missing header row")
        fields = {name.lower(): name for name in reader.fieldnames}
        concept_col = fields.get("concept")
        feature_col = fields.get("feature")
        if concept_col is None or feature_col is None:
            raise AdapterError(f"{path}: need Concept and Feature columns")
        for row in reader:
            concept = (row[concept_col] or "").replace("_", " ").strip()
            feature = (row[feature_col] or "").strip()
            if not concept or not feature:
                continue
            part = _MCRAE_PART_RE.match(feature)
            if part:
                items.append(
                    ReferenceItem(
                        Dataset.MCRAE,
                        concept,
                        RefKind.PART,
                        part.group(1).replace("_", " "),
                    )
                )
                continue
            material = _MCRAE_MATERIAL_RE.match(feature)
            if material:
                items.append(
                    ReferenceItem(
                        Dataset.MCRAE,
                        concept,
                        RefKind.MATERIAL,
                        material.group(1).replace("_", " "),
                    )
                )
    return items


_CSLB_PART_RE = re.compile(r"^(?:has|have)\s+(?:a\s+|an\s+|the\s+)?(.+)$", re.IGNORECASE)
_CSLB_MATERIAL_RE = re.compile(r"^(?:is\s+)?made\s+of\s+(.+)$", re.IGNORECASE)


def load_cslb_norms(path: str | Path) -> list[ReferenceItem]:
    """Property-norm TSV with concept and feature columns."""
    items = []
    with open(path, encoding="utf-8") as handle:
        reader = csv.DictReader(handle, delimiter="\t")
        if reader.fieldnames is None:
            raise AdapterError(f"{path}: missing header row")
        fields = {name.lower(): name for name in reader.fieldnames}
        concept_col = fields.get("concept")
        feature_col = fields.get("feature")
        if concept_col is None or feature_col is None:
            raise AdapterError(f"{path}: need concept and feature columns")
        for row in reader:
            concept = (row[concept_col] or "").strip()
            feature = (row[feature_col] or "").strip()
            if not concept or not feature:
                continue
            material = _CSLB_MATERIAL_RE.match(feature)
            if material:
                items.append(
                    ReferenceItem(
                        Dataset.CSLB, concept, RefKind.MATERIAL, material.group(1)
                    )
                )
                continue
            part = _CSLB_PART_RE.match(feature)
            if part:
                items.append(
                    ReferenceItem(Dataset.CSLB, concept, RefKind.PART, part.group(1))
                )
    return items


# --- ParRoT -------------------------------------------------------------------


def load_parrot_parts(path: str | Path) -> list[ReferenceItem]:
    """JSON mapping of entity name to its annotated part list."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise AdapterError(f"{path}: expected an object of entity -> part list")
    items = []
    for entity, parts in data.items():
        if not isinstance(parts, list):
            raise AdapterError(f"{path}: parts of {entity!r} is not a list")
        for part in parts:
            items.append(ReferenceItem(Dataset.PARROT, entity, RefKind.PART, str(part)))
    return items
