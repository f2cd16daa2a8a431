"""Question batches for crowd evaluation of precision, recall and
distinctive-part significance."""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from ..kbmodel import KbNode, MaterialExpr, normalize_name
from ..kbstore import Repository


class CapExceededWithoutSeedError(Exception):
    pass


class QuestionCategory(Enum):
    PRECISION = "precision"
    RECALL = "recall"
    DISTINCTIVENESS = "distinctiveness"


PRECISION_CHOICES = ("Likely", "Unlikely", "Unable to answer", "Uncertain")
RECALL_CHOICES = (
    "Likely with no issues",
    "Likely, even though some items overlap",
    "Unlikely, one major item is missing",
    "Unlikely, two major items are missing",
    "Unlikely, three or more major items are missing",
    "Unlikely for other reasons",
    "Unable to answer",
    "Uncertain",
)
DISTINCTIVENESS_CHOICES = (
    "Likely",
    "Unlikely, part is present in both",
    "Unlikely, part is absent in both",
    "Unlikely for other reasons",
    "Unable to answer",
    "Uncertain",
)


@dataclass(frozen=True)
class Question:
    question_id: str
    category: QuestionCategory
    entity: str
    subject: str
    choices: tuple[str, ...]


@dataclass
class QuestionBatch:
    category: QuestionCategory
    questions: list[Question]

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["question_id", "category", "entity", "subject", "choices"])
            for question in self.questions:
                writer.writerow(
                    [
                        question.question_id,
                        question.category.value,
                        question.entity,
                        question.subject,
                        "|".join(question.choices),
                    ]
                )


def _item_label(path: tuple[str, ...]) -> str:
    return path[-1] if len(path) == 1 else f"{path[-1]} (a kind of {path[0]})"


def _walk_paths(entity: KbNode) -> list[tuple[tuple[str, ...], KbNode]]:
    out: list[tuple[tuple[str, ...], KbNode]] = []

    def visit(node: KbNode, path: tuple[str, ...]) -> None:
        path = path + (node.name,)
        out.append((path, node))
        for child in node.children:
            visit(child, path)

    visit(entity, ())
    return out


def _precision_subjects(entity: KbNode) -> Iterable[str]:
    for path, node in _walk_paths(entity):
        label = _item_label(path)
        for child in node.children:
            yield f"How likely is '{child.name}' a subtype of '{label}'?"
        for part in node.parts:
            yield f"How likely does '{label}' have '{part.name}' as a part?"
            if isinstance(part.materials, MaterialExpr):
                for atom in part.materials.atoms:
                    yield (
                        f"How likely is the '{part.name}' of '{label}' "
                        f"made of '{atom}'?"
                    )
        if node.whole_materials is not None:
            for atom in node.whole_materials.atoms:
                yield f"How likely is '{label}' made of '{atom}'?"


def _recall_subjects(entity: KbNode) -> Iterable[str]:
    for path, node in _walk_paths(entity):
        label = _item_label(path)
        if node.children:
            listing = ", ".join(c.name for c in node.children)
            yield (
                f"Is this a complete list of the common subtypes of "
                f"'{label}'? {listing}"
            )
        if node.parts:
            listing = ", ".join(p.name for p in node.parts)
            yield f"Is this a complete list of the parts of '{label}'? {listing}"
        atoms: list[str] = []
        if node.whole_materials is not None:
            atoms.extend(node.whole_materials.atoms)
        for part in node.parts:
            if isinstance(part.materials, MaterialExpr):
                atoms.extend(part.materials.atoms)
        if atoms:
            unique = list(dict.fromkeys(atoms))
            listing = ", ".join(unique)
            yield (
                f"Is this a complete list of the materials of '{label}'? {listing}"
            )


def _distinctiveness_subjects(entity: KbNode) -> Iterable[str]:
    for path, node in _walk_paths(entity):
        for with_part in node.children:
            siblings = [c for c in node.children if c.name != with_part.name]
            for part in with_part.parts:
                for without in siblings:
                    if without.find_part(part.name) is None:
                        yield (
                            f"Is '{part.name}' a main distinguishing part of "
                            f"'{with_part.name}' compared to '{without.name}' "
                            f"(both kinds of '{node.name}')?"
                        )


_SUBJECTS = {
    QuestionCategory.PRECISION: _precision_subjects,
    QuestionCategory.RECALL: _recall_subjects,
    QuestionCategory.DISTINCTIVENESS: _distinctiveness_subjects,
}

_CHOICES = {
    QuestionCategory.PRECISION: PRECISION_CHOICES,
    QuestionCategory.RECALL: RECALL_CHOICES,
    QuestionCategory.DISTINCTIVENESS: DISTINCTIVENESS_CHOICES,
}


def generate_questions(
    repo: Repository,
    category: QuestionCategory,
    sample: Sequence[str],
    cap: int | None = None,
    seed: int | None = None,
) -> QuestionBatch:
    """One batch of questions over the sampled entities.

    Candidates are generated deterministically in tree order; when they
    exceed ``cap`` a seeded uniform sample keeps the batch reproducible
    (capping without a seed is an error).
    """
    wanted = [normalize_name(name) for name in sample]
    candidates: list[tuple[str, str]] = []
    for name in wanted:
        entity = repo.entity(name)
        if entity is None:
            raise KeyError(f"entity {name!r} not in repository")
        for subject in _SUBJECTS[category](entity):
            candidates.append((entity.name, subject))
    if cap is not None and len(candidates) > cap:
        if seed is None:
            raise CapExceededWithoutSeedError(
                f"{len(candidates)} candidates exceed the cap of {cap}; "
                "a seed is required for reproducible sampling"
            )
        rng = random.Random(seed)
        picked = sorted(rng.sample(range(len(candidates)), cap))
        candidates = [candidates[i] for i in picked]
    questions = [
        Question(
            question_id=f"{category.value}-{index:05d}",
            category=category,
            entity=entity_name,
            subject=subject,
            choices=_CHOICES[category],
        )
        for index, (entity_name, subject) in enumerate(candidates, start=1)
    ]
    return QuestionBatch(category=category, questions=questions)
