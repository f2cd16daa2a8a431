"""Credit-weighted coverage against external reference datasets.

Each reference part or material earns full, half or no credit depending on
its presence in the mined repository. Automatic matching is deliberately
conservative (exact names, the alias table, and a singular/plural fold);
every half credit and every judgment call lives in a human adjudication
overlay that always wins over the automatic rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping

from ..kbmodel import MaterialExpr, normalize_name
from ..kbstore import Repository
from .rounding import pct


class EvaluationError(Exception):
    pass


class EmptyReferenceError(EvaluationError):
    pass


class EntityNotInRepoError(EvaluationError):
    pass


class Dataset(Enum):
    PARROT = "parrot"
    CSLB = "cslb"
    MCRAE = "mcrae"
    WORDNET = "wordnet"
    CONCEPTNET = "conceptnet"


class RefKind(Enum):
    PART = "part"
    MATERIAL = "material"


class Credit(Enum):
    FULL = "full"
    HALF = "half"
    NONE = "none"


@dataclass(frozen=True)
class ReferenceItem:
    """One part or material claimed by a reference dataset.

    ``from_gloss`` marks WordNet items that were read out of a definition
    gloss rather than an explicit pointer.
    """

    dataset: Dataset
    entity: str
    kind: RefKind
    value: str
    from_gloss: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "entity", normalize_name(self.entity))
        object.__setattr__(self, "value", normalize_name(self.value))


OverlayKey = tuple[str, str, str, str]
Overlay = Mapping[OverlayKey, Credit]


def overlay_key(item: ReferenceItem) -> OverlayKey:
    return (item.dataset.value, item.entity, item.kind.value, item.value)


@dataclass
class CreditTally:
    full: int = 0
    half: int = 0
    missing: int = 0

    @property
    def total(self) -> int:
        return self.full + self.half + self.missing

    def add(self, credit: Credit) -> None:
        if credit is Credit.FULL:
            self.full += 1
        elif credit is Credit.HALF:
            self.half += 1
        else:
            self.missing += 1


def score_recall(tally: CreditTally) -> float:
    """Percentage score: full counts 1, half counts 0.5, missing 0."""
    if tally.total <= 0:
        raise EmptyReferenceError("no reference items tallied")
    return pct(Fraction(2 * tally.full + tally.half, 2), tally.total)


def _fold_keys(name: str) -> set[str]:
    """Name plus naive singular forms, for lens/lenses-style matches."""
    key = normalize_name(name)
    keys = {key}
    if key.endswith("es") and len(key) > 3:
        keys.add(key[:-2])
    if key.endswith("s") and not key.endswith("ss") and len(key) > 2:
        keys.add(key[:-1])
    return keys


def _resolve_alias(name: str, aliases: Mapping[str, str] | None) -> str:
    if not aliases:
        return normalize_name(name)
    return normalize_name(aliases.get(normalize_name(name), name))


def _entity_values(repo: Repository, entity: str, kind: RefKind) -> set[str]:
    node = repo.entity(entity)
    if node is None:
        raise EntityNotInRepoError(f"entity {entity!r} not in repository")
    values: set[str] = set()
    for descendant in node.walk():
        if kind is RefKind.PART:
            values.update(p.name for p in descendant.parts)
        else:
            if descendant.whole_materials is not None:
                values.update(descendant.whole_materials.atoms)
            for part in descendant.parts:
                if isinstance(part.materials, MaterialExpr):
                    values.update(part.materials.atoms)
    folded: set[str] = set()
    for value in values:
        folded.update(_fold_keys(value))
    return folded


def assign_credit(
    reference: ReferenceItem,
    repo: Repository,
    overlay: Overlay | None = None,
    aliases: Mapping[str, str] | None = None,
) -> Credit:
    """Credit for one reference item; the overlay wins over any automatic
    match, and half credit is only ever assigned through the overlay."""
    if overlay:
        adjudicated = overlay.get(overlay_key(reference))
        if adjudicated is not None:
            return adjudicated
    entity = _resolve_alias(reference.entity, aliases)
    available = _entity_values(repo, entity, reference.kind)
    wanted = _fold_keys(_resolve_alias(reference.value, aliases))
    if wanted & available:
        return Credit.FULL
    return Credit.NONE


def tally_credits(
    references: Iterable[ReferenceItem],
    repo: Repository,
    overlay: Overlay | None = None,
    aliases: Mapping[str, str] | None = None,
) -> CreditTally:
    tally = CreditTally()
    for reference in references:
        tally.add(assign_credit(reference, repo, overlay, aliases))
    if tally.total == 0:
        raise EmptyReferenceError("reference set is empty")
    return tally
