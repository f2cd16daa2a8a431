"""Candidate-entity records and the ordered filter stages applied to them."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum


_QID_RE = re.compile(r"^Q[0-9]+$")


class FilterStage(Enum):
    """Stages in application order; later stages only see survivors."""

    ROOT_SUBCLASS = "root_subclass"
    KEYWORD = "keyword"
    SUBCLASS_EXCLUDE = "subclass_exclude"
    WORDNET = "wordnet"
    WIKIPEDIA_LINK = "wikipedia_link"
    LLM_RECOGNIZED = "llm_recognized"
    LLM_PHYSICAL = "llm_physical"
    LLM_COUNT_NOUN = "llm_count_noun"
    LLM_STANDALONE = "llm_standalone"


LLM_STAGES = (
    FilterStage.LLM_RECOGNIZED,
    FilterStage.LLM_PHYSICAL,
    FilterStage.LLM_COUNT_NOUN,
    FilterStage.LLM_STANDALONE,
)


class Verdict(Enum):
    PASS = "pass"
    FAIL = "fail"
    PENDING = "pending"


@dataclass
class EntityRecord:
    """One candidate object with the verdict of every filter stage."""

    wikidata_id: str
    wikipedia_title: str | None = None
    wordnet_synset: str | None = None
    synonyms: list[str] = field(default_factory=list)
    superclass_ids: list[str] = field(default_factory=list)
    verdicts: dict[FilterStage, Verdict] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not _QID_RE.match(self.wikidata_id):
            raise ValueError(f"bad wikidata id {self.wikidata_id!r}")
        for stage in FilterStage:
            self.verdicts.setdefault(stage, Verdict.PENDING)

    @property
    def is_curated(self) -> bool:
        return all(v is Verdict.PASS for v in self.verdicts.values())

    def survives_through(self, stage: FilterStage) -> bool:
        """True when every stage up to and including ``stage`` passed."""
        for candidate in FilterStage:
            if self.verdicts[candidate] is not Verdict.PASS:
                return False
            if candidate is stage:
                return True
        return True
