"""Filter stages that prune the streamed candidate list down to common,
physical, standalone objects."""

from __future__ import annotations

import logging
import re
from typing import Iterable, Sequence

from ..kbmodel import normalize_name
from ..llmclient import LlmClient, make_request
from .records import EntityRecord, FilterStage, LLM_STAGES, Verdict
from .wordnet import WordNetLexicon

logger = logging.getLogger(__name__)

MAX_LLM_BATCH = 50


def keyword_filter(record: EntityRecord, keywords: Iterable[str]) -> Verdict:
    """FAIL when the article title contains a keyword as a whole word.

    Whole-word matching keeps "Lawn mower" alive while dropping
    "Dalton's law"; plain substring matching over-excludes.
    """
    title = record.wikipedia_title
    if title is None:
        return Verdict.PASS
    for keyword in keywords:
        if re.search(rf"\b{re.escape(keyword)}\b", title, re.IGNORECASE):
            return Verdict.FAIL
    return Verdict.PASS


def wikipedia_link_filter(record: EntityRecord) -> Verdict:
    return Verdict.PASS if record.wikipedia_title else Verdict.FAIL


def wordnet_filter(record: EntityRecord, lexicon: WordNetLexicon) -> Verdict:
    """PASS when the entry or a synonym is a WordNet noun, or when the
    record carries an explicit synset link."""
    if record.wordnet_synset:
        return Verdict.PASS
    candidates = [record.wikipedia_title] if record.wikipedia_title else []
    candidates.extend(record.synonyms)
    for candidate in candidates:
        if candidate and lexicon.has_noun(candidate):
            return Verdict.PASS
    return Verdict.FAIL


# --- LLM commonness filter --------------------------------------------------

RECOGNIZED_PROMPT = (
    "How likely are the following 50 things to be commonly recognized by a "
    "typical sixth-grader? Add ` - [likely / probably likely / probably "
    "unlikely / unlikely] to be recognized by sixth-graders' after the nouns "
    "in the list. Please do not alter the names within parentheses."
)

PHYSICAL_PROMPT = (
    "Could you classify the following 50 nouns based on whether they "
    "primarily refer to standalone physical objects, standalone built "
    "structures, substances, or neither? Add ` - is a [physical object / "
    "built structure / substance / neither]' after the nouns in the list. "
    "Please do not alter the names within parentheses.\n\n"
    "Here are the criteria for each category:\n"
    "- Physical objects: Tangible items that can exist independently, or "
    "items that might be part of a larger entity but can be replaced.\n"
    "- Built structures: Man-made constructions that serve as physical "
    "places or infrastructure.\n"
    "- Substances: Any substance with uniform characteristics or any matter "
    "that can be best characterized by their chemical composition.\n"
    "- Neither: None of the above."
)

COUNT_NOUN_PROMPT = (
    "Could you classify the following 50 nouns based on whether they are in "
    "general used as a mass noun or a count noun? Add ` - mass noun' or "
    "` - count noun' accordingly after the nouns in the list."
)

STANDALONE_PROMPT = (
    "Could you classify the following 50 nouns based on whether they are "
    "typically described as an entity on their own, or composed of multiple "
    "standalone entities? Add ` - a single entity', ` - a group of "
    "components but commonly referred to as a single item', or ` - a group "
    "of multiple standalone items' accordingly after the nouns in the list."
)

_STAGE_PROMPTS = {
    FilterStage.LLM_RECOGNIZED: RECOGNIZED_PROMPT,
    FilterStage.LLM_PHYSICAL: PHYSICAL_PROMPT,
    FilterStage.LLM_COUNT_NOUN: COUNT_NOUN_PROMPT,
    FilterStage.LLM_STANDALONE: STANDALONE_PROMPT,
}

_LINE_RE = re.compile(r"^\s*(?:\d+[.)]\s*)?(?P<noun>.*?)\s+-\s+(?P<annotation>.+?)\s*$")


def classify_annotation(stage: FilterStage, annotation: str) -> Verdict | None:
    """Map one annotation suffix to a verdict; None when unparseable."""
    text = annotation.lower()
    if stage is FilterStage.LLM_RECOGNIZED:
        if "probably unlikely" in text:
            return Verdict.FAIL
        if "probably likely" in text:
            return Verdict.PASS
        if "unlikely" in text:
            return Verdict.FAIL
        if "likely" in text:
            return Verdict.PASS
        return None
    if stage is FilterStage.LLM_PHYSICAL:
        if "physical object" in text or "built structure" in text:
            return Verdict.PASS
        if "substance" in text or "neither" in text:
            return Verdict.FAIL
        return None
    if stage is FilterStage.LLM_COUNT_NOUN:
        if "count noun" in text:
            return Verdict.PASS
        if "mass noun" in text:
            return Verdict.FAIL
        return None
    if stage is FilterStage.LLM_STANDALONE:
        if "group of multiple standalone items" in text:
            return Verdict.FAIL
        if "group of components" in text or "single entity" in text:
            return Verdict.PASS
        return None
    raise ValueError(f"{stage} is not an annotation stage")


def parse_annotation_lines(
    stage: FilterStage, response: str, nouns: Sequence[str]
) -> dict[str, Verdict]:
    """Match response lines back to the requested nouns by normalized name."""
    wanted = {normalize_name(n): n for n in nouns}
    verdicts: dict[str, Verdict] = {}
    for line in response.splitlines():
        if not line.strip():
            continue
        match = _LINE_RE.match(line)
        if match is None:
            continue
        try:
            key = normalize_name(match.group("noun"))
        except ValueError:
            continue
        if key not in wanted:
            continue
        verdict = classify_annotation(stage, match.group("annotation"))
        if verdict is not None:
            verdicts[wanted[key]] = verdict
    return verdicts


def _ask_stage(
    stage: FilterStage,
    nouns: Sequence[str],
    client: LlmClient,
    model_id: str,
) -> dict[str, Verdict]:
    prompt = _STAGE_PROMPTS[stage] + "\n\n" + "\n".join(nouns)
    response = client.complete(make_request(model_id, prompt))
    return parse_annotation_lines(stage, response, nouns)


def llm_common_filter(
    batch: Sequence[EntityRecord],
    client: LlmClient,
    model_id: str,
) -> dict[str, dict[FilterStage, Verdict]]:
    """Run the four commonness prompts over one batch of at most 50 records.

    Stages run in order and each stage only sees the survivors of the
    previous one. A record whose annotation cannot be parsed is re-asked
    once in a follow-up batch and then failed. Verdicts are applied to the
    records and also returned keyed by wikidata id.
    """
    if len(batch) > MAX_LLM_BATCH:
        raise ValueError(f"batch of {len(batch)} exceeds {MAX_LLM_BATCH}")
    by_noun: dict[str, EntityRecord] = {}
    for record in batch:
        if not record.wikipedia_title:
            raise ValueError(f"record {record.wikidata_id} has no title")
        by_noun[record.wikipedia_title] = record
    survivors = [r.wikipedia_title for r in batch]
    results: dict[str, dict[FilterStage, Verdict]] = {
        r.wikidata_id: {} for r in batch
    }
    for stage in LLM_STAGES:
        if not survivors:
            break
        verdicts = _ask_stage(stage, survivors, client, model_id)
        missing = [n for n in survivors if n not in verdicts]
        if missing:
            logger.info(
                "%s: re-asking %d unparsed annotation(s)", stage.value, len(missing)
            )
            verdicts.update(_ask_stage(stage, missing, client, model_id))
        next_survivors = []
        for noun in survivors:
            record = by_noun[noun]
            verdict = verdicts.get(noun, Verdict.FAIL)
            record.verdicts[stage] = verdict
            results[record.wikidata_id][stage] = verdict
            if verdict is Verdict.PASS:
                next_survivors.append(noun)
        survivors = next_survivors
    return results
