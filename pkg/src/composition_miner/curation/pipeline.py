"""End-to-end curation: stream the dump, apply every filter stage in order,
write the curated TSV and a JSON-lines verdict audit log."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from ..llmclient import LlmClient
from .filters import (
    MAX_LLM_BATCH,
    keyword_filter,
    llm_common_filter,
    wikipedia_link_filter,
    wordnet_filter,
)
from .records import EntityRecord, FilterStage, Verdict
from .wikidata import (
    StreamReport,
    SubclassGraph,
    build_subclass_graph,
    stream_filter_dump,
    subclass_exclude,
)
from .wordnet import WordNetLexicon

logger = logging.getLogger(__name__)


@dataclass
class CurationResult:
    records: list[EntityRecord] = field(default_factory=list)
    report: StreamReport = field(default_factory=StreamReport)

    @property
    def curated(self) -> list[EntityRecord]:
        out = [r for r in self.records if r.is_curated]
        out.sort(key=lambda r: int(r.wikidata_id[1:]))
        return out


def _qid_sort_key(record: EntityRecord) -> int:
    return int(record.wikidata_id[1:])


def apply_local_stages(
    records: Iterable[EntityRecord],
    *,
    keywords: Iterable[str],
    excluded: Iterable[str],
    graph: SubclassGraph,
    lexicon: WordNetLexicon,
) -> list[EntityRecord]:
    """Stages between the dump scan and the LLM prompts, in order."""
    keywords = list(keywords)
    removed = subclass_exclude(graph, excluded)
    out = []
    for record in records:
        record.verdicts[FilterStage.KEYWORD] = keyword_filter(record, keywords)
        if record.survives_through(FilterStage.KEYWORD):
            record.verdicts[FilterStage.SUBCLASS_EXCLUDE] = (
                Verdict.FAIL if record.wikidata_id in removed else Verdict.PASS
            )
        if record.survives_through(FilterStage.SUBCLASS_EXCLUDE):
            record.verdicts[FilterStage.WORDNET] = wordnet_filter(record, lexicon)
        if record.survives_through(FilterStage.WORDNET):
            record.verdicts[FilterStage.WIKIPEDIA_LINK] = wikipedia_link_filter(record)
        out.append(record)
    return out


def apply_llm_stages(
    records: Sequence[EntityRecord],
    client: LlmClient,
    model_id: str,
    batch_size: int = MAX_LLM_BATCH,
) -> None:
    survivors = [
        r for r in records if r.survives_through(FilterStage.WIKIPEDIA_LINK)
    ]
    survivors.sort(key=_qid_sort_key)
    for start in range(0, len(survivors), batch_size):
        llm_common_filter(survivors[start : start + batch_size], client, model_id)


def run_curation(
    dump_path: str | Path,
    roots: Iterable[str],
    *,
    keywords: Iterable[str],
    excluded: Iterable[str],
    lexicon: WordNetLexicon,
    client: LlmClient,
    model_id: str,
    batch_size: int = MAX_LLM_BATCH,
    synset_property: str | None = None,
) -> CurationResult:
    result = CurationResult()
    kwargs = {}
    if synset_property is not None:
        kwargs["synset_property"] = synset_property
    graph = build_subclass_graph(dump_path, StreamReport())
    records = list(
        stream_filter_dump(
            dump_path, roots, graph=graph, report=result.report, **kwargs
        )
    )
    records = apply_local_stages(
        records, keywords=keywords, excluded=excluded, graph=graph, lexicon=lexicon
    )
    apply_llm_stages(records, client, model_id, batch_size)
    records.sort(key=_qid_sort_key)
    result.records = records
    return result


def write_curated_tsv(records: Sequence[EntityRecord], path: str | Path) -> int:
    """One line per curated record: id, title, synset. Returns the count."""
    lines = []
    for record in records:
        if not record.is_curated:
            continue
        lines.append(
            "\t".join(
                [
                    record.wikidata_id,
                    record.wikipedia_title or "",
                    record.wordnet_synset or "",
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return len(lines)


def write_audit_log(records: Sequence[EntityRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(
                json.dumps(
                    {
                        "wikidata_id": record.wikidata_id,
                        "wikipedia_title": record.wikipedia_title,
                        "verdicts": {
                            stage.value: verdict.value
                            for stage, verdict in record.verdicts.items()
                        },
                        "curated": record.is_curated,
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def read_curated_tsv(path: str | Path) -> list[EntityRecord]:
    """Load a curated list back; every stage is marked PASS."""
    records = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        fields = line.split("\t")
        record = EntityRecord(
            wikidata_id=fields[0],
            wikipedia_title=fields[1] or None,
            wordnet_synset=fields[2] if len(fields) > 2 and fields[2] else None,
        )
        for stage in FilterStage:
            record.verdicts[stage] = Verdict.PASS
        records.append(record)
    return records
