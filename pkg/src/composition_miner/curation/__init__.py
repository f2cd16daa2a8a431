"""Curation of the common-physical-object list from a Wikidata dump."""

from .records import EntityRecord, FilterStage, LLM_STAGES, Verdict
from .filters import (
    classify_annotation,
    keyword_filter,
    llm_common_filter,
    wikipedia_link_filter,
    wordnet_filter,
)
from .pipeline import (
    CurationResult,
    apply_llm_stages,
    apply_local_stages,
    read_curated_tsv,
    run_curation,
    write_audit_log,
    write_curated_tsv,
)
from .wikidata import (
    DumpError,
    StreamReport,
    SubclassGraph,
    TruncatedDumpError,
    build_subclass_graph,
    stream_filter_dump,
    subclass_exclude,
)
from .wordnet import LexiconLoadError, Synset, WordNetLexicon

__all__ = [
    "CurationResult",
    "DumpError",
    "EntityRecord",
    "FilterStage",
    "LLM_STAGES",
    "LexiconLoadError",
    "StreamReport",
    "SubclassGraph",
    "Synset",
    "TruncatedDumpError",
    "Verdict",
    "WordNetLexicon",
    "apply_llm_stages",
    "apply_local_stages",
    "build_subclass_graph",
    "classify_annotation",
    "keyword_filter",
    "llm_common_filter",
    "read_curated_tsv",
    "run_curation",
    "stream_filter_dump",
    "subclass_exclude",
    "wikipedia_link_filter",
    "wordnet_filter",
    "write_audit_log",
    "write_curated_tsv",
]
