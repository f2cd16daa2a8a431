"""Evaluation: cross-dataset recall, intrinsic judgments, dataset comparison."""

from .adapters import (
    AdapterError,
    load_conceptnet_assertions,
    load_cslb_norms,
    load_mcrae_norms,
    load_overlay_tsv,
    load_parrot_parts,
    load_reference_tsv,
    load_wordnet_references,
)
from .comparison import (
    ComparisonScore,
    DEFAULT_WEIGHTS,
    MissingWeightError,
    ResponseOption,
    ZeroRatedResponsesError,
    score_comparison,
)
from .intrinsic import (
    INTRINSIC_OPTIONS,
    LIKELY,
    MalformedResponseRowError,
    MissingPrecisionTallyError,
    Response,
    ResponseTally,
    UNABLE,
    UNCERTAIN,
    UNLIKELY,
    UnknownReasonCodeError,
    aggregate_option_fractions,
    aggregate_unlikely_reasons,
    filter_distinctiveness_inputs,
)
from .questions import (
    CapExceededWithoutSeedError,
    Question,
    QuestionBatch,
    QuestionCategory,
    generate_questions,
)
from .recall import (
    Credit,
    CreditTally,
    Dataset,
    EmptyReferenceError,
    EntityNotInRepoError,
    RefKind,
    ReferenceItem,
    assign_credit,
    overlay_key,
    score_recall,
    tally_credits,
)
from . import reports
from .rounding import pct, round_half_up

__all__ = [
    "AdapterError",
    "CapExceededWithoutSeedError",
    "ComparisonScore",
    "Credit",
    "CreditTally",
    "DEFAULT_WEIGHTS",
    "Dataset",
    "EmptyReferenceError",
    "EntityNotInRepoError",
    "INTRINSIC_OPTIONS",
    "LIKELY",
    "MalformedResponseRowError",
    "MissingPrecisionTallyError",
    "MissingWeightError",
    "Question",
    "QuestionBatch",
    "QuestionCategory",
    "RefKind",
    "ReferenceItem",
    "Response",
    "ResponseOption",
    "ResponseTally",
    "UNABLE",
    "UNCERTAIN",
    "UNLIKELY",
    "UnknownReasonCodeError",
    "ZeroRatedResponsesError",
    "aggregate_option_fractions",
    "aggregate_unlikely_reasons",
    "assign_credit",
    "filter_distinctiveness_inputs",
    "generate_questions",
    "load_conceptnet_assertions",
    "load_cslb_norms",
    "load_mcrae_norms",
    "load_overlay_tsv",
    "load_parrot_parts",
    "load_reference_tsv",
    "load_wordnet_references",
    "overlay_key",
    "pct",
    "reports",
    "round_half_up",
    "score_comparison",
    "score_recall",
    "tally_credits",
]
