"""Mining strategies: few-shot two-stage and zero-shot multi-step."""

from .jobs import (
    CountParseError,
    GrammarError,
    KEPT_TAGS,
    MiningError,
    MiningResult,
    QuarantineRecord,
    RecognizabilityTag,
    StateMachineStall,
    YesNoParseError,
)
from .fewshot import (
    FewShotMiner,
    FewshotMaterials,
    parse_fewshot_materials,
    parse_fewshot_subtypes,
    qualified_item_name,
)
from .runner import MiningSummary, mine_entities, write_result
from .zeroshot import (
    MAX_PROMPTS_PER_ENTITY,
    ZeroShotMiner,
    parse_parts_block,
    parse_parts_materials_block,
    parse_recognizability,
    parse_subtype_list,
    parse_whole_materials,
    parse_yes_no,
    run_zeroshot,
)
from . import prompts

__all__ = [
    "CountParseError",
    "FewShotMiner",
    "FewshotMaterials",
    "GrammarError",
    "KEPT_TAGS",
    "MAX_PROMPTS_PER_ENTITY",
    "MiningError",
    "MiningResult",
    "MiningSummary",
    "QuarantineRecord",
    "RecognizabilityTag",
    "StateMachineStall",
    "YesNoParseError",
    "ZeroShotMiner",
    "mine_entities",
    "parse_fewshot_materials",
    "parse_fewshot_subtypes",
    "parse_parts_block",
    "parse_parts_materials_block",
    "parse_recognizability",
    "parse_subtype_list",
    "parse_whole_materials",
    "parse_yes_no",
    "prompts",
    "qualified_item_name",
    "run_zeroshot",
    "write_result",
]
