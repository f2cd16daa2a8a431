"""Shared mining-job plumbing: errors, quarantine records, job results."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from ..kbmodel import KbNode


class MiningError(Exception):
    pass


class GrammarError(MiningError):
    """A response line did not match the expected output grammar."""

    def __init__(self, message: str, line_no: int | None = None, text: str = "") -> None:
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no
        self.text = text


class YesNoParseError(MiningError):
    def __init__(self, message: str, text: str = "") -> None:
        super().__init__(message)
        self.text = text


class CountParseError(MiningError):
    def __init__(self, message: str, text: str = "") -> None:
        super().__init__(message)
        self.text = text


class StateMachineStall(MiningError):
    """The per-entity prompt budget ran out before the tree was finished."""


class RecognizabilityTag(Enum):
    LIKELY = "likely"
    PROBABLY_LIKELY = "probably likely"
    PROBABLY_UNLIKELY = "probably unlikely"
    UNLIKELY = "unlikely"


KEPT_TAGS = frozenset({RecognizabilityTag.LIKELY, RecognizabilityTag.PROBABLY_LIKELY})


@dataclass
class QuarantineRecord:
    stage: str
    reason: str
    text: str


@dataclass
class MiningResult:
    """Outcome of mining one entity; ``tree`` is None when quarantined."""

    entity: str
    tree: KbNode | None = None
    flags: list[str] = field(default_factory=list)
    quarantines: list[QuarantineRecord] = field(default_factory=list)
    prompts_used: int = 0
    audit: list[dict[str, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.tree is not None and not self.quarantines

    @property
    def clean(self) -> bool:
        return self.ok and not self.flags
