"""Aggregation of worker responses for the precision, recall and
distinctiveness judgments, three responses per question."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .rounding import pct


class MalformedResponseRowError(Exception):
    pass


class UnknownReasonCodeError(Exception):
    pass


class MissingPrecisionTallyError(Exception):
    pass


LIKELY = "likely"
UNLIKELY = "unlikely"
UNABLE = "unable"
UNCERTAIN = "uncertain"

INTRINSIC_OPTIONS = (LIKELY, UNLIKELY, UNABLE, UNCERTAIN)

RESPONSES_PER_QUESTION = 3


@dataclass(frozen=True)
class Response:
    option: str
    reason: str | None = None


@dataclass
class ResponseTally:
    """Per-question response multisets; exactly three responses each."""

    questions: dict[str, tuple[Response, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for question_id, responses in self.questions.items():
            if len(responses) != RESPONSES_PER_QUESTION:
                raise MalformedResponseRowError(
                    f"question {question_id!r} has {len(responses)} responses, "
                    f"expected {RESPONSES_PER_QUESTION}"
                )

    @property
    def question_count(self) -> int:
        return len(self.questions)

    @property
    def response_count(self) -> int:
        return RESPONSES_PER_QUESTION * len(self.questions)

    def responses(self) -> Iterable[Response]:
        for responses in self.questions.values():
            yield from responses

    @classmethod
    def from_rows(
        cls, rows: Iterable[tuple[str, str, str, str | None]]
    ) -> "ResponseTally":
        """Build from (question_id, worker_id, option, reason) rows."""
        grouped: dict[str, list[Response]] = {}
        workers: dict[str, set[str]] = {}
        for question_id, worker_id, option, reason in rows:
            option = option.strip().lower()
            if not question_id or not option:
                raise MalformedResponseRowError(
                    f"incomplete row for question {question_id!r}"
                )
            seen = workers.setdefault(question_id, set())
            if worker_id in seen:
                raise MalformedResponseRowError(
                    f"worker {worker_id!r} answered {question_id!r} twice"
                )
            seen.add(worker_id)
            grouped.setdefault(question_id, []).append(
                Response(option, reason or None)
            )
        return cls({qid: tuple(rs) for qid, rs in grouped.items()})

    @classmethod
    def from_combination_counts(
        cls,
        counts: Mapping[Sequence[str], int],
        prefix: str = "q",
    ) -> "ResponseTally":
        """Expand {response-combination: question count} into a tally.

        Combinations are option triples such as ("likely", "likely",
        "unable"); order within a triple does not matter.
        """
        questions: dict[str, tuple[Response, ...]] = {}
        serial = 0
        for combination, count in counts.items():
            responses = tuple(Response(option) for option in combination)
            for _ in range(count):
                questions[f"{prefix}{serial:06d}"] = responses
                serial += 1
        return cls(questions)


def aggregate_option_fractions(tally: ResponseTally) -> dict[str, float]:
    """Percentage of all responses giving each option; sums to ~100."""
    if not tally.questions:
        raise MalformedResponseRowError("tally has no questions")
    counts: Counter[str] = Counter(r.option for r in tally.responses())
    total = tally.response_count
    return {option: pct(count, total) for option, count in sorted(counts.items())}


def aggregate_unlikely_reasons(
    tally: ResponseTally,
    known_reasons: Iterable[str] | None = None,
) -> dict[str, float]:
    """Reason distribution among the UNLIKELY responses only."""
    known = set(known_reasons) if known_reasons is not None else None
    counts: Counter[str] = Counter()
    for response in tally.responses():
        if response.option != UNLIKELY:
            continue
        if response.reason is None:
            raise UnknownReasonCodeError("unlikely response without a reason code")
        if known is not None and response.reason not in known:
            raise UnknownReasonCodeError(f"unknown reason code {response.reason!r}")
        counts[response.reason] += 1
    total = sum(counts.values())
    if total == 0:
        return {}
    return {reason: pct(count, total) for reason, count in sorted(counts.items())}


def filter_distinctiveness_inputs(
    precision_tallies: Mapping[str, Sequence[str]],
    candidates: Iterable[str] | None = None,
) -> set[str]:
    """Admissible candidates for the distinguishing-part evaluation.

    A candidate is dropped when its precision responses have a majority of
    UNLIKELY, or when at least two of the three responses are UNABLE or
    UNCERTAIN.
    """
    if candidates is None:
        candidates = precision_tallies.keys()
    kept: set[str] = set()
    for candidate in candidates:
        if candidate not in precision_tallies:
            raise MissingPrecisionTallyError(
                f"no precision tally for {candidate!r}"
            )
        options = [option.strip().lower() for option in precision_tallies[candidate]]
        if len(options) != RESPONSES_PER_QUESTION:
            raise MalformedResponseRowError(
                f"candidate {candidate!r} has {len(options)} responses"
            )
        counts = Counter(options)
        if counts[UNLIKELY] >= 2:
            continue
        if counts[UNABLE] + counts[UNCERTAIN] >= 2:
            continue
        kept.add(candidate)
    return kept
