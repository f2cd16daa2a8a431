"""Weighted scoring for the three-way dataset comparison.

Workers rate each dataset's subtype, part and material classifications on
several criteria; every answer option carries a fixed weight and neutral
options weigh zero. The summary score is the aggregate weighted sum over
the number of rated (non-neutral) responses.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .rounding import pct, round_half_up


class MissingWeightError(Exception):
    pass


class ZeroRatedResponsesError(Exception):
    pass


@dataclass(frozen=True)
class ResponseOption:
    section: str
    criterion: str
    label: str

    def key(self) -> str:
        return f"{self.section}/{self.criterion}/{self.label}"

    @classmethod
    def from_key(cls, key: str) -> "ResponseOption":
        section, criterion, label = key.split("/", 2)
        return cls(section, criterion, label)


ComparisonWeights = Mapping[ResponseOption, float]


def _options(section: str, criterion: str, labels: dict[str, float]) -> dict:
    return {
        ResponseOption(section, criterion, label): weight
        for label, weight in labels.items()
    }


DEFAULT_WEIGHTS: dict[ResponseOption, float] = {
    **_options("subtype", "familiarity", {
        "with most subtypes": 1.0,
        "with some subtypes": 0.5,
        "with few subtypes": -0.5,
        "with none": -1.0,
        "n/a, no subtypes listed": 0.0,
    }),
    **_options("subtype", "coverage", {
        "comprehensive": 1.0,
        "missing one": -0.5,
        "missing two or more": -1.0,
        "unfamiliar or uncertain": 0.0,
    }),
    **_options("subtype", "level_of_detail", {
        "appropriate": 1.0,
        "overly specific": -1.0,
        "too general or broad": -1.0,
        "unfamiliar or uncertain": 0.0,
    }),
    **_options("subtype", "clarity", {
        "well-categorized": 1.0,
        "some subtypes overlap": -1.0,
        "unfamiliar or uncertain": 0.0,
    }),
    **_options("subtype", "consistency", {
        "consistent": 1.0,
        "inconsistent": -1.0,
        "unfamiliar or uncertain": 0.0,
    }),
    **_options("part", "focus", {
        "all essential parts": 1.0,
        "some unnecessary parts": -1.0,
        "unfamiliar or uncertain": 0.0,
        "n/a, no parts listed": 0.0,
    }),
    **_options("part", "level_of_detail", {
        "appropriate": 1.0,
        "overly detailed": -1.0,
        "too general or broad": -1.0,
        "unfamiliar or uncertain": 0.0,
    }),
    **_options("part", "clarity", {
        "well-identified": 1.0,
        "correctly no parts listed": 1.0,
        "incorrectly no parts listed": -1.0,
        "some parts overlap": -1.0,
        "unfamiliar or uncertain": 0.0,
    }),
    **_options("part", "consistency", {
        "consistent": 1.0,
        "inconsistent": -1.0,
        "unfamiliar or uncertain": 0.0,
    }),
    **_options("material", "clarity", {
        "well-identified": 1.0,
        "some materials overlap": -1.0,
        "unfamiliar or uncertain": 0.0,
    }),
}


@dataclass(frozen=True)
class ComparisonScore:
    aggregate: float
    rated: int
    mean: float


def score_comparison(
    counts: Mapping[ResponseOption, int],
    weights: ComparisonWeights | None = None,
) -> ComparisonScore:
    """Weighted aggregate, rated-response count, and their mean percentage."""
    weights = DEFAULT_WEIGHTS if weights is None else weights
    aggregate = Fraction(0)
    rated = 0
    for option, count in counts.items():
        if option not in weights:
            raise MissingWeightError(f"no weight for option {option.key()!r}")
        weight = Fraction(weights[option]).limit_denominator(1000)
        if weight == 0:
            continue
        aggregate += weight * count
        rated += count
    if rated == 0:
        raise ZeroRatedResponsesError("every response was neutral")
    mean = pct(aggregate, rated)
    return ComparisonScore(
        aggregate=float(round_half_up(aggregate, digits=2)),
        rated=rated,
        mean=mean,
    )
