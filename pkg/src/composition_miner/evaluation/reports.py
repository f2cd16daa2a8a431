"""Report rendering: JSON-ready dicts plus aligned text tables."""

from __future__ import annotations

from typing import Mapping

from .comparison import ComparisonScore
from .recall import CreditTally, score_recall


def recall_report(tallies: Mapping[str, CreditTally]) -> dict:
    """Rows keyed by an arbitrary label (e.g. dataset name)."""
    rows = {}
    for label, tally in tallies.items():
        rows[label] = {
            "full": tally.full,
            "half": tally.half,
            "missing": tally.missing,
            "total": tally.total,
            "recall": score_recall(tally),
        }
    return {"rows": rows}


def format_recall_report(report: dict) -> str:
    header = f"{'Reference':<16}{'Full':>7}{'Half':>7}{'Missing':>9}{'Total':>7}{'Recall (%)':>12}"
    lines = [header, "-" * len(header)]
    for label, row in report["rows"].items():
        lines.append(
            f"{label:<16}{row['full']:>7}{row['half']:>7}{row['missing']:>9}"
            f"{row['total']:>7}{row['recall']:>12.2f}"
        )
    return "\n".join(lines)


def fractions_report(fractions: Mapping[str, float], total_questions: int) -> dict:
    return {"questions": total_questions, "fractions": dict(fractions)}


def format_fractions_report(report: dict) -> str:
    lines = [f"Questions: {report['questions']}"]
    width = max((len(k) for k in report["fractions"]), default=8)
    for option, value in report["fractions"].items():
        lines.append(f"  {option:<{width}}  {value:>7.2f}")
    return "\n".join(lines)


def comparison_report(scores: Mapping[str, ComparisonScore]) -> dict:
    return {
        label: {
            "aggregate": score.aggregate,
            "rated": score.rated,
            "mean": score.mean,
        }
        for label, score in scores.items()
    }


def format_comparison_report(report: dict) -> str:
    header = f"{'Dataset':<14}{'Aggregate':>11}{'Rated':>8}{'Mean':>8}"
    lines = [header, "-" * len(header)]
    for label, row in report.items():
        lines.append(
            f"{label:<14}{row['aggregate']:>11.1f}{row['rated']:>8}{row['mean']:>8.2f}"
        )
    return "\n".join(lines)
