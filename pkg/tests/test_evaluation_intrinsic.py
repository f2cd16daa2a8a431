from __future__ import annotations

from collections import Counter
from itertools import combinations_with_replacement

import pytest

from composition_miner.evaluation import (
    MalformedResponseRowError,
    MissingPrecisionTallyError,
    ResponseTally,
    UnknownReasonCodeError,
    aggregate_option_fractions,
    aggregate_unlikely_reasons,
    filter_distinctiveness_inputs,
)
from composition_miner.evaluation.intrinsic import (
    LIKELY,
    UNABLE,
    UNCERTAIN,
    UNLIKELY,
    Response,
)

import tables
from tables import (
    COMBOS,
    DISTINCTIVENESS_COUNTS,
    DISTINCTIVENESS_QUESTIONS,
    EXPECTED_DISTINCTIVENESS_LIKELY,
    EXPECTED_PRECISION,
    PRECISION_COUNTS,
    PRECISION_QUESTIONS,
)


def tally_from_table(table: dict[str, int]) -> ResponseTally:
    return ResponseTally.from_combination_counts(
        {COMBOS[code]: count for code, count in table.items() if count}
    )


class TestResponseTally:
    def test_exactly_three_responses_enforced(self):
        with pytest.raises(MalformedResponseRowError):
            ResponseTally({"q1": (Response(LIKELY), Response(LIKELY))})

    def test_from_rows_groups_by_question(self):
        rows = [
            ("q1", "w1", "likely", None),
            ("q1", "w2", "unlikely", "feature"),
            ("q1", "w3", "likely", None),
        ]
        tally = ResponseTally.from_rows(rows)
        assert tally.question_count == 1
        assert tally.response_count == 3

    def test_duplicate_worker_rejected(self):
        rows = [
            ("q1", "w1", "likely", None),
            ("q1", "w1", "likely", None),
            ("q1", "w2", "likely", None),
        ]
        with pytest.raises(MalformedResponseRowError):
            ResponseTally.from_rows(rows)

    def test_from_combination_counts_expands(self):
        tally = ResponseTally.from_combination_counts({COMBOS["L2U1"]: 13})
        assert tally.question_count == 13
        options = Counter(r.option for r in tally.responses())
        assert options == {"likely": 26, "unlikely": 13}


class TestAggregateFractions:
    @pytest.mark.parametrize("key", sorted(PRECISION_COUNTS))
    def test_golden_precision_tables(self, key):
        tally = tally_from_table(PRECISION_COUNTS[key])
        assert tally.question_count == PRECISION_QUESTIONS[key]
        fractions = aggregate_option_fractions(tally)
        for option, expected in EXPECTED_PRECISION[key].items():
            assert fractions.get(option, 0.0) == pytest.approx(expected, abs=0.01)

    def test_unanimous_single_question(self):
        tally = ResponseTally.from_combination_counts({COMBOS["L3"]: 1})
        assert aggregate_option_fractions(tally) == {"likely": 100.00}

    def test_fraction_closure(self):
        for table in PRECISION_COUNTS.values():
            fractions = aggregate_option_fractions(tally_from_table(table))
            assert sum(fractions.values()) == pytest.approx(100.0, abs=0.05)

    def test_distinctiveness_tables(self):
        for method, table in DISTINCTIVENESS_COUNTS.items():
            tally = tally_from_table(table)
            assert tally.question_count == DISTINCTIVENESS_QUESTIONS[method]
            fractions = aggregate_option_fractions(tally)
            assert fractions["likely"] == pytest.approx(
                EXPECTED_DISTINCTIVENESS_LIKELY[method], abs=0.01
            )


def _reason_tally(reason_counts: dict[str, int]) -> ResponseTally:
    """Questions whose unlikely responses carry the given reason codes."""
    reasons: list[str] = []
    for reason, count in reason_counts.items():
        reasons.extend([reason] * count)
    questions: dict[str, tuple[Response, ...]] = {}
    for index in range(0, len(reasons), 3):
        chunk = reasons[index : index + 3]
        responses = [Response(UNLIKELY, reason) for reason in chunk]
        while len(responses) < 3:
            responses.append(Response(LIKELY))
        questions[f"r{index}"] = tuple(responses)
    return ResponseTally(questions)


class TestUnlikelyReasons:
    def test_single_reason_is_total(self):
        tally = _reason_tally({"feature": 6})
        assert aggregate_unlikely_reasons(tally) == {"feature": 100.00}

    @pytest.mark.parametrize("method", ["few", "zero"])
    def test_part_reason_distributions(self, method):
        tally = _reason_tally(tables.PART_REASON_COUNTS[method])
        result = aggregate_unlikely_reasons(tally)
        for reason, expected in tables.EXPECTED_PART_REASONS[method].items():
            assert result.get(reason, 0.0) == pytest.approx(expected, abs=0.01)

    @pytest.mark.parametrize("method", ["few", "zero"])
    def test_material_reason_distributions(self, method):
        tally = _reason_tally(tables.MATERIAL_REASON_COUNTS[method])
        result = aggregate_unlikely_reasons(tally)
        for reason, expected in tables.EXPECTED_MATERIAL_REASONS[method].items():
            assert result.get(reason, 0.0) == pytest.approx(expected, abs=0.01)

    def test_missing_reason_code_rejected(self):
        tally = ResponseTally(
            {"q": (Response(UNLIKELY), Response(LIKELY), Response(LIKELY))}
        )
        with pytest.raises(UnknownReasonCodeError):
            aggregate_unlikely_reasons(tally)

    def test_unknown_reason_code_rejected(self):
        tally = _reason_tally({"mystery": 3})
        with pytest.raises(UnknownReasonCodeError):
            aggregate_unlikely_reasons(tally, known_reasons={"feature"})


def _brute_force_keep(options: tuple[str, str, str]) -> bool:
    counts = Counter(options)
    if counts[UNLIKELY] >= 2:
        return False
    if counts[UNABLE] + counts[UNCERTAIN] >= 2:
        return False
    return True


class TestDistinctivenessFilter:
    def test_unable_uncertain_majority_excluded(self):
        tallies = {"candidate": (UNABLE, UNCERTAIN, LIKELY)}
        assert filter_distinctiveness_inputs(tallies) == set()

    def test_single_unlikely_kept(self):
        tallies = {"candidate": (LIKELY, LIKELY, UNLIKELY)}
        assert filter_distinctiveness_inputs(tallies) == {"candidate"}

    def test_unlikely_majority_excluded(self):
        tallies = {"candidate": (UNLIKELY, UNLIKELY, LIKELY)}
        assert filter_distinctiveness_inputs(tallies) == set()

    def test_matches_brute_force_over_all_20_classes(self):
        classes = list(
            combinations_with_replacement((LIKELY, UNLIKELY, UNABLE, UNCERTAIN), 3)
        )
        assert len(classes) == 20
        tallies = {str(combo): combo for combo in classes}
        kept = filter_distinctiveness_inputs(tallies)
        for combo in classes:
            assert (str(combo) in kept) == _brute_force_keep(combo), combo

    def test_missing_tally_raises(self):
        with pytest.raises(MissingPrecisionTallyError):
            filter_distinctiveness_inputs({}, candidates=["ghost"])
