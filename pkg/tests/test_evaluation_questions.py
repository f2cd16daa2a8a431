from __future__ import annotations

import csv

import pytest

from composition_miner.evaluation import (
    CapExceededWithoutSeedError,
    QuestionCategory,
    generate_questions,
)
from composition_miner.kbstore import assemble

from helpers import node, part


def _repo():
    drum = node(
        "drum",
        children=(
            node(
                "snare drum",
                depth=1,
                parts=(part("shell", "wood or metal"), part("snare wires", "steel")),
            ),
            node("hand drum", depth=1, parts=(part("shell", "wood"),)),
        ),
    )
    whistle = node("whistle", no_distinct_subtypes=True, parts=(part("barrel", "tin"),))
    return assemble([drum, whistle])


class TestPrecision:
    def test_one_question_per_candidate(self):
        batch = generate_questions(_repo(), QuestionCategory.PRECISION, ["whistle"])
        # 1 part + 1 material atom
        assert len(batch.questions) == 2

    def test_paintbrush_style_part_questions(self):
        repo = assemble(
            [node("paintbrush", parts=(part("handle"), part("bristle"), part("ferrule")))]
        )
        batch = generate_questions(repo, QuestionCategory.PRECISION, ["paintbrush"])
        assert len(batch.questions) == 3
        subjects = [q.subject for q in batch.questions]
        assert any("'handle'" in s for s in subjects)
        assert all("paintbrush" in s for s in subjects)


class TestRecall:
    def test_one_question_per_displayed_list(self):
        batch = generate_questions(_repo(), QuestionCategory.RECALL, ["drum"])
        # subtype list of drum + (parts, materials) for both subtypes
        assert len(batch.questions) == 5
        listings = [q.subject for q in batch.questions]
        assert any("subtypes" in s for s in listings)


class TestDistinctiveness:
    def test_forced_by_construction(self):
        batch = generate_questions(_repo(), QuestionCategory.DISTINCTIVENESS, ["drum"])
        assert len(batch.questions) == 1
        subject = batch.questions[0].subject
        assert "'snare wires'" in subject
        assert "'snare drum'" in subject and "'hand drum'" in subject

    def test_pairs_require_part_absent_in_sibling(self):
        repo = assemble(
            [
                node(
                    "case",
                    children=(
                        node("soft case", depth=1, parts=(part("zipper"),)),
                        node("hard case", depth=1, parts=(part("zipper"),)),
                    ),
                )
            ]
        )
        batch = generate_questions(repo, QuestionCategory.DISTINCTIVENESS, ["case"])
        assert batch.questions == []


class TestCapSampling:
    def _bulky_repo(self, parts_count=40):
        tree = node(
            "bulky",
            parts=tuple(part(f"part {i}", "steel") for i in range(parts_count)),
        )
        return assemble([tree])

    def test_cap_without_seed_rejected(self):
        with pytest.raises(CapExceededWithoutSeedError):
            generate_questions(
                self._bulky_repo(), QuestionCategory.PRECISION, ["bulky"], cap=10
            )

    def test_seeded_cap_reproducible(self):
        repo = self._bulky_repo()
        first = generate_questions(
            repo, QuestionCategory.PRECISION, ["bulky"], cap=10, seed=33
        )
        second = generate_questions(
            repo, QuestionCategory.PRECISION, ["bulky"], cap=10, seed=33
        )
        assert len(first.questions) == 10
        assert [q.subject for q in first.questions] == [
            q.subject for q in second.questions
        ]
        other_seed = generate_questions(
            repo, QuestionCategory.PRECISION, ["bulky"], cap=10, seed=34
        )
        assert [q.subject for q in other_seed.questions] != [
            q.subject for q in first.questions
        ]

    def test_cap_not_binding_needs_no_seed(self):
        batch = generate_questions(
            _repo(), QuestionCategory.PRECISION, ["whistle"], cap=100
        )
        assert len(batch.questions) == 2


def test_csv_layout(tmp_path):
    batch = generate_questions(_repo(), QuestionCategory.PRECISION, ["whistle"])
    target = tmp_path / "questions.csv"
    batch.write_csv(target)
    with open(target, newline="", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    assert rows[0]["question_id"] == "precision-00001"
    assert rows[0]["category"] == "precision"
    assert rows[0]["entity"] == "whistle"
    assert "Likely" in rows[0]["choices"]


def test_unknown_entity_rejected():
    with pytest.raises(KeyError):
        generate_questions(_repo(), QuestionCategory.PRECISION, ["missing thing"])
