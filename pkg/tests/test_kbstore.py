from __future__ import annotations

import random

import pytest

from composition_miner.kbmodel import Level, Provenance
from composition_miner.kbstore import (
    DuplicateEntityError,
    NotFoundError,
    Question,
    Repository,
    assemble,
    compute_stats,
    entity_filename,
    format_stats,
    load,
    query,
    save,
)

from helpers import chain, expr, node, part


def _soup_ladle_repo(with_third_path: bool = False) -> Repository:
    trees = [
        chain("kitchen utensil", "ladle", "soup ladle"),
        (
            node(
                "spoon",
                children=(
                    node(
                        "ladle",
                        depth=1,
                        children=(node("soup ladle", depth=2, parts=(part("bowl"),)),),
                    ),
                )
                + (
                    (
                        node(
                            "serving spoon",
                            depth=1,
                            children=(
                                node("soup ladle", depth=2, parts=(part("bowl"),)),
                            ),
                        ),
                    )
                    if with_third_path
                    else ()
                ),
            )
        ),
    ]
    return assemble(trees)


class TestAssemble:
    def test_disjoint_names_index_size(self):
        repo = assemble([chain("a thing", "b thing"), chain("c thing", "d thing")])
        assert len(repo.index) == 4
        assert all(len(entries) == 1 for entries in repo.index.values())

    def test_overlapping_paths_share_one_name(self):
        repo = _soup_ladle_repo()
        entries = repo.index["soup ladle"]
        assert len(entries) == 2
        assert {e.path for e in entries} == {
            ("kitchen utensil", "ladle", "soup ladle"),
            ("spoon", "ladle", "soup ladle"),
        }

    def test_empty_input(self):
        repo = assemble([])
        assert len(repo) == 0 and repo.index == {}

    def test_duplicate_entity_rejected(self):
        with pytest.raises(DuplicateEntityError):
            assemble([chain("gadget"), chain("gadget")])

    def test_same_name_other_provenance_allowed(self):
        assemble(
            [
                chain("gadget", provenance=Provenance.FEW_SHOT),
                chain("gadget", provenance=Provenance.ZERO_SHOT),
            ]
        )


class TestStats:
    def test_hand_countable_averages(self):
        trees = [
            node("one", parts=(part("a", "metal"), part("b", "wood"), part("c"))),
            node(
                "two",
                children=(
                    node("two sub", depth=1, parts=tuple(part(f"p{i}") for i in range(4))),
                ),
            ),
            node("three", parts=tuple(part(f"q{i}") for i in range(5))),
            node("four", parts=tuple(part(f"r{i}") for i in range(4))),
            node("five", parts=tuple(part(f"s{i}", "steel") for i in range(4))),
        ]
        stats = compute_stats(assemble(trees))
        assert stats.total_items == 5
        assert stats.avg_parts_per_item == pytest.approx(4.0)
        # distinct material atoms per item: 2, 0, 0, 0, 1
        assert stats.avg_materials_per_item == pytest.approx(0.6)

    def test_subsubtype_counting_modes(self):
        repo = _soup_ladle_repo(with_third_path=True)
        stats = compute_stats(repo)
        assert stats.unique_subsubtypes_global == 1
        assert stats.unique_subsubtypes_per_entity == 2
        assert stats.unique_subsubtypes_per_entity_subtype == 3

    def test_empty_repo(self):
        stats = compute_stats(assemble([]))
        assert stats.empty
        assert stats.total_items == 0
        assert stats.avg_parts_per_item == 0.0

    def test_entities_without_subtypes_counts_sentinel_only(self):
        trees = [
            node("flagged", no_distinct_subtypes=True, parts=(part("x"),)),
            node("childless but unflagged", parts=(part("y"),)),
            chain("parent", "child"),
        ]
        stats = compute_stats(assemble(trees))
        assert stats.entities_without_subtypes == 1

    def test_items_without_parts_by_level(self):
        trees = [
            node("bare", no_distinct_parts=True, whole="paper"),
            chain("rich", "rich sub"),
        ]
        stats = compute_stats(assemble(trees))
        entity_gap = stats.items_without_parts[Level.ENTITY.value]
        assert entity_gap.without_parts == 1 and entity_gap.total == 1
        subtype_gap = stats.items_without_parts[Level.SUBTYPE.value]
        assert subtype_gap.without_parts == 0 and subtype_gap.total == 1

    def test_stats_independent_of_assembly_order(self):
        trees = [chain("aaa", "bbb"), chain("ccc", "ddd"), node("eee", parts=(part("x"),))]
        forward = compute_stats(assemble(trees))
        backward = compute_stats(assemble(list(reversed(trees))))
        assert forward == backward

    def test_dedup_idempotence(self):
        """Re-assembling the same subtree under a second entity adds paths
        but not unique names."""
        first = assemble([chain("holder a", "widget")])
        second = assemble([chain("holder a", "widget"), chain("holder b", "widget")])
        stats_one = compute_stats(first)
        stats_two = compute_stats(second)
        assert stats_one.unique_subtypes_global == stats_two.unique_subtypes_global == 1
        assert stats_two.unique_subtypes_per_entity == 2
        assert len(second.index["widget"]) == 2

    def test_format_stats_renders(self):
        text = format_stats(compute_stats(_soup_ladle_repo()))
        assert "Unique subsubtypes" in text


class TestQuery:
    def test_parts(self):
        repo = assemble(
            [node("paintbrush", parts=(part("handle"), part("bristle"), part("ferrule")))]
        )
        answers = query(repo, "Paintbrush", Question.PARTS)
        assert len(answers) == 1
        assert answers[0].parts == ("handle", "bristle", "ferrule")

    def test_materials_uniform_fallback_through_part_name(self):
        pencil_case = node(
            "soft pencil case",
            provenance=Provenance.HUMAN,
            parts=(
                part("pouch", "plastic, leather, and/or cotton"),
                part("zipper pull tab"),
                part("zipper", "metal"),
            ),
            uniform_materials=True,
        )
        repo = assemble([pencil_case])
        answers = query(repo, "zipper pull tab", Question.MATERIALS)
        assert len(answers) == 1
        assert answers[0].materials == expr("plastic, leather, and/or cotton")

    def test_not_found(self):
        repo = assemble([chain("gadget")])
        with pytest.raises(NotFoundError):
            query(repo, "unobtainium widget", Question.PARTS)

    def test_ambiguous_name_returns_all_paths(self):
        repo = _soup_ladle_repo()
        answers = query(repo, "soup ladle", Question.PARTS)
        assert len(answers) == 2
        assert {a.path for a in answers} == {
            ("kitchen utensil", "ladle", "soup ladle"),
            ("spoon", "ladle", "soup ladle"),
        }

    def test_subtypes(self):
        repo = _soup_ladle_repo()
        answers = query(repo, "spoon", Question.SUBTYPES)
        assert answers[0].subtypes == ("ladle",)


def _random_tree(rng: random.Random, name: str) -> "KbNode":
    materials = ["steel", "oak", "glass", "vinyl", "wool", "cork"]

    def random_parts(depth_tag: str):
        parts = []
        for i in range(rng.randint(0, 4)):
            has_materials = rng.random() < 0.7
            expr_text = None
            if has_materials:
                picks = rng.sample(materials, rng.randint(1, 3))
                if len(picks) == 1:
                    expr_text = picks[0]
                else:
                    word = rng.choice(["and", "or", "and/or"])
                    expr_text = f"{', '.join(picks[:-1])} {word} {picks[-1]}"
            parts.append(
                part(f"{depth_tag} part {i}", expr_text, optional=rng.random() < 0.3)
            )
        return tuple(parts)

    def build(depth: int, tag: str):
        children = ()
        if depth < 2 and rng.random() < 0.6:
            children = tuple(
                build(depth + 1, f"{tag}{i}") for i in range(rng.randint(1, 3))
            )
        parts = random_parts(tag) if not children else ()
        no_parts = not parts and not children and rng.random() < 0.5
        whole = None
        if not parts and not children and rng.random() < 0.5:
            whole = rng.choice(materials)
        return node(
            f"node {tag}",
            depth=depth,
            provenance=Provenance.ZERO_SHOT,
            children=children,
            parts=parts,
            whole=whole,
            no_distinct_parts=no_parts and whole is not None,
        )

    built = build(0, name)
    return built


class TestPersistence:
    def test_structural_round_trip(self, tmp_path):
        repo = _soup_ladle_repo(with_third_path=True)
        save(repo, tmp_path / "kb")
        loaded = load(tmp_path / "kb")
        assert loaded.entities == repo.entities

    def test_save_load_save_byte_identical(self, tmp_path):
        repo = _soup_ladle_repo()
        save(repo, tmp_path / "one")
        save(load(tmp_path / "one"), tmp_path / "two")
        ones = sorted((tmp_path / "one").iterdir())
        twos = sorted((tmp_path / "two").iterdir())
        assert [p.name for p in ones] == [p.name for p in twos]
        for a, b in zip(ones, twos):
            assert a.read_bytes() == b.read_bytes()

    def test_randomized_trees_round_trip(self, tmp_path):
        rng = random.Random(90125)
        for round_no in range(25):
            trees = [
                _random_tree(rng, f"e{round_no}x{i}") for i in range(rng.randint(1, 4))
            ]
            repo = assemble(trees)
            target = tmp_path / f"kb{round_no}"
            save(repo, target)
            loaded = load(target)
            assert loaded.entities == repo.entities
            again = tmp_path / f"kb{round_no}b"
            save(loaded, again)
            for a, b in zip(sorted(target.iterdir()), sorted(again.iterdir())):
                assert a.read_bytes() == b.read_bytes()

    def test_entity_filename_stable_and_safe(self):
        name = "Glove (ice hockey)"
        assert entity_filename(name) == entity_filename("glove (ice hockey)")
        assert "/" not in entity_filename(name)
