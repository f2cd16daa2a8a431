from __future__ import annotations

import random
import string

import pytest
from hypothesis import given, strategies as st

from composition_miner.kbmodel import (
    Connective,
    ENTITY_MARKER,
    EmptyMaterialListError,
    EmptyNameError,
    KbModelError,
    KbNode,
    KbValidationError,
    Level,
    MaterialClass,
    MaterialExpr,
    MixedConjunctionsError,
    Part,
    Provenance,
    entity_from_document,
    entity_to_document,
    normalize_name,
    parse_material_expr,
    print_material_expr,
)

from helpers import expr, node, part


class TestParseMaterialExpr:
    @pytest.mark.parametrize(
        "text,atoms,connective",
        [
            (
                "animal hair, nylon, and/or polyester",
                ("animal hair", "nylon", "polyester"),
                Connective.AND_OR,
            ),
            ("plastic or glass", ("plastic", "glass"), Connective.OR),
            ("absorbent paper", ("absorbent paper",), Connective.SINGLE),
            (
                "electronics, metal, and plastics",
                ("electronics", "metal", "plastics"),
                Connective.AND,
            ),
            ("wood or plastic", ("wood", "plastic"), Connective.OR),
            ("leather and/or kevlar", ("leather", "kevlar"), Connective.AND_OR),
        ],
    )
    def test_examples(self, text, atoms, connective):
        parsed = parse_material_expr(text)
        assert parsed.atoms == atoms
        assert parsed.connective is connective

    def test_missing_oxford_comma(self):
        parsed = parse_material_expr("glass, plastic and/or metal")
        assert parsed.atoms == ("glass", "plastic", "metal")
        assert parsed.connective is Connective.AND_OR

    def test_trailing_period(self):
        assert parse_material_expr("wood or plastic.").atoms == ("wood", "plastic")

    def test_mixed_conjunctions_rejected(self):
        with pytest.raises(MixedConjunctionsError):
            parse_material_expr("leather and/or kevlar, and foam")

    @pytest.mark.parametrize("text", ["", "   ", "-", ", ,"])
    def test_empty_list(self, text):
        with pytest.raises(EmptyMaterialListError):
            parse_material_expr(text)

    def test_multi_atom_without_conjunction(self):
        with pytest.raises(KbModelError):
            parse_material_expr("metal, plastic")

    def test_repeated_same_conjunction_tolerated(self):
        parsed = parse_material_expr("metal and plastic and rubber")
        assert parsed.atoms == ("metal", "plastic", "rubber")
        assert parsed.connective is Connective.AND

    def test_duplicate_atoms_rejected(self):
        with pytest.raises(KbModelError):
            parse_material_expr("metal or metal")

    def test_connective_words_inside_atoms_do_not_split(self):
        assert parse_material_expr("sandpaper").atoms == ("sandpaper",)
        assert parse_material_expr("cork or sandstone").atoms == ("cork", "sandstone")


class TestPrintMaterialExpr:
    def test_two_atoms(self):
        assert print_material_expr(expr("wood or plastic")) == "wood or plastic"

    def test_single(self):
        assert print_material_expr(expr("foam")) == "foam"

    def test_three_atoms_oxford(self):
        three = MaterialExpr(("a1", "b2", "c3"), Connective.AND_OR)
        assert print_material_expr(three) == "a1, b2, and/or c3"


_ATOM_ALPHABET = string.ascii_lowercase + " -"


def _random_atom(rng: random.Random) -> str:
    while True:
        text = "".join(
            rng.choice(_ATOM_ALPHABET) for _ in range(rng.randint(1, 12))
        ).strip()
        if not text:
            continue
        try:
            candidate = MaterialExpr((text,), Connective.SINGLE)
        except KbModelError:
            continue
        return candidate.atoms[0]


def random_material_expr(rng: random.Random) -> MaterialExpr:
    size = rng.choice([1, 1, 2, 2, 3, 4, 5])
    atoms: list[str] = []
    seen: set[str] = set()
    while len(atoms) < size:
        atom = _random_atom(rng)
        key = normalize_name(atom)
        if key not in seen:
            seen.add(key)
            atoms.append(atom)
    if size == 1:
        return MaterialExpr(tuple(atoms), Connective.SINGLE)
    connective = rng.choice([Connective.AND, Connective.OR, Connective.AND_OR])
    return MaterialExpr(tuple(atoms), connective)


def test_round_trip_randomized():
    rng = random.Random(20240 + 1)
    for _ in range(2000):
        original = random_material_expr(rng)
        assert parse_material_expr(print_material_expr(original)) == original


_atom_st = st.text(
    alphabet=string.ascii_lowercase + " ", min_size=1, max_size=12
).filter(
    lambda s: s.strip()
    and "," not in s
    and all(w not in ("and", "or", "and/or") for w in s.split())
)


@given(st.lists(_atom_st, min_size=1, max_size=5, unique_by=lambda s: normalize_name(s)))
def test_round_trip_property(atoms):
    if len(atoms) == 1:
        original = MaterialExpr(tuple(atoms), Connective.SINGLE)
    else:
        original = MaterialExpr(tuple(atoms), Connective.AND_OR)
    assert parse_material_expr(print_material_expr(original)) == original


class TestNormalizeName:
    def test_trim_and_case(self):
        assert normalize_name("  Soup Ladle ") == "soup ladle"

    def test_parenthesized_content_preserved(self):
        assert normalize_name("Glove (ice hockey)") == "glove (ice hockey)"
        assert normalize_name("Glove (Ice Hockey)") == "glove (Ice Hockey)"

    def test_simple_lowercase(self):
        assert normalize_name("Paintbrush") == "paintbrush"

    def test_whitespace_collapse(self):
        assert normalize_name("frying   pan") == "frying pan"

    def test_idempotent(self):
        for raw in ["  Soup Ladle ", "Glove (Ice Hockey)", "A  B (C  D)"]:
            once = normalize_name(raw)
            assert normalize_name(once) == once

    def test_empty_rejected(self):
        with pytest.raises(EmptyNameError):
            normalize_name("   ")


class TestPart:
    def test_name_normalized(self):
        assert Part(name=" Lid  Knob ").name == "lid knob"

    def test_internal_mechanism_name_enforced(self):
        with pytest.raises(KbModelError):
            Part(name="gearbox", internal_mechanism=True)
        Part(name="internal mechanism", internal_mechanism=True)

    def test_entity_marker_materials(self):
        marked = Part(name="pouch", materials=ENTITY_MARKER)
        assert marked.materials is ENTITY_MARKER

    def test_material_classes_require_matching_atoms(self):
        with pytest.raises(KbModelError):
            Part(
                name="pouch",
                materials=expr("plastic"),
                material_classes={"leather": MaterialClass.PROPER},
            )


class TestKbNode:
    def test_level_must_increase(self):
        with pytest.raises(KbValidationError):
            node("parent", depth=0, children=(node("child", depth=2),))

    def test_subsubtype_cannot_have_children(self):
        grand = node("grand", depth=2)
        with pytest.raises(KbValidationError):
            KbNode(
                name="deep",
                level=Level.SUBSUBTYPE,
                provenance=Provenance.FEW_SHOT,
                children=(grand,),
            )

    def test_sentinels_imply_empty(self):
        with pytest.raises(KbValidationError):
            node("x", no_distinct_subtypes=True, children=(node("y", depth=1),))
        with pytest.raises(KbValidationError):
            node("x", no_distinct_parts=True, parts=(part("p"),))

    def test_whole_materials_needs_empty_parts_or_uniform(self):
        node("x", whole="paper")
        node("x", parts=(part("shell"),), whole="paper", uniform_materials=True)
        with pytest.raises(KbValidationError):
            node("x", parts=(part("shell"),), whole="paper")

    def test_uniform_needs_reference_materials(self):
        with pytest.raises(KbValidationError):
            node("x", parts=(part("shell"),), uniform_materials=True)
        node("x", parts=(part("shell", "plastic"),), uniform_materials=True)

    def test_provenance_consistent_in_tree(self):
        child = node("child", depth=1, provenance=Provenance.ZERO_SHOT)
        with pytest.raises(KbValidationError):
            node("parent", provenance=Provenance.FEW_SHOT, children=(child,))

    def test_material_classes_only_on_human_trees(self):
        classed = Part(
            name="pouch",
            materials=expr("plastic"),
            material_classes={"plastic": MaterialClass.PROPER},
        )
        node("case", provenance=Provenance.HUMAN, parts=(classed,))
        with pytest.raises(KbValidationError):
            node("case", provenance=Provenance.FEW_SHOT, parts=(classed,))

    def test_part_materials_uniform_fallback(self):
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
        inherited = pencil_case.part_materials("zipper pull tab")
        assert inherited == expr("plastic, leather, and/or cotton")
        assert pencil_case.part_materials("zipper") == expr("metal")


class TestDocumentRoundTrip:
    def _sample_tree(self) -> KbNode:
        return node(
            "frying pan",
            children=(
                node(
                    "stovetop frying pan",
                    depth=1,
                    parts=(part("body", "metal"), part("handle", "wood or plastic")),
                ),
                node(
                    "electric frying pan",
                    depth=1,
                    parts=(
                        part("body", "metal"),
                        part("lid", optional=True),
                        part("internal mechanism", "electronics"),
                    ),
                ),
            ),
        )

    def test_round_trip(self):
        tree = self._sample_tree()
        doc = entity_to_document(tree)
        assert doc["schema"] == "kb/1"
        assert doc["provenance"] == "few_shot"
        assert entity_from_document(doc) == tree

    def test_bad_schema_rejected(self):
        doc = entity_to_document(self._sample_tree())
        doc["schema"] = "kb/0"
        with pytest.raises(KbValidationError):
            entity_from_document(doc)

    def test_invalid_structure_is_load_error_not_repair(self):
        doc = entity_to_document(node("saucer", no_distinct_parts=True))
        doc["parts"] = [
            {"name": "rim", "optional": False, "materials": None,
             "internal_mechanism": False}
        ]
        with pytest.raises(KbValidationError):
            entity_from_document(doc)

    def test_entity_marker_round_trip(self):
        tree = node(
            "kit",
            provenance=Provenance.HUMAN,
            parts=(Part(name="pump", materials=ENTITY_MARKER),),
        )
        doc = entity_to_document(tree)
        assert doc["parts"][0]["materials"] == "entity"
        assert entity_from_document(doc) == tree
