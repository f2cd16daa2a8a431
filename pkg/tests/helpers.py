"""Small builders shared across the test modules."""

from __future__ import annotations

from composition_miner.kbmodel import (
    KbNode,
    Level,
    MaterialExpr,
    Part,
    Provenance,
    parse_material_expr,
)

_LEVELS = (Level.ENTITY, Level.SUBTYPE, Level.SUBSUBTYPE)


def expr(text: str) -> MaterialExpr:
    return parse_material_expr(text)


def part(name: str, materials: str | None = None, optional: bool = False) -> Part:
    return Part(
        name=name,
        optional=optional,
        materials=expr(materials) if materials else None,
        internal_mechanism=(name == "internal mechanism"),
    )


def node(
    name: str,
    *,
    depth: int = 0,
    provenance: Provenance = Provenance.FEW_SHOT,
    children: tuple[KbNode, ...] = (),
    parts: tuple[Part, ...] = (),
    whole: str | None = None,
    no_distinct_subtypes: bool = False,
    no_distinct_parts: bool = False,
    uniform_materials: bool = False,
) -> KbNode:
    return KbNode(
        name=name,
        level=_LEVELS[depth],
        provenance=provenance,
        children=children,
        parts=parts,
        whole_materials=expr(whole) if whole else None,
        no_distinct_subtypes=no_distinct_subtypes,
        no_distinct_parts=no_distinct_parts,
        uniform_materials=uniform_materials,
    )


def chain(*names: str, provenance: Provenance = Provenance.FEW_SHOT, parts_at_leaf=("blade",)) -> KbNode:
    """A single-path tree entity > subtype > ... with parts on the leaf."""
    leaf_depth = len(names) - 1
    current = node(
        names[-1],
        depth=leaf_depth,
        provenance=provenance,
        parts=tuple(part(p) for p in parts_at_leaf),
    )
    for depth in range(leaf_depth - 1, -1, -1):
        current = node(
            names[depth], depth=depth, provenance=provenance, children=(current,)
        )
    return current
