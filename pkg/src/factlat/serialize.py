"""JSON and DOT encodings.  Every top-level document carries ``"schema": "factlat/1"``.

Big integers are written as decimal strings so that no consumer loses
precision.
"""

from __future__ import annotations

import json
from typing import Any

from .eqstar import OverlapClass, RelFamily
from .factlat import FactorPair, FactPoset
from .partitions import EquivRel, from_blocks
from .wigner import AutGroup, ReconstructionTrace

SCHEMA = "factlat/1"

__all__ = [
    "SCHEMA",
    "relation_to_json",
    "relation_from_json",
    "family_to_json",
    "family_from_json",
    "pair_to_json",
    "pair_from_json",
    "overlap_to_json",
    "trace_to_json",
    "group_to_json",
    "hasse_json",
    "hasse_dot",
    "document",
    "dumps",
]


def relation_to_json(rel: EquivRel) -> dict:
    return {"n": rel.n, "blocks": [list(b) for b in rel.blocks]}


def relation_from_json(obj: dict) -> EquivRel:
    return from_blocks(obj["n"], obj["blocks"])


def family_to_json(fam: RelFamily) -> list[dict]:
    return [relation_to_json(r) for r in fam]


def family_from_json(items: list[dict], ground: int | None = None) -> RelFamily:
    rels = [relation_from_json(o) for o in items]
    if ground is None:
        if not rels:
            raise ValueError("ground is required for an empty family")
        ground = rels[0].n
    return RelFamily(ground, rels)


def pair_to_json(fp: FactorPair) -> dict:
    return {"theta": relation_to_json(fp.theta), "theta_prime": relation_to_json(fp.theta_prime)}


def pair_from_json(obj: dict) -> FactorPair:
    return FactorPair(relation_from_json(obj["theta"]), relation_from_json(obj["theta_prime"]))


def overlap_to_json(oc: OverlapClass) -> dict:
    return oc.as_dict()


def trace_to_json(trace: ReconstructionTrace) -> dict:
    return trace.as_dict()


def group_to_json(group: AutGroup) -> dict:
    return group.as_dict()


def hasse_json(poset: FactPoset) -> dict:
    heights = poset.heights()
    perp = sorted({tuple(sorted((i, j))) for i, j in enumerate(poset.perp)})
    return document(
        n=poset.n,
        nodes=[
            {
                "id": i,
                "theta": [list(b) for b in fp.theta.blocks],
                "theta_prime": [list(b) for b in fp.theta_prime.blocks],
                "height": heights[i],
            }
            for i, fp in enumerate(poset.elements)
        ],
        covers=[list(e) for e in poset.covers()],
        perp=[list(p) for p in perp],
    )


def _label(rel: EquivRel) -> str:
    return "|".join("".join(map(str, b)) if rel.n <= 10 else ",".join(map(str, b)) for b in rel.blocks)


def hasse_dot(poset: FactPoset) -> str:
    lines = [
        "// schema: factlat/1",
        f"digraph fact_{poset.n} {{",
        "  rankdir=BT;",
        "  node [shape=box, fontname=monospace];",
    ]
    for i, fp in enumerate(poset.elements):
        lines.append(f'  n{i} [label="{_label(fp.theta)} / {_label(fp.theta_prime)}"];')
    for i, j in poset.covers():
        lines.append(f"  n{i} -> n{j};")
    for i, j in enumerate(poset.perp):
        if i < j:
            lines.append(f"  n{i} -> n{j} [dir=none, style=dashed, color=gray, constraint=false];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def document(**fields: Any) -> dict:
    return {"schema": SCHEMA, **fields}


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"
