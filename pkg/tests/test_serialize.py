import json

from hypothesis import given

from conftest import relations
from factlat import serialize
from factlat.eqstar import RelFamily, overlap_classify
from factlat.factlat import enumerate_fact, iter_factor_pairs
from factlat.partitions import from_blocks


@given(relations())
def test_relation_round_trip(rel):
    assert serialize.relation_from_json(json.loads(json.dumps(serialize.relation_to_json(rel)))) == rel


def test_pair_and_family_round_trip():
    for fp in iter_factor_pairs(6):
        assert serialize.pair_from_json(serialize.pair_to_json(fp)) == fp
    fam = RelFamily(4, [from_blocks(4, [[0, 1], [2, 3]]), from_blocks(4, [[0, 2], [1, 3]])])
    assert serialize.family_from_json(serialize.family_to_json(fam)) == fam


def test_overlap_json_uses_string_counts():
    rel = from_blocks(8, [[0, 1], [2, 3], [4, 5], [6, 7]])
    assert serialize.overlap_to_json(overlap_classify(rel, rel))["upper_bound_count"] == "3"


def test_hasse_json_fact4():
    doc = serialize.hasse_json(enumerate_fact(4))
    assert doc["schema"] == "factlat/1"
    assert len(doc["nodes"]) == 8 and len(doc["covers"]) == 12 and len(doc["perp"]) == 4
    heights = sorted(node["height"] for node in doc["nodes"])
    assert heights == [0, 1, 1, 1, 1, 1, 1, 2]


def test_hasse_dot_fact2():
    text = serialize.hasse_dot(enumerate_fact(2))
    assert text.startswith("// schema: factlat/1\n")
    assert text.count("->") == 2  # one cover edge and one complement edge
    assert "style=dashed" in text


def test_dumps_is_stable():
    doc = serialize.document(b=1, a=[1, 2])
    assert serialize.dumps(doc) == serialize.dumps(json.loads(serialize.dumps(doc)))
    assert list(doc) == ["schema", "b", "a"]
