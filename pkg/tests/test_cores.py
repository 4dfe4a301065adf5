import json
from collections import Counter

import pytest

from funtf.bigraph import BipartiteGraph, canonical_form, is_connected
from funtf.cores import (
    CoreNotFoundError, CoreRecord, CoreTable, TableError, classify_core, embed_core,
    enumerate_candidate_cores, feasible_shapes, load_table, save_table,
)
from funtf.pattern import complement_graph, parse_pattern
from test_bigraph import brute_force_classes

N4_SHAPE_COUNTS = {(3, 4): 1, (3, 5): 2, (3, 6): 4, (3, 7): 6, (3, 8): 8,
                   (4, 4): 4, (4, 5): 29, (4, 6): 71, (4, 7): 129, (4, 8): 110, (4, 9): 72}


def test_n3_candidates():
    recs = enumerate_candidate_cores(3)
    assert len(recs) == 7
    assert feasible_shapes(recs) == [(2, 4), (3, 3), (3, 4), (3, 5)]
    for rec in recs:
        assert rec.edge_count == 3 + rec.alpha + rec.beta - 1 == len(rec.core.edges)
        assert min(rec.core.row_degrees() + rec.core.col_degrees()) >= 2
        assert is_connected(rec.core)


def test_n4_regression_counts():
    recs = enumerate_candidate_cores(4)
    assert len(recs) == 436
    assert Counter((rec.alpha, rec.beta) for rec in recs) == N4_SHAPE_COUNTS
    assert len({rec.key for rec in recs}) == 436


@pytest.mark.parametrize("shape", [(3, 4), (3, 5), (3, 6)])
def test_n4_three_row_shapes_brute_force(shape):
    alpha, beta = shape
    assert brute_force_classes(alpha, beta, 6 + alpha + beta - 1, min_degree=2) == N4_SHAPE_COUNTS[shape]


def test_unsupported_n():
    for n in (2, 6):
        with pytest.raises(ValueError):
            enumerate_candidate_cores(n)


def test_embed_core():
    core = BipartiteGraph.from_text("1111\n1111")
    e = embed_core(core, 3, 5)
    assert str(e) == "00001\n00001\n11111"
    assert canonical_form(BipartiteGraph(2, 4, frozenset(complement_graph(e).edges))) == canonical_form(core)
    with pytest.raises(ValueError):
        embed_core(core, 3, 3)


def non_spanning_n4_core():
    rec = next(rec for rec in enumerate_candidate_cores(4) if rec.key == "3x6:111111111111110000")
    return rec


def test_candidate_failing_spanning_has_no_degree():
    out = classify_core(non_spanning_n4_core(), 4, [6])
    assert out.is_spanning_core is False
    assert out.degree is None and not out.degrees_by_r


def test_spanning_decided_above_beta():
    out = classify_core(non_spanning_n4_core(), 4, [6, 7], with_degrees=False)
    assert out.spanning_by_r == {6: False, 7: True}
    assert out.is_spanning_core is True


def test_classify_two_row_core():
    rec = next(rec for rec in enumerate_candidate_cores(3) if rec.alpha == 2)
    out = classify_core(rec, 3, [5, 6])
    assert out.is_spanning_core and out.degree == 24 and out.degree_exact
    assert out.degrees_by_r == {5: 24, 6: 24}


def test_n3_records(n3_classification):
    records, _ = n3_classification
    assert all(rec.is_spanning_core for rec in records)
    assert sorted(rec.degree for rec in records) == [24, 32, 96, 128, 288, 384, 576]
    for rec in records:
        assert len(set(rec.degrees_by_r.values())) == 1
        assert rec.degree_exact and rec.degree_flag is None


def small_table():
    rec = CoreRecord(BipartiteGraph.from_text("111\n111\n110"), 3, 3, 8, True, 32, [5, 6], {5: 32, 6: 32},
                     {5: True, 6: True}, True, None, 1e-14)
    return CoreTable.from_records(3, [rec], [5, 6], 0)


def test_table_round_trip(tmp_path, n3_classification):
    records, _ = n3_classification
    table = CoreTable.from_records(3, records, [5, 6], 0)
    path = tmp_path / "t.json"
    save_table(table, path)
    loaded = load_table(path)
    assert loaded.to_dict() == table.to_dict()
    assert list(tmp_path.iterdir()) == [path]


def test_lookup(example_pattern):
    from funtf.bigraph import two_core

    table = small_table()
    assert table.lookup(two_core(complement_graph(example_pattern)).graph).degree == 32
    with pytest.raises(CoreNotFoundError):
        table.lookup(BipartiteGraph.complete(2, 4))


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(version=99),
    lambda d: d.update(format="other"),
    lambda d: d["records"][0].pop("alpha"),
    lambda d: d["records"][0].update(key="3x3:011111111"),
])
def test_bad_tables(tmp_path, mutate):
    d = small_table().to_dict()
    mutate(d)
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(d))
    with pytest.raises(TableError):
        load_table(path)


def test_garbage_table(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(TableError):
        load_table(path)


def test_table_block_matches_core():
    rec = small_table().lookup(complement_graph(parse_pattern("000\n000\n100")))
    assert canonical_form(complement_graph(parse_pattern(rec.pattern_repr))) == rec.key
