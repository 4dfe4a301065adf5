import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from funtf.pattern import (
    EntryPattern, PatternFormatError, check_matroid_range, complement_graph, expected_basis_size,
    format_pattern, necessary_conditions, parse_pattern, pattern_from_graph,
)


@st.composite
def patterns(draw, n_range=(3, 5), extra=(2, 4)):
    n = draw(st.integers(*n_range))
    r = n + draw(st.integers(*extra))
    known = draw(st.lists(st.booleans(), min_size=n * r, max_size=n * r))
    return EntryPattern.from_grid(np.array(known).reshape(n, r))


@given(patterns())
def test_text_round_trip(e):
    assert parse_pattern(format_pattern(e)) == e
    assert pattern_from_graph(complement_graph(e)) == e


def test_parse_variants():
    a = parse_pattern("# comment\n00000\n11000  # trailing\n\n11100\n")
    b = parse_pattern("0 0 0 0 0\n1 1 0 0 0\n1 1 1 0 0")
    assert a == b
    assert a.size == 5 and (a.n, a.r) == (3, 5)
    assert complement_graph(a).edges == frozenset(a.unknown())


@pytest.mark.parametrize("text", ["", "# only\n", "0102", "000\n00", "00x"])
def test_parse_errors(text):
    with pytest.raises(PatternFormatError):
        parse_pattern(text)


def test_dimension_formula():
    assert expected_basis_size(3, 5) == 5
    assert expected_basis_size(3, 6) == 7
    assert expected_basis_size(4, 6) == 9
    assert expected_basis_size(5, 7) == 14
    with pytest.raises(ValueError):
        expected_basis_size(3, 3)


def test_matroid_range():
    check_matroid_range(3, 5)
    for n, r in [(3, 4), (2, 4), (2, 5)]:
        with pytest.raises(ValueError):
            check_matroid_range(n, r)


def test_example_conditions_clean():
    rep = necessary_conditions(parse_pattern("00000\n11000\n11100"))
    assert rep.ok and rep.size_ok and rep.connected
    assert (rep.core_alpha, rep.core_beta) == (3, 3)
    assert rep.full_unknown_columns == 2


def test_three_unknown_columns():
    e = parse_pattern("000000\n000111\n000111\n000111")
    rep = necessary_conditions(e, "spanning")
    assert rep.violations == ("full_unknown_columns",)
    assert rep.size_ok is None and rep.connected is None


def test_condition_json_fields():
    rep = necessary_conditions(parse_pattern("10000\n10000\n11100"))
    d = json.loads(rep.to_json())
    assert list(d) == ["size_ok", "connected", "full_unknown_columns", "core_alpha", "core_beta", "violations"]
    assert "disconnected" in d["violations"]


def test_cardinality_violation():
    rep = necessary_conditions(parse_pattern("10000\n11000\n11100"))
    assert "cardinality" in rep.violations


def test_with_columns():
    e = parse_pattern("00000\n11000\n11100")
    assert e.with_unknown_column().r == 6 and e.with_unknown_column().size == 5
    assert e.with_known_column().size == 8
    assert e.permuted([2, 1, 0], [0, 1, 2, 3, 4]).entries == {(1, 0), (1, 1), (0, 0), (0, 1), (0, 2)}
