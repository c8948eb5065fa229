import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bosebound import tables
from bosebound.errors import ConfigError


def test_small_table_layout():
    text = tables.format_table([(1.0, 2.5)], ["x", "y"], {"config_hash": "ab12", "seed": 3, "R": 1.0})
    assert text == "# config_hash=ab12 seed=3 R=1\nx,y\n1,2.5\n"
    assert text.count("\n") == 3 and "\r" not in text


def test_header_only_table():
    t = tables.parse_table(tables.format_table([], ["a", "b"]))
    assert t.columns == ("a", "b") and t.rows == ()
    assert t.meta["seed"] == 0


def test_bad_rows_rejected():
    with pytest.raises(ValueError):
        tables.format_table([(1.0,)], ["a", "b"])
    with pytest.raises(ValueError):
        tables.format_table([], ["a,b"])


@pytest.mark.parametrize("text, where", [
    ("x,y\n1,2\n", ":1:1"),
    ("# seed=0\n", ":2:1"),
    ("# seed=0\nx,y\n1,2\n3\n", ":4:1"),
    ("# seed=0\nx\nabc\n", ":3:1"),
])
def test_parse_errors_carry_location(text, where):
    with pytest.raises(ConfigError, match=where):
        tables.parse_table(text, "t.csv")


finite = st.floats(allow_nan=False, allow_infinity=True, width=64)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(finite, finite, finite), max_size=8), st.integers(0, 2 ** 31))
def test_round_trip_is_exact(rows, seed):
    text = tables.format_table(rows, ["a", "b", "c"], {"seed": seed, "config_hash": "f" * 16})
    t = tables.parse_table(text)
    assert t.meta["seed"] == seed and t.meta["config_hash"] == "f" * 16
    assert len(t.rows) == len(rows)
    for got, want in zip(t.rows, rows):
        for x, y in zip(got, want):
            assert x == y or (math.isnan(x) and math.isnan(y))


def test_emit_and_read(tmp_path):
    path = tmp_path / "t.csv"
    text = tables.emit_table([(0.1, 0.2)], ["a", "b"], path, {"seed": 1})
    assert path.read_bytes() == text.encode()
    assert tables.read_table(path).rows == ((0.1, 0.2),)
