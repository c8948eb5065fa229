import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bosebound import potentials as pot
from bosebound.errors import ConfigError

steps = st.lists(st.tuples(st.floats(0.05, 1.0), st.floats(0.0, 50.0)), min_size=1, max_size=5)


def from_steps(data):
    breaks = np.cumsum([w for w, _ in data])
    return pot.piecewise_constant(list(breaks), [h for _, h in data])


def test_square_well_basics():
    v = pot.square_well(8.0, 1.0)
    assert v.range == 1.0 and v.sup == 8.0 and not v.has_core
    assert v(0.5) == 8.0 and v(1.5) == 0.0
    assert pot.l1_norm(v) == pytest.approx(4 * math.pi * 8.0 / 3.0)


def test_hard_core_infinite_inside():
    v = pot.hard_core(1.0)
    assert v.has_core and math.isinf(v(0.5)) and v(1.5) == 0.0
    assert math.isinf(pot.l1_norm(v))


def test_negative_values_rejected():
    with pytest.raises(ValueError):
        pot.square_well(-1.0, 1.0)


@settings(max_examples=30, deadline=None)
@given(steps, st.floats(0.1, 100.0), st.floats(0.1, 100.0))
def test_truncation_is_monotone_in_level(data, n1, n2):
    v = from_steps(data)
    lo, hi = sorted((n1, n2))
    r = pot.sample_points(v)
    assert np.all(pot.truncate(v, lo)(r) <= pot.truncate(v, hi)(r) + 1e-12)
    assert np.all(pot.truncate(v, hi)(r) <= v(r) + 1e-12)


@settings(max_examples=30, deadline=None)
@given(steps, st.floats(0.0, 1.0))
def test_split_reconstructs(data, frac):
    v = from_steps(data)
    inner, outer = pot.split_range(v, frac * v.range)
    r = pot.sample_points(v)
    assert np.allclose(inner(r) + outer(r), v(r), rtol=1e-12, atol=1e-12)
    assert pot.l1_norm(inner) + pot.l1_norm(outer) == pytest.approx(pot.l1_norm(v), rel=1e-10, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(steps, st.floats(0.1, 60.0))
def test_l1_monotone_under_truncation(data, n):
    v = from_steps(data)
    assert pot.l1_norm(pot.truncate(v, n)) <= pot.l1_norm(v) * (1 + 1e-12) + 1e-300


def test_split_inside_core_rejected():
    with pytest.raises(ValueError):
        pot.split_range(pot.hard_core(1.0), 0.5)


@pytest.mark.parametrize("v", [
    pot.zero(),
    pot.hard_core(0.7),
    pot.square_well(3.0, 2.0),
    pot.piecewise_constant([0.5, 1.0, 2.0], [4.0, 0.0, 1.5]),
    pot.tabulated([0.0, 0.5, 1.0], [2.0, 1.0, 0.0]),
    pot.sum_of(pot.hard_core(0.3), pot.square_well(2.0, 1.0)),
])
def test_json_round_trip(v):
    w = pot.loads(pot.dumps(v))
    assert w == v
    doc = json.loads(pot.dumps(v))
    assert set(doc) == {"kind", "params", "range"}


def test_scaling_law():
    v = pot.square_well(8.0, 1.0)
    w = v.scaled(2.0)
    assert w.range == 2.0 and w(1.0) == pytest.approx(2.0)


@pytest.mark.parametrize("text, fragment", [
    ('{"kind": "square_well",\n "params": {"V0": 1, "R": }}', "<string>:2:"),
    ('{"kind": "nope", "params": {}}', "nope"),
    ('{"kind": "square_well", "params": {"V0": 1, "R": 1}, "range": 2}', "range"),
    ('{"kind": "zero", "colour": 1}', "unknown"),
    ('[1, 2]', "object"),
])
def test_loads_errors(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        pot.loads(text)


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        pot.load(tmp_path / "missing.json")
