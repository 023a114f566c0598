import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from operad_lab import bar_duality as B
from operad_lab import flow as F
from operad_lab import fulton_macpherson as FM
from operad_lab import sampling as SM
from operad_lab import serialize as SZ
from operad_lab import trees as TR
from operad_lab.disc_operads import DiscConfig
from operad_lab.errors import ParseError
from operad_lab.geometry import INF, Basepoint

from conftest import Q, config


def round_trip(value):
    return SZ.loads(SZ.dumps(value))


def test_scalar_encoding():
    assert SZ.encode_scalar(Q(1, 2)) == "1/2"
    assert SZ.encode_scalar(Q(3)) == "3/1"
    assert SZ.encode_scalar(INF) == "inf"
    assert SZ.encode_scalar(0.25) == 0.25
    assert SZ.decode_scalar("2/4") == Q(1, 2)
    assert SZ.decode_scalar(3) == Q(3)
    assert SZ.decode_scalar("inf", allow_inf=True) is INF
    with pytest.raises(ParseError):
        SZ.decode_scalar("inf")
    with pytest.raises(ParseError):
        SZ.decode_scalar("1/0")


def test_config_round_trip(two_discs):
    back = round_trip(two_discs)
    assert back == two_discs and back.exact


def test_non_canonical_rational_normalizes():
    text = '{"labels": [1, 2], "x": {"1": ["-2/4"], "2": ["1/2"]}, "t": {"1": "2/4", "2": "1/2"}}'
    c = SZ.config_from_json(json.loads(text))
    assert c == config([1, 2], ["-1/2", "1/2"], ["1/2", "1/2"])
    assert '"2/4"' not in SZ.dumps(c)


def test_float_config_round_trip():
    c = DiscConfig({"a": (0.1, -0.3), "b": (-0.1, 0.3)}, {"a": 0.5, "b": 0.5})
    back = round_trip(c)
    assert back == c and not back.exact


def test_tree_and_basepoint_round_trip():
    T = TR.validate([{1}, {2}, {3}, {4}, {1, 4}, {1, 2, 4}, {1, 2, 3, 4}], {1, 2, 3, 4})
    assert round_trip(T) == T
    assert round_trip(Basepoint({1, "a"})) == Basepoint({1, "a"})


def test_infinite_edge_weight_round_trip():
    z = config([1, 2], ["-1/2", "1/2"], ["1/2", "1/2"])
    T = TR.corolla({1, 2})
    p = B.BarPoint(T, {T.root: INF}, z)
    text = SZ.dumps(p)
    assert '"inf"' in text
    back = SZ.loads(text)
    assert back == p and back.r[T.root] is INF


def test_fm_round_trip():
    y = FM.fm_from_configuration({1: (Q(0),), 2: (Q(2),), 3: (Q(7),)})
    back = round_trip(y)
    assert back == y


def test_flow_trace_round_trip():
    tr = F.flow_retract(DiscConfig({1: (-4.0,), 2: (0.0,), 3: (2.0,)}, {1: 0.2, 2: 0.4, 3: 0.4}))
    back = round_trip(tr)
    assert [e.time for e in back.events] == [e.time for e in tr.events]
    assert [e.partition for e in back.events] == [e.partition for e in tr.events]
    assert back.terminal == tr.terminal


def test_malformed_json_reports_location():
    with pytest.raises(ParseError) as err:
        SZ.loads('{"labels": [1, 2],\n "x": [[0], [1]\n')
    assert (err.value.line, err.value.column) == (3, 1)
    assert "line" in str(err.value)


def test_bad_field_reports_path():
    with pytest.raises(ParseError) as err:
        SZ.config_from_json({"labels": [1, 2], "x": {"1": ["0"], "2": ["a/b"]},
                             "t": {"1": "1/2", "2": "1/2"}})
    assert "x" in str(err.value)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["P", "R", "D", "S", "U"]), st.integers(0, 3))
def test_exact_round_trip_is_bit_exact(seed, cls, dim):
    spec = SM.SampleSpec(seed=seed, dim=dim if cls in ("P", "R") else max(dim, 1))
    c = SM.sample_config(spec, cls, rng=SM.rng_for(seed, 0, cls))
    back = round_trip(c)
    assert back == c
    assert all(isinstance(v, Fraction) for v in back.t.values())
