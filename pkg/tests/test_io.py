import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stringy import io
from stringy.errors import InputError, ParseError

F = Fraction

beta_file = {"n": 1, "polys": [{"weight": "3", "terms": [{"exp": [0], "coef": "1"}, {"exp": [1], "coef": 1}]}], "u": ["1"]}


def test_parse_beta_file():
    p = io.parse_problem(beta_file)
    assert p.n == 1 and p.v == (3,) and p.u == (1,)
    assert p.qs[0].terms == {(0,): 1, (1,): 1}
    assert p.options == {}


def test_repeated_exponents_are_summed():
    data = {"n": 1, "polys": [{"weight": "2", "terms": [{"exp": [1], "coef": "1/2"}, {"exp": [1], "coef": "1/3"}, {"exp": [0], "coef": 1}]}], "u": ["1"]}
    assert io.parse_problem(data).qs[0].terms[(1,)] == F(5, 6)


@pytest.mark.parametrize(
    "data",
    [
        [],
        {"polys": [], "u": []},
        {**beta_file, "n": 0},
        {**beta_file, "n": True},
        {**beta_file, "u": ["1", "2"]},
        {**beta_file, "polys": []},
        {**beta_file, "polys": [{"terms": beta_file["polys"][0]["terms"]}]},
        {**beta_file, "polys": [{"weight": "3", "terms": [{"exp": [0, 1], "coef": "1"}]}]},
        {**beta_file, "polys": [{"weight": "3", "terms": [{"exp": [0.5], "coef": "1"}]}]},
        {**beta_file, "polys": [{"weight": "3", "terms": [{"coef": "1"}]}]},
        {**beta_file, "polys": [{"weight": "x", "terms": beta_file["polys"][0]["terms"]}]},
        {**beta_file, "options": []},
    ],
)
def test_malformed_problems(data):
    with pytest.raises(ParseError):
        io.parse_problem(data)


def test_parse_errors_are_input_errors():
    assert issubclass(ParseError, InputError)


def test_invalid_json_text():
    with pytest.raises(ParseError):
        io.load_json("{not json")


@pytest.mark.parametrize("value, expected", [(2, 2), (0.5, 0.5), ("3/4", 0.75), ([1, -2], 1 - 2j)])
def test_parse_complex(value, expected):
    assert io.parse_complex(value) == expected


def test_parse_complex_rejects_junk():
    with pytest.raises(ParseError):
        io.parse_complex({"re": 1})


def test_dumps_formatting():
    text = io.dumps({"a": F(3, 2), "b": 0.1, "c": 2.0, "d": [1, 2], "e": None, "f": True}, indent=None)
    assert text == '{"a": "3/2", "b": 0.10000000000000001, "c": 2.0, "d": [1, 2], "e": null, "f": true}'
    assert io.dumps(1 + 2j, indent=None) == "[1.0, 2.0]"
    assert io.dumps(float("inf"), indent=None) == '"inf"'


def test_dumps_is_valid_json():
    obj = {"x": [{"y": F(-7, 3)}, [0.25, 1e-300]], "z": {}}
    assert json.loads(io.dumps(obj)) == {"x": [{"y": "-7/3"}, [0.25, 1e-300]], "z": {}}


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_floats_round_trip(x):
    assert json.loads(io.dumps([x])) == [x]


@given(st.fractions())
def test_fractions_round_trip(x):
    assert io._rational(json.loads(io.dumps(x)), "x") == x


def test_problem_round_trip():
    p = io.parse_problem(beta_file)
    assert io.parse_problem(json.loads(io.dumps(p.to_json()))) == p
