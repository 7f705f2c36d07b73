import math
from fractions import Fraction

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from ansatzlab.serialization import csv_text, dumps, format_float, loads, parse_fraction, to_plain


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_floats_roundtrip_exactly(x):
    # -0.0 is written as 0, which still compares equal
    assert float(format_float(x)) == x
    assert loads(dumps({"x": x}))["x"] == x


def test_special_values_and_negative_zero():
    assert format_float(-0.0) == "0"
    assert format_float(math.inf) == "Infinity"
    assert math.isnan(loads(dumps([math.nan]))[0])


def test_plain_conversion():
    data = {"f": Fraction(2, 6), "i": np.int64(3), "a": np.arange(3.0), "b": np.bool_(True), "whole": Fraction(4)}
    assert to_plain(data) == {"f": "1/3", "i": 3, "a": [0.0, 1.0, 2.0], "b": True, "whole": "4"}


def test_dumps_is_stable():
    obj = {"b": [1.0, 0.1], "a": {"nested": Fraction(1, 7)}}
    assert dumps(obj) == dumps(loads(dumps(obj)))
    assert dumps(obj).endswith("\n")


def test_csv_quoting_and_line_endings():
    text = csv_text(["name", "value", "ok"], [["a,b", 0.1, True], ['say "hi"', 2, False]])
    assert text == 'name,value,ok\n"a,b",0.10000000000000001,true\n"say ""hi""",2,false\n'
    assert "\r" not in text


def test_parse_fraction():
    assert parse_fraction("1/3") == Fraction(1, 3)
    assert parse_fraction("0.25") == Fraction(1, 4)
    assert parse_fraction(7) == 7
