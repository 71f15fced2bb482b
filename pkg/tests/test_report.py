import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from holobundle.report import Check, Report, dumps_stable, emit_report, to_csv


def sample_report():
    r = Report("demo", 7, details={"z": np.float64(1.5), "a": [1, 2.0, 3j]}, config={"seed": 7})
    r.add("beta", 1e-12, 1e-8)
    r.add("alpha", 0.5, 1e-8)
    return r


GOLDEN = """{
  "checks": [
    {
      "name": "beta",
      "passed": true,
      "residual": 1.000000000000e-12,
      "tol": 1.000000000000e-08
    },
    {
      "name": "alpha",
      "passed": false,
      "residual": 5.000000000000e-01,
      "tol": 1.000000000000e-08
    }
  ],
  "config": {
    "seed": 7
  },
  "details": {
    "a": [
      1,
      2.000000000000e+00,
      [0.000000000000e+00, 3.000000000000e+00]
    ],
    "z": 1.500000000000e+00
  },
  "error": null,
  "passed": false,
  "scenario": "demo",
  "seed": 7,
  "version": "0.1.0"
}
"""


def test_json_golden():
    assert emit_report(sample_report(), "json") == GOLDEN


def test_csv_one_row_per_check():
    lines = to_csv(sample_report()).splitlines()
    assert lines[0] == "scenario,seed,check,residual,tol,passed"
    assert lines[1:] == [
        "demo,7,beta,1.000000000000e-12,1.000000000000e-08,1",
        "demo,7,alpha,5.000000000000e-01,1.000000000000e-08,0",
    ]


def test_byte_stable_and_file_output(tmp_path):
    path = tmp_path / "r.json"
    text = emit_report(sample_report(), "json", path)
    assert path.read_bytes() == text.encode()
    assert emit_report(sample_report(), "json") == text


def test_roundtrip_through_dict():
    r = sample_report()
    back = Report.from_dict(json.loads(emit_report(r)))
    assert emit_report(back) == emit_report(r)


def test_unknown_format():
    with pytest.raises(ValueError):
        emit_report(sample_report(), "xml")


def test_check_semantics():
    assert not Check("x", math.nan, 1.0).passed
    assert not Check("x", 1.0, 1.0).passed
    assert Check("x", 0.0, 1.0).passed
    assert not Report("empty", 0).passed


def test_nonfinite_floats_are_quoted():
    assert json.loads(dumps_stable({"a": math.inf, "b": math.nan})) == {"a": "Infinity", "b": "NaN"}


@given(st.recursive(
    st.floats(allow_nan=False, allow_infinity=False) | st.integers(-10**6, 10**6) | st.text(max_size=5) | st.booleans(),
    lambda inner: st.lists(inner, max_size=4) | st.dictionaries(st.text(max_size=4), inner, max_size=4),
    max_leaves=20,
))
def test_dumps_stable_parses_back(obj):
    text = dumps_stable(obj)
    assert dumps_stable(json.loads(text)) == text
