import json
from fractions import Fraction
from pathlib import Path

import pytest

import mclp

EXAMPLE = Path(__file__).resolve().parents[2] / "examples_data" / "example.json"


def test_example_solution():
    r = mclp.solve(EXAMPLE)
    assert r["status"] == "optimal"
    assert r["iterations"] == 4
    assert r["restarts"] == 0
    assert r["breakpoints"] == [0, 1, 2]
    assert r["x"][-1] == [Fraction(41, 6), 0]
    assert r["u0"] == [0, Fraction(5, 2)]
    assert r["pN"] == [0, Fraction(5, 3)]
    assert r["u"] == [[0, Fraction(1, 4)], [Fraction(1, 3), 0]]
    assert r["objective"] == r["dual_objective"] == Fraction(349, 12)
    assert r["sequences"][-1] == "({1},{1}) [({1},{1}) ({1},{2}) ({1,2},{1,2})] ({1},{1,2})"


def test_dict_and_text_inputs_agree():
    doc = json.loads(EXAMPLE.read_text())
    assert mclp.solve(doc)["objective"] == mclp.solve(EXAMPLE.read_text())["objective"]


def test_oracle_is_bounded_by_the_solution():
    opt = mclp.solve(EXAMPLE)["objective"]
    prev = None
    for n in (4, 8, 16):
        o = mclp.oracle(EXAMPLE, n)
        assert o["status"] == "optimal"
        assert o["objective"] <= opt
        if prev is not None:
            assert prev <= o["objective"]
        prev = o["objective"]


def test_check_and_errors():
    assert mclp.check(EXAMPLE) == "both feasible"
    doc = json.loads(EXAMPLE.read_text())
    doc["T"] = "1/0"
    with pytest.raises(mclp.ParseError):
        mclp.solve(doc)
    doc = json.loads(EXAMPLE.read_text())
    doc["lambda"] = [1, 0]
    with pytest.raises(mclp.SignError):
        mclp.check(doc)
