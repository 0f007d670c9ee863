import json
import math
import os

import pytest

from qtrep import _jsonio
from qtrep.errors import InputError


class TestFormatFloat:
    def test_round_trips_exactly(self):
        for value in (1 / 3, 0.1, 2.0 / 3.0, 1e-300, 123456.789):
            assert float(_jsonio.format_float(value)) == value

    def test_integral_floats_stay_short(self):
        assert _jsonio.format_float(21.0) == "21"

    def test_non_finite_rejected(self):
        with pytest.raises(InputError):
            _jsonio.format_float(math.inf)
        with pytest.raises(InputError):
            _jsonio.format_float(math.nan)


class TestDumps:
    def test_parses_back(self):
        doc = {"a": 1 / 3, "b": [1, 2, {"c": True, "d": None}], "e": "text"}
        text = _jsonio.dumps(doc)
        assert json.loads(text) == {
            "a": 1 / 3,
            "b": [1, 2, {"c": True, "d": None}],
            "e": "text",
        }

    def test_trailing_newline(self):
        assert _jsonio.dumps({}).endswith("\n")

    def test_bools_are_not_numbers(self):
        assert '"x": true' in _jsonio.dumps({"x": True})

    def test_deterministic(self):
        doc = {"values": [math.pi, math.e, 1e-17]}
        assert _jsonio.dumps(doc) == _jsonio.dumps(doc)


class TestCsvText:
    def test_layout(self):
        text = _jsonio.csv_text(["x", "flag"], [(0.5, True), (1.5, False)])
        lines = text.splitlines()
        assert lines[0] == "x,flag"
        assert lines[1] == "0.5,true"
        assert lines[2] == "1.5,false"

    def test_nan_allowed_in_csv(self):
        text = _jsonio.csv_text(["x"], [(float("nan"),)])
        assert text.splitlines()[1] == "nan"


class TestAtomicWrite:
    def test_writes_and_replaces(self, tmp_path):
        target = tmp_path / "f.txt"
        _jsonio.atomic_write_text(str(target), "one\n")
        _jsonio.atomic_write_text(str(target), "two\n")
        assert target.read_text() == "two\n"

    def test_no_temp_files_left(self, tmp_path):
        target = tmp_path / "g.txt"
        _jsonio.atomic_write_text(str(target), "data\n")
        assert os.listdir(tmp_path) == ["g.txt"]
