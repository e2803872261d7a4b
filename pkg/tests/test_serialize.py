import json
import math
from fractions import Fraction

from hyperlab import serialize
from hyperlab.suites import ScenarioConfig, run_scenario


def test_format_float_precision():
    assert serialize.format_float(1 / 3) == "0.333333333333"
    assert serialize.format_float(2.0) == "2"
    assert serialize.format_float(math.inf) == "inf"
    assert serialize.format_float(float("nan")) == "nan"


def test_format_scalar():
    assert serialize.format_scalar(Fraction(4)) == "4/1"
    assert serialize.format_scalar(Fraction(1, 3)) == "1/3"
    assert serialize.format_scalar(True) == "true"
    assert serialize.format_scalar(False) == "false"
    assert serialize.format_scalar(None) == ""
    assert serialize.format_scalar(7) == "7"


def test_dump_json_is_valid_json():
    text = serialize.dump_json({"a": Fraction(1, 3), "b": 0.1,
                                "c": [1, math.inf], "d": "x"})
    doc = json.loads(text)
    assert doc == {"a": "1/3", "b": 0.1, "c": [1, "inf"], "d": "x"}
    assert text.endswith("\n")


def test_dump_csv_round_trip():
    text = serialize.dump_csv(["x", "y"], [[Fraction(1, 2), 0.25]])
    assert text == "x,y\n1/2,0.25\n"


def test_emit_reports_excludes_timing():
    cfg = ScenarioConfig(suite="strong-hyp", group="free:2").validated()
    reports = run_scenario(cfg)
    payload = serialize.emit_reports(reports, "json")
    assert b"duration" not in payload
    doc = json.loads(payload)
    assert doc["schema_version"] == "1"
    assert doc["reports"][0]["counts"]["checks"] == len(
        doc["reports"][0]["checks"])


def test_emit_reports_csv_generic_columns():
    cfg = ScenarioConfig(suite="green", group="free:2").validated()
    reports = run_scenario(cfg)
    lines = serialize.emit_reports(reports, "csv").decode().splitlines()
    assert lines[0] == "suite,check,passed,details,witness"
    assert all(line.startswith("green,") for line in lines[1:])
