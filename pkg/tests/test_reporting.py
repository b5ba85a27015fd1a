import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypwave.reporting import (CSV_VERSION, MANIFEST, RunRecorder, config_digest, output_dir, read_csv,
                               write_csv)


def test_csv_roundtrip(tmp_path):
    path = write_csv(tmp_path / "a.csv", ["x", "ok", "name"], [(0.1, True, "p"), (np.float64(2), False, "q")],
                     {"space": "h3"})
    lines = path.read_text().splitlines()
    assert lines[0] == CSV_VERSION
    meta, cols, rows = read_csv(path)
    assert meta == {"space": "h3"} and cols == ["x", "ok", "name"]
    assert rows == [["0.1", "true", "p"], ["2", "false", "q"]]


@settings(max_examples=100)
@given(st.floats(allow_nan=False, allow_infinity=False))
def test_twelve_digit_floats_parse_back(x):
    from hypwave.reporting import _fmt
    assert float(_fmt(x)) == pytest.approx(x, rel=1e-11, abs=0)


@settings(max_examples=50)
@given(st.dictionaries(st.text(min_size=1, max_size=5), st.integers() | st.floats(allow_nan=False)))
def test_digest_is_stable_under_reserialization(cfg):
    again = json.loads(json.dumps(cfg))
    assert config_digest(cfg) == config_digest(again)


def test_output_dir_precedence(tmp_path, monkeypatch):
    monkeypatch.setenv("HYPWAVE_OUT", str(tmp_path / "env"))
    assert output_dir(None) == tmp_path / "env"
    assert output_dir(str(tmp_path / "flag")) == tmp_path / "flag"
    assert (tmp_path / "flag").is_dir()


def test_recorder_writes_single_manifest(tmp_path):
    rec = RunRecorder(tmp_path, "demo", {"seed": 0})
    rec.csv("x.csv", ["a"], [(1,)])
    rec.check("good", True)
    rec.check("bad", False)
    manifest = rec.finish()
    assert not manifest["passed"] and manifest["outputs"] == ["x.csv"]
    assert json.loads((tmp_path / MANIFEST).read_text())["config_digest"] == config_digest({"seed": 0})
    assert sorted(p.name for p in tmp_path.iterdir()) == [MANIFEST, "x.csv"]
