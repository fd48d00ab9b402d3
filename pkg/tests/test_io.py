import json

import numpy as np
import pytest

from wignersteer.gaussian import make_tmsv
from wignersteer.io import dump_json, load_field, save_field
from wignersteer.phase_space import ModeLayout, PhaseGrid, sample_field


@pytest.mark.parametrize("fmt", ["csv", "bin"])
def test_field_round_trip(tmp_path, fmt):
    g = PhaseGrid(5.0, 16, 4, (0.1, 0.0, -0.2, 0.3))
    f = sample_field(make_tmsv(0.4), g)
    files = save_field(f, tmp_path / "joint", fmt=fmt, layout=ModeLayout(1, 1))
    assert [p.name for p in files] == ["joint.json", f"joint.{fmt}"]
    back = load_field(tmp_path / "joint")
    assert back.grid == g and back.n_modes == 2
    assert np.array_equal(back.values, f.values)


def test_csv_layout(tmp_path):
    g = PhaseGrid(1.0, 16, 2)
    f = sample_field(lambda x: x[..., 0] + 10 * x[..., 1], g)
    save_field(f, tmp_path / "a")
    lines = (tmp_path / "a.csv").read_text().splitlines()
    assert lines[0] == "x0,x1,value" and len(lines) == 257
    # C order: last axis fastest
    first, second = (list(map(float, l.split(","))) for l in lines[1:3])
    assert first[0] == second[0] and second[1] > first[1]
    header = json.loads((tmp_path / "a.json").read_text())
    assert header == {"format": "csv", "dim": 2, "n": 16, "half_width": 1.0,
                      "center": [0.0, 0.0], "n_modes": 1, "layout": None}


def test_bad_format(tmp_path):
    f = sample_field(lambda x: x[..., 0], PhaseGrid(1.0, 16, 2))
    with pytest.raises(ValueError):
        save_field(f, tmp_path / "a", fmt="xml")


def test_dump_json_is_stable(tmp_path):
    obj = {"b": np.float64(1.5), "a": [np.int64(2), np.bool_(True)], "c": np.arange(3.0), "d": float("nan")}
    dump_json(obj, tmp_path / "x.json")
    dump_json(dict(reversed(list(obj.items()))), tmp_path / "y.json")
    assert (tmp_path / "x.json").read_bytes() == (tmp_path / "y.json").read_bytes()
    assert json.loads((tmp_path / "x.json").read_text()) == {"a": [2, True], "b": 1.5, "c": [0.0, 1.0, 2.0], "d": None}
