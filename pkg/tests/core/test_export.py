"""
Tests for curved_duality.core.export.
"""
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from curved_duality.core.dynamics import Trajectory
from curved_duality.core.errors import CurvedDualityError
from curved_duality.core.export import (
    SCHEMA_VERSION,
    read_trajectory_csv,
    to_jsonable,
    trajectory_table,
    write_csv,
    write_json,
)
from curved_duality.core.geometry import CurvatureSign


@dataclass
class _Sample:
    name: str
    value: complex


def _trajectory() -> Trajectory:
    return Trajectory(
        np.array([0.0, 0.5]),
        np.array([[0.3, 0.1, 0.4, 0.8], [0.2, -0.1, 1.0, 0.0]]),
        {
            "H": np.array([1.0 + 0j, 1.0 + 0j]),
            "Jc": np.array([0.5 + 0.2j, 0.5 - 0.2j]),
        },
    )


def test_to_jsonable() -> None:
    assert to_jsonable(1 - 2j) == {"re": 1.0, "im": -2.0}
    assert to_jsonable(float("nan")) is None
    assert to_jsonable(Fraction(5, 2)) == "5/2"
    assert to_jsonable(CurvatureSign.PSEUDOSPHERE) == -1
    assert to_jsonable(np.array([1, 2])) == [1, 2]
    assert to_jsonable(np.bool_(True)) is True
    assert to_jsonable(_Sample("x", 1j)) == {
        "name": "x",
        "value": {"re": 0.0, "im": 1.0},
    }


def test_write_json(tmp_path: Path) -> None:
    out = tmp_path / "result.json"
    write_json("spectrum", {"levels": [0.5, np.inf]}, out)
    document = json.loads(out.read_text(encoding="utf-8"))
    assert document == {
        "command": "spectrum",
        "curved_duality_schema": SCHEMA_VERSION,
        "levels": [0.5, None],
    }


def test_write_csv(tmp_path: Path) -> None:
    out = tmp_path / "table.csv"
    write_csv(["N", "E"], [[0, 0.1], [1, np.float64(0.25)]], out)
    assert out.read_text(encoding="utf-8") == "N,E\n0,0.1\n1,0.25\n"


def test_trajectory_table() -> None:
    header, rows = trajectory_table(_trajectory())
    assert header == ["t", "re_z", "im_z", "re_pi", "im_pi", "H", "re_Jc", "im_Jc"]
    assert rows[0] == pytest.approx([0.0, 0.3, 0.1, 0.2, -0.4, 1.0, 0.5, 0.2])
    assert trajectory_table(Trajectory(np.zeros(0), np.zeros((0, 4))))[1] == []


def test_reading_a_written_trajectory(tmp_path: Path) -> None:
    out = tmp_path / "trajectory.csv"
    write_csv(*trajectory_table(_trajectory()), out)
    traj = read_trajectory_csv(out)
    assert traj.logs == {}
    assert np.allclose(traj.times, [0.0, 0.5])
    assert np.allclose(traj.states, _trajectory().states)


def test_reading_rejects_other_tables(tmp_path: Path) -> None:
    out = tmp_path / "table.csv"
    out.write_text("N,E\n0,0.1\n", encoding="utf-8")
    with pytest.raises(CurvedDualityError):
        read_trajectory_csv(out)
