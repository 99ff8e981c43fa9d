"""
Tests for the command processor.
"""
import json
from pathlib import Path
from typing import Any, Dict, List
from unittest.mock import patch

import pytest
from click.testing import CliRunner

from curved_duality.core.spectra import oscillator_level
from curved_duality.curved_duality import cli


def _run(tmp_path: Path, args: List[str], code: int = 0) -> Dict[str, Any]:
    out = tmp_path / "result.json"
    result = CliRunner().invoke(cli, args + ["--out", str(out)])
    assert result.exit_code == code, result.output
    return json.loads(out.read_text(encoding="utf-8"))


def test_pseudosphere_spectrum(tmp_path: Path) -> None:
    document = _run(
        tmp_path, ["spectrum", "--epsilon", "-1", "--alpha", "1", "--radius", "1"]
    )
    assert document["command"] == "spectrum"
    assert document["N_max"] == 1
    assert document["normalizable_N_max"] == 0
    levels = document["levels"]
    energies = [level["E"] for level in levels]
    assert energies == pytest.approx([0.618034, 0.236068], abs=1e-6)
    assert [level["normalizable"] for level in levels] == [True, False]
    assert [level["within_coulomb_cutoff"] for level in levels] == [True, False]
    assert document["excluded_from_coulomb"] == [1]
    assert [level["sigma"] for level in levels] == ["0", "1/2"]
    assert all(level["duality_residual"] < 1e-10 for level in levels)


def test_coulomb_spectrum(tmp_path: Path) -> None:
    document = _run(
        tmp_path, ["spectrum", "--system", "coulomb", "--gamma", "10", "--r0", "1"]
    )
    assert [level["n_sigma"] for level in document["levels"]] == ["0", "1", "2"]
    assert [level["multiplicity"] for level in document["levels"]] == [1, 2, 3]


def test_empty_coulomb_spectrum(tmp_path: Path) -> None:
    document = _run(
        tmp_path, ["spectrum", "--system", "coulomb", "--gamma", "0.01"]
    )
    assert document["levels"] == []
    assert document["notes"]


def test_level_beyond_cutoff(tmp_path: Path) -> None:
    result = CliRunner().invoke(
        cli,
        ["spectrum", "--epsilon", "-1", "--n", "3", "--out", str(tmp_path / "x.json")],
    )
    assert result.exit_code == 2
    assert not (tmp_path / "x.json").exists()


@pytest.mark.parametrize(
    "args",
    (
        ["spectrum", "--radius", "0"],
        ["spectrum", "--epsilon", "0"],
        ["spectrum", "--n", "1", "--nsigma", "1/2"],
        ["validate", "--grid", "32"],
    ),
)
def test_bad_options(args: List[str]) -> None:
    assert CliRunner().invoke(cli, args).exit_code == 2


def test_simulate(tmp_path: Path) -> None:
    document = _run(
        tmp_path, ["simulate", "--dt", "0.01", "--t-end", "0.1", "--epsilon", "1"]
    )
    assert document["summary"]["status"] == "ok"
    assert document["summary"]["samples"] == 11
    assert document["summary"]["final_time"] == pytest.approx(0.1)


def test_simulate_csv(tmp_path: Path) -> None:
    out = tmp_path / "trajectory.csv"
    result = CliRunner().invoke(
        cli,
        ["simulate", "--dt", "0.01", "--t-end", "0.05", "--format", "csv"]
        + ["-o", str(out)],
    )
    assert result.exit_code == 0, result.output
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("t,re_z,im_z,re_pi,im_pi")
    assert len(lines) == 7


def test_simulate_starting_outside_domain(tmp_path: Path) -> None:
    result = CliRunner().invoke(
        cli,
        ["simulate", "--epsilon", "-1", "--z0", "1.5"]
        + ["--out", str(tmp_path / "x.json")],
    )
    assert result.exit_code == 2


def test_brackets_are_deterministic(tmp_path: Path) -> None:
    first = _run(tmp_path, ["brackets", "--points", "20", "--seed", "3"])
    second = _run(tmp_path, ["brackets", "--points", "20", "--seed", "3"])
    assert first == second
    assert set(first["sectors"]) == {"+1", "-1"}
    assert "magnetic" in first["sectors"]["-1"]


def test_config_defaults_and_precedence(tmp_path: Path) -> None:
    config = tmp_path / "run.conf"
    config.write_text("epsilon = 1\nalpha = 2\n", encoding="utf-8")
    from_file = _run(tmp_path, ["--config", str(config), "spectrum", "--n", "0"])
    assert from_file["eps"] == 1
    assert from_file["levels"][0]["E"] == pytest.approx(
        oscillator_level(2.0, 1.0, 1, 0)
    )
    overridden = _run(
        tmp_path, ["--config", str(config), "spectrum", "--n", "0", "--alpha", "1"]
    )
    assert overridden["levels"][0]["E"] == pytest.approx(
        oscillator_level(1.0, 1.0, 1, 0)
    )


MAP_ARGS = ["map", "--epsilon", "1", "--dt", "0.01", "--t-end", "0.05"]


def test_map_bohlin(tmp_path: Path) -> None:
    document = _run(tmp_path, list(MAP_ARGS))
    assert document["variant"] == "bohlin"
    assert len(document["samples"]["rows"]) == 6
    assert document["max_residual"]["surface"] < 1e-7
    assert document["max_residual"]["A"] < 1e-9


@pytest.mark.parametrize("residuals", ((0.0, 1e-3), (1e-3, 0.0)))
def test_map_fails_on_invariant_residual(tmp_path: Path, residuals: tuple) -> None:
    """
    Test that a J or 𝐀 residual over tolerance fails the command even when
    the surface residual passes.
    """
    with patch("curved_duality.core.body.conserved_map_check") as check:
        check.return_value = residuals
        document = _run(tmp_path, list(MAP_ARGS), code=1)
    assert document["max_residual"]["surface"] < 1e-7
    assert max(document["max_residual"]["J"], document["max_residual"]["A"]) == 1e-3
