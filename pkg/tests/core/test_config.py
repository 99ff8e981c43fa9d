"""
Tests for curved_duality.core.config.
"""
from pathlib import Path

from click import BadParameter
import pytest

from curved_duality.core.config import read_config


def test_read_config(tmp_path: Path) -> None:
    path = tmp_path / "run.conf"
    path.write_text(
        "# pseudosphere run\n\nepsilon = -1\nt-end=2.5\n  drift_budget = 1e-6  \n",
        encoding="utf-8",
    )
    assert read_config(path) == {
        "epsilon": "-1",
        "t_end": "2.5",
        "drift_budget": "1e-6",
    }


@pytest.mark.parametrize("line", ("epsilon", "= 3"))
def test_bad_line(tmp_path: Path, line: str) -> None:
    path = tmp_path / "run.conf"
    path.write_text(f"alpha = 1\n{line}\n", encoding="utf-8")
    with pytest.raises(BadParameter, match=r":2: expected 'key = value'"):
        read_config(path)
