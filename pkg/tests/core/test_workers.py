"""
Tests for curved_duality.core.workers.
"""
from typing import Optional
from unittest.mock import NonCallableMock, patch

from click import BadParameter
import pytest

import curved_duality.core.workers


def _square(value: int) -> int:
    return value * value


@pytest.mark.parametrize(
    "given,expected",
    ((None, None), ("3", 3), ("50%", 4), ("12.5 %", 1), ("1%", 1), ("100%", 8)),
)
def test_parsing_jobs(given: Optional[str], expected: Optional[int]) -> None:
    """
    Test that a percentage is taken of the physical CPUs.
    """
    with patch("curved_duality.core.workers.psutil.cpu_count") as cpu_count:
        cpu_count.return_value = 8
        assert expected == curved_duality.core.workers.parse_jobs(
            NonCallableMock(), NonCallableMock(), given
        )


@pytest.mark.parametrize("given", ("0", "-2", "many", "blah %", "0%", "142%"))
def test_invalid_jobs(given: str) -> None:
    with patch("curved_duality.core.workers.psutil.cpu_count") as cpu_count:
        cpu_count.return_value = 8
        with pytest.raises(BadParameter):
            curved_duality.core.workers.parse_jobs(
                NonCallableMock(), NonCallableMock(), given
            )


def test_available_cpus_falls_back_to_logical() -> None:
    with patch("curved_duality.core.workers.psutil.cpu_count") as cpu_count:
        cpu_count.side_effect = lambda logical=True: 6 if logical else None
        assert curved_duality.core.workers.available_cpus() == 6


@pytest.mark.parametrize("jobs", (None, 1, 2))
def test_ordered_map_keeps_order(jobs: Optional[int]) -> None:
    assert curved_duality.core.workers.ordered_map(_square, range(6), jobs) == [
        0,
        1,
        4,
        9,
        16,
        25,
    ]
