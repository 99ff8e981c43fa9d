"""
Exceptions raised by curved_duality.
"""
from typing import Any, Optional


class CurvedDualityError(ValueError):
    """
    Base class for all the errors raised by the toolkit.
    """


class DomainError(CurvedDualityError):
    """
    A point lies outside the operative domain of a chart or a system.
    """


class PoleError(DomainError):
    """
    A point hits a pole of the stereographic chart.
    """


class BoundaryError(DomainError):
    """
    A point is too close to the boundary of the Poincaré disk or to the
    equator of the sphere.
    """


class SingularityError(DomainError):
    """
    A point hits the Coulomb centre (or the origin of the Bohlin map).
    """


class InvalidAmbientPointError(DomainError):
    """
    An ambient point violates the (pseudo)sphere constraint.
    """


class NoBoundStateError(CurvedDualityError):
    """
    The requested level lies beyond the bound part of the spectrum.
    """


class OutsideCoulombSpectrumError(CurvedDualityError):
    """
    An oscillator level maps beyond the bound Coulomb spectrum.
    """


class GridConditionError(CurvedDualityError):
    """
    A radial grid is unusable (too few points, cutoff at a pole).
    """


class UnknownLogError(CurvedDualityError, KeyError):
    """
    A trajectory has no log with the requested name.
    """


class DriftBudgetExceeded(CurvedDualityError):
    """
    A conserved quantity drifted more than the configured budget.

    :param name: The name of the drifting quantity.
    :param drift: The drift observed.
    :param trajectory: The trajectory integrated so far.
    """

    def __init__(self, name: str, drift: float, trajectory: Any) -> None:
        super().__init__(
            f"Drift of '{name}' reached {drift:.3e}, over the budget."
        )
        self.name = name
        self.drift = drift
        self.trajectory = trajectory


class DomainExit(DomainError):
    """
    A trajectory approached a margin of the operative domain.

    :param time: The time of the last accepted sample.
    :param trajectory: The partial trajectory up to that time.
    """

    def __init__(
        self, time: float, trajectory: Any, reason: Optional[str] = None
    ) -> None:
        super().__init__(
            f"Trajectory left the operative domain after t={time:.6g}"
            + (f" ({reason})." if reason else ".")
        )
        self.time = time
        self.trajectory = trajectory
