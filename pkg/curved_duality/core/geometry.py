"""
Stereographic charts of the sphere, the pseudosphere and the
three-dimensional pseudosphere.

The two-dimensional surfaces ε(x1² + x2²) + x3² = R0² are parametrized by
one complex coordinate z.  ε = +1 is the sphere, ε = -1 the pseudosphere
(the Poincaré disk |z| < 1 covers one sheet).
"""
from dataclasses import dataclass
from enum import IntEnum
from typing import Sequence, Union

import numpy as np

from curved_duality.core.errors import (
    BoundaryError,
    DomainError,
    InvalidAmbientPointError,
    PoleError,
)

# Second-order poles of the potentials and the metric sit on |z| = 1.
EQUATOR_MARGIN = 1e-8
BOUNDARY_MARGIN = 1e-10
METRIC_CAP = 1e14
AMBIENT_TOLERANCE = 1e-9


class CurvatureSign(IntEnum):
    """
    The sign of the curvature, ε.
    """

    SPHERE = 1
    PSEUDOSPHERE = -1

    @classmethod
    def parse(cls, value: Union[int, str, "CurvatureSign"]) -> "CurvatureSign":
        """
        Return the curvature sign given as an integer or a string.

        :param value: One of 1, -1, "+1", "-1", "sphere", "pseudosphere".
        :returns: The curvature sign.
        :raise ValueError: If the value names no curvature sign.
        """
        if isinstance(value, str):
            lowered = value.strip().lower()
            if lowered in ("sphere", "+1", "1", "+"):
                return cls.SPHERE
            if lowered in ("pseudosphere", "-1", "-"):
                return cls.PSEUDOSPHERE
            raise ValueError(f"Unknown curvature sign '{value}'.")
        return cls(int(value))


@dataclass(frozen=True)
class AmbientPoint:
    """
    A point of the embedding space R³ (or R^{2,1}).
    """

    x1: float
    x2: float
    x3: float

    @property
    def complex(self) -> complex:
        """
        The combination x1 + i x2.
        """
        return complex(self.x1, self.x2)


@dataclass(frozen=True)
class Ambient3Point:
    """
    A point of R^{3,1} on the three-dimensional pseudosphere.
    """

    x1: float
    x2: float
    x3: float
    x4: float


def _denominator(z: complex, eps: int) -> float:
    return 1.0 + eps * abs(z) ** 2


def check_operative(
    z: complex,
    eps: int,
    equator_margin: float = EQUATOR_MARGIN,
    boundary_margin: float = BOUNDARY_MARGIN,
) -> None:
    """
    Check that z lies in the operative domain of the chart.

    On the pseudosphere the domain is the open disk |z| < 1 shrunk by the
    boundary margin; on the sphere only a band around the equator |z| = 1
    is removed.

    :param z: Stereographic coordinate.
    :param eps: Curvature sign.
    :raise BoundaryError: If z is too close to |z| = 1 (or outside the
                          disk on the pseudosphere).
    """
    modulus = abs(z)
    if eps == CurvatureSign.PSEUDOSPHERE:
        if modulus >= 1.0 - boundary_margin:
            raise BoundaryError(
                f"|z|={modulus:.12g} is outside the Poincaré disk margin."
            )
    elif abs(modulus - 1.0) <= equator_margin:
        raise BoundaryError(f"|z|={modulus:.12g} is on the equator margin.")


def stereo_to_ambient(z: complex, R0: float, eps: int) -> AmbientPoint:
    """
    Return the ambient point with the stereographic coordinate z.

    :param z: Stereographic coordinate.
    :param R0: The radius.
    :param eps: Curvature sign.
    :returns: The point (x1, x2, x3) with
              x1 + i x2 = 2 R0 z / (1 + ε|z|²),
              x3 = R0 (1 - ε|z|²) / (1 + ε|z|²).
    :raise PoleError: If 1 + ε|z|² vanishes (|z| = 1 on the pseudosphere).
    """
    den = _denominator(z, eps)
    if abs(den) < BOUNDARY_MARGIN:
        raise PoleError(f"z={z} is a pole of the chart.")
    x = 2.0 * R0 * z / den
    x3 = R0 * (1.0 - eps * abs(z) ** 2) / den
    return AmbientPoint(float(x.real), float(x.imag), float(x3))


def ambient_to_stereo(x: AmbientPoint, R0: float, eps: int) -> complex:
    """
    Return the stereographic coordinate of an ambient point.

    :param x: The ambient point.
    :param R0: The radius.
    :param eps: Curvature sign.
    :returns: z = (x1 + i x2) / (R0 + x3).
    :raise InvalidAmbientPointError: If the point is off the surface.
    :raise PoleError: If x3 = -R0, the projection pole.
    """
    constraint = eps * (x.x1**2 + x.x2**2) + x.x3**2
    if abs(constraint - R0**2) > AMBIENT_TOLERANCE * max(1.0, R0**2):
        raise InvalidAmbientPointError(
            f"{x} violates the constraint by {constraint - R0 ** 2:.3e}."
        )
    den = R0 + x.x3
    if abs(den) < BOUNDARY_MARGIN * max(1.0, R0):
        raise PoleError(f"{x} is the projection pole.")
    return x.complex / den


def metric_factor(
    z: complex, R0: float, eps: int, cap: float = METRIC_CAP
) -> float:
    """
    Return the conformal factor λ of ds² = λ dz dz̄.

    :param z: Stereographic coordinate.
    :param R0: The radius.
    :param eps: Curvature sign.
    :param cap: The largest factor accepted.
    :returns: λ = 4 R0² / (1 + ε|z|²)².
    :raise BoundaryError: If the factor exceeds the cap.
    """
    den = _denominator(z, eps)
    if den == 0.0 or 4.0 * R0**2 / den**2 > cap:
        raise BoundaryError(f"Metric factor at z={z} exceeds the cap.")
    return 4.0 * R0**2 / den**2


def stereo3_to_ambient(u: Sequence[float], r0: float) -> Ambient3Point:
    """
    Return the point of the three-dimensional pseudosphere with the real
    stereographic coordinates u.

    :param u: Real 3-vector with |u| < 1.
    :param r0: The "radius" of the pseudosphere.
    :returns: x = 2 r0 u / (1 - u²), x4 = r0 (1 + u²) / (1 - u²).
    :raise DomainError: If |u| >= 1.
    """
    vec = np.asarray(u, dtype=float)
    u2 = float(vec @ vec)
    if u2 >= 1.0:
        raise DomainError(f"|u|={np.sqrt(u2):.12g} is outside the unit ball.")
    x = 2.0 * r0 * vec / (1.0 - u2)
    x4 = r0 * (1.0 + u2) / (1.0 - u2)
    return Ambient3Point(float(x[0]), float(x[1]), float(x[2]), float(x4))
