"""
Parsing of numeric options.
"""
from typing import Optional

import click

from curved_duality.core.geometry import CurvatureSign
from curved_duality.core.schrodinger import MIN_POINTS


def parse_grid(
    _ctx: click.Context,  # pyright: ignore
    _param: click.Parameter,  # pyright: ignore
    value: Optional[str],
) -> Optional[int]:
    """
    Return the value of the grid option given as a string.

    Takes into account the 'k' suffix (4k = 4096). The number before the
    suffix can be a decimal fraction.

    :param _ctx: Click Context. Unused.
    :param _param: Click Parameter. Unused.
    :param value: Option value as a string.
    :returns: The number of grid points.
    :raise click.BadParameter: Exception raised if the option value
                               cannot be parsed or is below the smallest
                               usable grid, to signal click that the
                               option value is not valid.
    """
    if value is None:
        return None
    if value == "":
        raise click.BadParameter(f"Cannot parse grid size '{value}'.")
    multiplier = {"k": 1024, "K": 1024}.get(value[-1], 1)
    val = value.removesuffix("k").removesuffix("K").rstrip()
    try:
        parsed = int(float(val) * multiplier)
    except ValueError:
        raise click.BadParameter(  # pylint: disable=raise-missing-from
            f"Cannot parse grid size '{value}'."
        )
    if parsed < MIN_POINTS:
        raise click.BadParameter(
            f"Got value '{value}'. It must be at least {MIN_POINTS}."
        )
    return parsed


def parse_complex(
    _ctx: click.Context,  # pyright: ignore
    _param: click.Parameter,  # pyright: ignore
    value: Optional[str],
) -> Optional[complex]:
    """
    Return a complex number written as in Python, e.g. '0.3+0.1j'.

    :raise click.BadParameter: If the value is not a complex number.
    """
    if value is None:
        return None
    try:
        return complex(value.replace(" ", ""))
    except ValueError:
        raise click.BadParameter(  # pylint: disable=raise-missing-from
            f"Cannot parse complex number '{value}'."
        )


def parse_epsilon(
    _ctx: click.Context,  # pyright: ignore
    _param: click.Parameter,  # pyright: ignore
    value: Optional[str],
) -> Optional[CurvatureSign]:
    """
    Return the curvature sign given as +1, -1, sphere or pseudosphere.

    :raise click.BadParameter: If the value names no curvature sign.
    """
    if value is None:
        return None
    try:
        return CurvatureSign.parse(value)
    except ValueError as err:
        raise click.BadParameter(str(err)) from err


def parse_sigma(
    _ctx: click.Context,  # pyright: ignore
    _param: click.Parameter,  # pyright: ignore
    value: Optional[str],
) -> Optional[float]:
    """
    Return the vortex charge given as 0, half or 1/2.

    :raise click.BadParameter: For any other value.
    """
    if value is None:
        return None
    lowered = value.strip().lower()
    if lowered in ("0", "0.0", "zero"):
        return 0.0
    if lowered in ("half", "1/2", "0.5"):
        return 0.5
    raise click.BadParameter(f"sigma must be 0 or half, got '{value}'.")


def parse_half_integer(
    _ctx: click.Context,  # pyright: ignore
    _param: click.Parameter,  # pyright: ignore
    value: Optional[str],
) -> Optional[float]:
    """
    Return a non-negative integer or half-integer, e.g. '3/2' or '1.5'.

    :raise click.BadParameter: If the value is not on the half-integer grid.
    """
    if value is None:
        return None
    text = value.strip()
    try:
        if "/" in text:
            numerator, denominator = text.split("/")
            parsed = int(numerator) / int(denominator)
        else:
            parsed = float(text)
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(  # pylint: disable=raise-missing-from
            f"Cannot parse '{value}'."
        )
    if parsed < 0 or (2 * parsed) != int(2 * parsed):
        raise click.BadParameter(
            f"Got value '{value}'. It must be a non-negative half-integer."
        )
    return parsed
