"""
Perform interface operations.

Messages go to stderr; stdout carries the machine-readable results.
"""
from typing import Dict, Iterable, Mapping

import click


def start_command(name: str, parameters: Mapping[str, object]) -> None:
    """
    Inform the user that a command has started, with its parameters.

    :param name: The command name.
    :param parameters: The parameters worth reporting.
    """
    shown = ", ".join(
        f"{key}={value}" for key, value in parameters.items() if value is not None
    )
    click.echo(
        click.style(f"curved-duality {name} started ({shown}).", fg="green"),
        err=True,
    )


def report_stage(message: str) -> None:
    """
    Inform the user about the current stage.
    """
    click.echo(click.style(message, fg="blue"), err=True)


def report_skipped(count: int, reason: str) -> None:
    """
    Inform the user about skipped samples.

    Does nothing if nothing was skipped.
    """
    if not count:
        return
    click.echo(click.style(f"Skipped {count} samples: {reason}.", fg="red"), err=True)


def report_residuals(residuals: Dict[str, float], tolerance: float) -> None:
    """
    Show a residual table, failing entries in red.

    :param residuals: Residual by relation name.
    :param tolerance: The acceptance threshold.
    """
    for name, value in residuals.items():
        colour = "blue" if value < tolerance else "red"
        click.echo(click.style(f"  {name:<28} {value:.3e}", fg=colour), err=True)


def report_notes(notes: Iterable[str]) -> None:
    """
    Inform the user about remarks on the results.

    :param notes: The remarks, one message each.
    """
    for note in notes:
        click.echo(click.style(f"Note: {note}", fg="blue"), err=True)


def report_failure(message: str) -> None:
    """
    Inform the user about a failure.
    """
    click.echo(click.style(message, fg="red"), err=True)


def report_success(message: str) -> None:
    """
    Inform the user that a command succeeded.

    :param message: The message.
    """
    click.echo(click.style(message, fg="green"), err=True)
