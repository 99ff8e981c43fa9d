"""
Flat key = value configuration files.
"""
from pathlib import Path
from typing import Dict, Optional

import click


def read_config(path: Path) -> Dict[str, str]:
    """
    Return the settings of a configuration file.

    Blank lines and lines starting with '#' are ignored; keys are option
    parameter names, dashes and underscores alike.

    :param path: The file.
    :returns: Values by parameter name, as strings.
    :raise click.BadParameter: If a line is not a key = value pair.
    """
    settings: Dict[str, str] = {}
    for number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep or not key.strip():
            raise click.BadParameter(
                f"{path}:{number}: expected 'key = value', got '{stripped}'."
            )
        settings[key.strip().replace("-", "_")] = value.strip()
    return settings


def load_config(
    ctx: click.Context,
    _param: click.Parameter,  # pyright: ignore
    value: Optional[str],
) -> None:
    """
    Install the configuration file as the default map of every subcommand.

    Command-line flags still take precedence over the file.
    """
    if value is None:
        return
    settings = read_config(Path(value))
    group = ctx.command
    names = getattr(group, "commands", {}).keys()
    ctx.default_map = {name: dict(settings) for name in names}
