"""
Command processor.
"""
from pathlib import Path
from typing import Any, Callable, List, Optional

import click
from click_option_group import MutuallyExclusiveOptionGroup, OptionGroup

from curved_duality.core.body import (
    EXIT_DOMAIN,
    EXIT_OK,
    VALIDATION_TOLERANCE,
    CommandResult,
    run_brackets,
    run_map_bohlin,
    run_map_ks,
    run_map_magnetic,
    run_simulate,
    run_spectrum_coulomb,
    run_spectrum_oscillator,
    run_validate_coulomb,
    run_validate_oscillator,
)
from curved_duality.core.config import load_config
from curved_duality.core.dynamics import (
    IntegratorConfig,
    Method,
    Trajectory,
    circular_orbit,
    integrate,
)
from curved_duality.core.errors import CurvedDualityError, DomainExit
from curved_duality.core.export import (
    read_trajectory_csv,
    write_csv,
    write_json,
)
from curved_duality.core.geometry import CurvatureSign
from curved_duality.core.interface import (
    report_failure,
    report_stage,
    report_success,
    start_command,
)
from curved_duality.core.number import (
    parse_complex,
    parse_epsilon,
    parse_grid,
    parse_half_integer,
    parse_sigma,
)
from curved_duality.core.systems import CurvedModel, PhasePoint, SystemKind
from curved_duality.core.workers import parse_jobs

Decorator = Callable[[Callable[..., Any]], Callable[..., Any]]

POSITIVE = click.FloatRange(min=0.0, min_open=True)


def _apply(func: Callable[..., Any], decorators: List[Decorator]) -> Callable[..., Any]:
    for decorator in reversed(decorators):
        func = decorator(func)
    return func


def model_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """
    Options of the physical system.
    """
    model = OptionGroup("Model", help="Parameters of the physical system")
    return _apply(
        func,
        [
            model.option(
                "--system",
                type=click.Choice(["oscillator", "coulomb", "free"]),
                default="oscillator",
                show_default=True,
                help="The system; coulomb lives on the pseudosphere.",
            ),
            model.option(
                "--epsilon",
                "-e",
                default="-1",
                show_default=True,
                callback=parse_epsilon,
                help="Curvature sign: +1 (sphere) or -1 (pseudosphere).",
            ),
            model.option(
                "--alpha",
                type=click.FloatRange(min=0.0),
                default=1.0,
                show_default=True,
                help="Oscillator coupling.",
            ),
            model.option(
                "--radius",
                "-R",
                type=POSITIVE,
                default=1.0,
                show_default=True,
                help="Radius R0 of the (pseudo)sphere.",
            ),
            model.option(
                "--gamma",
                type=float,
                default=1.0,
                show_default=True,
                help="Coulomb coupling.",
            ),
            model.option(
                "--b0",
                type=float,
                default=0.0,
                show_default=True,
                help="Constant magnetic field.",
            ),
        ],
    )


def integrator_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """
    Options of the initial point and of the integrator.
    """
    start = OptionGroup("Initial point")
    integrator = OptionGroup("Integrator", help="Fixed-step Runge-Kutta")
    return _apply(
        func,
        [
            start.option(
                "--z0",
                default="0.3+0.1j",
                show_default=True,
                callback=parse_complex,
                help="Initial position.",
            ),
            start.option(
                "--pi0",
                default="0.2-0.4j",
                show_default=True,
                callback=parse_complex,
                help="Initial momentum.",
            ),
            start.option(
                "--circular",
                type=POSITIVE,
                help="Start on the circular orbit of this radius instead.",
            ),
            integrator.option(
                "--dt", type=POSITIVE, default=1e-3, show_default=True
            ),
            integrator.option(
                "--t-end", "t_end", type=POSITIVE, default=10.0, show_default=True
            ),
            integrator.option(
                "--method",
                type=click.Choice([m.value for m in Method]),
                default=Method.RK8.value,
                show_default=True,
            ),
            integrator.option(
                "--drift-budget",
                type=POSITIVE,
                help="Stop when an invariant drifts more than this.",
            ),
        ],
    )


def output_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """
    Options of the machine-readable output.
    """
    output = OptionGroup("Output")
    return _apply(
        func,
        [
            output.option(
                "--format",
                "fmt",
                type=click.Choice(["json", "csv"]),
                default="json",
                show_default=True,
            ),
            output.option(
                "--out",
                "-o",
                type=click.Path(dir_okay=False, writable=True, path_type=Path),
                help="Write here instead of stdout.",
            ),
        ],
    )


def level_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """
    Options of the spectral problems.
    """
    coulomb = OptionGroup("Coulomb", help="Coulomb system on the pseudosphere")
    levels = MutuallyExclusiveOptionGroup("Levels", help="Level selection")
    return _apply(
        func,
        [
            coulomb.option(
                "--r0", type=POSITIVE, default=1.0, show_default=True
            ),
            coulomb.option(
                "--sigma",
                default="0",
                show_default=True,
                callback=parse_sigma,
                help="Vortex charge: 0 or half.",
            ),
            levels.option(
                "--n",
                "N",
                type=click.IntRange(min=0),
                help="Oscillator level N.",
            ),
            levels.option(
                "--nsigma",
                callback=parse_half_integer,
                help="Coulomb level N_sigma, e.g. 3/2.",
            ),
        ],
    )


def _model(
    system: str,
    epsilon: CurvatureSign,
    alpha: float,
    radius: float,
    gamma: float,
    b0: float,
) -> CurvedModel:
    return CurvedModel(
        epsilon,
        radius,
        alpha=alpha if system == "oscillator" else 0.0,
        B0=b0,
        kind=SystemKind(system),
        gamma=gamma if system == "coulomb" else 0.0,
    )


def _start(
    model: CurvedModel, z0: complex, pi0: complex, circular: Optional[float]
) -> PhasePoint:
    if circular is not None:
        return circular_orbit(model, circular)
    return PhasePoint(z0, pi0)


def _config(
    dt: float, t_end: float, method: str, drift_budget: Optional[float]
) -> IntegratorConfig:
    return IntegratorConfig(dt, t_end, Method(method), drift_budget)


def _finish(
    ctx: click.Context,
    command: str,
    body: Callable[[], CommandResult],
    fmt: str,
    out: Optional[Path],
) -> None:
    """
    Run a command body, write its result and exit with its code.

    Errors of the toolkit are reported in red with exit code 2.
    """
    try:
        result = body()
    except CurvedDualityError as err:
        report_failure(str(err))
        ctx.exit(EXIT_DOMAIN)
        return
    if fmt == "csv":
        write_csv(result.header, result.rows, out)
    else:
        write_json(command, result.payload, out)
    if result.exit_code == EXIT_OK:
        report_success(f"curved-duality {command} finished.")
    else:
        report_failure(
            f"curved-duality {command} failed with exit code {result.exit_code}."
        )
    ctx.exit(result.exit_code)


@click.group()
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    is_eager=True,
    expose_value=False,
    callback=load_config,
    help="Read option defaults from a key = value file.",
)
def cli() -> None:
    """
    Classical and quantum duality between the oscillator and the Coulomb
    system on the sphere and the pseudosphere.
    """


@cli.command()
@model_options
@integrator_options
@output_options
@click.pass_context
def simulate(  # pylint: disable=too-many-arguments
    ctx: click.Context,
    system: str,
    epsilon: CurvatureSign,
    alpha: float,
    radius: float,
    gamma: float,
    b0: float,
    z0: complex,
    pi0: complex,
    circular: Optional[float],
    dt: float,
    t_end: float,
    method: str,
    drift_budget: Optional[float],
    fmt: str,
    out: Optional[Path],
) -> None:
    """
    Integrate a trajectory and log its conserved quantities.
    """
    start_command(
        "simulate",
        {"system": system, "eps": int(epsilon), "R0": radius, "dt": dt, "t_end": t_end},
    )

    def body() -> CommandResult:
        model = _model(system, epsilon, alpha, radius, gamma, b0)
        start = _start(model, z0, pi0, circular)
        return run_simulate(model, start, _config(dt, t_end, method, drift_budget))

    _finish(ctx, "simulate", body, fmt, out)


def _trajectory(
    model: CurvedModel, start: PhasePoint, cfg: IntegratorConfig
) -> Trajectory:
    try:
        return integrate(model, start, cfg)
    except DomainExit as err:
        report_failure(str(err))
        return err.trajectory


@cli.command(name="map")
@click.option(
    "--variant",
    type=click.Choice(["bohlin", "ks", "magnetic"]),
    default="bohlin",
    show_default=True,
    help="Bohlin map, Kustaanheimo-Stiefel reduction or magnetic image.",
)
@click.option(
    "--trajectory",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Map this trajectory CSV instead of integrating one.",
)
@click.option("--energy", type=float, help="Energy of the oscillator surface.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--points", type=click.IntRange(min=1), default=1000, show_default=True
)
@model_options
@integrator_options
@output_options
@click.pass_context
def map_command(  # pylint: disable=too-many-arguments,too-many-locals
    ctx: click.Context,
    variant: str,
    trajectory: Optional[Path],
    energy: Optional[float],
    seed: int,
    points: int,
    system: str,
    epsilon: CurvatureSign,
    alpha: float,
    radius: float,
    gamma: float,
    b0: float,
    z0: complex,
    pi0: complex,
    circular: Optional[float],
    dt: float,
    t_end: float,
    method: str,
    drift_budget: Optional[float],
    fmt: str,
    out: Optional[Path],
) -> None:
    """
    Map oscillator data to the Coulomb side and report the residuals.
    """
    start_command(
        "map",
        {"variant": variant, "eps": int(epsilon), "R0": radius, "seed": seed},
    )

    def body() -> CommandResult:
        model = _model(system, epsilon, alpha, radius, gamma, b0)
        if variant == "ks":
            return run_map_ks(model, seed, points)
        if variant == "magnetic":
            return run_map_magnetic(model, seed, points)
        if trajectory is not None:
            report_stage(f"Reading {trajectory}.")
            traj = read_trajectory_csv(trajectory)
        else:
            start = _start(model, z0, pi0, circular)
            traj = _trajectory(model, start, _config(dt, t_end, method, drift_budget))
        return run_map_bohlin(model, traj, energy)

    _finish(ctx, "map", body, fmt, out)


@cli.command()
@model_options
@level_options
@output_options
@click.pass_context
def spectrum(  # pylint: disable=too-many-arguments
    ctx: click.Context,
    system: str,
    epsilon: CurvatureSign,
    alpha: float,
    radius: float,
    gamma: float,
    b0: float,  # pylint: disable=unused-argument
    r0: float,
    sigma: float,
    N: Optional[int],
    nsigma: Optional[float],
    fmt: str,
    out: Optional[Path],
) -> None:
    """
    Tabulate the closed-form spectrum.
    """
    start_command("spectrum", {"system": system, "eps": int(epsilon), "N": N})

    def body() -> CommandResult:
        if system == "coulomb":
            return run_spectrum_coulomb(gamma, r0, sigma, nsigma)
        return run_spectrum_oscillator(alpha, radius, epsilon, N)

    _finish(ctx, "spectrum", body, fmt, out)


@cli.command()
@model_options
@level_options
@click.option(
    "--grid",
    "-g",
    default="4k",
    show_default=True,
    callback=parse_grid,
    help="Grid points; the suffix k means 1024.",
)
@click.option(
    "--jobs",
    "-j",
    callback=parse_jobs,
    help="Workers, as a number or a percentage of the CPUs.",
)
@click.option(
    "--tolerance",
    type=POSITIVE,
    default=VALIDATION_TOLERANCE,
    show_default=True,
)
@click.option(
    "--cross-check",
    is_flag=True,
    default=False,
    help="Also solve the Coulomb image of every oscillator level.",
)
@output_options
@click.pass_context
def validate(  # pylint: disable=too-many-arguments,too-many-locals
    ctx: click.Context,
    system: str,
    epsilon: CurvatureSign,
    alpha: float,
    radius: float,
    gamma: float,
    b0: float,  # pylint: disable=unused-argument
    r0: float,
    sigma: float,
    N: Optional[int],
    nsigma: Optional[float],
    grid: int,
    jobs: Optional[int],
    tolerance: float,
    cross_check: bool,
    fmt: str,
    out: Optional[Path],
) -> None:
    """
    Compare numeric eigenvalues with the closed-form spectrum.
    """
    start_command(
        "validate",
        {"system": system, "eps": int(epsilon), "grid": grid, "jobs": jobs},
    )

    def body() -> CommandResult:
        if system == "coulomb":
            return run_validate_coulomb(gamma, r0, sigma, nsigma, grid, jobs, tolerance)
        return run_validate_oscillator(
            alpha, radius, epsilon, N, grid, jobs, tolerance, cross_check
        )

    _finish(ctx, "validate", body, fmt, out)


@cli.command()
@click.option(
    "--epsilon",
    "-e",
    callback=parse_epsilon,
    help="Check one curvature sign only; both by default.",
)
@click.option("--radius", "-R", type=POSITIVE, default=1.3, show_default=True)
@click.option(
    "--alpha", type=click.FloatRange(min=0.0), default=0.7, show_default=True
)
@click.option(
    "--b0",
    type=float,
    default=0.5,
    show_default=True,
    help="Field of the magnetic calibration; 0 skips it.",
)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--points", type=click.IntRange(min=1), default=1000, show_default=True
)
@output_options
@click.pass_context
def brackets(  # pylint: disable=too-many-arguments
    ctx: click.Context,
    epsilon: Optional[CurvatureSign],
    radius: float,
    alpha: float,
    b0: float,
    seed: int,
    points: int,
    fmt: str,
    out: Optional[Path],
) -> None:
    """
    Check the Poisson-bracket algebras at seeded random points.
    """
    start_command("brackets", {"seed": seed, "points": points, "B0": b0})
    signs = list(CurvatureSign) if epsilon is None else [epsilon]

    def body() -> CommandResult:
        return run_brackets(signs, radius, alpha, b0, seed, points)

    _finish(ctx, "brackets", body, fmt, out)
