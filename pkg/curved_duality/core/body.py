"""
The main body of curved-duality: one function per command.

Every function returns a CommandResult; the command processor writes it
out and exits with its code.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from curved_duality.core.duality import (
    bohlin_map,
    bohlin_params,
    canonicity_residual,
    conserved_map_check,
    coulomb_surface_residual,
    magnetic_image_field,
    magnetic_pullback_residual,
)
from curved_duality.core.dynamics import (
    IntegratorConfig,
    Trajectory,
    all_drifts,
    integrate,
)
from curved_duality.core.errors import (
    CurvedDualityError,
    DomainExit,
    DriftBudgetExceeded,
    GridConditionError,
    SingularityError,
)
from curved_duality.core.export import trajectory_table
from curved_duality.core.geometry import CurvatureSign
from curved_duality.core.interface import (
    report_notes,
    report_residuals,
    report_skipped,
    report_stage,
)
from curved_duality.core.ks import (
    Q,
    U,
    casimir_residual,
    hamiltonian_4d,
    ks_bracket_check,
    ks_energy_surface_residual,
)
from curved_duality.core.schrodinger import (
    ValidationReport,
    duality_cross_check,
    eigenvalues,
    flat_oscillator_operator,
    validate_coulomb,
    validate_oscillator,
)
from curved_duality.core.spectra import (
    coulomb_enumerate,
    coulomb_level,
    coulomb_nsigma_max,
    doubled,
    oscillator_bound_nmax,
    oscillator_level,
    oscillator_nmax,
    spectral_duality_check,
)
from curved_duality.core.systems import (
    CurvedModel,
    PhasePoint,
    SystemKind,
    algebra_residuals,
    bracket_self_test,
    calibrate_shift_coefficient,
    magnetic_energy_shift,
    magnetic_shift_residual,
    printed_magnetic_shift,
    random_phase_points,
)

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_DOMAIN = 2

SURFACE_TOLERANCE = 1e-7
CONSERVED_TOLERANCE = 1e-9
CANONICAL_TOLERANCE = 1e-9
CUBIC_TOLERANCE = 1e-8
KS_TOLERANCE = 1e-9
KS_SURFACE_TOLERANCE = 1e-8
MAGNETIC_TOLERANCE = 1e-9
CALIBRATION_TOLERANCE = 1e-8
VALIDATION_TOLERANCE = 1e-4
# Levels listed on the sphere when no N is given.
SPHERE_LEVELS = 5
SELF_TEST_LEVELS = 4
CUBIC_RELATION = "{Ibar,I}=cubic"


@dataclass
class CommandResult:
    """
    The machine-readable outcome of a command.

    :param payload: The JSON document.
    :param header: CSV header.
    :param rows: CSV rows.
    :param exit_code: 0 on success, 1 on a tolerance failure, 2 on a
                      domain error.
    """

    payload: Dict[str, Any]
    header: List[str] = field(default_factory=list)
    rows: List[List[Any]] = field(default_factory=list)
    exit_code: int = EXIT_OK


def model_block(model: CurvedModel) -> Dict[str, Any]:
    return {
        "system": model.kind.value,
        "eps": int(model.eps),
        "R0": model.R0,
        "alpha": model.alpha,
        "B0": model.B0,
        "gamma": model.gamma,
    }


def _integrator_block(cfg: IntegratorConfig) -> Dict[str, Any]:
    return {
        "dt": cfg.dt,
        "t_end": cfg.t_end,
        "method": cfg.method.value,
        "drift_budget": cfg.drift_budget,
    }


def run_simulate(
    model: CurvedModel, start: PhasePoint, cfg: IntegratorConfig
) -> CommandResult:
    """
    Integrate a trajectory and summarize the drifts of its invariants.

    A trajectory leaving the operative domain is kept up to the exit and
    reported with exit code 2; a drift over the budget gives exit code 1.
    """
    report_stage(f"Integrating {cfg.steps} steps with {cfg.method.value}.")
    status, exit_code = "ok", EXIT_OK
    try:
        traj = integrate(model, start, cfg)
    except DomainExit as err:
        traj, status, exit_code = err.trajectory, str(err), EXIT_DOMAIN
    except DriftBudgetExceeded as err:
        traj, status, exit_code = err.trajectory, str(err), EXIT_TOLERANCE
    drifts = all_drifts(traj)
    report_residuals(drifts, cfg.drift_budget or float("inf"))
    header, rows = trajectory_table(traj)
    payload = {
        "model": model_block(model),
        "integrator": _integrator_block(cfg),
        "initial": {"z": start.z, "pi": start.pi},
        "summary": {
            "status": status,
            "samples": len(traj),
            "final_time": float(traj.times[-1]),
            "max_drift": drifts,
        },
        "trajectory": {"columns": header, "rows": rows},
    }
    return CommandResult(payload, header, rows, exit_code)


BOHLIN_COLUMNS = [
    "t",
    "re_w",
    "im_w",
    "re_p",
    "im_p",
    "surface_residual",
    "J_residual",
    "A_residual",
]


def run_map_bohlin(
    model: CurvedModel, traj: Trajectory, energy: Optional[float] = None
) -> CommandResult:
    """
    Map the samples of an oscillator trajectory to the Coulomb side.

    The Coulomb parameters follow from the energy, by default the energy of
    the first sample.  Samples at z = 0 are skipped and counted.
    The result fails when the surface residual reaches SURFACE_TOLERANCE
    or the J or 𝐀 residual reaches CONSERVED_TOLERANCE.
    """
    if model.kind is not SystemKind.OSCILLATOR or model.B0 != 0.0:
        raise CurvedDualityError("The Bohlin map needs an oscillator without field.")
    if len(traj) == 0:
        raise CurvedDualityError("The trajectory has no samples.")
    points = traj.points
    if energy is None:
        energy = model.hamiltonian()(points[0]).real
    params = bohlin_params(energy, model)
    report_stage(
        f"Mapping {len(points)} samples onto the Coulomb system with "
        f"r0={params.r0:g}, gamma={params.gamma:g}, E_C={params.E_C:g}."
    )
    rows: List[List[Any]] = []
    skipped = 0
    worst = {"surface": 0.0, "J": 0.0, "A": 0.0, "canonicity": 0.0}
    for time, pt in zip(traj.times, points):
        try:
            image = bohlin_map(pt)
            j_residual, a_residual = conserved_map_check(pt, model, energy)
        except SingularityError:
            skipped += 1
            continue
        surface = coulomb_surface_residual(image, params)
        worst["surface"] = max(worst["surface"], surface)
        worst["J"] = max(worst["J"], j_residual)
        worst["A"] = max(worst["A"], a_residual)
        worst["canonicity"] = max(worst["canonicity"], canonicity_residual(pt))
        rows.append(
            [
                float(time),
                image.z.real,
                image.z.imag,
                image.pi.real,
                image.pi.imag,
                surface,
                j_residual,
                a_residual,
            ]
        )
    report_skipped(skipped, "z=0 has no Bohlin image")
    report_residuals(
        {name: worst[name] for name in ("surface", "canonicity")}, SURFACE_TOLERANCE
    )
    report_residuals({name: worst[name] for name in ("J", "A")}, CONSERVED_TOLERANCE)
    failed = worst["surface"] >= SURFACE_TOLERANCE or any(
        worst[name] >= CONSERVED_TOLERANCE for name in ("J", "A")
    )
    payload = {
        "variant": "bohlin",
        "model": model_block(model),
        "energy": energy,
        "parameters": params,
        "skipped": skipped,
        "max_residual": worst,
        "samples": {"columns": BOHLIN_COLUMNS, "rows": rows},
    }
    return CommandResult(
        payload, BOHLIN_COLUMNS, rows, EXIT_TOLERANCE if failed else EXIT_OK
    )


def _coordinate_pairs() -> List[tuple]:
    names = [f"u{i + 1}" for i in range(3)] + [f"p{i + 1}" for i in range(3)]
    functions = list(U) + list(Q)
    pairs = []
    for a, b in product(range(6), repeat=2):
        if a < 3 <= b or (a < b and (b < 3 or a >= 3)):
            pairs.append((f"{{{names[a]},{names[b]}}}", functions[a], functions[b]))
    return pairs


def _upstairs_points(
    rng: np.random.Generator, count: int
) -> List[tuple]:
    """
    Return points (z, π) of C² x C² with |z|² in [0.2, 0.8].
    """
    points = []
    for _ in range(count):
        direction = rng.normal(size=2) + 1j * rng.normal(size=2)
        z = direction / np.linalg.norm(direction) * np.sqrt(rng.uniform(0.2, 0.8))
        pi = rng.normal(size=2) + 1j * rng.normal(size=2)
        points.append((z, pi))
    return points


def run_map_ks(
    model: CurvedModel, seed: int, count: int
) -> CommandResult:
    """
    Check the reduced monopole brackets, the U(1) Casimir and the reduced
    Coulomb energy surface at seeded upstairs points.
    """
    rng = np.random.default_rng(seed)
    points = _upstairs_points(rng, count)
    report_stage(f"Checking the reduction at {count} upstairs points.")
    worst: Dict[str, float] = {}
    for name, f, g in _coordinate_pairs():
        worst[name] = max(ks_bracket_check(f, g, z, pi) for z, pi in points)
    casimir = max(
        casimir_residual(f, z, pi) for f in list(U) + list(Q) for z, pi in points
    )
    surface = max(
        ks_energy_surface_residual(z, pi, model, hamiltonian_4d(z, pi, model))
        for z, pi in points
    )
    report_residuals(worst, KS_TOLERANCE)
    report_residuals({"casimir": casimir, "surface": surface}, KS_SURFACE_TOLERANCE)
    rows = [[name, value, KS_TOLERANCE] for name, value in worst.items()]
    rows.append(["casimir", casimir, KS_TOLERANCE])
    rows.append(["surface", surface, KS_SURFACE_TOLERANCE])
    failed = any(value >= tol for _, value, tol in rows)
    payload = {
        "variant": "ks",
        "model": model_block(model),
        "seed": seed,
        "points": count,
        "bracket_differences": worst,
        "casimir_residual": casimir,
        "surface_residual": surface,
    }
    return CommandResult(
        payload,
        ["check", "max_difference", "tolerance"],
        rows,
        EXIT_TOLERANCE if failed else EXIT_OK,
    )


def run_map_magnetic(model: CurvedModel, seed: int, count: int) -> CommandResult:
    """
    Compare the magnetic two-form with the pullback of its Coulomb image.
    """
    rng = np.random.default_rng(seed)
    moduli = np.sqrt(rng.uniform(0.01, 0.64, count))
    angles = rng.uniform(0.0, 2.0 * np.pi, count)
    r0 = model.R0**2
    rows: List[List[Any]] = []
    for modulus, angle in zip(moduli, angles):
        z = complex(modulus * np.exp(1j * angle))
        rows.append(
            [
                z.real,
                z.imag,
                magnetic_image_field(z**2, model.B0, r0, model.eps),
                magnetic_pullback_residual(z, model.B0, model.R0, model.eps),
            ]
        )
    worst = max(row[3] for row in rows)
    report_residuals({"pullback": worst}, MAGNETIC_TOLERANCE)
    payload = {
        "variant": "magnetic",
        "model": model_block(model),
        "seed": seed,
        "points": count,
        "max_pullback_residual": worst,
        "energy_shift": magnetic_energy_shift(model),
        "printed_energy_shift": printed_magnetic_shift(model.B0),
    }
    return CommandResult(
        payload,
        ["re_z", "im_z", "B_C", "pullback_residual"],
        rows,
        EXIT_TOLERANCE if worst >= MAGNETIC_TOLERANCE else EXIT_OK,
    )


OSCILLATOR_SPECTRUM_COLUMNS = [
    "N",
    "E",
    "multiplicity",
    "normalizable",
    "sigma",
    "n_sigma",
    "E_C",
    "duality_residual",
    "within_coulomb_cutoff",
]
COULOMB_SPECTRUM_COLUMNS = ["n_sigma", "sigma", "E_C", "multiplicity"]


def run_spectrum_oscillator(
    alpha: float, R0: float, eps: CurvatureSign, N: Optional[int]
) -> CommandResult:
    """
    List the oscillator levels up to N, or up to the cutoff on the
    pseudosphere, with their Coulomb images.

    :raise NoBoundStateError: If N is beyond the cutoff.
    """
    nmax = oscillator_nmax(alpha, R0, eps)
    bound_nmax = oscillator_bound_nmax(alpha, R0, eps)
    if N is not None:
        oscillator_level(alpha, R0, eps, N)
        top = N
    else:
        top = SPHERE_LEVELS - 1 if nmax is None else nmax
    rows: List[List[Any]] = []
    for level in range(top + 1):
        check = spectral_duality_check(alpha, R0, eps, level, strict=False)
        rows.append(
            [
                level,
                check.E,
                level + 1,
                bound_nmax is None or level <= bound_nmax,
                str(Fraction(check.doubled_sigma, 2)),
                str(Fraction(check.doubled_n_sigma, 2)),
                check.E_C,
                check.residual,
                check.within_cutoff,
            ]
        )
    notes = []
    if not rows:
        notes.append("No bound states below the cutoff.")
    if nmax is not None:
        notes.append(
            f"N_max={nmax}; normalizable levels have N <= {bound_nmax}."
        )
    excluded = [row[0] for row in rows if not row[8]]
    if excluded:
        notes.append(
            f"Levels N={', '.join(map(str, excluded))} map beyond the bound "
            "Coulomb spectrum and are excluded."
        )
    report_notes(notes)
    payload = {
        "system": "oscillator",
        "alpha": alpha,
        "R0": R0,
        "eps": int(eps),
        "N_max": nmax,
        "normalizable_N_max": bound_nmax,
        "excluded_from_coulomb": excluded,
        "notes": notes,
        "levels": [dict(zip(OSCILLATOR_SPECTRUM_COLUMNS, row)) for row in rows],
    }
    return CommandResult(payload, OSCILLATOR_SPECTRUM_COLUMNS, rows)


def run_spectrum_coulomb(
    gamma: float, r0: float, sigma: float, n_sigma: Optional[float]
) -> CommandResult:
    """
    List the Coulomb levels of the sector σ, all of them or just N_σ.

    :raise NoBoundStateError: If N_σ is not a bound level.
    """
    if n_sigma is not None:
        coulomb_level(gamma, r0, sigma, n_sigma)
    lines = coulomb_enumerate(gamma, r0, sigma)
    levels: Dict[int, List[Any]] = {}
    for line in lines:
        if n_sigma is not None and line.doubled_n_sigma != doubled(n_sigma):
            continue
        row = levels.setdefault(
            line.doubled_n_sigma, [str(line.n_sigma), str(line.sigma), line.E_C, 0]
        )
        row[3] += 1
    rows = list(levels.values())
    notes = [] if rows else ["No bound states: the spectrum is empty."]
    report_notes(notes)
    top = coulomb_nsigma_max(gamma, r0, sigma) if r0 * gamma > 0 else None
    payload = {
        "system": "coulomb",
        "gamma": gamma,
        "r0": r0,
        "sigma": sigma,
        "N_sigma_max": top,
        "notes": notes,
        "levels": [dict(zip(COULOMB_SPECTRUM_COLUMNS, row)) for row in rows],
    }
    return CommandResult(payload, COULOMB_SPECTRUM_COLUMNS, rows)


VALIDATION_COLUMNS = [
    "problem",
    "level",
    "analytic",
    "numeric",
    "rel_error",
    "convergence_estimate",
    "grid_ratio",
    "bound",
]


def flat_self_test(n_points: int, alpha: float = 1.0) -> float:
    """
    Return the largest relative error of the lowest levels of the flat
    oscillator -(1/2)d²/dx² + α²x²/2 against α(n + 1/2), extrapolated from
    the steps h and h/2.
    """
    half_width = 10.0 / np.sqrt(alpha)
    coarse, fine = (
        eigenvalues(
            flat_oscillator_operator(alpha, half_width, points), SELF_TEST_LEVELS
        ).eigenvalues
        for points in (n_points, 2 * n_points + 1)
    )
    exact = alpha * (np.arange(SELF_TEST_LEVELS) + 0.5)
    return float(np.max(np.abs((4.0 * fine - coarse) / 3.0 - exact) / exact))


def _validation_result(
    report: ValidationReport,
    tolerance: float,
    n_points: int,
    extra: Dict[str, Any],
) -> CommandResult:
    rows = [
        [
            row.problem,
            row.level,
            row.analytic,
            row.numeric,
            row.rel_error,
            row.convergence_estimate,
            row.grid_ratio,
            row.bound,
        ]
        for row in report.rows
    ]
    self_test = flat_self_test(n_points)
    passed = report.passed(tolerance) and self_test < tolerance
    for row in report.rows:
        if row.bound and row.rel_error is not None:
            report_residuals({f"{row.problem} {row.level}": row.rel_error}, tolerance)
    for check in report.counts:
        if not check.matches:
            report_notes(
                [
                    f"{check.problem}: {check.found} bound states, "
                    f"{check.predicted} predicted."
                ]
            )
    report_notes(report.notes)
    payload = dict(extra)
    payload.update(
        {
            "tolerance": tolerance,
            "n_points": n_points,
            "passed": passed,
            "flat_self_test": self_test,
            "rows": [dict(zip(VALIDATION_COLUMNS, row)) for row in rows],
            "grids": [row.grid for row in report.rows],
            "counts": [
                {
                    "problem": check.problem,
                    "predicted": check.predicted,
                    "found": check.found,
                    "matches": check.matches,
                }
                for check in report.counts
            ],
            "notes": report.notes,
        }
    )
    return CommandResult(
        payload,
        VALIDATION_COLUMNS,
        rows,
        EXIT_OK if passed else EXIT_TOLERANCE,
    )


def run_validate_oscillator(  # pylint: disable=too-many-arguments
    alpha: float,
    R0: float,
    eps: CurvatureSign,
    N: Optional[int],
    n_points: int,
    jobs: Optional[int],
    tolerance: float = VALIDATION_TOLERANCE,
    cross_check: bool = False,
) -> CommandResult:
    """
    Solve the radial oscillator problems and compare with the closed form.

    Without N every level up to the cutoff is validated; on the sphere the
    lowest SPHERE_LEVELS.
    """
    nmax = oscillator_nmax(alpha, R0, eps)
    if N is not None:
        N_list = [N]
    else:
        N_list = list(range(SPHERE_LEVELS if nmax is None else nmax + 1))
    report_stage(f"Validating levels {N_list} on {n_points} points.")
    report = validate_oscillator(alpha, R0, eps, N_list, n_points, jobs)
    extra: Dict[str, Any] = {
        "system": "oscillator",
        "alpha": alpha,
        "R0": R0,
        "eps": int(eps),
    }
    if cross_check:
        crosses = []
        for level in N_list:
            try:
                mapped, numeric = duality_cross_check(alpha, R0, eps, level, n_points)
            except GridConditionError as err:
                report_notes([f"Cross-check N={level}: {err}"])
                continue
            crosses.append({"N": level, "E_C": mapped, "numeric": numeric})
        extra["duality_cross_check"] = crosses
    return _validation_result(report, tolerance, n_points, extra)


def run_validate_coulomb(  # pylint: disable=too-many-arguments
    gamma: float,
    r0: float,
    sigma: float,
    n_sigma: Optional[float],
    n_points: int,
    jobs: Optional[int],
    tolerance: float = VALIDATION_TOLERANCE,
) -> CommandResult:
    """
    Solve the radial Coulomb problems of the sector σ and compare with the
    closed form; also reports how far the levels sit from the other sector.
    """
    twice_sigma = doubled(sigma)
    if n_sigma is not None:
        levels = [n_sigma]
    else:
        levels = sorted(
            {line.doubled_n_sigma / 2 for line in coulomb_enumerate(gamma, r0, sigma)}
        )
    report_stage(f"Validating levels {levels} on {n_points} points.")
    report = validate_coulomb(gamma, r0, sigma, levels, n_points, jobs)
    other = [line.E_C for line in coulomb_enumerate(gamma, r0, 0.5 - sigma)]
    numeric = [row.numeric for row in report.rows if row.numeric is not None]
    separation = (
        min(abs(a - b) for a in numeric for b in other)
        if numeric and other
        else None
    )
    extra = {
        "system": "coulomb",
        "gamma": gamma,
        "r0": r0,
        "sigma": f"{twice_sigma}/2",
        "separation_from_other_sector": separation,
    }
    return _validation_result(report, tolerance, n_points, extra)


def _bracket_tolerance(relation: str) -> float:
    return CUBIC_TOLERANCE if relation == CUBIC_RELATION else CANONICAL_TOLERANCE


def run_brackets(  # pylint: disable=too-many-locals
    signs: Sequence[CurvatureSign],
    R0: float,
    alpha: float,
    B0: float,
    seed: int,
    count: int,
) -> CommandResult:
    """
    Evaluate every relation of the motion algebra and of the cubic algebra
    at seeded random points for each curvature sign, then calibrate the
    magnetic shift of the generators.
    """
    rng = np.random.default_rng(seed)
    rows: List[List[Any]] = []
    sectors: Dict[str, Any] = {}
    failed = False
    for eps in signs:
        self_test = bracket_self_test(int(eps), R0)
        if self_test >= CANONICAL_TOLERANCE:
            raise CurvedDualityError(
                f"Bracket self-test failed with residual {self_test:.3e}."
            )
        model = CurvedModel(eps, R0, alpha=alpha)
        report_stage(f"eps={int(eps):+d}: {count} points.")
        residuals = algebra_residuals(model, random_phase_points(rng, count))
        for relation, value in residuals.items():
            report_residuals({relation: value}, _bracket_tolerance(relation))
            ok = value < _bracket_tolerance(relation)
            failed = failed or not ok
            rows.append([int(eps), relation, value, _bracket_tolerance(relation), ok])
        block: Dict[str, Any] = {"residuals": residuals}
        if B0 != 0.0:
            magnetic = CurvedModel(eps, R0, alpha=alpha, B0=B0)
            points = random_phase_points(rng, count)
            calibration = calibrate_shift_coefficient(magnetic, points)
            shift = magnetic_shift_residual(magnetic, points)
            report_residuals(
                {
                    f"c={calibration.fitted:.6g} closure": calibration.residual_fitted,
                    "energy shift": shift,
                },
                CALIBRATION_TOLERANCE,
            )
            ok = calibration.residual_fitted < CALIBRATION_TOLERANCE
            failed = failed or not ok or shift >= CALIBRATION_TOLERANCE
            rows.append(
                [
                    int(eps),
                    "magnetic closure",
                    calibration.residual_fitted,
                    CALIBRATION_TOLERANCE,
                    ok,
                ]
            )
            block["magnetic"] = {
                "B0": B0,
                "fitted_coefficient": calibration.fitted,
                "residual_fitted": calibration.residual_fitted,
                "residual_printed": calibration.residual_printed,
                "printed_fits_best": calibration.printed_fits_best,
                "energy_shift": magnetic_energy_shift(magnetic),
                "printed_energy_shift": printed_magnetic_shift(B0),
                "energy_shift_residual": shift,
            }
        sectors[f"{int(eps):+d}"] = block
    payload = {
        "seed": seed,
        "points": count,
        "R0": R0,
        "alpha": alpha,
        "tolerances": {"canonical": CANONICAL_TOLERANCE, "cubic": CUBIC_TOLERANCE},
        "sectors": sectors,
    }
    return CommandResult(
        payload,
        ["eps", "relation", "residual", "tolerance", "passed"],
        rows,
        EXIT_TOLERANCE if failed else EXIT_OK,
    )
