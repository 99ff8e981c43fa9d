"""
A radial Sturm-Liouville eigensolver for the curved oscillator and the
Coulomb system with a vortex on the pseudosphere.

The Hamiltonian -Δ/2 + V is separated in geodesic polar coordinates
(θ = χ/R, the angle e^{iMφ}).  The radial operator
-(1/(2R²)) [(1/S)(S f')' - M²f/S²] + V f, with S = sin θ on the sphere and
sinh θ on the pseudosphere, becomes after f = S^μ g, μ = |M|,

    -(1/(2R²)) (1/W)(W g')' - κμ(μ + 1)/(2R²) g + V g,   W = S^{2μ+1},

with κ = +1 on the pseudosphere and -1 on the sphere.  g is regular at the
origin for any real μ, half-integers included.  It is discretized by finite
volumes on cell centres θ_i = (i - 1/2)h.  The face at θ = 0 carries W = 0,
so no condition is needed at the origin; the last face has a Dirichlet
wall.  Scaling the unknowns by √W_i makes the matrix symmetric
tridiagonal; the weights only enter through ratios, taken in logarithms.
"""
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from curved_duality.core.duality import bohlin_params
from curved_duality.core.errors import GridConditionError
from curved_duality.core.geometry import CurvatureSign
from curved_duality.core.spectra import (
    coulomb_count,
    coulomb_level,
    coulomb_nsigma_max,
    doubled,
    oscillator_bound_nmax,
    oscillator_level,
    oscillator_nmax,
)
from curved_duality.core.systems import (
    Catalogue,
    CoulombModel,
    CurvedModel,
)
from curved_duality.core.workers import ordered_map

MIN_POINTS = 64
DEFAULT_POINTS = 4096
BISECTION_TOLERANCE = 1e-12
# Geodesic cutoffs, in units of the radius.
INITIAL_CUTOFF = 8.0
MAX_CUTOFF = 300.0
CUTOFF_GROWTH = 1.25
CUTOFF_TOLERANCE = 1e-8
# Margin below the continuum edge for counting bound states.
EDGE_MARGIN = 1e-6


@dataclass(frozen=True)
class CurvedOscillator:
    """
    The oscillator in the angular sector M.
    """

    alpha: float
    R0: float
    eps: CurvatureSign
    M: int

    @property
    def radius(self) -> float:
        return self.R0

    @property
    def angular(self) -> float:
        return float(abs(self.M))

    @property
    def sphere(self) -> bool:
        return self.eps == CurvatureSign.SPHERE

    def potential(self, theta: np.ndarray) -> np.ndarray:
        rho = np.tan(theta / 2) if self.sphere else np.tanh(theta / 2)
        model = CurvedModel(self.eps, self.R0, alpha=self.alpha)
        return Catalogue.V_OSC.bind(**model.parameters()).on_grid(rho)

    def continuum_edge(self) -> Optional[float]:
        if self.sphere:
            return None
        return self.alpha**2 * self.R0**2 / 2 + 1 / (8 * self.R0**2)

    def describe(self) -> str:
        return (
            f"oscillator(alpha={self.alpha:g}, R0={self.R0:g}, "
            f"eps={int(self.eps):+d}, M={self.M})"
        )


@dataclass(frozen=True)
class PseudoCoulomb:
    """
    The Coulomb system on the pseudosphere of "radius" r0 in the angular
    sector m_σ, carried doubled.
    """

    gamma: float
    r0: float
    doubled_m_sigma: int

    @property
    def radius(self) -> float:
        return self.r0

    @property
    def angular(self) -> float:
        return abs(self.doubled_m_sigma) / 2

    @property
    def sphere(self) -> bool:
        return False

    def potential(self, theta: np.ndarray) -> np.ndarray:
        rho = np.tanh(theta / 2)
        model = CoulombModel(self.r0, self.gamma)
        return Catalogue.V_COULOMB.bind(**model.parameters()).on_grid(rho)

    def continuum_edge(self) -> Optional[float]:
        return -self.gamma / self.r0 + 1 / (8 * self.r0**2)

    def describe(self) -> str:
        return (
            f"coulomb(gamma={self.gamma:g}, r0={self.r0:g}, "
            f"m_sigma={self.doubled_m_sigma}/2)"
        )


RadialSystem = Union[CurvedOscillator, PseudoCoulomb]


@dataclass(frozen=True)
class RadialGrid:
    """
    :param n_points: The number of cells.
    :param cutoff: The geodesic distance χ of the wall.
    """

    n_points: int
    cutoff: float


@dataclass(frozen=True)
class RadialProblem:
    """
    A radial problem on a grid.

    :raise GridConditionError: If the grid has fewer than 64 points or the
                               wall is beyond the operative domain.
    """

    system: RadialSystem
    grid: RadialGrid

    def __post_init__(self) -> None:
        if self.grid.n_points < MIN_POINTS:
            raise GridConditionError(
                f"{self.grid.n_points} points; at least {MIN_POINTS} needed."
            )
        theta = self.grid.cutoff / self.system.radius
        if not math.isfinite(theta) or theta <= 0:
            raise GridConditionError(f"Bad cutoff {self.grid.cutoff}.")
        if self.system.sphere and theta > math.pi / 2 * (1 + 1e-12):
            raise GridConditionError("The wall is beyond the equator.")
        if theta > MAX_CUTOFF:
            raise GridConditionError(f"Cutoff {self.grid.cutoff} is too far.")

    @property
    def theta_max(self) -> float:
        return self.grid.cutoff / self.system.radius

    def refined(self, factor: int) -> "RadialProblem":
        return RadialProblem(
            self.system,
            RadialGrid(self.grid.n_points * factor, self.grid.cutoff),
        )


@dataclass(frozen=True)
class TridiagonalOperator:
    """
    A symmetric tridiagonal matrix.
    """

    diagonal: np.ndarray
    off_diagonal: np.ndarray
    grid: Optional[RadialGrid] = None

    def __len__(self) -> int:
        return len(self.diagonal)

    def dense(self) -> np.ndarray:
        return (
            np.diag(self.diagonal)
            + np.diag(self.off_diagonal, 1)
            + np.diag(self.off_diagonal, -1)
        )


@dataclass(frozen=True)
class EigenResult:
    """
    The lowest eigenvalues of a problem.

    :param eigenvalues: Increasing eigenvalues.
    :param grid: The coarsest grid used.
    :param convergence_estimate: Richardson error estimate per eigenvalue,
                                 None for a single grid.
    :param grid_ratio: Ratio of successive grid-halving changes, near 4
                       for a second order scheme.
    """

    eigenvalues: np.ndarray
    grid: Optional[RadialGrid] = None
    convergence_estimate: Optional[np.ndarray] = None
    grid_ratio: Optional[np.ndarray] = None


def radial_reduce(problem: RadialProblem) -> TridiagonalOperator:
    """
    Return the symmetric tridiagonal discretization of the radial operator
    acting on g = f/S^μ.

    :raise GridConditionError: If the entries are not finite.
    """
    system = problem.system
    n = problem.grid.n_points
    h = problem.theta_max / n
    centres = (np.arange(1, n + 1) - 0.5) * h
    faces = np.arange(0, n + 1) * h
    shape = np.sin if system.sphere else np.sinh
    mu = system.angular
    curvature = -1.0 if system.sphere else 1.0
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        log_w_c = (2.0 * mu + 1.0) * np.log(shape(centres))
        log_w_f = (2.0 * mu + 1.0) * np.log(shape(faces))
        inward = np.exp(log_w_f[:-1] - log_w_c)
        outward = np.exp(log_w_f[1:] - log_w_c)
        outward[-1] *= 2.0
        kinetic = (inward + outward) / h**2
        off = -np.exp(log_w_f[1:-1] - 0.5 * (log_w_c[:-1] + log_w_c[1:])) / h**2
        scale = 1.0 / (2.0 * system.radius**2)
        diagonal = (
            scale * (kinetic - curvature * mu * (mu + 1.0))
            + system.potential(centres)
        )
        off_diagonal = scale * off
    if not (np.all(np.isfinite(diagonal)) and np.all(np.isfinite(off_diagonal))):
        raise GridConditionError(
            f"Non-finite matrix for {system.describe()} at cutoff "
            f"{problem.grid.cutoff}."
        )
    return TridiagonalOperator(diagonal, off_diagonal, problem.grid)


def eigenvalues(op: TridiagonalOperator, k: int) -> EigenResult:
    """
    Return the lowest k eigenvalues by Sturm-sequence bisection.

    :raise GridConditionError: If k is not in 1..len(op).
    """
    if k < 1 or k > len(op):
        raise GridConditionError(f"Cannot take {k} eigenvalues of {len(op)}.")
    values = eigvalsh_tridiagonal(
        op.diagonal,
        op.off_diagonal,
        select="i",
        select_range=(0, k - 1),
        lapack_driver="stebz",
        tol=BISECTION_TOLERANCE,
    )
    return EigenResult(np.sort(values), op.grid)


def sturm_count(op: TridiagonalOperator, value: float) -> int:
    """
    Return the number of eigenvalues below value.

    Counts the negative pivots of the LDLᵀ factorization of op - value.
    """
    count = 0
    pivot = 1.0
    tiny = np.finfo(float).tiny
    for i, diag in enumerate(op.diagonal):
        coupling = op.off_diagonal[i - 1] ** 2 / pivot if i else 0.0
        pivot = diag - value - coupling
        if pivot == 0.0:
            pivot = -tiny
        if pivot < 0.0:
            count += 1
    return count


def solve(problem: RadialProblem, k: int) -> EigenResult:
    """
    Return the lowest k eigenvalues extrapolated from the grids h, h/2 and
    h/4.
    """
    coarse, middle, fine = (
        eigenvalues(radial_reduce(problem.refined(factor)), k).eigenvalues
        for factor in (1, 2, 4)
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (coarse - middle) / (middle - fine)
    return EigenResult(
        eigenvalues=(4.0 * fine - middle) / 3.0,
        grid=problem.grid,
        convergence_estimate=np.abs(fine - middle) / 3.0,
        grid_ratio=ratio,
    )


def natural_grid(system: RadialSystem, n_points: int = DEFAULT_POINTS) -> RadialGrid:
    """
    Return the equator wall on the sphere or the initial cutoff on the
    pseudosphere.
    """
    theta = math.pi / 2 if system.sphere else INITIAL_CUTOFF
    return RadialGrid(n_points, theta * system.radius)


def converge_cutoff(
    system: RadialSystem, k: int, n_points: int = DEFAULT_POINTS
) -> RadialGrid:
    """
    Grow the wall distance by 25% at fixed step until the lowest k
    eigenvalues move by less than CUTOFF_TOLERANCE.

    :raise GridConditionError: If the cutoff reaches MAX_CUTOFF first.
    """
    grid = natural_grid(system, n_points)
    if system.sphere or k < 1:
        return grid
    step = grid.cutoff / grid.n_points
    previous = eigenvalues(radial_reduce(RadialProblem(system, grid)), k).eigenvalues
    while True:
        cutoff = grid.cutoff * CUTOFF_GROWTH
        if cutoff / system.radius > MAX_CUTOFF:
            raise GridConditionError(
                f"No converged cutoff for {system.describe()}."
            )
        grid = RadialGrid(int(round(cutoff / step)), cutoff)
        current = eigenvalues(
            radial_reduce(RadialProblem(system, grid)), k
        ).eigenvalues
        change = np.max(np.abs(current - previous) / np.maximum(1.0, np.abs(current)))
        if change < CUTOFF_TOLERANCE:
            return grid
        previous = current


def count_bound_states(system: RadialSystem, grid: RadialGrid) -> int:
    """
    Return the number of eigenvalues below the continuum edge.
    """
    edge = system.continuum_edge()
    if edge is None:
        raise GridConditionError("The sphere has no continuum.")
    op = radial_reduce(RadialProblem(system, grid))
    return sturm_count(op, edge - EDGE_MARGIN * max(1.0, abs(edge)))


@dataclass(frozen=True)
class ValidationRow:
    """
    One level compared with the closed form.
    """

    problem: str
    grid: Tuple[int, float]
    level: str
    analytic: float
    numeric: Optional[float]
    rel_error: Optional[float]
    convergence_estimate: Optional[float]
    grid_ratio: Optional[float]
    bound: bool = True


@dataclass(frozen=True)
class CountCheck:
    """
    Predicted against found bound states in one sector.
    """

    problem: str
    predicted: int
    found: int

    @property
    def matches(self) -> bool:
        return self.predicted == self.found


@dataclass(frozen=True)
class ValidationReport:
    """
    The rows and bound-state counts of a validation.
    """

    rows: List[ValidationRow] = field(default_factory=list)
    counts: List[CountCheck] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def passed(self, tolerance: float) -> bool:
        levels_ok = all(
            row.rel_error is not None and row.rel_error < tolerance
            for row in self.rows
            if row.bound
        )
        return levels_ok and all(check.matches for check in self.counts)


@dataclass(frozen=True)
class SectorJob:
    """
    The levels wanted from one angular sector: radial indices with labels
    and closed-form values.
    """

    system: RadialSystem
    wanted: Tuple[Tuple[int, str, float], ...]
    n_points: int


def _solve_sector(job: SectorJob) -> List[ValidationRow]:
    k = max(n_r for n_r, _, _ in job.wanted) + 1
    grid = converge_cutoff(job.system, k, job.n_points)
    result = solve(RadialProblem(job.system, grid), k)
    rows = []
    for n_r, label, analytic in job.wanted:
        numeric = float(result.eigenvalues[n_r])
        rows.append(
            ValidationRow(
                problem=job.system.describe(),
                grid=(grid.n_points, grid.cutoff),
                level=label,
                analytic=analytic,
                numeric=numeric,
                rel_error=abs(numeric - analytic) / max(abs(analytic), 1e-300),
                convergence_estimate=float(result.convergence_estimate[n_r]),
                grid_ratio=float(result.grid_ratio[n_r]),
            )
        )
    return rows


def _count_sector(args: Tuple[RadialSystem, int, int]) -> CountCheck:
    system, predicted, n_points = args
    grid = converge_cutoff(system, predicted, n_points)
    return CountCheck(system.describe(), predicted, count_bound_states(system, grid))


def _run(
    jobs_list: List[SectorJob],
    count_list: List[Tuple[RadialSystem, int, int]],
    jobs: Optional[int],
    excluded: List[ValidationRow],
    notes: List[str],
) -> ValidationReport:
    rows: List[ValidationRow] = []
    for sector_rows in ordered_map(_solve_sector, jobs_list, jobs):
        rows.extend(sector_rows)
    counts = ordered_map(_count_sector, count_list, jobs)
    return ValidationReport(rows + excluded, counts, notes)


def validate_oscillator(
    alpha: float,
    R0: float,
    eps: int,
    N_list: List[int],
    n_points: int = DEFAULT_POINTS,
    jobs: Optional[int] = None,
) -> ValidationReport:
    """
    Compare numeric oscillator eigenvalues with the closed-form levels.

    Every sector M = N, N-2, ... >= 0 contributing to a level is solved;
    the state of level N in sector M has radial index (N - M)/2.  On the
    pseudosphere, levels that are not normalizable are reported as not
    bound, and the number of eigenvalues below the continuum edge in each
    sector must equal the number of normalizable levels.
    """
    sign = CurvatureSign.parse(eps)
    bound_nmax = oscillator_bound_nmax(alpha, R0, sign)
    printed_nmax = oscillator_nmax(alpha, R0, sign)
    wanted: Dict[int, List[Tuple[int, str, float]]] = {}
    excluded: List[ValidationRow] = []
    for N in sorted(set(N_list)):
        analytic = oscillator_level(alpha, R0, sign, N, strict=False)
        if bound_nmax is not None and N > bound_nmax:
            excluded.append(
                ValidationRow(
                    problem=(
                        f"oscillator(alpha={alpha:g}, R0={R0:g}, eps={int(sign):+d})"
                    ),
                    grid=(n_points, 0.0),
                    level=f"N={N}",
                    analytic=analytic,
                    numeric=None,
                    rel_error=None,
                    convergence_estimate=None,
                    grid_ratio=None,
                    bound=False,
                )
            )
            continue
        for M in range(N % 2, N + 1, 2):
            wanted.setdefault(M, []).append(((N - M) // 2, f"N={N}", analytic))
    sector_jobs = [
        SectorJob(CurvedOscillator(alpha, R0, sign, M), tuple(items), n_points)
        for M, items in sorted(wanted.items())
    ]
    count_list: List[Tuple[RadialSystem, int, int]] = []
    notes: List[str] = []
    if bound_nmax is not None:
        top = max([bound_nmax, printed_nmax or 0] + list(N_list)) + 1
        for M in range(0, top + 1):
            predicted = max(0, (bound_nmax - M) // 2 + 1) if bound_nmax >= M else 0
            count_list.append(
                (CurvedOscillator(alpha, R0, sign, M), predicted, n_points)
            )
        notes.append(
            f"Normalizable levels N <= {bound_nmax}; the bracket [2*alpha~*R0^2]-1 "
            f"gives {printed_nmax}."
        )
    return _run(sector_jobs, count_list, jobs, excluded, notes)


def validate_coulomb(
    gamma: float,
    r0: float,
    sigma: float,
    levels: List[float],
    n_points: int = DEFAULT_POINTS,
    jobs: Optional[int] = None,
) -> ValidationReport:
    """
    Compare numeric Coulomb eigenvalues with the closed-form levels.

    The vortex shifts the angular number to m_σ = σ, σ + 1, ...; the state
    of level N_σ in sector m_σ has radial index N_σ - m_σ.
    """
    twice_sigma = doubled(sigma)
    top = coulomb_nsigma_max(gamma, r0, sigma)
    wanted: Dict[int, List[Tuple[int, str, float]]] = {}
    excluded: List[ValidationRow] = []
    for n_sigma in sorted(set(levels)):
        twice_n = doubled(n_sigma)
        label = f"N_sigma={twice_n}/2"
        if twice_n / 2 > top:
            excluded.append(
                ValidationRow(
                    problem=(
                        f"coulomb(gamma={gamma:g}, r0={r0:g}, sigma={twice_sigma}/2)"
                    ),
                    grid=(n_points, 0.0),
                    level=label,
                    analytic=float("nan"),
                    numeric=None,
                    rel_error=None,
                    convergence_estimate=None,
                    grid_ratio=None,
                    bound=False,
                )
            )
            continue
        analytic = coulomb_level(gamma, r0, sigma, n_sigma)
        for twice_m in range(twice_sigma, twice_n + 1, 2):
            wanted.setdefault(twice_m, []).append(
                ((twice_n - twice_m) // 2, label, analytic)
            )
    sector_jobs = [
        SectorJob(PseudoCoulomb(gamma, r0, twice_m), tuple(items), n_points)
        for twice_m, items in sorted(wanted.items())
    ]
    count = coulomb_count(gamma, r0, sigma)
    count_list: List[Tuple[RadialSystem, int, int]] = []
    for k in range(count + 1):
        twice_m = twice_sigma + 2 * k
        count_list.append(
            (PseudoCoulomb(gamma, r0, twice_m), max(0, count - k), n_points)
        )
    return _run(sector_jobs, count_list, jobs, excluded, [])


def duality_cross_check(
    alpha: float, R0: float, eps: int, N: int, n_points: int = DEFAULT_POINTS
) -> Tuple[float, float]:
    """
    Map a numeric oscillator level to the Coulomb side and solve the
    Coulomb problem there.

    The oscillator state (n_r = 0, M = N) has the Coulomb image
    (n_r = 0, m_σ = N/2) at γ = E/2, r0 = R0².

    :returns: The mapped energy E_C and the numeric Coulomb eigenvalue.
    """
    sign = CurvatureSign.parse(eps)
    oscillator = CurvedOscillator(alpha, R0, sign, N)
    grid = converge_cutoff(oscillator, 1, n_points)
    energy = float(solve(RadialProblem(oscillator, grid), 1).eigenvalues[0])
    params = bohlin_params(energy, CurvedModel(sign, R0, alpha=alpha))
    coulomb = PseudoCoulomb(params.gamma, params.r0, N)
    coulomb_grid = converge_cutoff(coulomb, 1, n_points)
    numeric = float(solve(RadialProblem(coulomb, coulomb_grid), 1).eigenvalues[0])
    return params.E_C, numeric


def flat_oscillator_operator(
    alpha: float, half_width: float, n_points: int
) -> TridiagonalOperator:
    """
    Return -(1/2)d²/dx² + α²x²/2 on [-half_width, half_width] with
    Dirichlet walls, whose levels are α(n + 1/2).
    """
    h = 2.0 * half_width / (n_points + 1)
    x = -half_width + h * np.arange(1, n_points + 1)
    diagonal = 1.0 / h**2 + alpha**2 * x**2 / 2.0
    off_diagonal = np.full(n_points - 1, -0.5 / h**2)
    return TridiagonalOperator(diagonal, off_diagonal)
