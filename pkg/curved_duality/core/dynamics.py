"""
Hamiltonian flows, fixed-step Runge-Kutta integration and drift
diagnostics.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Protocol

import numpy as np
from scipy.integrate import DOP853
from scipy.optimize import brentq

from curved_duality.core.errors import (
    CurvedDualityError,
    DomainError,
    DomainExit,
    DriftBudgetExceeded,
    UnknownLogError,
)
from curved_duality.core.systems import (
    BoundObservable,
    CurvedModel,
    PhasePoint,
    SymplecticForm,
    SystemKind,
)


class HamiltonianSystem(Protocol):
    """
    What integrate needs from a model.
    """

    def check_point(self, pt: PhasePoint) -> None:
        """
        Raise a DomainError if the point is outside the domain.
        """

    def hamiltonian(self) -> BoundObservable:
        ...

    def invariants(self) -> Dict[str, BoundObservable]:
        ...

    def form(self, pt: PhasePoint) -> SymplecticForm:
        ...


class Method(Enum):
    """
    Explicit Runge-Kutta schemes.
    """

    RK4 = "rk4"
    RK8 = "rk8"


@dataclass(frozen=True)
class Tableau:
    """
    Butcher tableau of an explicit scheme.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray


RK4_TABLEAU = Tableau(
    a=np.array(
        [
            [0.0, 0.0, 0.0, 0.0],
            [0.5, 0.0, 0.0, 0.0],
            [0.0, 0.5, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
        ]
    ),
    b=np.array([1.0, 2.0, 2.0, 1.0]) / 6.0,
    c=np.array([0.0, 0.5, 0.5, 1.0]),
)

# The eighth-order stages of Dormand-Prince 8(5,3), without the error
# estimators.
RK8_TABLEAU = Tableau(
    a=np.asarray(DOP853.A, dtype=float),
    b=np.asarray(DOP853.B, dtype=float),
    c=np.asarray(DOP853.C, dtype=float),
)

TABLEAUS = {Method.RK4: RK4_TABLEAU, Method.RK8: RK8_TABLEAU}


@dataclass(frozen=True)
class IntegratorConfig:
    """
    Parameters of a fixed-step integration.

    :param dt: The step.
    :param t_end: The final time.
    :param method: RK4 or RK8.
    :param drift_budget: Stop when a logged invariant drifts more than this
                         (relative); None disables the check.
    """

    dt: float
    t_end: float
    method: Method = Method.RK8
    drift_budget: Optional[float] = None

    def __post_init__(self) -> None:
        if self.dt <= 0 or self.t_end <= 0:
            raise CurvedDualityError("dt and t_end must be positive.")
        if self.dt > self.t_end:
            raise CurvedDualityError("dt must not exceed t_end.")
        if self.drift_budget is not None and self.drift_budget <= 0:
            raise CurvedDualityError("The drift budget must be positive.")

    @property
    def steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass(frozen=True)
class Trajectory:
    """
    Time-sampled phase points with logs of the conserved quantities.

    :param times: Increasing sample times.
    :param states: Real coordinates (x, y, px, py), one row per sample.
    :param logs: Values of named observables, aligned with the samples.
    """

    times: np.ndarray
    states: np.ndarray
    logs: Dict[str, np.ndarray] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def points(self) -> List[PhasePoint]:
        return [PhasePoint.from_real(row) for row in self.states]

    def log(self, name: str) -> np.ndarray:
        if name not in self.logs:
            raise UnknownLogError(
                f"No log '{name}'; logs are {sorted(self.logs)}."
            )
        return self.logs[name]

    def real_logs(self) -> Dict[str, bool]:
        """
        Return, for every log, whether it is real valued.
        """
        return {
            name: bool(np.all(values.imag == 0.0))
            for name, values in self.logs.items()
        }


def hamiltonian_vector_field(
    H: BoundObservable, pt: PhasePoint, form: SymplecticForm
) -> np.ndarray:
    """
    Return the Hamiltonian vector field X = Ω⁻¹∇H over (x, y, px, py).

    X satisfies ω(X, ·) = -dH, which gives ẋ = ∂H/∂px and conserves H.
    """
    grad = H.gradient(pt).real
    return np.linalg.solve(form.matrix, grad)


def _field(system: HamiltonianSystem, H: BoundObservable, xi: np.ndarray) -> np.ndarray:
    pt = PhasePoint.from_real(xi)
    return hamiltonian_vector_field(H, pt, system.form(pt))


def _step(
    system: HamiltonianSystem,
    H: BoundObservable,
    xi: np.ndarray,
    dt: float,
    tableau: Tableau,
) -> np.ndarray:
    stages = np.zeros((len(tableau.b), 4))
    for i in range(len(tableau.b)):
        shift = dt * tableau.a[i, :i] @ stages[:i]
        stages[i] = _field(system, H, xi + shift)
    return xi + dt * tableau.b @ stages


def _relative_drift(values: np.ndarray) -> float:
    if len(values) == 0:
        return 0.0
    return float(
        np.max(np.abs(values - values[0])) / max(1.0, abs(values[0]))
    )


def integrate(
    model: HamiltonianSystem, pt0: PhasePoint, cfg: IntegratorConfig
) -> Trajectory:
    """
    Integrate the Hamiltonian flow of a model with a fixed step.

    :param model: The system; it provides the Hamiltonian, the symplectic
                  form and the invariants to log.
    :param pt0: The initial point.
    :param cfg: The integrator configuration.
    :returns: The trajectory with cfg.steps + 1 samples.
    :raise DomainError: If pt0 is outside the operative domain.
    :raise DomainExit: If the state approaches a domain margin; carries the
                       trajectory up to the last accepted sample.
    :raise DriftBudgetExceeded: If a logged invariant drifts over the budget.
    """
    model.check_point(pt0)
    H = model.hamiltonian()
    observables = model.invariants()
    tableau = TABLEAUS[cfg.method]

    times = [0.0]
    states = [pt0.to_real()]
    logs: Dict[str, List[complex]] = {
        name: [obs(pt0)] for name, obs in observables.items()
    }

    def partial() -> Trajectory:
        return Trajectory(
            np.asarray(times),
            np.asarray(states),
            {name: np.asarray(values) for name, values in logs.items()},
        )

    xi = states[0]
    with np.errstate(divide="raise", invalid="raise", over="raise"):
        for k in range(1, cfg.steps + 1):
            try:
                xi = _step(model, H, xi, cfg.dt, tableau)
                pt = PhasePoint.from_real(xi)
                model.check_point(pt)
                values = {name: obs(pt) for name, obs in observables.items()}
            except (DomainError, ZeroDivisionError, FloatingPointError) as err:
                raise DomainExit(times[-1], partial(), str(err)) from err
            if not all(np.isfinite(xi)):
                raise DomainExit(times[-1], partial(), "non-finite state")
            times.append(k * cfg.dt)
            states.append(xi)
            for name, value in values.items():
                logs[name].append(value)
            if cfg.drift_budget is not None:
                for name, values_so_far in logs.items():
                    drift = abs(values_so_far[-1] - values_so_far[0]) / max(
                        1.0, abs(values_so_far[0])
                    )
                    if drift > cfg.drift_budget:
                        raise DriftBudgetExceeded(name, drift, partial())
    return partial()


def conserved_drift(traj: Trajectory, name: str) -> float:
    """
    Return max |q(t) - q(0)| / max(1, |q(0)|) over the samples of a log.

    :raise UnknownLogError: If the trajectory has no such log.
    """
    return _relative_drift(traj.log(name))


def all_drifts(traj: Trajectory) -> Dict[str, float]:
    return {name: _relative_drift(values) for name, values in traj.logs.items()}


def time_reversed(pt: PhasePoint) -> PhasePoint:
    """
    Flip the momentum; for a Hamiltonian even in π without field this
    reverses the flow.
    """
    return PhasePoint(pt.z, -pt.pi)


def _radial_force(model: CurvedModel, r: float, q: float) -> float:
    # dU/dr at fixed J = -2rq for the effective potential K(r)J² + V(r).
    eps, radius, alpha = model.eps, model.R0, model.alpha
    j2 = 4.0 * r**2 * q**2
    dk = (1 + eps * r**2) * (eps * r**2 - 1) / (4 * radius**2 * r**3)
    dv = (
        4.0
        * alpha**2
        * radius**2
        * r
        * (1 + eps * r**2)
        / (1 - eps * r**2) ** 3
    )
    return dk * j2 + dv


def circular_orbit(model: CurvedModel, r: float) -> PhasePoint:
    """
    Return initial data (z = r, π = iq) of the circular orbit of radius r.

    q is the root of the radial effective force, found with brentq.

    :raise CurvedDualityError: If the model has no circular orbit at r.
    """
    if model.kind is not SystemKind.OSCILLATOR or model.alpha <= 0:
        raise CurvedDualityError("Circular orbits need an oscillator, alpha>0.")
    if model.B0 != 0.0:
        raise CurvedDualityError("Circular orbits are built without field.")
    model.check_point(PhasePoint(complex(r), 0j))
    upper = 1.0
    while _radial_force(model, r, upper) > 0:
        upper *= 2.0
        if upper > 1e12:
            raise CurvedDualityError(f"No circular orbit at r={r}.")
    q = brentq(lambda qq: _radial_force(model, r, qq), 0.0, upper, xtol=1e-15)
    return PhasePoint(complex(r), complex(0.0, q))
