"""
Tests for curved_duality.core.dynamics.
"""
import numpy as np
import pytest

from curved_duality.core.dynamics import (
    IntegratorConfig,
    Method,
    RK8_TABLEAU,
    all_drifts,
    circular_orbit,
    conserved_drift,
    hamiltonian_vector_field,
    integrate,
    time_reversed,
)
from curved_duality.core.errors import (
    BoundaryError,
    CurvedDualityError,
    DomainExit,
    DriftBudgetExceeded,
    UnknownLogError,
)
from curved_duality.core.geometry import CurvatureSign
from curved_duality.core.systems import (
    CurvedModel,
    PhasePoint,
    SystemKind,
    random_phase_points,
)

SPHERE = CurvatureSign.SPHERE
PSEUDOSPHERE = CurvatureSign.PSEUDOSPHERE
START = PhasePoint(0.3 + 0.1j, 0.2 - 0.4j)


@pytest.mark.parametrize(
    "kwargs",
    (
        {"dt": 0.0, "t_end": 1.0},
        {"dt": -1e-3, "t_end": 1.0},
        {"dt": 1e-3, "t_end": 0.0},
        {"dt": 2.0, "t_end": 1.0},
        {"dt": 1e-3, "t_end": 1.0, "drift_budget": 0.0},
    ),
)
def test_invalid_integrator_config(kwargs) -> None:
    with pytest.raises(CurvedDualityError):
        IntegratorConfig(**kwargs)


def test_number_of_steps() -> None:
    assert IntegratorConfig(1e-3, 1.0).steps == 1000
    assert IntegratorConfig(0.1, 0.3).steps == 3


def test_eighth_order_weights_sum_to_one() -> None:
    assert RK8_TABLEAU.b.sum() == pytest.approx(1.0)
    assert RK8_TABLEAU.a.shape == (len(RK8_TABLEAU.b), len(RK8_TABLEAU.b))


def test_vector_field_of_free_particle() -> None:
    """
    Test that ẋ = ∂H/∂px: at z = 0, H = (px² + py²)/8.
    """
    model = CurvedModel(SPHERE, 1.0, kind=SystemKind.FREE_PARTICLE)
    pt = PhasePoint(0j, 1 + 0j)
    field = hamiltonian_vector_field(model.hamiltonian(), pt, model.form(pt))
    assert field == pytest.approx([0.5, 0.0, 0.0, 0.0])


@pytest.mark.parametrize("eps", (SPHERE, PSEUDOSPHERE))
def test_oscillator_conserves_invariants(eps: CurvatureSign) -> None:
    model = CurvedModel(eps, 1.0, alpha=1.0)
    traj = integrate(model, START, IntegratorConfig(1e-2, 1.0))
    assert len(traj) == 101
    assert traj.times[-1] == pytest.approx(1.0)
    drifts = all_drifts(traj)
    assert set(drifts) == {"H", "J", "I"}
    assert max(drifts.values()) < 1e-9


def test_fourth_order_scheme_drifts_more() -> None:
    model = CurvedModel(PSEUDOSPHERE, 1.0, alpha=1.0)
    rk4 = integrate(model, START, IntegratorConfig(1e-2, 1.0, Method.RK4))
    rk8 = integrate(model, START, IntegratorConfig(1e-2, 1.0, Method.RK8))
    assert conserved_drift(rk4, "H") < 1e-6
    assert conserved_drift(rk8, "H") < conserved_drift(rk4, "H")


def test_coulomb_conserves_runge_lenz() -> None:
    model = CurvedModel(PSEUDOSPHERE, 1.0, kind=SystemKind.COULOMB, gamma=1.0)
    traj = integrate(model, PhasePoint(0.4 + 0j, 1j), IntegratorConfig(1e-3, 0.2))
    assert conserved_drift(traj, "A") < 1e-9
    assert conserved_drift(traj, "H") < 1e-9


def test_magnetic_flow_conserves_shifted_generator() -> None:
    model = CurvedModel(SPHERE, 1.0, alpha=0.5, B0=0.3)
    traj = integrate(model, START, IntegratorConfig(1e-2, 1.0))
    assert set(traj.logs) == {"H", "J"}
    assert conserved_drift(traj, "J") < 1e-9
    assert conserved_drift(traj, "H") < 1e-9


def test_unknown_log() -> None:
    model = CurvedModel(SPHERE, 1.0, alpha=1.0)
    traj = integrate(model, START, IntegratorConfig(0.1, 0.2))
    with pytest.raises(UnknownLogError):
        conserved_drift(traj, "A")


def test_start_outside_domain() -> None:
    model = CurvedModel(PSEUDOSPHERE, 1.0, alpha=1.0)
    with pytest.raises(BoundaryError):
        integrate(model, PhasePoint(1.2 + 0j, 0j), IntegratorConfig(0.1, 1.0))


def test_domain_exit_keeps_partial_trajectory() -> None:
    """
    Test that a fast free particle running to the boundary of the disk
    stops with the samples integrated so far.
    """
    model = CurvedModel(PSEUDOSPHERE, 1.0, kind=SystemKind.FREE_PARTICLE)
    with pytest.raises(DomainExit) as info:
        integrate(model, PhasePoint(0.5 + 0j, 1000 + 0j), IntegratorConfig(1e-3, 1.0))
    partial = info.value.trajectory
    assert 1 <= len(partial) < 1001
    assert info.value.time == pytest.approx(partial.times[-1])
    assert np.all(np.abs(partial.states[:, 0]) < 1.0)


def test_drift_budget() -> None:
    model = CurvedModel(PSEUDOSPHERE, 1.0, alpha=1.0)
    cfg = IntegratorConfig(0.1, 5.0, Method.RK4, drift_budget=1e-12)
    with pytest.raises(DriftBudgetExceeded) as info:
        integrate(model, START, cfg)
    assert info.value.drift > 1e-12
    assert len(info.value.trajectory) < cfg.steps + 1


def test_time_reversal() -> None:
    model = CurvedModel(SPHERE, 1.2, alpha=0.8)
    cfg = IntegratorConfig(1e-2, 0.5)
    forward = integrate(model, START, cfg)
    end = forward.points[-1]
    back = integrate(model, time_reversed(end), cfg).points[-1]
    assert back.z == pytest.approx(START.z, abs=1e-9)
    assert back.pi == pytest.approx(-START.pi, abs=1e-9)


@pytest.mark.parametrize("eps", (SPHERE, PSEUDOSPHERE))
def test_circular_orbit(eps: CurvatureSign) -> None:
    model = CurvedModel(eps, 1.0, alpha=1.0)
    start = circular_orbit(model, 0.3)
    assert start.z == 0.3
    traj = integrate(model, start, IntegratorConfig(1e-2, 1.0))
    radii = np.abs(traj.states[:, 0] + 1j * traj.states[:, 1])
    assert np.max(np.abs(radii - 0.3)) < 1e-8


@pytest.mark.parametrize(
    "model",
    (
        CurvedModel(PSEUDOSPHERE, 1.0, kind=SystemKind.COULOMB, gamma=1.0),
        CurvedModel(SPHERE, 1.0, alpha=1.0, B0=0.5),
        CurvedModel(SPHERE, 1.0),
    ),
)
def test_no_circular_orbit(model: CurvedModel) -> None:
    with pytest.raises(CurvedDualityError):
        circular_orbit(model, 0.3)


@pytest.mark.parametrize(
    "model",
    (
        CurvedModel(SPHERE, 1.0, alpha=1.0),
        CurvedModel(PSEUDOSPHERE, 1.3, alpha=0.7),
        CurvedModel(SPHERE, 1.0, alpha=0.5, B0=0.3),
        CurvedModel(PSEUDOSPHERE, 1.0, kind=SystemKind.COULOMB, gamma=1.0),
    ),
)
def test_vector_field_is_tangent_to_energy_levels(model: CurvedModel) -> None:
    """
    Test dH(X_H) = 0 at random phase points.
    """
    H = model.hamiltonian()
    for pt in random_phase_points(np.random.default_rng(5), 50):
        grad = H.gradient(pt).real
        field = hamiltonian_vector_field(H, pt, model.form(pt))
        assert abs(grad @ field) <= 1e-12 * max(1.0, float(grad @ grad))


@pytest.mark.parametrize(
    "model",
    (
        CurvedModel(SPHERE, 1.0, alpha=1.0),
        CurvedModel(PSEUDOSPHERE, 2.0, alpha=0.5),
        CurvedModel(SPHERE, 1.0, alpha=1.0, B0=0.5),
    ),
)
def test_equilibrium_has_no_flow(model: CurvedModel) -> None:
    origin = PhasePoint(0j, 0j)
    field = hamiltonian_vector_field(model.hamiltonian(), origin, model.form(origin))
    assert np.allclose(field, 0.0, atol=1e-14)


def test_eighth_order_convergence() -> None:
    """
    Test that halving a large step divides the final error by about 2⁸.
    """
    model = CurvedModel(SPHERE, 1.0, alpha=1.0)

    def final_state(dt: float) -> np.ndarray:
        return integrate(model, START, IntegratorConfig(dt, 20.0)).states[-1]

    reference = final_state(0.0625)
    coarse = np.max(np.abs(final_state(0.5) - reference))
    fine = np.max(np.abs(final_state(0.25) - reference))
    assert coarse > 1e-12
    assert 2**7 < coarse / fine < 2**9.5
