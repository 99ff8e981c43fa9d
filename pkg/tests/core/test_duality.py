"""
Tests for curved_duality.core.duality.
"""
import numpy as np
import pytest

from curved_duality.core.duality import (
    FLAT_I,
    FlatCoulomb,
    FlatOscillator,
    Side,
    bohlin_inverse,
    bohlin_map,
    bohlin_params,
    canonicity_residual,
    conserved_map_check,
    coulomb_surface_residual,
    flat_deviation,
    flat_limit_ratios,
    flat_rescale,
    magnetic_image_field,
    magnetic_pullback_residual,
    surface_point,
    verify_bohlin_surface,
)
from curved_duality.core.dynamics import IntegratorConfig, all_drifts, integrate
from curved_duality.core.errors import (
    CurvedDualityError,
    DomainError,
    SingularityError,
)
from curved_duality.core.geometry import CurvatureSign
from curved_duality.core.systems import (
    Catalogue,
    CurvedModel,
    PhasePoint,
    SystemKind,
    hamiltonian_osc,
    poisson_bracket,
    random_phase_points,
    symplectic_form,
)

SPHERE = CurvatureSign.SPHERE
PSEUDOSPHERE = CurvatureSign.PSEUDOSPHERE


def test_bohlin_map() -> None:
    image = bohlin_map(PhasePoint(0.5j, 1 + 0j))
    assert image.z == pytest.approx(-0.25)
    assert image.pi == pytest.approx(-1j)


def test_bohlin_map_origin() -> None:
    with pytest.raises(SingularityError):
        bohlin_map(PhasePoint(0j, 1 + 0j))
    with pytest.raises(SingularityError):
        bohlin_inverse(PhasePoint(0j, 1 + 0j))


def test_bohlin_inverse_branches() -> None:
    image = PhasePoint(-0.25 + 0j, -1j)
    first = bohlin_inverse(image)
    second = bohlin_inverse(image, branch=1)
    assert first.z == pytest.approx(0.5j)
    assert first.pi == pytest.approx(1.0)
    assert second.z == pytest.approx(-0.5j)
    assert second.pi == pytest.approx(-1.0)
    with pytest.raises(CurvedDualityError):
        bohlin_inverse(image, branch=2)


def test_bohlin_inverse_inverts_on_upper_half_plane() -> None:
    pt = PhasePoint(0.3 + 0.4j, 0.7 - 0.1j)
    back = bohlin_inverse(bohlin_map(pt))
    assert back.z == pytest.approx(pt.z)
    assert back.pi == pytest.approx(pt.pi)


def test_bohlin_map_is_canonical() -> None:
    points = random_phase_points(np.random.default_rng(2), 30, radius=0.9)
    assert max(canonicity_residual(pt) for pt in points if abs(pt.z) > 0.05) < 1e-10


def test_bohlin_parameters() -> None:
    params = bohlin_params(3.0, CurvedModel(PSEUDOSPHERE, 2.0, alpha=1.0))
    assert params.r0 == pytest.approx(4.0)
    assert params.gamma == pytest.approx(1.5)
    assert params.E_C == pytest.approx(-0.125)
    assert params.coulomb_model(0.5).sigma == 0.5


def test_bohlin_parameters_need_oscillator() -> None:
    coulomb = CurvedModel(PSEUDOSPHERE, 1.0, kind=SystemKind.COULOMB, gamma=1.0)
    with pytest.raises(CurvedDualityError):
        bohlin_params(1.0, coulomb)


@pytest.mark.parametrize("eps", (SPHERE, PSEUDOSPHERE))
def test_surface_point_has_requested_energy(eps: CurvatureSign) -> None:
    model = CurvedModel(eps, 1.0, alpha=1.0)
    pt = surface_point(model, 0.3 + 0.2j, 1 + 1j, 2.0)
    assert hamiltonian_osc(pt, model) == pytest.approx(2.0)


def test_surface_point_below_potential() -> None:
    model = CurvedModel(SPHERE, 1.0, alpha=1.0)
    with pytest.raises(DomainError):
        surface_point(model, 0.8 + 0j, 1 + 0j, 0.1)


@pytest.mark.parametrize("eps", (SPHERE, PSEUDOSPHERE))
@pytest.mark.parametrize("energy", (0.5, 2.0, 5.0))
def test_image_lies_on_coulomb_surface(eps: CurvatureSign, energy: float) -> None:
    model = CurvedModel(eps, 1.1, alpha=0.9)
    pt = surface_point(model, 0.2 - 0.1j, 0.3 + 1j, energy)
    params = bohlin_params(energy, model)
    assert coulomb_surface_residual(bohlin_map(pt), params) < 1e-10


@pytest.mark.parametrize("eps", (SPHERE, PSEUDOSPHERE))
def test_conserved_quantities_map(eps: CurvatureSign) -> None:
    """
    Test that J = 2J_C everywhere and 𝐈 = 2𝐀 on the energy surface only.
    """
    model = CurvedModel(eps, 1.0, alpha=1.0)
    pt = surface_point(model, 0.3 + 0.2j, 1 + 1j, 2.0)
    j_residual, a_residual = conserved_map_check(pt, model, 2.0)
    assert j_residual < 1e-12
    assert a_residual < 1e-9
    _, off_shell = conserved_map_check(pt, model, 2.5)
    assert off_shell > 1e-3


@pytest.mark.parametrize("eps", (SPHERE, PSEUDOSPHERE))
def test_trajectory_maps_onto_coulomb_surface(eps: CurvatureSign) -> None:
    model = CurvedModel(eps, 1.0, alpha=1.0)
    start = surface_point(model, 0.3 + 0.1j, 0.2 - 0.4j, 1.5)
    traj = integrate(model, start, IntegratorConfig(1e-2, 1.0))
    assert verify_bohlin_surface(traj, model, 1.5) < 1e-7


def test_magnetic_image_field() -> None:
    assert magnetic_image_field(0.5 + 0j, 1.0, 1.0, 1) == pytest.approx(0.125)
    assert magnetic_image_field(0.5 + 0j, 1.0, 1.0, -1) == pytest.approx(1.125)
    with pytest.raises(SingularityError):
        magnetic_image_field(0j, 1.0, 1.0, 1)


@pytest.mark.parametrize("eps", (1, -1))
def test_magnetic_pullback(eps: int) -> None:
    rng = np.random.default_rng(4)
    for modulus, angle in zip(rng.uniform(0.1, 0.8, 50), rng.uniform(0, 6.28, 50)):
        z = complex(modulus * np.exp(1j * angle))
        assert magnetic_pullback_residual(z, 0.7, 1.3, eps) < 1e-12


def test_flat_rescale() -> None:
    pt = PhasePoint(2 + 0j, 1j)
    assert flat_rescale(pt, 5.0, Side.OSCILLATOR) == PhasePoint(0.2 + 0j, 10j)
    assert flat_rescale(pt, 5.0, Side.COULOMB) == PhasePoint(0.1 + 0j, 20j)


@pytest.mark.parametrize("side", (Side.OSCILLATOR, Side.COULOMB))
def test_flat_limit_scaling(side: Side) -> None:
    pt = PhasePoint(0.5 + 0.3j, 0.4 - 0.2j)
    ratios = flat_limit_ratios(pt, [10.0, 20.0, 40.0], side, 1.0)
    assert len(ratios) == 2
    assert all(3.0 <= ratio <= 5.0 for ratio in ratios)
    assert flat_deviation(pt, 40.0, side, 1.0) < 1e-3


def test_flat_cubic_algebra() -> None:
    pt = PhasePoint(0.4 - 0.3j, 0.2 + 0.6j)
    form = symplectic_form(pt, 1, 1.0, 0.0)
    inv = FLAT_I.bind(alpha=0.8)
    inv_bar = FLAT_I.conjugate().bind(alpha=0.8)
    j_value = Catalogue.J_COULOMB.bind()(pt).real
    assert poisson_bracket(inv_bar, inv, pt, form) == pytest.approx(
        4j * 0.8**2 * j_value
    )


def test_flat_systems_conserve_invariants() -> None:
    oscillator = integrate(
        FlatOscillator(0.8),
        PhasePoint(0.4 - 0.3j, 0.2 + 0.6j),
        IntegratorConfig(1e-2, 1.0),
    )
    assert max(all_drifts(oscillator).values()) < 1e-9
    coulomb = integrate(
        FlatCoulomb(1.0), PhasePoint(0.5 + 0j, -0.45j), IntegratorConfig(1e-3, 0.2)
    )
    assert set(coulomb.logs) == {"H", "J", "A"}
    assert max(all_drifts(coulomb).values()) < 1e-9
