"""
The Bohlin transformation between the oscillator and the Coulomb system,
the parameter dictionary, the image of a constant magnetic field and the
flat limit.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Tuple

import numpy as np
import sympy as sp

from curved_duality.core.dynamics import Trajectory
from curved_duality.core.errors import (
    CurvedDualityError,
    DomainError,
    SingularityError,
)
from curved_duality.core.geometry import (
    BOUNDARY_MARGIN,
    CurvatureSign,
    check_operative,
    metric_factor,
)
from curved_duality.core.systems import (
    ALPHA,
    GAMMA,
    P,
    PB,
    Z,
    ZB,
    BoundObservable,
    Catalogue,
    CoulombModel,
    CurvedModel,
    Observable,
    PhasePoint,
    SymplecticForm,
    SystemKind,
    hamiltonian_coulomb,
    hamiltonian_osc,
    hidden_invariant,
    runge_lenz,
    symplectic_form,
)

# The map as observables, used for its Jacobian.
BOHLIN_W = Observable("w", Z**2)
BOHLIN_P = Observable("p", P / (2 * Z))


@dataclass(frozen=True)
class BohlinParams:
    """
    The Coulomb parameters of an oscillator energy surface.

    :param r0: The pseudosphere "radius", R0².
    :param gamma: The Coulomb coupling, E/2.
    :param E_C: The Coulomb energy.
    """

    r0: float
    gamma: float
    E_C: float

    def coulomb_model(self, sigma: float = 0.0) -> CoulombModel:
        return CoulombModel(self.r0, self.gamma, sigma)


def _check_nonzero(value: complex, what: str) -> None:
    if abs(value) < BOUNDARY_MARGIN:
        raise SingularityError(f"{what}=0 is singular for the Bohlin map.")


def bohlin_map(pt: PhasePoint) -> PhasePoint:
    """
    Return (w, p) = (z², π/(2z)).

    :raise SingularityError: At z = 0.
    """
    _check_nonzero(pt.z, "z")
    return PhasePoint(pt.z**2, pt.pi / (2.0 * pt.z))


def bohlin_inverse(pt: PhasePoint, branch: int = 0) -> PhasePoint:
    """
    Return (z, π) with z² = w on the given sheet and π = 2zp.

    Branch 0 takes arg w in [0, 2π) to arg z in [0, π); branch 1 negates
    z and π.

    :raise SingularityError: At w = 0.
    """
    if branch not in (0, 1):
        raise CurvedDualityError(f"branch must be 0 or 1, got {branch}.")
    _check_nonzero(pt.z, "w")
    arg = float(np.mod(np.angle(pt.z), 2.0 * np.pi))
    z = np.sqrt(abs(pt.z)) * np.exp(0.5j * arg)
    if branch == 1:
        z = -z
    return PhasePoint(complex(z), complex(2.0 * z * pt.pi))


def bohlin_jacobian(pt: PhasePoint) -> np.ndarray:
    """
    Return the real Jacobian of the Bohlin map over (x, y, px, py).
    """
    _check_nonzero(pt.z, "z")
    grad_w = BOHLIN_W.bind().gradient(pt)
    grad_p = BOHLIN_P.bind().gradient(pt)
    return np.array(
        [grad_w.real, grad_w.imag, 2.0 * grad_p.real, -2.0 * grad_p.imag]
    )


def canonicity_residual(pt: PhasePoint) -> float:
    """
    Return max |JᵀΩJ - Ω| for the Jacobian J of the Bohlin map.
    """
    omega = symplectic_form(pt, CurvatureSign.SPHERE, 1.0, 0.0).matrix
    jac = bohlin_jacobian(pt)
    return float(np.max(np.abs(jac.T @ omega @ jac - omega)))


def bohlin_params(E: float, model: CurvedModel) -> BohlinParams:
    """
    Return r0 = R0², γ = E/2 and E_C = -(α² + εE/r0)/2.
    """
    if model.kind is SystemKind.COULOMB:
        raise CurvedDualityError("The Bohlin parameters need an oscillator.")
    r0 = model.R0**2
    return BohlinParams(
        r0=r0,
        gamma=E / 2.0,
        E_C=-(model.alpha**2 + model.eps * E / r0) / 2.0,
    )


def coulomb_surface_residual(image: PhasePoint, params: BohlinParams) -> float:
    """
    Return |H_C(w, p) - E_C| for the Coulomb system with the given
    parameters.
    """
    return abs(hamiltonian_coulomb(image, params.coulomb_model()) - params.E_C)


def verify_bohlin_surface(
    traj: Trajectory, model: CurvedModel, E: float
) -> float:
    """
    Map every sample of an oscillator trajectory and return the largest
    residual of the Coulomb energy surface.

    :raise SingularityError: If a sample sits at z = 0.
    """
    params = bohlin_params(E, model)
    return max(
        coulomb_surface_residual(bohlin_map(pt), params) for pt in traj.points
    )


def conserved_map_check(
    pt: PhasePoint, model: CurvedModel, E: float
) -> Tuple[float, float]:
    """
    Return |J - 2J_C| and |𝐈 - 2𝐀| at a point and its Bohlin image.

    The first one vanishes identically, the second only on the energy-E
    surface.
    """
    _check_nonzero(pt.z, "z")
    params = bohlin_params(E, model)
    coulomb = params.coulomb_model()
    image = bohlin_map(pt)
    j_osc = Catalogue.J.bind(**model.parameters())(pt).real
    j_coulomb = Catalogue.J_COULOMB.bind(**coulomb.parameters())(image).real
    invariant = hidden_invariant(pt, model)
    vector = runge_lenz(image, coulomb)
    return abs(j_osc - 2.0 * j_coulomb), abs(invariant - 2.0 * vector)


def surface_point(
    model: CurvedModel, z: complex, direction: complex, E: float
) -> PhasePoint:
    """
    Return the point (z, π) with π along the given direction on the
    energy-E surface of the oscillator.

    :raise DomainError: If the potential at z exceeds E.
    """
    check_operative(z, model.eps)
    potential = hamiltonian_osc(PhasePoint(z, 0j), model)
    if potential > E:
        raise DomainError(f"E={E} is below the potential {potential} at z={z}.")
    kinetic = (1.0 + model.eps * abs(z) ** 2) ** 2 / (2.0 * model.R0**2)
    modulus = np.sqrt((E - potential) / kinetic)
    return PhasePoint(z, complex(modulus * direction / abs(direction)))


def magnetic_image_field(
    w: complex, B0: float, r0: float, eps_src: int
) -> float:
    """
    Return the field B_C = (B0/(2r0))((1 + |w|²)/(2|w|) - ε) felt by the
    Coulomb system when the oscillator moves in the constant field B0.

    :raise SingularityError: At w = 0.
    """
    _check_nonzero(w, "w")
    check_operative(w, CurvatureSign.PSEUDOSPHERE)
    modulus = abs(w)
    return B0 / (2.0 * r0) * ((1.0 + modulus**2) / (2.0 * modulus) - eps_src)


def magnetic_pullback_residual(
    z: complex, B0: float, R0: float, eps_src: int
) -> float:
    """
    Return the difference between the source magnetic two-form 2B0λ(z)
    and the pullback of 2B_Cλ_C(w) under w = z², relative to the source.
    """
    _check_nonzero(z, "z")
    r0 = R0**2
    w = z**2
    image = 2.0 * magnetic_image_field(w, B0, r0, eps_src) * metric_factor(
        w, r0, CurvatureSign.PSEUDOSPHERE
    )
    derivative = 2.0 * z
    jacobian = np.array(
        [[derivative.real, -derivative.imag], [derivative.imag, derivative.real]]
    )
    pulled = image * float(np.linalg.det(jacobian))
    source = 2.0 * B0 * metric_factor(z, R0, eps_src)
    return abs(pulled - source) / max(1.0, abs(source))


# Flat sector.


class Side(Enum):
    """
    The two sides of the duality.
    """

    OSCILLATOR = "oscillator"
    COULOMB = "coulomb"


def flat_rescale(pt: PhasePoint, R0: float, side: Side) -> PhasePoint:
    """
    Return the curved point of a flat one: (z/(2R0), 2R0π) on the
    oscillator side and (w/(4r0), 4r0p) on the Coulomb side, where R0 is
    then r0.
    """
    scale = 2.0 * R0 if side is Side.OSCILLATOR else 4.0 * R0
    return PhasePoint(pt.z / scale, pt.pi * scale)


FLAT_H_OSC = Observable("H", 2 * P * PB + ALPHA**2 * Z * ZB / 2, real=True)
FLAT_I = Observable("I", 2 * P**2 + ALPHA**2 * ZB**2 / 2)
FLAT_H_COULOMB = Observable(
    "H", 8 * P * PB - 2 * GAMMA / sp.sqrt(Z * ZB), real=True
)
FLAT_A = Observable(
    "A",
    -4 * sp.I * P * Catalogue.J_COULOMB.expr + GAMMA * ZB / sp.sqrt(Z * ZB),
)


@dataclass(frozen=True)
class FlatOscillator:
    """
    The circular oscillator of the plane.
    """

    alpha: float

    def parameters(self) -> Dict[str, float]:
        """
        Return the values of the flat catalogue symbols.
        """
        return {"alpha": self.alpha}

    def check_point(self, pt: PhasePoint) -> None:
        """
        :raise DomainError: If the position is not finite.
        """
        if not np.isfinite(pt.z):
            raise DomainError("Non-finite position.")

    def hamiltonian(self) -> BoundObservable:
        return FLAT_H_OSC.bind(**self.parameters())

    def invariants(self) -> Dict[str, BoundObservable]:
        return {
            "H": self.hamiltonian(),
            "J": Catalogue.J_COULOMB.bind(),
            "I": FLAT_I.bind(**self.parameters()),
        }

    def form(self, pt: PhasePoint) -> SymplecticForm:
        return symplectic_form(pt, CurvatureSign.SPHERE, 1.0, 0.0)


@dataclass(frozen=True)
class FlatCoulomb:
    """
    The planar Coulomb system 8pp̄ - 2γ/|w|, with γ = E/2 for the image
    of an oscillator at energy E.
    """

    gamma: float

    def parameters(self) -> Dict[str, float]:
        """
        Return the values of the flat catalogue symbols.
        """
        return {"gamma": self.gamma}

    def check_point(self, pt: PhasePoint) -> None:
        """
        :raise SingularityError: At the Coulomb centre.
        """
        if abs(pt.z) < BOUNDARY_MARGIN:
            raise SingularityError("w=0 is the Coulomb centre.")

    def hamiltonian(self) -> BoundObservable:
        return FLAT_H_COULOMB.bind(**self.parameters())

    def invariants(self) -> Dict[str, BoundObservable]:
        return {
            "H": self.hamiltonian(),
            "J": Catalogue.J_COULOMB.bind(),
            "A": FLAT_A.bind(**self.parameters()),
        }

    def form(self, pt: PhasePoint) -> SymplecticForm:
        return symplectic_form(pt, CurvatureSign.SPHERE, 1.0, 0.0)


def flat_deviation(
    pt: PhasePoint, R0: float, side: Side, coupling: float, eps: int = -1
) -> float:
    """
    Return the relative deviation of the curved Hamiltonian at the rescaled
    point from the flat one at the original point.

    :param coupling: α on the oscillator side, γ on the Coulomb side.
    :param eps: Curvature sign of the oscillator side.
    """
    curved_pt = flat_rescale(pt, R0, side)
    if side is Side.OSCILLATOR:
        model = CurvedModel(CurvatureSign.parse(eps), R0, alpha=coupling)
        curved = hamiltonian_osc(curved_pt, model)
        flat = FlatOscillator(coupling).hamiltonian()(pt).real
    else:
        coulomb = CoulombModel(R0, coupling)
        curved = hamiltonian_coulomb(curved_pt, coulomb)
        flat = FlatCoulomb(coupling).hamiltonian()(pt).real
    return abs(curved - flat) / max(1.0, abs(flat))


def flat_limit_ratios(
    pt: PhasePoint,
    radii: Iterable[float],
    side: Side,
    coupling: float,
) -> List[float]:
    """
    Return the ratios of successive flat-limit deviations along the radii.

    Deviations scale as 1/R0², so doubling radii give ratios near 4.
    """
    deviations = [flat_deviation(pt, R0, side, coupling) for R0 in radii]
    return [
        previous / current
        for previous, current in zip(deviations, deviations[1:])
    ]
