"""
The Kustaanheimo-Stiefel reduction of the four-dimensional oscillator to
the three-dimensional Coulomb system with a monopole.

Upstairs the phase space is C² x C² with coordinates z = (z1, z2) and
π = (π1, π2) and the canonical bracket {π_a, z_b} = δ_ab.  The reduction
quotients by the U(1) action z → e^{iθ}z, π → e^{-iθ}π generated by
J = i(zπ - z̄π̄).
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence, Tuple

import numpy as np
import sympy as sp

from curved_duality.core.duality import bohlin_params
from curved_duality.core.errors import DomainError, SingularityError
from curved_duality.core.geometry import (
    BOUNDARY_MARGIN,
    Ambient3Point,
    stereo3_to_ambient,
)
from curved_duality.core.systems import CurvedModel

UP_Z = sp.symbols("z1 z2")
UP_ZB = sp.symbols("zb1 zb2")
UP_P = sp.symbols("p1 p2")
UP_PB = sp.symbols("pb1 pb2")
UPSTAIRS = UP_Z + UP_ZB + UP_P + UP_PB

# Reduced coordinates; reduced observables are expressions in these.
U = sp.symbols("u1 u2 u3", real=True)
Q = sp.symbols("q1 q2 q3", real=True)
REDUCED = U + Q

PAULI = (
    sp.Matrix([[0, 1], [1, 0]]),
    sp.Matrix([[0, -sp.I], [sp.I, 0]]),
    sp.Matrix([[1, 0], [0, -1]]),
)
PAULI_NUMERIC = tuple(np.array(m.tolist(), dtype=complex) for m in PAULI)

# Coefficient of (u x du) ∧ du / |u|³ (full index sum) in the reduced form.
MONOPOLE_COEFFICIENT = -0.5


@dataclass(frozen=True)
class ReducedPhasePoint:
    """
    A point of the reduced phase space.

    :param u: Stereographic coordinates of the three-dimensional
              pseudosphere, |u| < 1.
    :param p: Conjugate momenta.
    :param s: Monopole charge, half the U(1) generator.
    """

    u: np.ndarray
    p: np.ndarray
    s: float

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(self.u))

    def ambient(self, r0: float) -> Ambient3Point:
        """
        Return the point of the three-dimensional pseudosphere.

        :raise DomainError: If |u| >= 1.
        """
        return stereo3_to_ambient(self.u, r0)


def _bilinear(left: Sequence, matrix: sp.Matrix, right: Sequence) -> sp.Expr:
    return sum(
        left[a] * matrix[a, b] * right[b] for a in range(2) for b in range(2)
    )


def _upstairs_norm() -> sp.Expr:
    return UP_Z[0] * UP_ZB[0] + UP_Z[1] * UP_ZB[1]


def ks_coordinate_exprs() -> Tuple[sp.Expr, ...]:
    """
    Return u and p as expressions in the upstairs variables.
    """
    norm = _upstairs_norm()
    u = tuple(sp.expand(_bilinear(UP_Z, m, UP_ZB)) for m in PAULI)
    p = tuple(
        (_bilinear(UP_Z, m, UP_P) + _bilinear(UP_PB, m, UP_ZB)) / (2 * norm)
        for m in PAULI
    )
    return u + p


def u1_generator_expr() -> sp.Expr:
    return sp.I * sum(
        UP_Z[a] * UP_P[a] - UP_ZB[a] * UP_PB[a] for a in range(2)
    )


def _check_upstairs(z: np.ndarray) -> None:
    if np.linalg.norm(z) < BOUNDARY_MARGIN:
        raise SingularityError("z=0 has no Kustaanheimo-Stiefel image.")


def ks_map(z: Sequence[complex], pi: Sequence[complex]) -> ReducedPhasePoint:
    """
    Return u = zσz̄, p = (zσπ + π̄σz̄)/(2zz̄) and s = J/2.

    :raise SingularityError: If z is the zero vector.
    """
    zv = np.asarray(z, dtype=complex)
    pv = np.asarray(pi, dtype=complex)
    _check_upstairs(zv)
    norm = float(np.vdot(zv, zv).real)
    u = np.array([(zv @ m @ zv.conj()).real for m in PAULI_NUMERIC])
    p = np.array(
        [
            (zv @ m @ pv + pv.conj() @ m @ zv.conj()).real / (2.0 * norm)
            for m in PAULI_NUMERIC
        ]
    )
    generator = (1j * (zv @ pv - zv.conj() @ pv.conj())).real
    return ReducedPhasePoint(u, p, 0.5 * float(generator))


def _monopole_block(pt: ReducedPhasePoint) -> np.ndarray:
    radius = pt.radius
    if radius < BOUNDARY_MARGIN:
        raise SingularityError("u=0 carries the monopole.")
    levi = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        levi[i, j, k] = 1.0
        levi[j, i, k] = -1.0
    return pt.s * np.einsum("ijk,k->ij", levi, pt.u) / radius**3


def reduced_poisson_tensor(pt: ReducedPhasePoint) -> np.ndarray:
    """
    Return the Poisson tensor over (u, p) of the monopole structure:
    {u_i, p_j} = -δ_ij and {p_i, p_j} = s ε_ijk u_k/|u|³.

    :raise SingularityError: At u = 0.
    """
    tensor = np.zeros((6, 6))
    tensor[:3, 3:] = -np.eye(3)
    tensor[3:, :3] = np.eye(3)
    tensor[3:, 3:] = _monopole_block(pt)
    return tensor


def reduced_symplectic_matrix(pt: ReducedPhasePoint) -> np.ndarray:
    """
    Return the matrix of ω = dp∧du + MONOPOLE_COEFFICIENT·s(u×du)∧du/|u|³
    over (u, p); it inverts the negated Poisson tensor.

    :raise SingularityError: At u = 0.
    """
    omega = np.zeros((6, 6))
    omega[:3, :3] = 2.0 * MONOPOLE_COEFFICIENT * _monopole_block(pt)
    omega[:3, 3:] = -np.eye(3)
    omega[3:, :3] = np.eye(3)
    return omega


@lru_cache(maxsize=None)
def _upstairs_gradient(expr: sp.Expr) -> Callable:
    substitution = dict(zip(REDUCED, ks_coordinate_exprs()))
    composed = expr.xreplace(substitution)
    partials = [sp.diff(composed, var) for var in UPSTAIRS]
    return sp.lambdify(UPSTAIRS, partials, modules="numpy", cse=True)


@lru_cache(maxsize=None)
def _reduced_gradient(expr: sp.Expr) -> Callable:
    partials = [sp.diff(expr, var) for var in REDUCED]
    return sp.lambdify(REDUCED, partials, modules="numpy", cse=True)


@lru_cache(maxsize=None)
def _generator_gradient() -> Callable:
    partials = [sp.diff(u1_generator_expr(), var) for var in UPSTAIRS]
    return sp.lambdify(UPSTAIRS, partials, modules="numpy", cse=True)


def _upstairs_args(z: np.ndarray, pi: np.ndarray) -> Tuple[complex, ...]:
    return tuple(z) + tuple(z.conj()) + tuple(pi) + tuple(pi.conj())


def _canonical_bracket(grad_f: np.ndarray, grad_g: np.ndarray) -> complex:
    # Blocks of 2: z, z̄, π, π̄.
    f_z, f_zb, f_p, f_pb = np.split(np.asarray(grad_f, dtype=complex), 4)
    g_z, g_zb, g_p, g_pb = np.split(np.asarray(grad_g, dtype=complex), 4)
    return complex(f_p @ g_z - f_z @ g_p + f_pb @ g_zb - f_zb @ g_pb)


def upstairs_bracket(
    f: sp.Expr, g: sp.Expr, z: Sequence[complex], pi: Sequence[complex]
) -> complex:
    """
    Return the canonical bracket of two reduced observables pulled back by
    the Kustaanheimo-Stiefel map.
    """
    zv = np.asarray(z, dtype=complex)
    pv = np.asarray(pi, dtype=complex)
    _check_upstairs(zv)
    args = _upstairs_args(zv, pv)
    return _canonical_bracket(
        _upstairs_gradient(sp.sympify(f))(*args),
        _upstairs_gradient(sp.sympify(g))(*args),
    )


def reduced_bracket(f: sp.Expr, g: sp.Expr, pt: ReducedPhasePoint) -> float:
    """
    Return the bracket of two reduced observables in the monopole structure.
    """
    args = tuple(pt.u) + tuple(pt.p)
    grad_f = np.asarray(_reduced_gradient(sp.sympify(f))(*args), dtype=float)
    grad_g = np.asarray(_reduced_gradient(sp.sympify(g))(*args), dtype=float)
    return float(grad_f @ reduced_poisson_tensor(pt) @ grad_g)


def ks_bracket_check(
    f: sp.Expr, g: sp.Expr, z: Sequence[complex], pi: Sequence[complex]
) -> float:
    """
    Return |{f∘ks, g∘ks} - {f, g}_red ∘ ks| at an upstairs point.
    """
    upstairs = upstairs_bracket(f, g, z, pi)
    downstairs = reduced_bracket(f, g, ks_map(z, pi))
    return abs(upstairs - downstairs)


def casimir_residual(
    f: sp.Expr, z: Sequence[complex], pi: Sequence[complex]
) -> float:
    """
    Return |{J, f∘ks}|, which vanishes since reduced observables are U(1)
    invariant.
    """
    zv = np.asarray(z, dtype=complex)
    pv = np.asarray(pi, dtype=complex)
    _check_upstairs(zv)
    args = _upstairs_args(zv, pv)
    return abs(
        _canonical_bracket(
            _generator_gradient()(*args),
            _upstairs_gradient(sp.sympify(f))(*args),
        )
    )


def hamiltonian_4d(
    z: Sequence[complex], pi: Sequence[complex], model: CurvedModel
) -> float:
    """
    Return the oscillator Hamiltonian on the four-dimensional
    (pseudo)sphere, (1 + εzz̄)²ππ̄/(2R0²) + 2α²R0²zz̄/(1 - εzz̄)².
    """
    zv = np.asarray(z, dtype=complex)
    pv = np.asarray(pi, dtype=complex)
    norm = float(np.vdot(zv, zv).real)
    momentum = float(np.vdot(pv, pv).real)
    den = 1.0 - model.eps * norm
    if abs(den) < BOUNDARY_MARGIN or 1.0 + model.eps * norm <= BOUNDARY_MARGIN:
        raise DomainError(f"zz̄={norm} is at a pole of the oscillator.")
    kinetic = (1.0 + model.eps * norm) ** 2 * momentum / (2.0 * model.R0**2)
    return kinetic + 2.0 * model.alpha**2 * model.R0**2 * norm / den**2


def ks_surface_point(
    z: Sequence[complex],
    direction: Sequence[complex],
    model: CurvedModel,
    E: float,
) -> np.ndarray:
    """
    Return π along the given direction with the upstairs point on the
    energy-E surface.
    """
    zv = np.asarray(z, dtype=complex)
    dv = np.asarray(direction, dtype=complex)
    potential = hamiltonian_4d(zv, np.zeros(2, dtype=complex), model)
    if potential > E:
        raise DomainError(f"E={E} is below the potential {potential}.")
    norm = float(np.vdot(zv, zv).real)
    kinetic = (1.0 + model.eps * norm) ** 2 / (2.0 * model.R0**2)
    modulus = np.sqrt((E - potential) / kinetic)
    return modulus * dv / np.linalg.norm(dv)


def ks_energy_surface_residual(
    z: Sequence[complex], pi: Sequence[complex], model: CurvedModel, E: float
) -> float:
    """
    Return the residual of the reduced Coulomb energy surface
    (1 - u²)²(p² + s²/u²)/(8r0²) - (γ/r0)(1 + u²)/(2|u|) - E_C
    at the image of an upstairs point.

    :raise SingularityError: At u = 0.
    """
    reduced = ks_map(z, pi)
    params = bohlin_params(E, model)
    radius = reduced.radius
    if radius < BOUNDARY_MARGIN:
        raise SingularityError("u=0 is the Coulomb centre.")
    momentum = float(reduced.p @ reduced.p) + reduced.s**2 / radius**2
    kinetic = (1.0 - radius**2) ** 2 * momentum / (8.0 * params.r0**2)
    potential = params.gamma / params.r0 * (1.0 + radius**2) / (2.0 * radius)
    return abs(kinetic - potential - params.E_C)
