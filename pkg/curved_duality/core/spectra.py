"""
Closed-form spectra of the quantum oscillator and Coulomb systems and the
map between them.

Half-integer quantum numbers are carried as doubled integers.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from curved_duality.core.errors import (
    NoBoundStateError,
    OutsideCoulombSpectrumError,
)
from curved_duality.core.geometry import CurvatureSign

# Near-integers are snapped before taking the integer part.
FLOOR_SNAP = 1e-12


def snapped_floor(value: float) -> int:
    """
    Return the integer part of value, snapping values within FLOOR_SNAP of
    an integer onto it first.
    """
    nearest = round(value)
    if abs(value - nearest) <= FLOOR_SNAP:
        return int(nearest)
    return math.floor(value)


@dataclass(frozen=True)
class SpectrumLine:
    """
    One oscillator state.

    :param N: Principal quantum number, N = 2n_r + |M|.
    :param M: Angular quantum number.
    :param n_r: Radial quantum number.
    :param E: Energy.
    :param multiplicity: Number of states enumerated for this N.
    """

    N: int
    M: int
    n_r: int
    E: float
    multiplicity: int


@dataclass(frozen=True)
class CoulombLine:
    """
    One Coulomb state, with N_σ = n_r + m_σ.

    :param doubled_n_sigma: 2N_σ.
    :param doubled_m_sigma: 2m_σ.
    :param n_r: Radial quantum number.
    :param doubled_sigma: 2σ, 0 or 1.
    :param E_C: Energy.
    """

    doubled_n_sigma: int
    doubled_m_sigma: int
    n_r: int
    doubled_sigma: int
    E_C: float

    @property
    def n_sigma(self) -> Fraction:
        return Fraction(self.doubled_n_sigma, 2)

    @property
    def m_sigma(self) -> Fraction:
        return Fraction(self.doubled_m_sigma, 2)

    @property
    def sigma(self) -> Fraction:
        return Fraction(self.doubled_sigma, 2)


def doubled(value: float) -> int:
    """
    Return 2·value for an integer or half-integer value.

    :raise ValueError: If value is not on the half-integer grid.
    """
    twice = 2 * Fraction(value).limit_denominator(2)
    if twice.denominator != 1 or abs(float(twice) - 2 * value) > FLOOR_SNAP:
        raise ValueError(f"{value} is not an integer or a half-integer.")
    return int(twice)


def alpha_tilde(alpha: float, R0: float) -> float:
    """
    Return √(α² + 1/(4R0⁴)).
    """
    return math.sqrt(alpha**2 + 1.0 / (4.0 * R0**4))


def oscillator_nmax(alpha: float, R0: float, eps: int) -> Optional[int]:
    """
    Return [2ᾶR0²] - 1 on the pseudosphere, None (no limit) on the sphere.
    """
    if eps == CurvatureSign.SPHERE:
        return None
    return snapped_floor(2.0 * alpha_tilde(alpha, R0) * R0**2) - 1


def oscillator_bound_nmax(alpha: float, R0: float, eps: int) -> Optional[int]:
    """
    Return the largest N whose state is normalizable, N + 1 < ᾶR0², on the
    pseudosphere, None on the sphere; -1 if there is none.

    Levels between this and oscillator_nmax solve the radial equation but
    not square-integrably.
    """
    if eps == CurvatureSign.SPHERE:
        return None
    bound = alpha_tilde(alpha, R0) * R0**2
    top = snapped_floor(bound) - 1
    if top + 1 >= bound - FLOOR_SNAP:
        top -= 1
    return top


def oscillator_level(
    alpha: float, R0: float, eps: int, N: int, strict: bool = True
) -> float:
    """
    Return E = ᾶ(N + 1) + ε(N + 1)²/(2R0²).

    :param strict: Reject N beyond oscillator_nmax on the pseudosphere.
    :raise NoBoundStateError: If N is negative or beyond the cutoff.
    """
    if N < 0:
        raise NoBoundStateError(f"N must be non-negative, got {N}.")
    nmax = oscillator_nmax(alpha, R0, eps)
    if strict and nmax is not None and N > nmax:
        raise NoBoundStateError(f"N={N} exceeds N_max={nmax}.")
    return alpha_tilde(alpha, R0) * (N + 1) + eps * (N + 1) ** 2 / (
        2.0 * R0**2
    )


def oscillator_enumerate(
    alpha: float, R0: float, eps: int, N: int
) -> List[SpectrumLine]:
    """
    Return all the states (n_r, M) with N = 2n_r + |M|.
    """
    energy = oscillator_level(alpha, R0, eps, N)
    pairs = [
        (n_r, sign * (N - 2 * n_r))
        for n_r in range(N // 2 + 1)
        for sign in ((1,) if N == 2 * n_r else (1, -1))
    ]
    return [
        SpectrumLine(N=N, M=M, n_r=n_r, E=energy, multiplicity=len(pairs))
        for n_r, M in pairs
    ]


def coulomb_nsigma_max(gamma: float, r0: float, sigma: float) -> Fraction:
    """
    Return N_σ^max = σ + [√(r0γ) - (1/2 + σ)].

    A value below σ means there is no bound state.

    :raise NoBoundStateError: If r0γ <= 0.
    """
    if r0 * gamma <= 0:
        raise NoBoundStateError(f"r0*gamma={r0 * gamma} admits no bound state.")
    bracket = snapped_floor(math.sqrt(r0 * gamma) - (0.5 + sigma))
    return Fraction(doubled(sigma) + 2 * bracket, 2)


def coulomb_count(gamma: float, r0: float, sigma: float) -> int:
    """
    Return the number of bound levels N_σ in σ, σ+1, ..., N_σ^max.
    """
    if r0 * gamma <= 0:
        return 0
    top = coulomb_nsigma_max(gamma, r0, sigma)
    return max(0, int(top - Fraction(doubled(sigma), 2)) + 1)


def coulomb_energy(gamma: float, r0: float, n_sigma: float) -> float:
    """
    Return -N_σ(N_σ + 1)/(2r0²) - γ²/(2(N_σ + 1/2)²), with no cutoff.
    """
    return -n_sigma * (n_sigma + 1) / (2.0 * r0**2) - gamma**2 / (
        2.0 * (n_sigma + 0.5) ** 2
    )


def coulomb_level(gamma: float, r0: float, sigma: float, n_sigma: float) -> float:
    """
    Return the Coulomb energy of level N_σ.

    :raise NoBoundStateError: If N_σ is off the σ grid or beyond N_σ^max.
    """
    offset = doubled(n_sigma) - doubled(sigma)
    if offset < 0 or offset % 2:
        raise NoBoundStateError(f"N_sigma={n_sigma} is not on the sigma={sigma} grid.")
    if Fraction(doubled(n_sigma), 2) > coulomb_nsigma_max(gamma, r0, sigma):
        raise NoBoundStateError(
            f"N_sigma={n_sigma} exceeds {coulomb_nsigma_max(gamma, r0, sigma)}."
        )
    return coulomb_energy(gamma, r0, n_sigma)


def coulomb_enumerate(gamma: float, r0: float, sigma: float) -> List[CoulombLine]:
    """
    Return all the bound states, ordered by N_σ and then by m_σ.
    """
    lines: List[CoulombLine] = []
    twice_sigma = doubled(sigma)
    for k in range(coulomb_count(gamma, r0, sigma)):
        twice_n = twice_sigma + 2 * k
        energy = coulomb_energy(gamma, r0, twice_n / 2)
        for n_r in range(k, -1, -1):
            lines.append(
                CoulombLine(
                    doubled_n_sigma=twice_n,
                    doubled_m_sigma=twice_n - 2 * n_r,
                    n_r=n_r,
                    doubled_sigma=twice_sigma,
                    E_C=energy,
                )
            )
    return lines


@dataclass(frozen=True)
class SpectralCheck:
    """
    The comparison of an oscillator level with its Coulomb image.

    :param residual: The larger of the level mismatch and the square-root
                     identity mismatch.
    :param within_cutoff: Whether N_σ is a bound Coulomb level.
    """

    N: int
    E: float
    gamma: float
    r0: float
    E_C: float
    doubled_sigma: int
    doubled_n_sigma: int
    residual: float
    within_cutoff: bool


def spectral_duality_check(
    alpha: float, R0: float, eps: int, N: int, strict: bool = True
) -> SpectralCheck:
    """
    Map the oscillator level N to the Coulomb side and compare with the
    Coulomb spectrum.

    σ = (N mod 2)/2 and N_σ = N/2.  Also checks
    √(1/(4r0²) - 2εγ/r0 - 2E_C) = 2γ/(N + 1) - ε(N + 1)/(2r0).

    :param strict: Raise when the image lies beyond the bound Coulomb
                   spectrum; with False the level comes back with
                   within_cutoff=False and the caller reports the
                   exclusion.
    :raise OutsideCoulombSpectrumError: If strict and the image is not bound.
    """
    energy = oscillator_level(alpha, R0, eps, N)
    r0 = R0**2
    gamma = energy / 2.0
    e_coulomb = -(alpha**2 + eps * energy / r0) / 2.0
    doubled_sigma = N % 2
    n_sigma = N / 2.0

    level_residual = abs(e_coulomb - coulomb_energy(gamma, r0, n_sigma))
    rhs = 2.0 * gamma / (N + 1) - eps * (N + 1) / (2.0 * r0)
    lhs_square = 1.0 / (4.0 * r0**2) - 2.0 * eps * gamma / r0 - 2.0 * e_coulomb
    identity_residual = abs(math.sqrt(max(lhs_square, 0.0)) - rhs)

    within = rhs >= 0 and (
        r0 * gamma > 0
        and Fraction(N, 2) <= coulomb_nsigma_max(gamma, r0, doubled_sigma / 2)
    )
    if strict and not within:
        raise OutsideCoulombSpectrumError(
            f"N={N} maps to N_sigma={n_sigma}, beyond the bound Coulomb levels."
        )
    return SpectralCheck(
        N=N,
        E=energy,
        gamma=gamma,
        r0=r0,
        E_C=e_coulomb,
        doubled_sigma=doubled_sigma,
        doubled_n_sigma=N,
        residual=max(level_residual, identity_residual),
        within_cutoff=within,
    )
