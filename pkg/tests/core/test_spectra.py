"""
Tests for curved_duality.core.spectra.
"""
from fractions import Fraction

import numpy as np
import pytest

from curved_duality.core.errors import (
    NoBoundStateError,
    OutsideCoulombSpectrumError,
)
from curved_duality.core.spectra import (
    alpha_tilde,
    coulomb_count,
    coulomb_energy,
    coulomb_enumerate,
    coulomb_level,
    coulomb_nsigma_max,
    doubled,
    oscillator_bound_nmax,
    oscillator_enumerate,
    oscillator_level,
    oscillator_nmax,
    snapped_floor,
    spectral_duality_check,
)


@pytest.mark.parametrize(
    "value,expected",
    ((2.5, 2), (3.0, 3), (2.9999999999999996, 3), (-0.5, -1), (-1e-15, 0)),
)
def test_snapped_floor(value: float, expected: int) -> None:
    assert snapped_floor(value) == expected


@pytest.mark.parametrize("value,expected", ((0, 0), (1.5, 3), (0.5, 1), (4, 8)))
def test_doubled(value: float, expected: int) -> None:
    assert doubled(value) == expected


def test_doubled_rejects_other_fractions() -> None:
    with pytest.raises(ValueError):
        doubled(0.3)


def test_alpha_tilde() -> None:
    assert alpha_tilde(1.0, 1.0) == pytest.approx(np.sqrt(1.25))
    assert alpha_tilde(0.0, 2.0) == pytest.approx(1.0 / 8.0)


@pytest.mark.parametrize(
    "N,expected", ((0, 0.6180340), (1, 0.2360680))
)
def test_pseudosphere_levels(N: int, expected: float) -> None:
    assert oscillator_level(1.0, 1.0, -1, N) == pytest.approx(expected, abs=1e-7)


def test_sphere_levels() -> None:
    assert oscillator_level(1.0, 1.0, 1, 0) == pytest.approx(np.sqrt(1.25) + 0.5)
    assert oscillator_level(1.0, 1.0, 1, 40) > oscillator_level(1.0, 1.0, 1, 39)


def test_level_cutoff() -> None:
    assert oscillator_nmax(1.0, 1.0, -1) == 1
    assert oscillator_nmax(1.0, 1.0, 1) is None
    with pytest.raises(NoBoundStateError):
        oscillator_level(1.0, 1.0, -1, 2)
    with pytest.raises(NoBoundStateError):
        oscillator_level(1.0, 1.0, 1, -1)
    assert oscillator_level(1.0, 1.0, -1, 2, strict=False) == pytest.approx(
        3 * np.sqrt(1.25) - 4.5
    )


@pytest.mark.parametrize(
    "alpha,R0,expected",
    ((1.0, 1.0, 0), (np.sqrt(3.75), 1.0, 0), (0.0, 1.0, -1), (2.0, 2.0, 7)),
)
def test_normalizable_cutoff(alpha: float, R0: float, expected: int) -> None:
    """
    Test the largest N with N + 1 < ᾶR0², an integer bound excluded.
    """
    assert oscillator_bound_nmax(alpha, R0, -1) == expected
    assert oscillator_bound_nmax(alpha, R0, 1) is None


@pytest.mark.parametrize("N", (0, 1, 2, 3, 6))
def test_degeneracy(N: int) -> None:
    lines = oscillator_enumerate(2.0, 3.0, -1, N)
    assert len(lines) == N + 1
    assert all(line.multiplicity == N + 1 for line in lines)
    assert all(2 * line.n_r + abs(line.M) == N for line in lines)
    assert len({(line.n_r, line.M) for line in lines}) == N + 1


@pytest.mark.parametrize(
    "gamma,r0,sigma,expected",
    (
        (10.0, 1.0, 0.0, Fraction(2)),
        (10.0, 1.0, 0.5, Fraction(5, 2)),
        (0.01, 1.0, 0.0, Fraction(-1)),
        (4.0, 1.0, 0.0, Fraction(1)),
    ),
)
def test_coulomb_cutoff(
    gamma: float, r0: float, sigma: float, expected: Fraction
) -> None:
    assert coulomb_nsigma_max(gamma, r0, sigma) == expected


def test_coulomb_cutoff_needs_attraction() -> None:
    with pytest.raises(NoBoundStateError):
        coulomb_nsigma_max(-1.0, 1.0, 0.0)
    assert coulomb_count(-1.0, 1.0, 0.0) == 0


@pytest.mark.parametrize(
    "gamma,sigma,expected",
    ((10.0, 0.0, 3), (10.0, 0.5, 3), (0.01, 0.0, 0), (0.01, 0.5, 0)),
)
def test_coulomb_count(gamma: float, sigma: float, expected: int) -> None:
    assert coulomb_count(gamma, 1.0, sigma) == expected


def test_coulomb_levels() -> None:
    assert coulomb_level(10.0, 1.0, 0.0, 0) == pytest.approx(-200.0)
    assert coulomb_level(10.0, 1.0, 0.0, 1) == pytest.approx(-1.0 - 100.0 / 4.5)
    assert coulomb_level(10.0, 1.0, 0.5, 0.5) == pytest.approx(-50.375)
    with pytest.raises(NoBoundStateError):
        coulomb_level(10.0, 1.0, 0.0, 3)
    with pytest.raises(NoBoundStateError):
        coulomb_level(10.0, 1.0, 0.0, 0.5)


def test_coulomb_enumeration() -> None:
    lines = coulomb_enumerate(10.0, 1.0, 0.5)
    assert len(lines) == 6
    assert [line.n_sigma for line in lines[:3]] == [
        Fraction(1, 2),
        Fraction(3, 2),
        Fraction(3, 2),
    ]
    assert [line.m_sigma for line in lines[1:3]] == [Fraction(1, 2), Fraction(3, 2)]
    assert all(line.sigma == Fraction(1, 2) for line in lines)
    assert all(line.n_r + line.m_sigma == line.n_sigma for line in lines)
    assert coulomb_enumerate(0.01, 1.0, 0.0) == []


def test_vortex_shifts_the_levels() -> None:
    """
    Test that the σ = 1/2 levels interleave with the σ = 0 ones.
    """
    plain = sorted({line.E_C for line in coulomb_enumerate(10.0, 1.0, 0.0)})
    shifted = sorted({line.E_C for line in coulomb_enumerate(10.0, 1.0, 0.5)})
    merged = sorted(plain + shifted)
    assert merged[0::2] == plain
    assert merged[1::2] == shifted
    assert min(abs(a - b) for a in plain for b in shifted) > 1e-6


@pytest.mark.parametrize("eps", (1, -1))
def test_spectral_dictionary(eps: int) -> None:
    """
    Test that oscillator levels map onto the Coulomb levels at 20 seeded
    parameter pairs; even N to σ = 0, odd N to σ = 1/2.
    """
    rng = np.random.default_rng(0)
    for alpha, R0 in zip(rng.uniform(0.1, 3.0, 20), rng.uniform(0.5, 3.0, 20)):
        top = oscillator_nmax(alpha, R0, eps)
        bound = oscillator_bound_nmax(alpha, R0, eps)
        for N in range(8 if top is None else top + 1):
            check = spectral_duality_check(alpha, R0, eps, N, strict=False)
            assert check.residual < 1e-10
            assert check.doubled_sigma == N % 2
            assert check.doubled_n_sigma == N
            if eps == 1:
                assert check.within_cutoff
            else:
                assert check.within_cutoff == (N <= bound)


def test_image_beyond_coulomb_spectrum() -> None:
    """
    Test that a level beyond the bound Coulomb spectrum is signalled unless
    the caller asks for the flag instead.
    """
    with pytest.raises(OutsideCoulombSpectrumError):
        spectral_duality_check(1.0, 1.0, -1, 1)
    assert not spectral_duality_check(1.0, 1.0, -1, 1, strict=False).within_cutoff
    assert spectral_duality_check(1.0, 1.0, -1, 0).within_cutoff


def test_coulomb_energy_has_no_cutoff() -> None:
    assert coulomb_energy(0.01, 1.0, 3) == pytest.approx(-6.0 - 0.0001 / 24.5)
