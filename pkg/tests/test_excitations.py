"""Radial-excitation machinery: orthonormality of the oscillator levels,
the diagonal power corrections q_n / t_n and their Mellin link, the closed
normal-ordered matrix elements, and the excited-level solver."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import eval_genlaguerre

from oscrep.core import normal_order_power
from oscrep.coulomb_power import solve_ground
from oscrep.escp import solve_escp
from oscrep.excitations import (
    e0_excitation,
    norm_const,
    power_matrix_elements,
    q_n,
    solve_excited,
    t_n,
)
from oscrep.model import CoulombPower, Escp, QuantumState
from oscrep.numerics import gauss_laguerre
from oscrep.oracle import OscillatorBasisState, basis_expectation


def _level(n: int, d: float, t: np.ndarray) -> np.ndarray:
    """Weight-normalized radial level: Gram-orthonormal under
    t^(d/2-1) e^(-t) / Gamma(d/2)."""
    return (norm_const(n, d) * 2.0 ** n * math.factorial(n)
            * eval_genlaguerre(n, d / 2.0 - 1.0, t))


def test_norm_const_reference_points():
    assert norm_const(0, 3.0) == pytest.approx(1.0, rel=1e-14)
    assert norm_const(1, 3.0) == pytest.approx(1.0 / math.sqrt(6.0), rel=1e-13)


@pytest.mark.parametrize("kwargs", [{"n": -1, "d": 3.0}, {"n": 0, "d": 0.0}])
def test_norm_const_validation(kwargs):
    with pytest.raises(ValueError):
        norm_const(**kwargs)


@pytest.mark.parametrize("d", [3.0, 4.0, 5.5, 8.0])
def test_levels_are_orthonormal(d):
    # exact for polynomial integrands at this quadrature order
    rule = gauss_laguerre(24, alpha=d / 2.0 - 1.0)
    weights = rule.weights / math.gamma(d / 2.0)
    gram = np.array([[np.sum(weights * _level(n, d, rule.nodes)
                             * _level(m, d, rule.nodes))
                      for m in range(5)] for n in range(5)])
    assert np.max(np.abs(gram - np.eye(5))) < 1e-10


@pytest.mark.parametrize("n", range(1, 5))
@pytest.mark.parametrize("d", [3.0, 4.0, 5.5, 8.0])
def test_square_expectation_consistency(n, d):
    omega = 1.7
    st8 = OscillatorBasisState(n=n, d=d, omega=omega)
    direct = basis_expectation(lambda q: q * q, st8)
    assembled = d / (2.0 * omega) + power_matrix_elements(n, d, omega)[0]
    assert assembled == pytest.approx(direct, abs=1e-10, rel=1e-10)


@pytest.mark.parametrize("n", range(5))
def test_power_matrix_elements_against_quadrature(n):
    d, omega = 4.3, 1.9
    st8 = OscillatorBasisState(n=n, d=d, omega=omega)
    moments = [basis_expectation(lambda q: q ** (2 * k), st8) for k in (1, 2, 3)]
    # peel the normal-ordered pieces off the raw moments, low power first
    peeled = []
    for k in (1, 2, 3):
        coeffs = normal_order_power(k, d, omega)
        val = moments[k - 1] - coeffs[0]
        for j, p in enumerate(peeled):
            val -= coeffs[j + 1] * p
        peeled.append(val)
    got = power_matrix_elements(n, d, omega)
    for want, have in zip(peeled, got):
        assert have == pytest.approx(want, abs=1e-10, rel=1e-9)


def test_power_matrix_elements_closed_values():
    assert power_matrix_elements(1, 4.0, 1.0) == pytest.approx((2.0, 6.0, 0.0))
    assert power_matrix_elements(0, 3.0, 2.0) == (0.0, 0.0, 0.0)
    assert power_matrix_elements(2, 3.0, 2.0) == pytest.approx((2.0, 5.5, 10.5))


def test_e0_excitation_values():
    assert e0_excitation(0, 1.3) == 0.0
    assert e0_excitation(1, 3.0) == 6.0
    assert e0_excitation(5, 0.2) == pytest.approx(2.0)


@pytest.mark.parametrize("bad", [(-1, 1.0), (1, 0.0), (1, -2.0)])
def test_e0_excitation_validation(bad):
    with pytest.raises(ValueError):
        e0_excitation(*bad)


def test_t_n_trivial_cases():
    assert t_n(0, 0.9, 3.0) == 0.0
    assert t_n(3, 0.0, 4.0) == 0.0


def test_t_n_frozen_value():
    assert t_n(2, 0.7, 5.0) == pytest.approx(0.345859708378008, rel=1e-12)


@pytest.mark.parametrize("n", range(1, 4))
@pytest.mark.parametrize("x", [0.15, 0.7, 3.0])
def test_t_n_against_kernel_quadrature(n, x):
    # t_n is the Gaussian-kernel diagonal with its vacuum piece and the
    # 2n-proportional first moment removed; all pieces have closed kernels
    d, omega = 4.6, 1.3
    st8 = OscillatorBasisState(n=n, d=d, omega=omega)
    full = basis_expectation(lambda q: np.exp(-x * omega * q * q), st8)
    want = (full - (1.0 + x) ** (-d / 2.0)
            + 2.0 * n * x * (1.0 + x) ** (-d / 2.0 - 1.0))
    assert t_n(n, x, d) == pytest.approx(want, abs=1e-11, rel=1e-9)


def test_q_n_trivial_and_validation():
    assert q_n(0, 0.7, 3.0) == 0.0
    with pytest.raises(ValueError):
        q_n(1, -2.0, 3.0)  # d/2 + tau <= 0
    with pytest.raises(ValueError):
        q_n(-1, 0.5, 3.0)


@pytest.mark.parametrize("n", range(1, 4))
@pytest.mark.parametrize("tau", [-0.35, 0.6, 1.0, 1.7, 2.4])
def test_q_n_against_moment_quadrature(n, tau):
    d, omega = 4.2, 1.6
    st8 = OscillatorBasisState(n=n, d=d, omega=omega)
    moment = basis_expectation(lambda q: q ** (2.0 * tau), st8)
    g_tau = math.exp(math.lgamma(d / 2.0 + tau) - math.lgamma(d / 2.0))
    want = omega ** tau * moment - g_tau * (1.0 + 2.0 * n * tau / (d / 2.0))
    assert q_n(n, tau, d) == pytest.approx(want, abs=1e-8, rel=1e-8)


@pytest.mark.parametrize("n", range(1, 4))
@pytest.mark.parametrize("tau", [0.3, 0.7, 1.4])
def test_q_n_is_mellin_transform_of_t_n(n, tau):
    # the fractional-power correction is the Mellin image of the kernel one
    d = 3.8
    f = lambda x: x ** (-1.0 - tau) * t_n(n, x, d)
    lo, err_lo = quad(f, 0.0, 1.0, limit=400, epsabs=1e-12, epsrel=1e-11)
    hi, err_hi = quad(f, 1.0, np.inf, limit=400, epsabs=1e-12, epsrel=1e-11)
    assert err_lo + err_hi < 1e-9
    assert (lo + hi) / math.gamma(-tau) == pytest.approx(q_n(n, tau, d), abs=1e-8)


def test_excited_hydrogen_level():
    res = solve_excited(CoulombPower(g=0.0), QuantumState(l=0, n_r=1))
    assert res.energy == pytest.approx(-0.125, rel=2e-2)
    # the transform is exact for the bare Coulomb problem
    assert res.energy == pytest.approx(-0.125, rel=1e-10)
    assert res.rho_opt == pytest.approx(1.0, abs=1e-3)


def test_excited_linear_confinement_level():
    res = solve_excited(CoulombPower(g=4.0), QuantumState(l=0, n_r=1))
    assert res.energy == pytest.approx(6.9501730908101536, rel=3e-2)


def test_excited_screened_level():
    res = solve_excited(Escp(B=1.0, c=0.1), QuantumState(l=0, n_r=1))
    assert res.energy == pytest.approx(-0.12436369039844554, rel=3e-2)


def test_zero_excitation_delegates_to_ground_solvers():
    spec_cp = CoulombPower(g=4.0)
    assert (solve_excited(spec_cp, QuantumState(l=1, n_r=0))
            == solve_ground(spec_cp, 1))
    spec_sc = Escp(B=2.0, c=0.5)
    assert (solve_excited(spec_sc, QuantumState(l=0, n_r=0))
            == solve_escp(spec_sc, 0))


def test_excited_level_sits_above_ground():
    ground = solve_ground(CoulombPower(g=4.0), 0).energy
    excited = solve_excited(CoulombPower(g=4.0), QuantumState(l=0, n_r=1)).energy
    assert excited > ground
