"""Variable-change bookkeeping: effective dimension, transformed terms,
vacuum-energy split, and normal-ordering coefficients."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oscrep.core import (
    effective_dimension,
    epsilon0_split,
    k_coefficient,
    normal_order_power,
    orc_residual,
    transform_potential,
)
from oscrep.coulomb_power import solve_ground
from oscrep.model import CoulombPower, Escp
from oscrep.numerics import gamma_ratio
from oscrep.oracle import OscillatorBasisState, basis_expectation

rhos = st.floats(0.1, 2.0)
ls = st.integers(0, 4)


def test_effective_dimension_values():
    assert effective_dimension(1.0, 0) == 4.0
    assert effective_dimension(0.5, 0) == 3.0
    assert effective_dimension(1.0, 1) == 8.0


@given(rho=rhos, l=ls)
def test_centrifugal_coefficient_vanishes_at_derived_dimension(rho, l):
    assert k_coefficient(rho, l) == pytest.approx(0.0, abs=1e-12)


@given(rho=rhos, l=ls)
def test_centrifugal_coefficient_generic_dimension(rho, l):
    d = effective_dimension(rho, l) + 0.7
    m = 2 * l + 1
    expect = 0.25 * ((d - 2.0) ** 2 - 4.0 * rho * rho * m * m)
    assert k_coefficient(rho, l, d) == pytest.approx(expect, rel=1e-12)


def test_transformed_terms_coulomb_power():
    rho = 0.8
    terms = transform_potential(CoulombPower(g=3.0, nu=1.5), rho)
    energy, coulomb, power = terms
    assert energy.energy and energy.coeff == pytest.approx(-4.0 * rho**2)
    assert energy.tau == pytest.approx(2 * rho - 1)
    assert coulomb.coeff == pytest.approx(-4.0 * rho**2)
    assert coulomb.tau == pytest.approx(rho - 1)
    assert power.coeff == pytest.approx(4.0 * 3.0 * rho**2)
    assert power.tau == pytest.approx(2 * rho + 1.5 * rho - 1)
    assert all(t.screening is None for t in terms)


def test_transformed_terms_escp():
    rho = 0.6
    terms = transform_potential(Escp(B=2.0, c=0.3), rho)
    energy, coulomb, screened = terms
    assert energy.energy and energy.coeff == pytest.approx(-2.0 * rho**2)
    assert coulomb.coeff == pytest.approx(-4.0 * rho**2)
    assert screened.coeff == pytest.approx(2.0 * 2.0 * rho**2)
    assert screened.tau == pytest.approx(rho - 1)
    assert screened.screening == pytest.approx(0.3)


@given(rho=st.floats(0.4, 1.4), omega=st.floats(0.3, 4.0), l=st.integers(0, 2))
def test_vacuum_split_matches_quadrature_coulomb_power(rho, omega, l):
    spec = CoulombPower(g=2.0, nu=1.0)
    split = epsilon0_split(spec, l, rho, omega)
    d = effective_dimension(rho, l)
    state = OscillatorBasisState(0, d, omega)
    a = d * omega / 4.0
    b = 0.0
    for term in transform_potential(spec, rho):
        val = basis_expectation(lambda q: term.coeff * q ** (2 * term.tau), state)
        if term.energy:
            b -= val
        else:
            a += val
    assert split.A == pytest.approx(a, rel=1e-10)
    assert split.B == pytest.approx(b, rel=1e-10)


@given(rho=st.floats(0.45, 1.3), omega=st.floats(0.3, 3.0))
def test_vacuum_split_matches_quadrature_screened(rho, omega):
    spec = Escp(B=1.5, c=0.4)
    split = epsilon0_split(spec, 0, rho, omega)
    d = effective_dimension(rho, 0)
    state = OscillatorBasisState(0, d, omega)
    a = d * omega / 4.0
    b = 0.0
    for term in transform_potential(spec, rho):
        if term.screening is None:
            f = lambda q, t=term: t.coeff * q ** (2 * t.tau)
        else:
            f = lambda q, t=term: (t.coeff * q ** (2 * t.tau)
                                   * math.e ** (-t.screening * q ** (2 * rho)))
        val = basis_expectation(f, state)
        if term.energy:
            b -= val
        else:
            a += val
    assert split.A == pytest.approx(a, rel=1e-9)
    assert split.B == pytest.approx(b, rel=1e-10)


def test_vacuum_split_energy_factor_positive():
    split = epsilon0_split(Escp(B=1.0, c=0.1), 0, 0.9, 1.0)
    assert split.B > 0
    assert split.eps0(-0.3) == pytest.approx(split.A + 0.3 * split.B)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_normal_order_constant_term_is_vacuum_expectation(n):
    d, omega = 4.6, 1.7
    coeffs = normal_order_power(n, d, omega)
    vac = basis_expectation(lambda q: q ** (2 * n),
                            OscillatorBasisState(0, d, omega))
    assert coeffs[0] == pytest.approx(vac, rel=1e-11)


def test_normal_order_known_coefficients():
    d, omega = 3.0, 2.0
    assert normal_order_power(1, d, omega) == pytest.approx(
        (d / (2 * omega), 1.0, 0.0, 0.0))
    c0, c2, c4, c6 = normal_order_power(2, d, omega)
    assert c0 == pytest.approx(d * (d + 2) / (4 * omega**2))
    assert c2 == pytest.approx((d + 2) / omega)
    assert (c4, c6) == (1.0, 0.0)


def test_normal_order_power_rejects_high_order():
    with pytest.raises(ValueError):
        normal_order_power(4, 3.0, 1.0)


def test_orc_residual_small_at_solution_large_away():
    spec = CoulombPower(g=4.0, nu=1.0)
    res = solve_ground(spec, 0)
    omega = res.Z ** (1.0 / res.rho_opt)
    assert orc_residual(spec, 0, res.rho_opt, omega, res.energy) < 1e-6
    assert orc_residual(spec, 0, res.rho_opt, 1.3 * omega, res.energy) > 1e-3
