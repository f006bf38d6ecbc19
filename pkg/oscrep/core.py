"""Hyperspace transform bookkeeping shared by both potential families.

The change of variable r = q**(2*rho) carries the l-th orbital radial
problem into an s-wave problem in an auxiliary space of effective dimension
d = 2 + 2*rho*(2l+1), chosen so that the induced centrifugal coefficient K
vanishes.  Each potential term -1/r, g*r^nu, exp(-c*r)/r then becomes a
power q**(2*tau) (times a Gaussian-type screening factor for the screened
Coulomb case), and the vacuum energy splits as eps0 = A - E*B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import CoulombPower, Escp
from .numerics import gamma_ratio, log_gamma


def effective_dimension(rho: float, l: int) -> float:
    return 2.0 + 2.0 * rho * (2 * l + 1)


def k_coefficient(rho: float, l: int, D: float | None = None) -> float:
    """Centrifugal coefficient in the transformed space; zero at D = d(rho, l)."""
    if D is None:
        D = effective_dimension(rho, l)
    m = 2 * l + 1
    return 0.25 * ((D - 2.0) ** 2 - 4.0 * rho * rho * m * m)


@dataclass(frozen=True)
class TransformedTerm:
    """One power term coeff * q**(2*tau) of the transformed Hamiltonian.

    energy marks the term that multiplies -E (it feeds B rather than A);
    screening, when set, multiplies the power by exp(-screening * q**(2*rho)).
    """

    coeff: float
    tau: float
    energy: bool = False
    screening: float | None = None


def transform_potential(spec, rho: float) -> tuple[TransformedTerm, ...]:
    r2 = rho * rho
    if isinstance(spec, CoulombPower):
        return (
            TransformedTerm(-4.0 * r2, 2.0 * rho - 1.0, energy=True),
            TransformedTerm(-4.0 * r2, rho - 1.0),
            TransformedTerm(4.0 * spec.g * r2, 2.0 * rho + spec.nu * rho - 1.0),
        )
    if isinstance(spec, Escp):
        return (
            TransformedTerm(-2.0 * r2, 2.0 * rho - 1.0, energy=True),
            TransformedTerm(-4.0 * r2, rho - 1.0),
            TransformedTerm(2.0 * spec.B * r2, rho - 1.0, screening=spec.c),
        )
    raise TypeError(f"unsupported potential {spec!r}")


@dataclass(frozen=True)
class EpsilonSplit:
    """Vacuum energy decomposition eps0 = A - E*B; B > 0 always."""

    A: float
    B: float

    def eps0(self, energy: float) -> float:
        return self.A - energy * self.B


def _vacuum_power(coeff: float, tau: float, d: float, omega: float) -> float:
    # <0| coeff * q**(2 tau) |0> = coeff * omega**(-tau) * G(tau), with
    # G(tau) = Gamma(d/2 + tau)/Gamma(d/2)
    return coeff * omega ** (-tau) * gamma_ratio(d / 2 + tau, d / 2)


def epsilon0_split(spec, l: int, rho: float, omega: float) -> EpsilonSplit:
    d = effective_dimension(rho, l)
    a = d * omega / 4.0
    b = 0.0
    for term in transform_potential(spec, rho):
        if term.screening is not None:
            from .escp import screened_integral  # deferred: escp builds on this module's callers

            t = term.screening / omega**rho
            vac = (term.coeff * omega ** (-term.tau)
                   * screened_integral(d / 2 + term.tau, rho, t)
                   / math.exp(log_gamma(d / 2)))
        else:
            vac = _vacuum_power(term.coeff, term.tau, d, omega)
        if term.energy:
            b -= vac
        else:
            a += vac
    return EpsilonSplit(A=a, B=b)


def orc_residual(spec, l: int, rho: float, omega: float, energy: float,
                 rel_step: float = 2e-4) -> float:
    """Relative finite-difference residual of the frequency condition.

    Central difference of eps0 = A - E*B in omega, scaled dimensionlessly.
    The step is wide enough that quadrature noise in the screened integrals
    (~1e-11 relative) stays below the 1e-6 acceptance threshold.
    """
    h = rel_step * omega
    up = epsilon0_split(spec, l, rho, omega + h)
    dn = epsilon0_split(spec, l, rho, omega - h)
    deriv = (up.eps0(energy) - dn.eps0(energy)) / (2.0 * h)
    mid = epsilon0_split(spec, l, rho, omega)
    scale = max(effective_dimension(rho, l) * omega / 4.0,
                abs(mid.A), abs(energy) * mid.B)
    return abs(deriv) * omega / scale


def normal_order_power(n: int, d: float, omega: float):
    """Coefficients (const, :q^2:, :q^4:, :q^6:) of q**(2n) in normal order."""
    if n == 1:
        return (d / (2 * omega), 1.0, 0.0, 0.0)
    if n == 2:
        return (d * (d + 2) / (4 * omega**2), (d + 2) / omega, 1.0, 0.0)
    if n == 3:
        return (
            d * (d + 2) * (d + 4) / (8 * omega**3),
            3 * (d + 2) * (d + 4) / (4 * omega**2),
            3 * (d + 4) / (2 * omega),
            1.0,
        )
    raise ValueError("normal_order_power covers n in {1, 2, 3}")
