"""Ground-state solver for V(r) = -1/r + g*r**nu.

After the r = q**(2*rho) transform the frequency condition collapses to a
single algebraic equation in Z = omega**rho; the energy at that root is an
explicit ratio of Gamma functions.  The physical energy is the minimum of
that expression over the transform parameter rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import effective_dimension, orc_residual
from .model import CoulombPower, QuantumState, SolveResult, SolverConfig, validate
from .numerics import RootError, find_root, gamma_ratio, minimize_scalar


@dataclass(frozen=True)
class CPRatios:
    """Gamma-function ratios entering the on-shell energy at fixed rho."""

    R0: float  # Gamma(d/2+1) / Gamma(d/2+2rho-1)
    R1: float  # Gamma(d/2+rho-1) / Gamma(d/2+2rho-1)
    R2: float  # Gamma(d/2+2rho+nu*rho-1) / Gamma(d/2+2rho-1)


def cp_ratios(rho: float, l: int, nu: float) -> CPRatios:
    h = effective_dimension(rho, l) / 2.0
    base = h + 2.0 * rho - 1.0
    return CPRatios(
        R0=gamma_ratio(h + 1.0, base),
        R1=gamma_ratio(h + rho - 1.0, base),
        R2=gamma_ratio(base + nu * rho, base),
    )


def z_residual(Z: float, rho: float, l: int, g: float, nu: float) -> float:
    """Frequency condition in Z = omega**rho; its positive root is on shell.

    At rho = 1, l = 0, nu = 1, g = 4 this reduces to Z**3 - 2*Z**2 - 48.
    """
    h = effective_dimension(rho, l) / 2.0
    g1 = gamma_ratio(h + rho - 1.0, h + 1.0)
    g2 = gamma_ratio(h + 2.0 * rho + nu * rho - 1.0, h + 1.0)
    r2 = rho * rho
    return Z ** (2.0 + nu) - 4.0 * r2 * g1 * Z ** (1.0 + nu) - 4.0 * g * nu * r2 * g2


def energy_from_z(Z: float, rho: float, l: int, g: float, nu: float) -> float:
    r = cp_ratios(rho, l, nu)
    return Z * Z * r.R0 / (8.0 * rho * rho) - Z * r.R1 + g * Z ** (-nu) * r.R2


def energy_at_rho(rho: float, l: int, g: float, nu: float,
                  root_tol: float = 1e-12) -> tuple[float, float]:
    """Solve the frequency condition at fixed rho; return (energy, Z)."""
    h = effective_dimension(rho, l) / 2.0
    z_coulomb = 4.0 * rho * rho * gamma_ratio(h + rho - 1.0, h + 1.0)
    if g == 0.0:
        Z = z_coulomb
    else:
        # residual(0+) = -4 g nu rho^2 G2 < 0, residual -> +inf: unique root
        hi = max(1.0, 1.5 * z_coulomb)
        while z_residual(hi, rho, l, g, nu) <= 0.0:
            hi *= 2.0
            if hi > 1e9:
                raise RootError("frequency condition root escaped past 1e9")
        Z = find_root(lambda z: z_residual(z, rho, l, g, nu),
                      hi * 1e-12, hi, tol=root_tol)
    return energy_from_z(Z, rho, l, g, nu), Z


def solve_ground(spec: CoulombPower, l: int = 0,
                 config: SolverConfig = SolverConfig()) -> SolveResult:
    validate(spec, QuantumState(l=l), config)
    lo, hi = config.rho_bracket
    evals = 0

    def energy(rho: float) -> float:
        nonlocal evals
        evals += 1
        return energy_at_rho(rho, l, spec.g, spec.nu, config.root_tol)[0]

    n_grid = 25
    step = (hi - lo) / (n_grid - 1)
    grid = [lo + i * step for i in range(n_grid)]
    values = [energy(r) for r in grid]
    i_best = min(range(n_grid), key=values.__getitem__)
    blo = grid[max(i_best - 1, 0)]
    bhi = grid[min(i_best + 1, n_grid - 1)]
    rho_opt, e_opt, at_edge = minimize_scalar(energy, blo, bhi, tol=config.min_tol)
    at_edge = at_edge and (i_best == 0 or i_best == n_grid - 1)

    e_opt, Z = energy_at_rho(rho_opt, l, spec.g, spec.nu, config.root_tol)
    omega = Z ** (1.0 / rho_opt)
    flags = ("rho_at_bracket_edge",) if at_edge else ()
    return SolveResult(
        energy=e_opt,
        rho_opt=rho_opt,
        Z=Z,
        orc_residual=orc_residual(spec, l, rho_opt, omega, e_opt),
        evaluations=evals,
        flags=flags,
    )


def strong_coupling_profile(rho: float, l: int, nu: float) -> float:
    """Limit coefficient C(rho) with E ~ C * g**(2/(2+nu)) as g -> inf."""
    h = effective_dimension(rho, l) / 2.0
    r2 = rho * rho
    lead = (0.5 + 1.0 / nu) * gamma_ratio(h + 1.0, h + 2.0 * rho - 1.0) / (4.0 * r2)
    inner = 4.0 * nu * r2 * gamma_ratio(h + 2.0 * rho + nu * rho - 1.0, h + 1.0)
    return lead * inner ** (2.0 / (2.0 + nu))


def strong_coupling_constant(nu: float, l: int = 0,
                             config: SolverConfig = SolverConfig()) -> tuple[float, float]:
    lo, hi = config.rho_bracket
    rho_opt, c_min, _ = minimize_scalar(
        lambda r: strong_coupling_profile(r, l, nu), lo, hi,
        tol=min(config.min_tol, 1e-10))
    return c_min, rho_opt


def scaling_limit_constant(nu: float, l: int = 0, g: float = 1e8,
                           config: SolverConfig = SolverConfig()) -> float:
    """Extrapolated E / g**(2/(2+nu)) at large g.

    A single finite-g read carries an O(g**(-1/(2+nu))) tail; the two-point
    combination 2*f(g) - f(g / 2**(2+nu)) cancels it.
    """
    p = 2.0 / (2.0 + nu)

    def f(gv: float) -> float:
        res = solve_ground(CoulombPower(g=gv, nu=nu), l, config)
        return res.energy / gv**p

    return 2.0 * f(g) - f(g / 2.0 ** (2.0 + nu))
