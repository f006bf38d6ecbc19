"""Radial excitations of the transformed problem.

The n-th radial level adds 2*n*omega plus diagonal corrections to the
vacuum energy functional.  Each transformed power q^{2 tau} contributes
q_n(tau), the part of its diagonal expectation left after removing the
vacuum piece and the :q^2: piece (those are already accounted for by the
vacuum functional and the frequency condition).  The level follows from
the coupled pair

    d eps0 / d omega = 0          (frequency condition at the trial energy)
    A1(omega) - E * B1(omega) = 0 (corrected secular equation)

solved by fixed-point iteration at each rho, then minimized over rho.
"""

from __future__ import annotations

import math

import numpy as np

from .core import effective_dimension, epsilon0_split, orc_residual, transform_potential
from .coulomb_power import energy_at_rho as _cp_energy_at_rho
from .coulomb_power import solve_ground
from .escp import (escp_energy_at_rho, screened_integral, solve_escp,
                   _screened_integral_grid)
from .model import (CoulombPower, Escp, QuantumState, SolveResult,
                    SolverConfig, validate)
from .numerics import RootError, find_root, gamma_ratio, log_gamma, minimize_scalar
from .oracle import OscillatorBasisState, basis_expectation


def norm_const(n: int, d: float) -> float:
    """Normalization of the n-th radial oscillator level over the
    t^{d/2-1} e^{-t} weight."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if d <= 0.0:
        raise ValueError("d must be positive")
    return math.exp(0.5 * (log_gamma(d / 2.0) - n * math.log(4.0)
                           - log_gamma(n + 1.0) - log_gamma(d / 2.0 + n)))


def _s_nk(n: int, k: int, d: float) -> float:
    """Inner combinatorial sum shared by t_n and q_n.

    Terms with nonpositive-integer Gamma arguments vanish (1/Gamma = 0).
    """
    total = 0.0
    for s in range(n + 1):
        if 2 * s - k + 1 <= 0 or k - s + 1 <= 0:
            continue
        total += 2.0 ** (2 * s - k) * math.exp(
            log_gamma(k + n - s + d / 2.0) - log_gamma(n - s + 1.0)
            - 2.0 * log_gamma(k - s + 1.0) - log_gamma(2 * s - k + 1.0))
    return total if k % 2 == 0 else -total


def t_n(n: int, x: float, d: float) -> float:
    """Diagonal expectation of the twice-subtracted Gaussian kernel,
    <n| e2^{-x omega q^2} |n> with the constant and :q^2: parts removed."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if x < 0.0:
        raise ValueError("x must be nonnegative")
    if d <= 0.0:
        raise ValueError("d must be positive")
    if n == 0 or x == 0.0:
        return 0.0
    pref = math.exp(log_gamma(n + 1.0) - log_gamma(n + d / 2.0))
    lx = math.log(x)
    l1x = math.log1p(x)
    total = 0.0
    for k in range(2, 2 * n + 1):
        total += math.exp(k * lx - (k + d / 2.0) * l1x) * _s_nk(n, k, d)
    return pref * total


def q_n(n: int, tau: float, d: float) -> float:
    """Diagonal correction of q^{2 tau} beyond its vacuum and :q^2: parts:
    omega^tau <n|q^{2 tau}|n> = G(tau) + 2 n tau G(tau) / (d/2) + q_n."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if d <= 0.0:
        raise ValueError("d must be positive")
    if d / 2.0 + tau <= 0.0:
        raise ValueError("d/2 + tau must be positive")
    if n == 0:
        return 0.0
    pref = math.exp(log_gamma(d / 2.0 + tau) + log_gamma(n + 1.0)
                    - log_gamma(n + d / 2.0))
    total = 0.0
    for k in range(2, 2 * n + 1):
        falling = 1.0
        for j in range(k):
            falling *= j - tau
        if falling == 0.0:
            continue
        total += falling * math.exp(-log_gamma(k + d / 2.0)) * _s_nk(n, k, d)
    return pref * total


def power_matrix_elements(n: int, d: float, omega: float):
    """(<n|:q^2:|n>, <n|:q^4:|n>, <n|:q^6:|n>) in closed form."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    return (
        2.0 * n / omega,
        n * (d + 6.0 * n - 4.0) / omega**2,
        2.0 * n * (n - 1.0) * (3.0 * d + 10.0 * n - 8.0) / omega**3,
    )


def e0_excitation(n: int, omega: float) -> float:
    """Unperturbed spacing of the n-th radial oscillator level."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    return 2.0 * n * omega


def _screened_correction(n: int, d: float, rho: float, omega: float,
                         coeff: float, c: float, config: SolverConfig) -> float:
    """Excitation correction of coeff * q^{2(rho-1)} exp(-c q^{2 rho}).

    Series in (-c)^k q^{2 rho k}; each power contributes q_n(tau_k).  In the
    strong-screening regime (or if the series misbehaves) fall back to a
    direct quadrature of the diagonal expectation.
    """
    z = omega**rho
    t = c / z
    if t > 5.0:
        return _screened_correction_quadrature(n, d, rho, omega, coeff, c)
    pref = coeff * omega ** (1.0 - rho)
    total = 0.0
    log_t = math.log(t) if t > 0.0 else -math.inf
    prev_mag = math.inf
    grew = 0
    for k in range(config.series_cap):
        tau_k = rho * (1.0 + k) - 1.0
        mag = math.exp(k * log_t - log_gamma(k + 1.0)) if k else 1.0
        term = pref * (-1.0) ** k * mag * q_n(n, tau_k, d)
        total += term
        amag = abs(term)
        if k >= 2 and amag <= config.series_tol * max(abs(total), 1e-300):
            return total
        if k >= 5 and amag > prev_mag:
            grew += 1
            if grew >= 3:
                # asymptotic tail started growing: the expansion has done
                # all it can, finish the job by quadrature
                return _screened_correction_quadrature(n, d, rho, omega,
                                                       coeff, c)
        else:
            grew = 0
        prev_mag = amag
    raise RootError("screened excitation series hit the cap before tolerance")


def _screened_correction_quadrature(n: int, d: float, rho: float,
                                    omega: float, coeff: float,
                                    c: float) -> float:
    """<n|f|n> minus the vacuum and :q^2: parts, by direct quadrature."""
    a0 = d / 2.0 + rho - 1.0
    t = c / omega**rho

    def f(q):
        return q ** (2.0 * (rho - 1.0)) * np.exp(-c * q ** (2.0 * rho))

    state = OscillatorBasisState(n=n, d=d, omega=omega)
    full = basis_expectation(f, state)
    gh = math.exp(log_gamma(d / 2.0))
    vacuum = omega ** (1.0 - rho) * screened_integral(a0, rho, t) / gh
    # :q^2: coefficient of f, from the omega-derivative of its vacuum value
    dvac = omega ** (-rho) * ((1.0 - rho) * screened_integral(a0, rho, t)
                              + rho * t * screened_integral(a0 + rho, rho, t)) / gh
    c2 = -(2.0 / d) * omega**2 * dvac
    return coeff * (full - vacuum - c2 * 2.0 * n / omega)


def _excitation_split(spec, l: int, n: int, rho: float, omega: float,
                      config: SolverConfig) -> tuple[float, float]:
    """(A1, B1) of the corrected secular equation A1 - E*B1 = 0."""
    d = effective_dimension(rho, l)
    base = epsilon0_split(spec, l, rho, omega)
    a1 = base.A + 2.0 * n * omega
    b1 = base.B
    for term in transform_potential(spec, rho):
        if term.energy:
            b1 += -term.coeff * omega ** (-term.tau) * q_n(n, term.tau, d)
        elif term.screening is None:
            a1 += term.coeff * omega ** (-term.tau) * q_n(n, term.tau, d)
        else:
            a1 += _screened_correction(n, d, rho, omega, term.coeff,
                                       term.screening, config)
    return a1, b1


def _omega_condition(spec, l: int, rho: float, energy: float,
                     z: float) -> float:
    """Frequency condition at a trial energy, as a function of Z = omega**rho."""
    d = effective_dimension(rho, l)
    h = d / 2.0
    r2 = rho * rho
    g1 = gamma_ratio(h + rho - 1.0, h)
    gb = gamma_ratio(h + 2.0 * rho - 1.0, h)
    if isinstance(spec, CoulombPower):
        nu = spec.nu
        g2 = gamma_ratio(h + 2.0 * rho + nu * rho - 1.0, h)
        return ((d / 4.0) * z ** (2.0 + nu)
                - 4.0 * r2 * (1.0 - rho) * g1 * z ** (1.0 + nu)
                + 4.0 * spec.g * r2 * (1.0 - 2.0 * rho - nu * rho) * g2
                - 4.0 * energy * r2 * (1.0 - 2.0 * rho) * gb * z**nu)
    a0 = h + rho - 1.0
    t = spec.c / z
    j0 = screened_integral(a0, rho, t)
    j1 = screened_integral(a0 + rho, rho, t)
    scr = 2.0 * spec.B * r2 * ((1.0 - rho) * z * j0 + rho * spec.c * j1) \
        / math.exp(log_gamma(h))
    return ((d / 4.0) * z * z - 4.0 * r2 * (1.0 - rho) * g1 * z + scr
            - 2.0 * energy * r2 * (1.0 - 2.0 * rho) * gb)


def _omega_condition_grid(spec, l: int, rho: float, energy: float,
                          zs: np.ndarray) -> np.ndarray:
    d = effective_dimension(rho, l)
    h = d / 2.0
    r2 = rho * rho
    g1 = gamma_ratio(h + rho - 1.0, h)
    gb = gamma_ratio(h + 2.0 * rho - 1.0, h)
    if isinstance(spec, CoulombPower):
        nu = spec.nu
        g2 = gamma_ratio(h + 2.0 * rho + nu * rho - 1.0, h)
        return ((d / 4.0) * zs ** (2.0 + nu)
                - 4.0 * r2 * (1.0 - rho) * g1 * zs ** (1.0 + nu)
                + 4.0 * spec.g * r2 * (1.0 - 2.0 * rho - nu * rho) * g2
                - 4.0 * energy * r2 * (1.0 - 2.0 * rho) * gb * zs**nu)
    a0 = h + rho - 1.0
    ts = spec.c / zs
    j0 = _screened_integral_grid(a0, rho, ts)
    j1 = _screened_integral_grid(a0 + rho, rho, ts)
    scr = 2.0 * spec.B * r2 * ((1.0 - rho) * zs * j0 + rho * spec.c * j1) \
        / math.exp(log_gamma(h))
    return ((d / 4.0) * zs * zs - 4.0 * r2 * (1.0 - rho) * g1 * zs + scr
            - 2.0 * energy * r2 * (1.0 - 2.0 * rho) * gb)


def _omega_root(spec, l: int, rho: float, energy: float, z_ref: float,
                config: SolverConfig) -> float:
    """Z-root of the frequency condition nearest (in log) to z_ref."""
    zhi = max(60.0, 4.0 * z_ref)
    zs = np.geomspace(1e-4, zhi, 160)
    vals = _omega_condition_grid(spec, l, rho, energy, zs)
    roots = []
    for i in range(zs.size - 1):
        a, b = vals[i], vals[i + 1]
        if not (np.isfinite(a) and np.isfinite(b)):
            continue
        if a == 0.0:
            roots.append(zs[i])
        elif a * b < 0.0:
            try:
                roots.append(find_root(
                    lambda z: _omega_condition(spec, l, rho, energy, z),
                    zs[i], zs[i + 1], tol=config.root_tol))
            except RootError:
                continue
    if not roots:
        raise RootError("frequency condition has no root at this rho")
    return min(roots, key=lambda z: abs(math.log(z / z_ref)))


def _pair_gap(spec, l: int, n: int, rho: float, e: float, z_ref: float,
              config: SolverConfig) -> tuple[float, float]:
    """Self-consistency gap A1/B1 - E with the frequency branch at z_ref."""
    z = _omega_root(spec, l, rho, e, z_ref, config)
    a1, b1 = _excitation_split(spec, l, n, rho, z ** (1.0 / rho), config)
    return a1 / b1 - e, z


def _excited_pair_at_rho(spec, l: int, n: int, rho: float,
                         config: SolverConfig) -> tuple[float, float, float]:
    """Self-consistent (E, Z, omega) of the coupled pair at fixed rho.

    Plain iteration E <- A1/B1 diverges whenever |d(A1/B1)/dE| > 1, which
    is the common case here, so the gap A1/B1 - E is bracketed along an
    upward energy scan from the ground level and bisected instead.  The
    frequency root follows the scan by continuation in Z.
    """
    if isinstance(spec, CoulombPower):
        e_g, z_g = _cp_energy_at_rho(rho, l, spec.g, spec.nu, config.root_tol)
        if spec.nu > 0.0 and spec.g > 0.0:
            e_hi = e_g + 6.0 * max(abs(e_g), 1.0)
        else:
            # tail no longer confines: the spectrum ends at the threshold
            e_hi = (spec.g if spec.nu == 0.0 else 0.0) - 1e-9
    else:
        e_g, z_g = escp_energy_at_rho(rho, l, spec.B, spec.c, config.root_tol)
        e_hi = -1e-9
    if e_hi <= e_g:
        raise RootError("no self-consistent excited level at this rho")

    z_ref = z_g
    prev_e = prev_f = None
    n_scan = 64
    for i in range(n_scan + 1):
        e = e_g + (e_hi - e_g) * i / n_scan
        try:
            f, z_ref = _pair_gap(spec, l, n, rho, e, z_ref, config)
        except (RootError, OverflowError):
            prev_f = None
            continue
        if prev_f is not None and (f == 0.0 or prev_f * f < 0.0):
            z_box = [z_ref]

            def gap(x: float) -> float:
                val, z_box[0] = _pair_gap(spec, l, n, rho, x, z_box[0], config)
                return val

            e_root = find_root(gap, prev_e, e, tol=config.root_tol)
            f_root = gap(e_root)
            if abs(f_root) <= 1e-6 * max(1.0, abs(e_root)):
                z = _omega_root(spec, l, rho, e_root, z_box[0], config)
                return e_root, z, z ** (1.0 / rho)
            # sign change across a pole of A1/B1, not a crossing: keep going
        prev_e, prev_f = e, f
    raise RootError("no self-consistent excited level at this rho")


def solve_excited(spec, state: QuantumState,
                  config: SolverConfig = SolverConfig()) -> SolveResult:
    """Energy of the state with n_r radial nodes at angular momentum l."""
    validate(spec, state, config)
    if state.n_r == 0:
        if isinstance(spec, CoulombPower):
            return solve_ground(spec, state.l, config)
        return solve_escp(spec, state.l, config)

    l, n = state.l, state.n_r
    lo, hi = config.rho_bracket
    evals = 0

    def energy(rho: float) -> float:
        nonlocal evals
        evals += 1
        try:
            return _excited_pair_at_rho(spec, l, n, rho, config)[0]
        except (RootError, OverflowError):
            # no consistent frequency at this rho, or the fixed point ran
            # away through omega = Z**(1/rho) at extreme rho
            return math.inf

    n_grid = 25 if isinstance(spec, CoulombPower) else 40
    step = (hi - lo) / (n_grid - 1)
    grid = [lo + i * step for i in range(n_grid)]
    values = [energy(r) for r in grid]
    i_best = min(range(n_grid), key=values.__getitem__)
    if not math.isfinite(values[i_best]):
        raise RootError(f"no excited level located for {spec!r} at l={l}, n_r={n}")
    blo = grid[max(i_best - 1, 0)]
    bhi = grid[min(i_best + 1, n_grid - 1)]
    try:
        rho_opt, _, at_edge = minimize_scalar(energy, blo, bhi, tol=config.min_tol)
    except ValueError:
        # part of the bracket has no self-consistent level; the best grid
        # point is then the most reliable stationary rho available
        rho_opt, at_edge = grid[i_best], False
    at_edge = at_edge and (i_best == 0 or i_best == n_grid - 1)

    e_opt, Z, omega = _excited_pair_at_rho(spec, l, n, rho_opt, config)
    flags = ("rho_at_bracket_edge",) if at_edge else ()
    return SolveResult(
        energy=e_opt,
        rho_opt=rho_opt,
        Z=Z,
        orc_residual=orc_residual(spec, l, rho_opt, omega, e_opt),
        evaluations=evals,
        flags=flags,
    )
