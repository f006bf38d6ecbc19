"""Ground-state solver for the exponentially screened Coulomb potential.

Energies follow the convention in which the unscreened limit is
E = -1/(l+1)**2 (so B -> 0 gives -1 for l = 0).  All screening physics
enters through the half-line integral

    J(a, rho, t) = int_0^inf u**(a-1) * exp(-u - t*u**rho) du,

evaluated by a region-mapped router: power series in t where it converges
fast, inverse-t series for rho > 1, Gauss-Laguerre on whichever side of the
w = t*u**rho substitution is stable, and a dense log-grid trapezoid as the
arbiter when the two quadrature orders disagree.
"""

from __future__ import annotations

import math
import warnings
from math import exp, lgamma, log

import numpy as np

from .core import effective_dimension, orc_residual
from .model import Escp, QuantumState, SolveResult, SolverConfig, validate
from .numerics import (AccuracyWarning, Quadrature, RootError, find_root,
                       gamma_ratio, gauss_laguerre, minimize_scalar)

_BASE_ORDER = 140  # doubled once for the agreement gate; see numerics.MAX_STABLE_ORDER


def _series_small_t_ok(a: float, rho: float, t: float, nprobe: int = 10) -> bool:
    if rho >= 1.0:
        return False
    for k in range(nprobe):
        r = t * exp(lgamma(a + (k + 1) * rho) - lgamma(a + k * rho)) / (k + 1)
        if r > 0.95:
            return False
    return True


def _series_small_t(a: float, rho: float, t: float, cap: int = 400,
                    tol: float = 5e-15) -> float:
    s = term = exp(lgamma(a))
    for k in range(1, cap):
        term *= -t / k * exp(lgamma(a + k * rho) - lgamma(a + (k - 1) * rho))
        s += term
        if abs(term) < tol * abs(s):
            return s
    raise RootError("screened integral: small-t series stalled")


def _series_inverse_t_ok(a: float, rho: float, t: float) -> bool:
    if rho <= 1.0 or t <= 1.0:
        return False
    lt = log(t)
    prev = None
    for j in range(6):
        cur = lgamma((a + j) / rho) - lgamma(j + 1) - (a + j) / rho * lt
        if prev is not None and cur > prev - 0.05:
            return False
        prev = cur
    return True


def _series_inverse_t(a: float, rho: float, t: float, cap: int = 400,
                      tol: float = 5e-15) -> float:
    lt = log(t)
    s = 0.0
    for j in range(cap):
        term = (-1) ** j * exp(lgamma((a + j) / rho) - lgamma(j + 1)
                               - (a + j) / rho * lt) / rho
        s += term
        if j > 2 and abs(term) < tol * abs(s):
            return s
    raise RootError("screened integral: inverse-t series stalled")


def _quad_u_side(a: float, rho: float, t: float, order: int) -> float:
    q = gauss_laguerre(order, a - 1.0)
    return float(np.sum(q.weights * np.exp(-t * np.power(q.nodes, rho))))


def _quad_swap_side(a: float, rho: float, t: float, order: int) -> float:
    # w = t*u**rho; the prefactor t**(-a/rho)/rho is carried in log space
    ar = a / rho
    ln_pref = -log(rho) - ar * log(t)
    if ln_pref + lgamma(ar) < -700.0:
        return 0.0
    q = gauss_laguerre(order, ar - 1.0)
    s = float(np.sum(q.weights * np.exp(-np.power(q.nodes / t, 1.0 / rho))))
    return exp(log(s) + ln_pref) if s > 0.0 else 0.0


_ES_C = math.pi / 2.0  # u = exp(C*sinh(w)) double-exponential map


def _fallback_ln(w: np.ndarray, a: float, rho: float, t: float) -> np.ndarray:
    x = _ES_C * np.sinh(w)
    with np.errstate(over="ignore"):
        out = a * x - np.exp(x) - t * np.exp(rho * x) + np.log(_ES_C * np.cosh(w))
    return np.where(np.isfinite(out), out, -np.inf)


def _fallback_quadrature(a: float, rho: float, t: float) -> float:
    """Trapezoid in the exp-sinh variable, halving the step until it settles.

    Handles the small-a / mid-t corner where neither Gauss-Laguerre side
    passes its agreement gate; the endpoint behavior u**(a-1) and the
    non-analytic exp(-t*u**rho) are both flattened by the map.
    """
    # the plateau of ln f sits above x = -(60/a + ln(1+t)/rho) in x = ln u
    depth = 60.0 / a + math.log1p(t) / rho + 30.0
    wlo = -math.asinh(depth / _ES_C)
    whi = math.asinh(30.0 / _ES_C)
    coarse = np.arange(wlo, whi, 0.02)
    lf = _fallback_ln(coarse, a, rho, t)
    m = float(np.max(lf))
    keep = np.nonzero(lf > m - 50.0)[0]
    lo, hi = coarse[keep[0]] - 0.25, coarse[keep[-1]] + 0.25

    h = 0.02
    w = np.arange(lo, hi + h, h)
    lf = _fallback_ln(w, a, rho, t)
    m = float(np.max(lf))
    total = float(np.sum(np.exp(lf - m)))
    prev = total * h
    for _ in range(6):
        mids = np.arange(lo + h / 2.0, hi + h / 2.0, h)
        total += float(np.sum(np.exp(_fallback_ln(mids, a, rho, t) - m)))
        h /= 2.0
        cur = total * h
        if abs(cur - prev) <= 3e-12 * max(abs(cur), 1e-300):
            return math.exp(m) * cur
        prev = cur
    if abs(cur - prev) > 1e-8 * max(abs(cur), 1e-300):
        warnings.warn(
            f"screened_integral(a={a}, rho={rho}, t={t}): fallback quadrature "
            f"did not settle below 1e-8", AccuracyWarning)
    return math.exp(m) * cur


def screened_integral(a: float, rho: float, t: float,
                      q: Quadrature | None = None, refine: bool = True) -> float:
    """J(a, rho, t) to ~1e-10 relative accuracy."""
    if a <= 0.0:
        raise ValueError("screened_integral requires a > 0")
    if rho <= 0.0:
        raise ValueError("screened_integral requires rho > 0")
    if t < 0.0:
        raise ValueError("screened_integral requires t >= 0")
    if t == 0.0:
        return exp(lgamma(a))
    if _series_small_t_ok(a, rho, t):
        return _series_small_t(a, rho, t)
    if _series_inverse_t_ok(a, rho, t):
        return _series_inverse_t(a, rho, t)
    order = _BASE_ORDER if q is None else max(20, min(q.order, _BASE_ORDER))
    # the swap side loses the t -> 0 mass near w = 0, so it needs t > 0.8
    sides = []
    if t <= 0.8 or rho > 1.0:
        sides.append(_quad_u_side)
        if t > 0.8 and a / rho <= 60.0:
            sides.append(_quad_swap_side)
    elif a / rho <= 60.0:
        sides.append(_quad_swap_side)
        sides.append(_quad_u_side)
    for quad in sides:
        base, dbl = quad(a, rho, t, order), quad(a, rho, t, 2 * order)
        if not refine:
            return dbl
        if abs(dbl - base) <= 5e-11 * abs(dbl):
            return dbl
    return _fallback_quadrature(a, rho, t)


def _small_t_threshold(a: float, rho: float, nprobe: int = 10) -> float:
    # largest t the small-t series gate accepts; matches _series_small_t_ok
    return 0.95 * min((k + 1) * exp(lgamma(a + k * rho) - lgamma(a + (k + 1) * rho))
                      for k in range(nprobe))


def _inverse_t_threshold(a: float, rho: float) -> float:
    # smallest t the inverse-t series gate accepts; matches _series_inverse_t_ok
    da = [lgamma((a + j) / rho) - lgamma(j + 1) for j in range(6)]
    worst = max(da[j] - da[j - 1] + 0.05 for j in range(1, 6))
    return max(1.0, exp(rho * worst))


def _series_small_t_vec(a: float, rho: float, ts: np.ndarray, cap: int = 400,
                        tol: float = 5e-15) -> np.ndarray:
    s = np.full(ts.shape, exp(lgamma(a)))
    term = s.copy()
    for k in range(1, cap):
        term *= -ts / k * exp(lgamma(a + k * rho) - lgamma(a + (k - 1) * rho))
        s += term
        if np.all(np.abs(term) < tol * np.abs(s)):
            return s
    raise RootError("screened integral: small-t series stalled")


def _series_inverse_t_vec(a: float, rho: float, ts: np.ndarray, cap: int = 400,
                          tol: float = 5e-15) -> np.ndarray:
    lt = np.log(ts)
    s = np.zeros_like(ts)
    for j in range(cap):
        term = (-1) ** j * np.exp(lgamma((a + j) / rho) - lgamma(j + 1)
                                  - (a + j) / rho * lt) / rho
        s += term
        if j > 2 and np.all(np.abs(term) < tol * np.abs(s)):
            return s
    raise RootError("screened integral: inverse-t series stalled")


def _quad_u_vec(a: float, rho: float, ts: np.ndarray, order: int) -> np.ndarray:
    q = gauss_laguerre(order, a - 1.0)
    return np.exp(-np.outer(ts, np.power(q.nodes, rho))) @ q.weights


def _quad_swap_vec(a: float, rho: float, ts: np.ndarray, order: int) -> np.ndarray:
    ar = a / rho
    q = gauss_laguerre(order, ar - 1.0)
    s = np.exp(-np.power(q.nodes[None, :] / ts[:, None], 1.0 / rho)) @ q.weights
    ln_pref = -log(rho) - ar * np.log(ts)
    out = np.zeros_like(ts)
    ok = (s > 0.0) & (ln_pref + lgamma(ar) >= -700.0)
    out[ok] = np.exp(np.log(s[ok]) + ln_pref[ok])
    return out


def _screened_integral_grid(a: float, rho: float, ts: np.ndarray,
                            order: int = _BASE_ORDER) -> np.ndarray:
    """Vectorized router, same region map and gates as screened_integral."""
    ts = np.asarray(ts, dtype=float)
    out = np.empty(ts.shape)
    done = np.zeros(ts.shape, dtype=bool)

    m = ts == 0.0
    if m.any():
        out[m] = exp(lgamma(a))
        done |= m
    if rho < 1.0:
        m = ~done & (ts <= _small_t_threshold(a, rho))
        if m.any():
            out[m] = _series_small_t_vec(a, rho, ts[m])
            done |= m
    if rho > 1.0:
        m = ~done & (ts > 1.0) & (ts >= _inverse_t_threshold(a, rho))
        if m.any():
            out[m] = _series_inverse_t_vec(a, rho, ts[m])
            done |= m

    u_first = (ts <= 0.8) | (rho > 1.0)
    swap_ok = (ts > 0.8) & (a / rho <= 60.0)
    passes = ((_quad_u_vec, lambda: u_first),
              (_quad_swap_vec, lambda: ~u_first & swap_ok),
              (_quad_swap_vec, lambda: u_first & swap_ok),
              (_quad_u_vec, lambda: ~u_first & swap_ok))
    for quad, mask in passes:
        m = ~done & mask()
        if not m.any():
            continue
        idx = np.nonzero(m)[0]
        base = quad(a, rho, ts[idx], order)
        dbl = quad(a, rho, ts[idx], 2 * order)
        ok = np.abs(dbl - base) <= 5e-11 * np.abs(dbl)
        out[idx[ok]] = dbl[ok]
        done[idx[ok]] = True
    for i in np.nonzero(~done)[0]:
        out[i] = _fallback_quadrature(a, rho, ts[i])
    return out


def escp_z_residual(Z: float, rho: float, l: int, B: float, c: float) -> float:
    """Frequency condition in Z = omega**rho with the screening kept exact.

    Always negative as Z -> 0+ (the screened attraction vanishes faster than
    the Coulomb term), positive as Z -> inf, so at least one root exists.
    """
    h = effective_dimension(rho, l) / 2.0
    a = h + rho - 1.0  # = 2*rho*(l+1)
    r2 = rho * rho
    coulomb = 4.0 * Z * r2 * gamma_ratio(a, h + 1.0)
    if B == 0.0:
        return Z * Z - coulomb
    t = c / Z
    screened = (Z * screened_integral(a, rho, t)
                + c * screened_integral(a + rho, rho, t))
    return Z * Z - coulomb + 2.0 * B * r2 / exp(lgamma(h + 1.0)) * screened


def _z_residual_grid(zs: np.ndarray, rho: float, l: int, B: float,
                     c: float) -> np.ndarray:
    h = effective_dimension(rho, l) / 2.0
    a = h + rho - 1.0
    r2 = rho * rho
    coulomb = 4.0 * zs * r2 * gamma_ratio(a, h + 1.0)
    if B == 0.0:
        return zs * zs - coulomb
    ts = c / zs
    screened = (zs * _screened_integral_grid(a, rho, ts)
                + c * _screened_integral_grid(a + rho, rho, ts))
    return zs * zs - coulomb + 2.0 * B * r2 / exp(lgamma(h + 1.0)) * screened


def _energy_from_z(Z: float, rho: float, l: int, B: float, c: float) -> float:
    h = effective_dimension(rho, l) / 2.0
    a = h + rho - 1.0
    base = h + 2.0 * rho - 1.0  # = 3*rho + 2*rho*l
    e = (Z * Z / (4.0 * rho * rho) * gamma_ratio(h + 1.0, base)
         - 2.0 * Z * gamma_ratio(a, base))
    if B != 0.0:
        e += Z * B * screened_integral(a, rho, c / Z) / exp(lgamma(base))
    return e


def escp_energy_at_rho(rho: float, l: int, B: float, c: float,
                       root_tol: float = 1e-12) -> tuple[float, float]:
    """Solve the frequency condition at fixed rho; return (energy, Z).

    The residual can cross zero more than once at strong screening, so the
    scan brackets every crossing and the energetically lowest root wins.
    """
    grid = np.geomspace(1e-4, 60.0, 140)
    vals = _z_residual_grid(grid, rho, l, B, c)
    roots = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            roots.append(grid[i])
        elif vals[i] * vals[i + 1] < 0.0:
            try:
                roots.append(find_root(
                    lambda z: escp_z_residual(z, rho, l, B, c),
                    grid[i], grid[i + 1], tol=root_tol))
            except RootError:
                # scan/polish evaluations may flip sign at noise level
                continue
    if vals[-1] == 0.0:
        roots.append(grid[-1])
    if not roots:
        raise RootError(
            f"no frequency root in scan window at rho={rho}, B={B}, c={c}")
    best = min(((_energy_from_z(z, rho, l, B, c), z) for z in roots),
               key=lambda p: p[0])
    return best


def solve_escp(spec: Escp, l: int = 0,
               config: SolverConfig = SolverConfig()) -> SolveResult:
    validate(spec, QuantumState(l=l), config)
    lo, hi = config.rho_bracket
    evals = 0

    def energy(rho: float) -> float:
        nonlocal evals
        evals += 1
        try:
            return escp_energy_at_rho(rho, l, spec.B, spec.c, config.root_tol)[0]
        except RootError:
            return math.inf

    n_grid = 40
    step = (hi - lo) / (n_grid - 1)
    grid = [lo + i * step for i in range(n_grid)]
    values = [energy(r) for r in grid]
    i_best = min(range(n_grid), key=values.__getitem__)
    if not math.isfinite(values[i_best]):
        raise RootError(f"no bound state located for {spec!r} at l={l}")
    blo = grid[max(i_best - 1, 0)]
    bhi = grid[min(i_best + 1, n_grid - 1)]
    rho_opt, _, at_edge = minimize_scalar(energy, blo, bhi, tol=config.min_tol)
    at_edge = at_edge and (i_best == 0 or i_best == n_grid - 1)

    e_opt, Z = escp_energy_at_rho(rho_opt, l, spec.B, spec.c, config.root_tol)
    omega = Z ** (1.0 / rho_opt)
    flags = []
    if at_edge:
        flags.append("rho_at_bracket_edge")
    if abs(e_opt) < 1e-6:
        flags.append("no reliably bound state at this order")
    residual = orc_residual(spec, l, rho_opt, omega, e_opt)
    return SolveResult(
        energy=e_opt,
        rho_opt=rho_opt,
        Z=Z,
        orc_residual=residual,
        evaluations=evals,
        flags=tuple(flags),
    )
