"""Special functions, Gauss-Laguerre quadrature, root finding, 1-D minimization.

All gamma-function ratios go through log space so that large effective
dimensions (strong-coupling sweeps push Gamma arguments into the hundreds)
never overflow.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import optimize
from scipy.special import roots_genlaguerre


class AccuracyWarning(UserWarning):
    """Quadrature refinement disagreed beyond the advertised tolerance."""


class RootError(RuntimeError):
    """Bracketed root finding failed (no sign change, or iteration cap)."""


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0; finite for all representable positive x."""
    if not x > 0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def gamma_ratio(a: float, b: float) -> float:
    """Gamma(a)/Gamma(b) computed as exp(log_gamma(a) - log_gamma(b))."""
    return math.exp(log_gamma(a) - log_gamma(b))


@dataclass(frozen=True, eq=False)
class Quadrature:
    """Gauss-Laguerre rule for weight u**alpha * exp(-u) on (0, inf).

    nodes are strictly increasing and weights strictly positive; trailing
    nodes whose weights underflow to zero are dropped at construction, so
    order (the node count) may be slightly below the requested order.
    """

    nodes: np.ndarray
    weights: np.ndarray
    alpha: float = 0.0

    @property
    def order(self) -> int:
        return len(self.nodes)

    @property
    def scaled_weights(self) -> np.ndarray:
        # weights with the Laguerre weight divided back out, for integrating
        # raw f(u) over (0, inf); kept in log space to survive large nodes
        return np.exp(np.log(self.weights) + self.nodes - self.alpha * np.log(self.nodes))


# scipy's Newton polishing of Laguerre roots degrades into overflow/NaN for
# orders beyond roughly 300 (sooner at large alpha); orders above this cap
# silently corrupt results, so requests are clamped.
MAX_STABLE_ORDER = 280


@lru_cache(maxsize=4096)
def gauss_laguerre(order: int, alpha: float = 0.0) -> Quadrature:
    if order < 1:
        raise ValueError("order must be >= 1")
    order = min(order, MAX_STABLE_ORDER)
    x, w = roots_genlaguerre(order, alpha)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
        raise RootError(f"Laguerre rule unstable at order={order}, alpha={alpha}")
    keep = w > 0.0
    q = Quadrature(nodes=x[keep], weights=w[keep], alpha=alpha)
    q.nodes.setflags(write=False)
    q.weights.setflags(write=False)
    return q


def integrate_halfline(f, q: Quadrature | None = None, refine: bool = True) -> float:
    """Integral of f over (0, inf) for integrands with exponential decay.

    The Laguerre weight is divided out, so f is the full integrand.  With
    refine the order is doubled and the two estimates must agree to 1e-10
    relative, otherwise an AccuracyWarning is attached to the result.
    """
    if q is None:
        q = gauss_laguerre(200)

    def apply(rule: Quadrature) -> float:
        vals = np.asarray(f(rule.nodes), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ValueError("integrand returned NaN/inf")
        return float(np.dot(rule.scaled_weights, vals))

    val = apply(q)
    if not refine:
        return val
    val2 = apply(gauss_laguerre(2 * q.order, q.alpha))
    scale = max(abs(val2), 1e-300)
    if abs(val2 - val) > 1e-10 * scale:
        warnings.warn(
            f"half-line quadrature refinement moved by {abs(val2 - val) / scale:.2e} relative",
            AccuracyWarning,
            stacklevel=2,
        )
    return val2


def find_root(g, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Root of g on [lo, hi]; g must change sign on the bracket.

    Bisection/secant hybrid (Brent) with guaranteed convergence; tol is a
    relative tolerance on the abscissa.
    """
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if not (np.isfinite(glo) and np.isfinite(ghi)):
        raise RootError(f"non-finite endpoint values on [{lo}, {hi}]")
    if (glo > 0) == (ghi > 0):
        raise RootError(f"no sign change on [{lo}, {hi}]")
    return float(
        optimize.brentq(g, lo, hi, xtol=1e-15 * (1 + abs(lo) + abs(hi)),
                        rtol=max(tol, 4e-16), maxiter=200)
    )


def minimize_scalar(f, lo: float, hi: float, tol: float = 1e-8):
    """Minimum of f on [lo, hi] by golden-section/parabolic descent.

    Returns (x_min, f_min, at_edge); at_edge is set when x_min lands within
    2*tol of either bracket end, signalling that the true minimizer may sit
    outside the bracket.
    """

    def checked(x: float) -> float:
        v = f(x)
        if not np.isfinite(v):
            raise ValueError(f"non-finite objective value at {x}")
        return v

    res = optimize.minimize_scalar(checked, bounds=(lo, hi), method="bounded",
                                   options={"xatol": tol, "maxiter": 500})
    x = float(res.x)
    at_edge = (x - lo) <= 2 * tol or (hi - x) <= 2 * tol
    return x, float(res.fun), at_edge
