"""Convergence of E / g^(2/(2+nu)) toward the strong-coupling constant.

Prints the scaled ground energy along a geometric g-grid together with
the two-point tail-cancelled extrapolation and the closed-form limit.

Usage: python scripts/strong_coupling_sweep.py [--nu NU] [--l L]
"""

import argparse

from oscrep.coulomb_power import (
    scaling_limit_constant,
    solve_ground,
    strong_coupling_constant,
)
from oscrep.model import CoulombPower


def run(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nu", type=float, default=1.0)
    ap.add_argument("--l", type=int, default=0)
    args = ap.parse_args(argv)

    power = 2.0 / (2.0 + args.nu)
    c_limit, rho_limit = strong_coupling_constant(args.nu, args.l)

    print(f"{'g':>10}  {'E/g^p':>12}  {'extrapolated':>12}")
    for exponent in range(2, 9):
        g = 10.0 ** exponent
        res = solve_ground(CoulombPower(g=g, nu=args.nu), args.l)
        scaled = res.energy / g ** power
        extrap = scaling_limit_constant(args.nu, args.l, g=g)
        print(f"{g:10.0e}  {scaled:12.7f}  {extrap:12.7f}")
    print(f"{'limit':>10}  {c_limit:12.7f}  (rho_opt = {rho_limit:.4f})")
    return 0


if __name__ == "__main__":
    raise SystemExit(run())
