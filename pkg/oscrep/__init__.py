"""Bound-state spectra of -1/r + g*r^nu and exponentially screened Coulomb
potentials through an oscillator-representation solver, with an independent
Numerov back-end for cross-checks."""

from .model import (
    CoulombPower,
    Escp,
    OrmParams,
    QuantumState,
    SolveResult,
    SolverConfig,
    ValidationError,
    validate,
)
from .numerics import AccuracyWarning, RootError
from .core import (
    effective_dimension,
    epsilon0_split,
    k_coefficient,
    normal_order_power,
    orc_residual,
    transform_potential,
)
from .coulomb_power import (
    energy_at_rho,
    scaling_limit_constant,
    solve_ground,
    strong_coupling_constant,
    strong_coupling_profile,
    z_residual,
)
from .escp import (
    escp_energy_at_rho,
    escp_z_residual,
    screened_integral,
    solve_escp,
)
from .excitations import (
    e0_excitation,
    norm_const,
    power_matrix_elements,
    q_n,
    solve_excited,
    t_n,
)
from .oracle import (
    OscillatorBasisState,
    RadialGrid,
    basis_expectation,
    escp_potential,
    numerov_eigenvalue,
)
from .reference import ReferenceRow, load_rows

__version__ = "0.1.0"

__all__ = [
    "AccuracyWarning",
    "CoulombPower",
    "Escp",
    "OrmParams",
    "OscillatorBasisState",
    "QuantumState",
    "RadialGrid",
    "ReferenceRow",
    "RootError",
    "SolveResult",
    "SolverConfig",
    "ValidationError",
    "basis_expectation",
    "e0_excitation",
    "effective_dimension",
    "energy_at_rho",
    "epsilon0_split",
    "escp_energy_at_rho",
    "escp_potential",
    "escp_z_residual",
    "k_coefficient",
    "load_rows",
    "norm_const",
    "normal_order_power",
    "numerov_eigenvalue",
    "orc_residual",
    "power_matrix_elements",
    "q_n",
    "scaling_limit_constant",
    "screened_integral",
    "solve_escp",
    "solve_excited",
    "solve_ground",
    "strong_coupling_constant",
    "strong_coupling_profile",
    "t_n",
    "transform_potential",
    "validate",
    "z_residual",
]
