"""Shared value types, unit conventions, and solver configuration.

Unit conventions (documented constants, no runtime switch):

* ``CoulombPower`` works in hbar = mass = 1 units with V(r) = -1/r + g*r^nu,
  so the pure Coulomb (g = 0) ground energy is -1/(2(l+1)^2).
* ``Escp`` works in the convention of its governing radial equation, which
  carries E/2: V(r) = -1/r + (B/2)exp(-c*r)/r in hbar = mass = 1 terms, with
  reported energies twice the corresponding eigenvalue.  Pure Coulomb limits
  (B = 0, or c -> infinity) give E = -1/(l+1)^2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace


class ValidationError(ValueError):
    """Raised by validate(); the message names the first violated invariant."""


@dataclass(frozen=True)
class CoulombPower:
    """Potential V(r) = -1/r + g*r^nu with dimensionless coupling g >= 0."""

    g: float
    nu: float = 1.0

    kind = "coulomb-power"


@dataclass(frozen=True)
class Escp:
    """Exponentially screened Coulomb potential, -1/r plus (B/2)exp(-c r)/r."""

    B: float
    c: float

    kind = "escp"


# Either potential family; no other kinds exist.
PotentialSpec = CoulombPower | Escp


@dataclass(frozen=True)
class QuantumState:
    """Orbital quantum number l and radial quantum number n_r (0 = ground)."""

    l: int = 0
    n_r: int = 0


@dataclass(frozen=True)
class OrmParams:
    """Transform exponent rho, effective dimension d, oscillator scale Z.

    d is always derived as 2 + 2*rho*(2l+1); the oscillator frequency is
    recovered as omega = Z**(1/rho).
    """

    rho: float
    d: float
    Z: float

    @property
    def omega(self) -> float:
        return self.Z ** (1.0 / self.rho)


@dataclass(frozen=True)
class SolveResult:
    """Converged solution: energy, minimizing rho, oscillator scale Z.

    orc_residual is the left side of the frequency (Z) equation evaluated at
    the solution; evaluations counts objective evaluations during the rho
    minimization; flags carries diagnostics such as "rho_at_bracket_edge" or
    "no_reliably_bound_state".
    """

    energy: float
    rho_opt: float
    Z: float
    orc_residual: float
    evaluations: int
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class SolverConfig:
    rho_bracket: tuple[float, float] = (0.05, 2.0)
    root_tol: float = 1e-12
    min_tol: float = 1e-8
    quad_order: int = 200
    series_cap: int = 60
    series_tol: float = 1e-12


def validate(spec, state: QuantumState, config: SolverConfig):
    """Return (spec, state, config) unchanged iff every invariant holds.

    Raises ValidationError naming the first violated invariant.
    """
    if isinstance(spec, CoulombPower):
        if not spec.g >= 0:
            raise ValidationError("g >= 0")
        if not spec.nu > 0:
            raise ValidationError("nu > 0")
    elif isinstance(spec, Escp):
        if not spec.B >= 0:
            raise ValidationError("B >= 0")
        if not spec.c >= 0:
            raise ValidationError("c >= 0")
    else:
        raise ValidationError("kind in {coulomb-power, escp}")
    if not (isinstance(state.l, int) and state.l >= 0):
        raise ValidationError("l >= 0 integer")
    if not (isinstance(state.n_r, int) and state.n_r >= 0):
        raise ValidationError("n_r >= 0 integer")
    lo, hi = config.rho_bracket
    if not lo > 0:
        raise ValidationError("rho bracket lower bound > 0")
    if not hi > lo:
        raise ValidationError("rho bracket ordered")
    for name in ("root_tol", "min_tol", "series_tol"):
        if not getattr(config, name) > 0:
            raise ValidationError(f"{name} > 0")
    if not (config.quad_order > 0 and config.series_cap > 0):
        raise ValidationError("quad_order and series_cap > 0")
    return spec, state, config


# --- serialization -----------------------------------------------------
#
# Two canonical human-readable forms, consumed by the CLI: a flat key=value
# text form and a JSON object form.  Floats use repr() so that parsing the
# output reproduces the exact value (round-trip invariant).

_SPEC_KINDS = {"coulomb-power": CoulombPower, "escp": Escp}


def spec_to_dict(spec) -> dict:
    if isinstance(spec, CoulombPower):
        return {"kind": spec.kind, "g": spec.g, "nu": spec.nu}
    return {"kind": spec.kind, "B": spec.B, "c": spec.c}


def spec_from_dict(d: dict):
    kind = d["kind"]
    if kind not in _SPEC_KINDS:
        raise ValidationError("kind in {coulomb-power, escp}")
    params = {k: float(v) for k, v in d.items() if k != "kind"}
    return _SPEC_KINDS[kind](**params)


def bundle_to_dict(spec, state: QuantumState, config: SolverConfig) -> dict:
    return {
        "spec": spec_to_dict(spec),
        "state": {"l": state.l, "n_r": state.n_r},
        "config": {f.name: getattr(config, f.name) for f in fields(SolverConfig)},
    }


def bundle_from_dict(d: dict):
    spec = spec_from_dict(d["spec"])
    state = QuantumState(l=int(d["state"]["l"]), n_r=int(d["state"]["n_r"]))
    cfg = d["config"]
    config = SolverConfig(
        rho_bracket=tuple(cfg["rho_bracket"]),
        root_tol=float(cfg["root_tol"]),
        min_tol=float(cfg["min_tol"]),
        quad_order=int(cfg["quad_order"]),
        series_cap=int(cfg["series_cap"]),
        series_tol=float(cfg["series_tol"]),
    )
    return validate(spec, state, config)


def bundle_to_json(spec, state, config) -> str:
    return json.dumps(bundle_to_dict(spec, state, config), sort_keys=True)


def bundle_from_json(text: str):
    return bundle_from_dict(json.loads(text))


def _flatten(prefix: str, value, out: list[str]) -> None:
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else k, value[k], out)
    elif isinstance(value, (list, tuple)):
        out.append(f"{prefix}={','.join(repr(float(v)) for v in value)}")
    elif isinstance(value, float):
        out.append(f"{prefix}={value!r}")
    else:
        out.append(f"{prefix}={value}")


def bundle_to_kv(spec, state, config) -> str:
    lines: list[str] = []
    _flatten("", bundle_to_dict(spec, state, config), lines)
    return "\n".join(lines) + "\n"


def bundle_from_kv(text: str):
    nested: dict = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, raw = line.partition("=")
        node = nested
        parts = key.strip().split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = raw.strip()
    spec_d = dict(nested["spec"])
    state_d = nested["state"]
    cfg = nested["config"]
    bracket = tuple(float(x) for x in cfg["rho_bracket"].split(","))
    return bundle_from_dict(
        {
            "spec": spec_d,
            "state": {"l": int(state_d["l"]), "n_r": int(state_d["n_r"])},
            "config": {
                "rho_bracket": bracket,
                "root_tol": cfg["root_tol"],
                "min_tol": cfg["min_tol"],
                "quad_order": cfg["quad_order"],
                "series_cap": cfg["series_cap"],
                "series_tol": cfg["series_tol"],
            },
        }
    )


def config_with_overrides(config: SolverConfig, overrides: dict[str, str]) -> SolverConfig:
    """Apply key=value overrides (CLI --config files) onto a SolverConfig."""
    kwargs = {}
    valid = {f.name for f in fields(SolverConfig)}
    for key, raw in overrides.items():
        if key not in valid:
            raise ValidationError(f"unknown config key {key!r}")
        if key == "rho_bracket":
            kwargs[key] = tuple(float(x) for x in raw.split(","))
        elif key in ("quad_order", "series_cap"):
            kwargs[key] = int(raw)
        else:
            kwargs[key] = float(raw)
    return replace(config, **kwargs)
