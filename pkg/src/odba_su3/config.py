"""Run configuration: strict JSON parsing into chain and boundary objects.

Unknown keys are rejected everywhere.  A typo in a physics parameter would
otherwise produce a plausible but wrong spectrum, which is the worst
possible failure mode for a verification tool.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .boundary import BoundaryPair, BoundaryParams, KINDS
from .transfer import ChainSpec


class ConfigError(ValueError):
    """Invalid or malformed run configuration."""


_TOLERANCE_DEFAULTS = {
    "bulk": 1e-12,
    "boundary": 1e-12,
    "fusion": 1e-9,
    "identities": 1e-9,
    "asymptotics": 1e-8,
    "solver": 1e-12,
    "residue": 1e-8,
    "match": 1e-6,
}


@dataclass(frozen=True)
class RunConfig:
    spec: ChainSpec
    pair: BoundaryPair
    tolerances: dict = field(default_factory=dict)
    rng_seed: int = 0

    def tolerance(self, name):
        return self.tolerances.get(name, _TOLERANCE_DEFAULTS[name])


def _require_keys(mapping, allowed, required, where):
    unknown = set(mapping) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}; "
                          f"allowed: {sorted(allowed)}")
    missing = set(required) - set(mapping)
    if missing:
        raise ConfigError(f"missing key(s) {sorted(missing)} in {where}")


def _as_complex(value, where):
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(v, (int, float)) for v in value)):
        return complex(value[0], value[1])
    raise ConfigError(f"{where} must be a number or [re, im] pair, got {value!r}")


def _boundary_params(section, kind, where):
    _require_keys(section, ("zeta", "c", "c1"), ("zeta", "c", "c1"), where)
    zeta = _as_complex(section["zeta"], f"{where}.zeta")
    c = _as_complex(section["c"], f"{where}.c")
    c1 = _as_complex(section["c1"], f"{where}.c1")
    if c == 0 and c1 == 0:
        return BoundaryParams.diagonal(kind, zeta)
    try:
        return BoundaryParams.from_free(kind, zeta, c, c1)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def parse_config(data) -> RunConfig:
    """Build a RunConfig from a decoded JSON object."""
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    allowed = ("N", "eta", "theta", "boundary", "dual", "tolerances", "rng_seed")
    _require_keys(data, allowed, ("N", "eta", "boundary", "dual"), "config")

    n_sites = data["N"]
    if not isinstance(n_sites, int) or n_sites < 1:
        raise ConfigError(f"N must be a positive integer, got {n_sites!r}")
    eta = _as_complex(data["eta"], "eta")
    theta_raw = data.get("theta", [0.0] * n_sites)
    if not isinstance(theta_raw, list) or len(theta_raw) != n_sites:
        raise ConfigError(f"theta must be a list of {n_sites} entries")
    theta = tuple(_as_complex(t, "theta entry") for t in theta_raw)

    bsec = data["boundary"]
    if not isinstance(bsec, dict):
        raise ConfigError("boundary must be an object")
    _require_keys(bsec, ("kind", "zeta", "c", "c1"), ("kind", "zeta", "c", "c1"),
                  "boundary")
    kind = bsec["kind"]
    if kind not in KINDS:
        raise ConfigError(f"boundary.kind must be one of {KINDS}, got {kind!r}")
    minus = _boundary_params({k: bsec[k] for k in ("zeta", "c", "c1")}, kind,
                             "boundary")
    dsec = data["dual"]
    if not isinstance(dsec, dict):
        raise ConfigError("dual must be an object")
    _require_keys(dsec, ("zeta", "c", "c1"), ("zeta", "c", "c1"), "dual")
    plus = _boundary_params(dsec, kind, "dual")

    tol = data.get("tolerances", {})
    if not isinstance(tol, dict):
        raise ConfigError("tolerances must be an object")
    _require_keys(tol, tuple(_TOLERANCE_DEFAULTS), (), "tolerances")
    tolerances = {k: float(v) for k, v in tol.items()}

    seed = data.get("rng_seed", 0)
    if not isinstance(seed, int):
        raise ConfigError(f"rng_seed must be an integer, got {seed!r}")

    try:
        spec = ChainSpec(n_sites, eta, theta)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(spec=spec, pair=BoundaryPair(minus, plus),
                     tolerances=tolerances, rng_seed=seed)


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(data)


def benchmark_config() -> RunConfig:
    """The built-in N = 2 benchmark configuration."""
    from .benchmark import BENCHMARK_BOUNDARY, BENCHMARK_ETA, BENCHMARK_N

    b = BENCHMARK_BOUNDARY
    return parse_config({
        "N": BENCHMARK_N,
        "eta": BENCHMARK_ETA,
        "boundary": {"kind": b["kind"], "zeta": b["zeta"], "c": b["c"],
                     "c1": b["c1"]},
        "dual": {"zeta": b["zeta_dual"], "c": b["c_dual"], "c1": b["c1_dual"]},
    })
