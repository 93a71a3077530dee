"""Strict TOML sweep configuration: unknown keys are fatal, seed is mandatory.

Silent typos in physics parameters are the main field hazard of batch sweeps,
so parsing rejects anything it does not recognize and every range violation
names the offending key.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .dynamics import LINK_SEEDS
from .eigensolver import DEFAULT_ORACLE_CAP
from .model import DEFAULT_MAX_DIM, ChainSpec

MODES = ("thermal", "dynamics", "oracle-check")


class ConfigError(Exception):
    """Malformed or out-of-range sweep configuration."""


def parse_spin(value, key: str) -> float:
    """Accept 0.5, 1, or strings like "1/2" and "3/2"."""
    if isinstance(value, str):
        try:
            if "/" in value:
                num, den = value.split("/")
                s = float(num) / float(den)
            else:
                s = float(value)
        except ValueError:
            raise ConfigError(f"{key}: cannot parse spin value {value!r}") from None
    elif isinstance(value, (int, float)) and not isinstance(value, bool):
        s = float(value)
    else:
        raise ConfigError(f"{key}: spin must be a number or a fraction string, got {value!r}")
    if abs(2 * s - round(2 * s)) > 1e-12 or round(2 * s) < 1:
        raise ConfigError(f"{key}: spin must be a positive half-integer, got {value!r}")
    return s


def _require(table: dict, key: str, context: str):
    if key not in table:
        raise ConfigError(f"missing required key '{context}.{key}'" if context else f"missing required key '{key}'")
    return table[key]


def _number(value, key: str, lo=None, hi=None, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    v = int(value) if integer else float(value)
    if lo is not None and v < lo:
        raise ConfigError(f"{key}: must be >= {lo}, got {v}")
    if hi is not None and v > hi:
        raise ConfigError(f"{key}: must be <= {hi}, got {v}")
    return v


def _check_keys(table: dict, allowed: set[str], context: str):
    for key in table:
        if key not in allowed:
            raise ConfigError(f"unknown key '{context}.{key}'" if context else f"unknown key '{key}'")


@dataclass(frozen=True)
class SweepConfig:
    """Fully resolved sweep description (model, grids, solver, output)."""

    mode: str
    n_sites: int
    s_bulk: float
    s_link: float
    theta: float
    j2: float
    j: float
    lambdas: tuple[float, ...]
    betas: tuple[float, ...]
    omega_count: int
    link_state: str
    phi: float
    time_horizon: float | None
    dt: float | None
    trajectory_stride: int
    seed: int
    tol: float
    eps: float
    k_cap: int
    oracle_cap: int
    max_dim: int
    out_dir: str
    formats: tuple[str, ...] = ("csv",)

    def chain_spec(self, lam: float) -> ChainSpec:
        return ChainSpec(
            n_sites=self.n_sites, s_bulk=self.s_bulk, s_link=self.s_link,
            lam=lam, j2=self.j2, theta=self.theta, j=self.j,
        )

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "model": {
                "n_sites": self.n_sites, "s_bulk": self.s_bulk, "s_link": self.s_link,
                "theta": self.theta, "j2": self.j2, "j": self.j,
            },
            "grids": {
                "lambdas": list(self.lambdas), "betas": list(self.betas),
                "omega_count": self.omega_count, "link_state": self.link_state,
                "phi": self.phi, "time_horizon": self.time_horizon, "dt": self.dt,
                "trajectory_stride": self.trajectory_stride,
            },
            "solver": {
                "seed": self.seed, "tol": self.tol, "eps": self.eps, "k_cap": self.k_cap,
                "oracle_cap": self.oracle_cap, "max_dim": self.max_dim,
            },
            "output": {"directory": self.out_dir, "formats": list(self.formats)},
        }


_GRID_KEYS_THERMAL = {"lambdas", "lambda_points", "lambda_min", "lambda_max", "betas"}
_GRID_KEYS_DYNAMICS = {
    "lambdas", "lambda_points", "lambda_min", "lambda_max",
    "omega_count", "link_state", "phi", "time_horizon", "dt", "trajectory_stride",
}


def _resolve_lambdas(grids: dict, mode: str) -> tuple[float, ...]:
    explicit = "lambdas" in grids
    gridspec = any(k in grids for k in ("lambda_points", "lambda_min", "lambda_max"))
    if explicit and gridspec:
        raise ConfigError("grids: give either 'lambdas' or lambda_points/min/max, not both")
    if explicit:
        raw = grids["lambdas"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("grids.lambdas: must be a nonempty list")
        vals = tuple(_number(v, "grids.lambdas[*]", lo=0.0) for v in raw)
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ConfigError("grids.lambdas: must be strictly ascending")
        return vals
    if gridspec:
        pts = _number(_require(grids, "lambda_points", "grids"), "grids.lambda_points", lo=1, integer=True)
        lo = _number(_require(grids, "lambda_min", "grids"), "grids.lambda_min")
        hi = _number(_require(grids, "lambda_max", "grids"), "grids.lambda_max")
        if lo <= 0 or hi <= lo:
            raise ConfigError("grids: need 0 < lambda_min < lambda_max for a log grid")
        return tuple(float(x) for x in np.logspace(math.log10(lo), math.log10(hi), pts))
    # defaults: the standard log grid for thermal output, small couplings for dynamics
    if mode == "dynamics":
        return (0.01, 0.02, 0.03)
    return tuple(float(x) for x in np.logspace(-3, 0, 48))


def resolve_config(
    raw: dict,
    mode: str,
    out_override: str | None = None,
    seed_override: int | None = None,
) -> SweepConfig:
    """Validate a parsed TOML document for the given subcommand mode."""
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}")
    _check_keys(raw, {"mode", "model", "grids", "solver", "output"}, "")
    file_mode = raw.get("mode")
    if file_mode is not None:
        if file_mode not in MODES:
            raise ConfigError(f"mode: must be one of {MODES}, got {file_mode!r}")
        if file_mode != mode:
            raise ConfigError(f"config file says mode='{file_mode}' but the '{mode}' command was invoked")

    model = _require(raw, "model", "")
    _check_keys(model, {"n_sites", "s_bulk", "s_link", "theta", "j2", "j"}, "model")
    n_sites = _number(_require(model, "n_sites", "model"), "model.n_sites", lo=4, integer=True)
    s_bulk = parse_spin(_require(model, "s_bulk", "model"), "model.s_bulk")
    s_link = parse_spin(_require(model, "s_link", "model"), "model.s_link")
    theta = _number(model.get("theta", 0.0), "model.theta")
    j2 = _number(model.get("j2", 0.0), "model.j2")
    j = _number(model.get("j", 1.0), "model.j")
    if j <= 0:
        raise ConfigError("model.j: must be positive (antiferromagnetic units)")

    grids = raw.get("grids", {})
    allowed = _GRID_KEYS_THERMAL if mode == "thermal" else _GRID_KEYS_DYNAMICS if mode == "dynamics" else set()
    _check_keys(grids, allowed, "grids")
    lambdas = _resolve_lambdas(grids, mode) if mode != "oracle-check" else (0.1,)
    betas = (1e4,)
    if mode == "thermal":
        raw_betas = grids.get("betas", [1e4])
        if not isinstance(raw_betas, list) or not raw_betas:
            raise ConfigError("grids.betas: must be a nonempty list")
        betas = tuple(_number(b, "grids.betas[*]") for b in raw_betas)
        if any(b <= 0 for b in betas):
            raise ConfigError("grids.betas: inverse temperatures must be positive")
    omega_count = _number(grids.get("omega_count", 33), "grids.omega_count", lo=1, integer=True)
    link_state = grids.get("link_state", "0")
    if link_state not in LINK_SEEDS:
        raise ConfigError(f"grids.link_state: must be one of {LINK_SEEDS}, got {link_state!r}")
    phi = _number(grids.get("phi", 0.0), "grids.phi", lo=0.0)
    if phi >= 2 * math.pi:
        raise ConfigError("grids.phi: must be in [0, 2*pi)")
    time_horizon = grids.get("time_horizon")
    if time_horizon is not None:
        time_horizon = _number(time_horizon, "grids.time_horizon")
        if time_horizon <= 0:
            raise ConfigError("grids.time_horizon: must be positive")
    dt = grids.get("dt")
    if dt is not None:
        dt = _number(dt, "grids.dt")
        if dt <= 0:
            raise ConfigError("grids.dt: must be positive")
    stride = _number(grids.get("trajectory_stride", 1), "grids.trajectory_stride", lo=1, integer=True)

    solver = raw.get("solver", {})
    _check_keys(solver, {"seed", "tol", "eps", "k_cap", "oracle_cap", "max_dim"}, "solver")
    if seed_override is not None:
        seed = seed_override
    else:
        seed = _number(_require(solver, "seed", "solver"), "solver.seed", lo=0, integer=True)
    tol = _number(solver.get("tol", 1e-10), "solver.tol")
    if tol <= 0:
        raise ConfigError("solver.tol: must be positive")
    eps = _number(solver.get("eps", 1e-6), "solver.eps")
    if eps <= 0:
        raise ConfigError("solver.eps: must be positive")
    k_cap = _number(solver.get("k_cap", 4096), "solver.k_cap", lo=1, integer=True)
    oracle_cap = _number(solver.get("oracle_cap", DEFAULT_ORACLE_CAP), "solver.oracle_cap", lo=2, integer=True)
    max_dim = _number(solver.get("max_dim", DEFAULT_MAX_DIM), "solver.max_dim", lo=16, integer=True)

    output = raw.get("output", {})
    _check_keys(output, {"directory", "formats"}, "output")
    out_dir = out_override if out_override is not None else output.get("directory", ".")
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError("output.directory: must be a nonempty string")
    formats = output.get("formats", ["csv"])
    if not isinstance(formats, list) or any(f != "csv" for f in formats) or not formats:
        raise ConfigError("output.formats: only ['csv'] is supported")

    cfg = SweepConfig(
        mode=mode, n_sites=n_sites, s_bulk=s_bulk, s_link=s_link, theta=theta, j2=j2, j=j,
        lambdas=lambdas, betas=betas, omega_count=omega_count, link_state=link_state,
        phi=phi, time_horizon=time_horizon, dt=dt, trajectory_stride=stride,
        seed=seed, tol=tol, eps=eps, k_cap=k_cap, oracle_cap=oracle_cap, max_dim=max_dim,
        out_dir=out_dir, formats=tuple(formats),
    )
    cfg.chain_spec(cfg.lambdas[0])  # surface ChainSpec-level rejections now
    return cfg


def load_config(path, mode, out_override=None, seed_override=None) -> SweepConfig:
    """Parse and validate a TOML config file (parse errors keep line info)."""
    with open(path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return resolve_config(raw, mode, out_override=out_override, seed_override=seed_override)
