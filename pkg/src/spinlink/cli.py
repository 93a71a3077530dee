"""Batch front-end: thermal / dynamics / oracle-check sweeps with CSV + manifest output.

Tables are written in canonical grid order with shortest-roundtrip float
formatting, so identical config + seed reproduces byte-identical tables no
matter how many workers ran the points.  Exit codes: 0 success, 2 config
error, 3 solver failure on all points (or a failed oracle check), 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import math
import pathlib
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

if sys.version_info >= (3, 11):
    from tomllib import load as _toml_load
else:
    from tomli import load as _toml_load

from . import __version__
from .config import ConfigError, SweepConfig, load_config
from .dynamics import QuenchSetup, default_time_grid, maximize_over_omega
from .eigensolver import ConvergenceError, dense_spectrum, lanczos_lowest, spectral_bounds
from .equilibrium import ThermalPoint, summarize_curve, thermal_link_state
from .measures import reduce_to_links, reduce_to_links_naive
from .model import CapacityError, build_hamiltonian

THERMAL_HEADER = [
    "row_type", "beta", "lambda", "entanglement", "purity", "k_used",
    "truncation_margin", "ground_energy", "max_residual", "valid",
    "lambda_m", "e_max", "lambda_v", "partial",
]
DYNAMICS_HEADER = [
    "row_type", "lambda", "omega", "t", "entanglement", "norm_drift",
    "peak_entanglement", "peak_time", "peak_omega",
    "time_average", "average_omega", "average_converged", "cumulative_drift",
]
ORACLE_HEADER = ["check", "dimension", "value", "threshold", "status"]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_manifest(out_dir, cfg: SweepConfig, table_name: str, certificates):
    manifest = {
        "tool": "spinlink",
        "version": __version__,
        "mode": cfg.mode,
        "seed": cfg.seed,
        "config": cfg.as_dict(),
        "table": table_name,
        "generated_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "certificates": certificates,
    }
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _table_name(mode: str) -> str:
    stamp = datetime.datetime.now(datetime.timezone.utc).strftime("%Y%m%dT%H%M%S_%fZ")
    return f"{mode}_{stamp}.csv"


# --------------------------------------------------------------------- thermal


def _thermal_point_task(args) -> ThermalPoint:
    cfg, beta, lam = args
    try:
        _, point = thermal_link_state(
            cfg.chain_spec(lam), beta, eps=cfg.eps, tol=cfg.tol,
            seed=cfg.seed, k_cap=cfg.k_cap, max_dim=cfg.max_dim,
        )
        return point
    except ConvergenceError:
        return ThermalPoint(
            lam=lam, beta=beta, entanglement=float("nan"), purity=float("nan"), k_used=0,
            truncation_margin=float("nan"), ground_energy=float("nan"),
            max_residual=float("nan"), valid=False,
        )


def run_thermal(cfg: SweepConfig, threads: int):
    tasks = [(cfg, beta, lam) for beta in cfg.betas for lam in cfg.lambdas]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            points = list(pool.map(_thermal_point_task, tasks, chunksize=1))
    else:
        points = [_thermal_point_task(t) for t in tasks]

    rows, certificates = [], []
    n_lam = len(cfg.lambdas)
    any_solved = False
    for bi, beta in enumerate(cfg.betas):
        curve = points[bi * n_lam : (bi + 1) * n_lam]
        for p in curve:
            if math.isfinite(p.entanglement):
                any_solved = True
            rows.append([
                "point", p.beta, p.lam, p.entanglement, p.purity, p.k_used,
                p.truncation_margin, p.ground_energy, p.max_residual, p.valid,
                None, None, None, None,
            ])
            certificates.append({
                "beta": p.beta, "lambda": p.lam, "k_used": p.k_used,
                "truncation_margin": None if math.isnan(p.truncation_margin) else p.truncation_margin,
                "max_residual": None if math.isnan(p.max_residual) else p.max_residual,
                "valid": p.valid,
            })
        summary = summarize_curve(curve)
        rows.append([
            "summary", beta, None, None, None, None, None, None, None, None,
            summary.lambda_m, summary.e_max, summary.lambda_v, summary.partial,
        ])
    return rows, certificates, any_solved


# -------------------------------------------------------------------- dynamics


def run_dynamics(cfg: SweepConfig, threads: int):
    from .dynamics import BoundsError

    omegas = np.linspace(0.0, math.pi, cfg.omega_count)
    rows, certificates = [], []
    any_solved = False
    for lam in cfg.lambdas:
        spec = cfg.chain_spec(lam)
        grid = default_time_grid(lam, cfg.j, horizon=cfg.time_horizon, dt=cfg.dt)
        setup = QuenchSetup(
            spec=spec, link_seed=cfg.link_state, omega=0.0, phi=cfg.phi, time_grid=grid
        )
        try:
            scan = maximize_over_omega(
                setup, omega_grid=omegas, seed=cfg.seed, workers=threads, keep_trajectories=True
            )
        except (ConvergenceError, BoundsError) as exc:
            rows.append([
                "lambda_summary", lam, None, None, None, None,
                float("nan"), float("nan"), float("nan"), float("nan"), float("nan"), None, None,
            ])
            certificates.append({"lambda": lam, "error": str(exc)})
            continue
        any_solved = True
        for omega, traj in zip(scan.omegas, scan.trajectories):
            for idx in range(0, len(traj.times), cfg.trajectory_stride):
                rows.append([
                    "trajectory", lam, omega, traj.times[idx], traj.entanglement[idx],
                    traj.norm_drift[idx], None, None, None, None, None, None, None,
                ])
            rows.append([
                "omega_summary", lam, omega, None, None, None,
                traj.peak_entanglement, traj.peak_time, None,
                traj.time_average, None, traj.average_converged, traj.cumulative_drift,
            ])
            certificates.append({
                "lambda": lam, "omega": float(omega),
                "cumulative_norm_drift": traj.cumulative_drift,
                "average_converged": traj.average_converged,
            })
        rows.append([
            "lambda_summary", lam, None, None, None, None,
            scan.peak_entanglement, scan.peak_time, scan.peak_omega,
            scan.best_time_average, scan.best_average_omega, None, None,
        ])
    return rows, certificates, any_solved


# ---------------------------------------------------------------- oracle-check


def run_oracle_check(cfg: SweepConfig):
    spec = cfg.chain_spec(cfg.lambdas[0])
    h, layout = build_hamiltonian(spec, max_dim=cfg.max_dim)
    if h.dim > cfg.oracle_cap:
        raise ConfigError(
            f"oracle-check needs total dimension <= oracle_cap ({cfg.oracle_cap}), got {h.dim}"
        )
    dense = dense_spectrum(h, cap=cfg.oracle_cap)
    rows = []

    k = min(9 * spec.d_link**2, h.dim)
    pairs = lanczos_lowest(h, k, tol=cfg.tol, seed=cfg.seed)
    dev = float(np.abs(pairs.values - dense.values[:k]).max())
    rows.append(["lanczos_vs_dense_eigenvalues", h.dim, dev, 1e-10, "PASS" if dev < 1e-10 else "FAIL"])

    rng = np.random.default_rng(cfg.seed)
    psi = rng.standard_normal(h.dim) + 1j * rng.standard_normal(h.dim)
    psi /= np.linalg.norm(psi)
    t = 50.0 / cfg.j
    exact = dense.vectors @ (np.exp(-1j * dense.values * t) * (dense.vectors.conj().T @ psi))
    from .dynamics import chebyshev_evolve

    approx = chebyshev_evolve(h, psi, t, spectral_bounds(h, seed=cfg.seed))
    deficit = float(1.0 - abs(np.vdot(exact, approx)))
    rows.append(["chebyshev_vs_dense_propagator", h.dim, deficit, 1e-9, "PASS" if deficit < 1e-9 else "FAIL"])

    tr_dev = float(np.abs(reduce_to_links(psi, layout).rho - reduce_to_links_naive(psi, layout)).max())
    rows.append(["partial_trace_vs_naive", h.dim, tr_dev, 1e-12, "PASS" if tr_dev < 1e-12 else "FAIL"])

    ok = all(r[-1] == "PASS" for r in rows)
    return rows, [{"check": r[0], "value": r[2], "status": r[4]} for r in rows], ok


# ------------------------------------------------------------------ entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinlink",
        description="entangled-link sweeps over spin-chain models (thermal and quench)",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("thermal", "equilibrium entanglement-vs-coupling sweep"),
        ("dynamics", "quench trajectories maximized over the rotation angle"),
        ("oracle-check", "compare solver routes against dense brute force"),
        ("validate", "parse and range-check a config without computing"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", required=True, help="TOML sweep configuration")
        p.add_argument("--out", default=None, help="output directory (overrides the config)")
        p.add_argument("--threads", type=int, default=1, help="worker processes for sweep points")
        p.add_argument("--seed", type=int, default=None, help="RNG seed (overrides the config)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "validate":
        try:
            with open(args.config, "rb") as fh:
                try:
                    declared = _toml_load(fh).get("mode", "thermal")
                except Exception as exc:
                    print(f"config error: {args.config}: {exc}", file=sys.stderr)
                    return 2
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 4
        mode = declared if declared in ("thermal", "dynamics", "oracle-check") else "thermal"
    else:
        mode = args.command
    try:
        cfg = load_config(args.config, mode, out_override=args.out, seed_override=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4

    if args.command == "validate":
        print(json.dumps(cfg.as_dict(), indent=2, sort_keys=True))
        return 0

    out_dir = pathlib.Path(cfg.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory: {exc}", file=sys.stderr)
        return 4

    threads = max(1, args.threads)
    try:
        if args.command == "thermal":
            rows, certificates, ok = run_thermal(cfg, threads)
            header = THERMAL_HEADER
        elif args.command == "dynamics":
            rows, certificates, ok = run_dynamics(cfg, threads)
            header = DYNAMICS_HEADER
        else:
            rows, certificates, ok = run_oracle_check(cfg)
            header = ORACLE_HEADER
            for r in rows:
                print(f"{r[0]}: {r[4]} (value {r[2]:.3e}, threshold {r[3]:.0e})")
    except (ConfigError, CapacityError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3

    table = _table_name(cfg.mode)
    try:
        _write_csv(out_dir / table, header, rows)
        _write_manifest(out_dir, cfg, table, certificates)
    except OSError as exc:
        print(f"error: cannot write results: {exc}", file=sys.stderr)
        return 4
    print(f"wrote {out_dir / table}")
    return 0 if ok else 3


if __name__ == "__main__":
    sys.exit(main())
