"""Thermal protocol: low-temperature link state, entanglement-vs-coupling curves.

For each coupling lambda the low-energy window starts at 3*d_link^2 states and
doubles until the Boltzmann truncation certificate exp(-beta*dE_max) < eps
holds (or the window covers the whole spectrum); the reduced link state is the
weight-averaged reduction over the certified window.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .eigensolver import ConvergenceError, lanczos_lowest
from .measures import LinkDensityMatrix, SpectralEnsemble, log_negativity, purity, reduce_to_links
from .model import DEFAULT_MAX_DIM, ChainSpec, build_hamiltonian

DEFAULT_EPS = 1e-6
# ln(E)/ln(10) grid covering the coupling range the curves care about: the
# structure sits at small lambda, so points are log-spaced.
DEFAULT_LAMBDA_GRID = np.logspace(-3, 0, 48)
VANISHING_ENTANGLEMENT = 1e-3


@dataclass(frozen=True)
class ThermalPoint:
    """One certified (lambda, beta) point of an equilibrium curve."""

    lam: float
    beta: float
    entanglement: float
    purity: float
    k_used: int
    truncation_margin: float
    ground_energy: float
    max_residual: float
    valid: bool


@dataclass(frozen=True)
class LambdaScanSummary:
    """Curve-level quantities: peak location/value and the vanishing coupling."""

    lambda_m: float
    e_max: float
    lambda_v: float | None
    partial: bool


def thermal_link_state(
    spec: ChainSpec,
    beta: float,
    eps: float = DEFAULT_EPS,
    tol: float = 1e-10,
    seed: int = 0,
    k_cap: int | None = None,
    max_dim: int = DEFAULT_MAX_DIM,
) -> tuple[LinkDensityMatrix, ThermalPoint]:
    """Thermal reduced state of the links with its truncation diagnostics."""
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    h, layout = build_hamiltonian(spec, max_dim=max_dim)
    dim = layout.total_dim
    cap = dim if k_cap is None else min(k_cap, dim)

    k = min(3 * spec.d_link**2, cap)
    while True:
        pairs = lanczos_lowest(h, k, tol=tol, seed=seed)
        ensemble = SpectralEnsemble.from_pairs(pairs, beta)
        certified = ensemble.truncation_margin < eps or k == dim
        if certified or k >= cap:
            break
        k = min(2 * k, cap)

    rho = reduce_to_links(ensemble, layout)
    point = ThermalPoint(
        lam=spec.lam,
        beta=beta,
        entanglement=log_negativity(rho).ln_normalized,
        purity=purity(ensemble),
        k_used=k,
        truncation_margin=ensemble.truncation_margin,
        ground_energy=float(pairs.values[0]),
        max_residual=float(pairs.residuals.max()),
        valid=certified,
    )
    return rho, point


def entanglement_vs_lambda(
    spec: ChainSpec,
    beta: float,
    lambda_grid: Sequence[float] | None = None,
    eps: float = DEFAULT_EPS,
    tol: float = 1e-10,
    seed: int = 0,
    k_cap: int | None = None,
    max_dim: int = DEFAULT_MAX_DIM,
) -> tuple[list[ThermalPoint], LambdaScanSummary]:
    """Sweep the link coupling; spec.lam is replaced by each grid value.

    Points where the eigensolver fails are recorded as invalid (NaN
    entanglement) and mark the summary as partial instead of aborting the
    sweep.
    """
    grid = DEFAULT_LAMBDA_GRID if lambda_grid is None else np.asarray(lambda_grid, dtype=float)
    if len(grid) == 0:
        raise ValueError("lambda grid must be nonempty")
    if np.any(grid < 0):
        raise ValueError("lambda values must be >= 0")
    if np.any(np.diff(grid) <= 0) and len(grid) > 1:
        raise ValueError("lambda grid must be strictly ascending")

    points: list[ThermalPoint] = []
    for lam in grid:
        pt_spec = dataclasses.replace(spec, lam=float(lam))
        try:
            _, point = thermal_link_state(
                pt_spec, beta, eps=eps, tol=tol, seed=seed, k_cap=k_cap, max_dim=max_dim
            )
        except ConvergenceError:
            point = ThermalPoint(
                lam=float(lam), beta=beta, entanglement=float("nan"), purity=float("nan"),
                k_used=0, truncation_margin=float("nan"), ground_energy=float("nan"),
                max_residual=float("nan"), valid=False,
            )
        points.append(point)

    return points, summarize_curve(points)


def summarize_curve(points: Sequence[ThermalPoint]) -> LambdaScanSummary:
    """Peak coupling lambda_m, peak value, and the largest coupling below the
    peak where entanglement has already vanished (< 1e-3)."""
    usable = [p for p in points if p.valid and np.isfinite(p.entanglement)]
    partial = len(usable) != len(points)
    if not usable:
        return LambdaScanSummary(float("nan"), float("nan"), None, True)
    best = max(usable, key=lambda p: (p.entanglement, -p.lam))
    lambda_v = None
    for p in usable:
        if p.lam < best.lam and p.entanglement < VANISHING_ENTANGLEMENT:
            lambda_v = p.lam
    return LambdaScanSummary(best.lam, best.entanglement, lambda_v, partial)
