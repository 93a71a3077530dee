"""Quench protocol: rotated-link product states evolved by Chebyshev propagation.

The initial state puts every bulk site in |0> (maximum S^z) and both links in
Uz(phi) Uy(omega) |seed>.  Propagation expands exp(-iHt) in Chebyshev
polynomials of the spectrum rescaled to [-1, 1], with Bessel-function
coefficients truncated below a tolerance; only matrix-vector products with the
Hamiltonian are needed.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import jv

from .eigensolver import spectral_bounds
from .measures import log_negativity, reduce_to_links
from .model import ChainSpec, build_hamiltonian
from .spins import SiteLayout, SparseHermitian, rotation_unitary

LINK_SEEDS = ("0", "1", "uniform")
DEFAULT_CHEB_TOL = 1e-14
DEFAULT_OMEGA_COUNT = 33
# Horizon covering many collapse-revival cycles of the ~1/lambda link
# timescale (the best revivals keep improving well past the first few cycles);
# step fine enough for the O(1/J) bulk oscillations.
HORIZON_CYCLES = 32.0 * math.pi
MAX_GRID_POINTS = 2000
BASE_DT = 0.25


class BoundsError(Exception):
    """Propagation norm blew up: the spectral bounds do not enclose the spectrum."""


def default_time_grid(
    lam: float, j: float = 1.0, horizon: float | None = None, dt: float | None = None
) -> np.ndarray:
    """Uniform grid [0, T] with T = 32*pi/(lam*j) and dt = min(0.25/j, T/2000)."""
    if horizon is None:
        if lam <= 0:
            raise ValueError("default horizon needs lam > 0 (decoupled links never entangle)")
        horizon = HORIZON_CYCLES / (lam * j)
    if dt is None:
        dt = min(BASE_DT / j, horizon / MAX_GRID_POINTS)
    n = max(1, int(round(horizon / dt)))
    return np.linspace(0.0, n * dt, n + 1)


@dataclass(frozen=True)
class QuenchSetup:
    """Initial-state rotation, link seed, and time grid of one quench run."""

    spec: ChainSpec
    link_seed: str
    omega: float
    phi: float
    time_grid: np.ndarray
    chebyshev_tol: float = DEFAULT_CHEB_TOL

    def __post_init__(self):
        if self.link_seed not in LINK_SEEDS:
            raise ValueError(f"link_seed must be one of {LINK_SEEDS}, got {self.link_seed!r}")
        if not 0.0 <= self.omega <= math.pi:
            raise ValueError(f"omega must be in [0, pi], got {self.omega}")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise ValueError(f"phi must be in [0, 2*pi), got {self.phi}")
        t = np.asarray(self.time_grid, dtype=float)
        if t.ndim != 1 or len(t) == 0:
            raise ValueError("time grid must be a nonempty 1-d array")
        if t[0] < 0 or (len(t) > 1 and np.any(np.diff(t) <= 0)):
            raise ValueError("times must be >= 0 and strictly ascending")
        object.__setattr__(self, "time_grid", t)
        if self.chebyshev_tol <= 0:
            raise ValueError("chebyshev_tol must be positive")


@dataclass(frozen=True)
class Trajectory:
    """Entanglement series along one quench, with unitarity diagnostics."""

    times: np.ndarray
    entanglement: np.ndarray
    norm_drift: np.ndarray  # |norm - 1| after each grid point
    peak_time: float
    peak_entanglement: float
    time_average: float
    average_converged: bool

    @property
    def cumulative_drift(self) -> float:
        return float(self.norm_drift.max(initial=0.0))


def link_seed_vector(d: int, seed: str) -> np.ndarray:
    v = np.zeros(d, dtype=np.complex128)
    if seed == "0":
        v[0] = 1.0
    elif seed == "1":
        if d < 2:
            raise ValueError("|1> seed needs link dimension >= 2")
        v[1] = 1.0
    elif seed == "uniform":
        v[:] = 1.0 / math.sqrt(d)
    else:
        raise ValueError(f"unknown link seed {seed!r}")
    return v


def prepare_initial_state(setup: QuenchSetup, layout: SiteLayout) -> np.ndarray:
    """Both links in Uz(phi) Uy(omega) |seed>, every bulk site polarized in |0>."""
    spec = setup.spec
    link = link_seed_vector(spec.d_link, setup.link_seed)
    u = rotation_unitary(spec.s_link, "z", setup.phi) @ rotation_unitary(spec.s_link, "y", setup.omega)
    link = u @ link
    bulk = np.zeros(layout.total_dim // (spec.d_link**2), dtype=np.complex128)
    bulk[0] = 1.0  # all bulk sites in |0> is global bulk index 0
    psi = np.kron(link, np.kron(bulk, link))
    return psi / np.linalg.norm(psi)


def _chebyshev_coefficients(x: float, tol: float) -> np.ndarray:
    """Coefficients c_n = (2 - delta_n0) (-i)^n J_n(x), truncated below tol."""
    if x == 0.0:
        return np.array([1.0 + 0.0j])
    n_max = max(16, int(1.2 * x) + 40)
    while True:
        bessel = jv(np.arange(n_max + 1), x)
        tail = np.nonzero(np.abs(bessel) >= tol)[0]
        if len(tail) == 0:
            return np.array([1.0 + 0.0j])
        cut = tail[-1] + 1
        if cut <= n_max or n_max > 10_000_000:
            break
        n_max *= 2
    c = bessel[:cut].astype(np.complex128)
    c[1:] *= 2.0
    c *= (-1j) ** np.arange(cut)
    return c


def chebyshev_evolve(
    h: SparseHermitian,
    psi: np.ndarray,
    dt: float,
    bounds: tuple[float, float],
    tol: float = DEFAULT_CHEB_TOL,
) -> np.ndarray:
    """psi(t + dt) = exp(-i H dt) psi(t), matrix-free.

    The Hamiltonian is affinely mapped onto [-1, 1] using the given spectral
    bounds; a norm blow-up beyond roundoff means the bounds were violated and
    raises BoundsError.
    """
    if dt < 0:
        raise ValueError("dt must be >= 0")
    e_min, e_max = bounds
    if e_max <= e_min:
        raise ValueError("bounds must satisfy e_min < e_max")
    if dt == 0.0:
        return psi.copy()
    half_span = 0.5 * (e_max - e_min)
    center = 0.5 * (e_max + e_min)
    c = _chebyshev_coefficients(half_span * dt, tol)

    inv = 1.0 / half_span
    norm_in = np.linalg.norm(psi)

    def scaled(v: np.ndarray) -> np.ndarray:
        return (h.matvec(v) - center * v) * inv

    phi_prev = psi
    out = c[0] * psi
    if len(c) > 1:
        phi_cur = scaled(psi)
        out = out + c[1] * phi_cur
        for n in range(2, len(c)):
            phi_next = 2.0 * scaled(phi_cur) - phi_prev
            out = out + c[n] * phi_next
            phi_prev, phi_cur = phi_cur, phi_next
    out *= np.exp(-1j * center * dt)

    if abs(np.linalg.norm(out) - norm_in) > 1e-6 * max(1.0, norm_in):
        raise BoundsError(
            "propagated norm drifted beyond roundoff; re-estimate the spectral bounds"
        )
    return out


def entanglement_trajectory(
    setup: QuenchSetup,
    hamiltonian: SparseHermitian | None = None,
    layout: SiteLayout | None = None,
    bounds: tuple[float, float] | None = None,
    seed: int = 0,
) -> Trajectory:
    """Evolve the quench state and record normalized link entanglement on the grid."""
    if hamiltonian is None or layout is None:
        hamiltonian, layout = build_hamiltonian(setup.spec)
    if bounds is None:
        bounds = spectral_bounds(hamiltonian, seed=seed)

    times = setup.time_grid
    psi = prepare_initial_state(setup, layout)
    ent = np.empty(len(times))
    drift = np.empty(len(times))

    t_prev = 0.0
    for i, t in enumerate(times):
        if t > t_prev:
            psi = chebyshev_evolve(hamiltonian, psi, t - t_prev, bounds, setup.chebyshev_tol)
            t_prev = t
        nrm = np.linalg.norm(psi)
        drift[i] = abs(nrm - 1.0)
        ent[i] = log_negativity(reduce_to_links(psi / nrm, layout)).ln_normalized
    peak = int(np.argmax(ent))  # argmax returns the first (smallest-t) peak
    avg = float(ent.mean())
    tail = float(ent[len(ent) // 2 :].mean())
    return Trajectory(
        times=times,
        entanglement=ent,
        norm_drift=drift,
        peak_time=float(times[peak]),
        peak_entanglement=float(ent[peak]),
        time_average=avg,
        average_converged=abs(tail - avg) < 1e-3,
    )


@dataclass(frozen=True)
class OmegaScanResult:
    """Maxima of one rotation-angle scan at fixed model parameters."""

    omegas: np.ndarray
    peak_entanglement: float  # max over (t, omega)
    peak_time: float
    peak_omega: float
    best_time_average: float  # max over omega of the per-trajectory time average
    best_average_omega: float
    trajectories: tuple[Trajectory, ...] = field(repr=False, default=())


def _trajectory_task(args) -> Trajectory:
    setup, h, layout, bounds = args
    return entanglement_trajectory(setup, hamiltonian=h, layout=layout, bounds=bounds)


def maximize_over_omega(
    setup: QuenchSetup,
    omega_grid: Sequence[float] | None = None,
    time_grid: np.ndarray | None = None,
    seed: int = 0,
    workers: int = 1,
    keep_trajectories: bool = True,
) -> OmegaScanResult:
    """Scan the link rotation angle; ties break toward smaller omega, then smaller t.

    The Hamiltonian and its spectral bounds are shared across the scan (the
    rotation only changes the initial state).  Trajectories for distinct
    omegas are independent and can run in a worker pool.
    """
    omegas = (
        np.linspace(0.0, math.pi, DEFAULT_OMEGA_COUNT)
        if omega_grid is None
        else np.asarray(omega_grid, dtype=float)
    )
    if len(omegas) == 0:
        raise ValueError("omega grid must be nonempty")
    grid = setup.time_grid if time_grid is None else np.asarray(time_grid, dtype=float)

    h, layout = build_hamiltonian(setup.spec)
    bounds = spectral_bounds(h, seed=seed)
    setups = [
        QuenchSetup(
            spec=setup.spec, link_seed=setup.link_seed, omega=float(w), phi=setup.phi,
            time_grid=grid, chebyshev_tol=setup.chebyshev_tol,
        )
        for w in omegas
    ]
    tasks = [(s, h, layout, bounds) for s in setups]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            trajectories = list(pool.map(_trajectory_task, tasks, chunksize=1))
    else:
        trajectories = [_trajectory_task(t) for t in tasks]

    best = 0
    best_avg = 0
    for i in range(1, len(trajectories)):
        if trajectories[i].peak_entanglement > trajectories[best].peak_entanglement:
            best = i
        if trajectories[i].time_average > trajectories[best_avg].time_average:
            best_avg = i
    return OmegaScanResult(
        omegas=omegas,
        peak_entanglement=trajectories[best].peak_entanglement,
        peak_time=trajectories[best].peak_time,
        peak_omega=float(omegas[best]),
        best_time_average=trajectories[best_avg].time_average,
        best_average_omega=float(omegas[best_avg]),
        trajectories=tuple(trajectories) if keep_trajectories else (),
    )
