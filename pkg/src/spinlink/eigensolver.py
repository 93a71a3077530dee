"""Lowest eigenpairs of sparse Hermitian operators via Lanczos, plus a dense oracle.

The solver runs restarted Lanczos cycles with full reorthogonalization.  Each
cycle deflates everything already converged, so its lowest Ritz value
converges to the minimum of the *remaining* spectrum; repeating the cycle
enumerates the spectrum from below including degenerate copies (a single
Krylov run can only ever see one copy per degenerate level).  We converge one
pair beyond the requested count before returning, which certifies that the
returned window really is the bottom of the spectrum and reveals whether the
truncation boundary cuts through a degenerate cluster.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .spins import SparseHermitian

DEFAULT_TOL = 1e-10
DEFAULT_ORACLE_CAP = 4096
# Ritz values closer than this are treated as one degenerate cluster.
CLUSTER_GAP = 1e-8


class ConvergenceError(Exception):
    """Lanczos failed to converge within the restart budget."""

    def __init__(self, message: str, best_residuals=None):
        super().__init__(message)
        self.best_residuals = best_residuals


@dataclass(frozen=True)
class EigenPairs:
    """Ascending eigenvalues with orthonormal vectors and per-pair residuals.

    boundary_gap is the distance from the last returned eigenvalue to the next
    one above the window (None when the window is the full spectrum); a gap
    below CLUSTER_GAP means the window boundary splits a degenerate cluster.
    """

    values: np.ndarray
    vectors: np.ndarray  # shape (dim, k), columns are eigenvectors
    residuals: np.ndarray
    boundary_gap: float | None = None

    @property
    def k(self) -> int:
        return len(self.values)


def _orthogonalize(w: np.ndarray, basis: np.ndarray | None) -> np.ndarray:
    """Project w out of the span of the given orthonormal columns (two passes)."""
    if basis is not None and basis.shape[1]:
        for _ in range(2):
            w = w - basis @ (basis.conj().T @ w)
    return w


def _lanczos_cycle(h: SparseHermitian, start: np.ndarray, deflate: np.ndarray | None,
                   m_max: int, tol: float):
    """One Krylov cycle; returns verified (values, vectors) found in it.

    Builds the tridiagonal representation with full reorthogonalization against
    both the growing Krylov basis and the deflated (already converged)
    subspace, then accepts Ritz pairs whose true residual passes tol.
    """
    dim = h.dim
    q = np.empty((dim, m_max), dtype=np.complex128)
    alphas = np.empty(m_max)
    betas = np.empty(m_max)
    v = start
    m = 0
    breakdown = False
    scale = 1.0
    while m < m_max:
        w = h.matvec(v)
        a = float(np.real(np.vdot(v, w)))
        w = w - a * v
        if m > 0:
            w = w - betas[m - 1] * q[:, m - 1]
        q[:, m] = v
        alphas[m] = a
        w = _orthogonalize(w, deflate)
        w = _orthogonalize(w, q[:, : m + 1])
        b = float(np.linalg.norm(w))
        scale = max(scale, abs(a), b)
        m += 1
        if b < 1e-13 * scale:
            breakdown = True  # invariant subspace exhausted
            break
        betas[m - 1] = b
        v = w / b

    if m == 1:
        theta = np.array([alphas[0]])
        y = np.ones((1, 1))
    else:
        theta, y = scipy.linalg.eigh_tridiagonal(alphas[:m], betas[: m - 1])
    if breakdown:
        bounds = np.zeros(m)
    else:
        bounds = np.abs(betas[m - 1] * y[-1, :])

    # Accept only the ascending *prefix* of converged Ritz pairs.  Interior and
    # top-edge pairs converge too, but accepting them would let a cycle report
    # a bottom value above the true minimum of the deflated spectrum, breaking
    # the ordering guarantee of the restart loop.
    vals, vecs = [], []
    for i in range(m):
        if bounds[i] > 10.0 * tol:
            break
        u = q[:, :m] @ y[:, i]
        u = u / np.linalg.norm(u)
        res = float(np.linalg.norm(h.matvec(u) - theta[i] * u))
        if res >= tol:
            break
        vals.append(theta[i])
        vecs.append(u)
    best_unconverged = float(bounds[len(vals)]) if len(vals) < m else None
    return vals, vecs, best_unconverged


def lanczos_lowest(h: SparseHermitian, k: int, tol: float = DEFAULT_TOL,
                   seed: int = 0) -> EigenPairs:
    """The k lowest eigenpairs of h, deterministic for a given seed.

    Raises ConvergenceError if the restart budget (50*k cycles) is exhausted.
    """
    dim = h.dim
    if not 1 <= k <= dim:
        raise ValueError(f"k must be in 1..{dim}, got {k}")
    if tol <= 0:
        raise ValueError("tol must be positive")

    rng = np.random.default_rng(seed)
    conv_vals: list[float] = []
    conv_vecs: list[np.ndarray] = []
    want = k if k == dim else k + 1
    m_boost = 0
    max_cycles = 50 * k
    last_unconverged = None

    for _ in range(max_cycles):
        n_conv = len(conv_vals)
        if n_conv >= dim:
            break
        basis = np.column_stack(conv_vecs) if conv_vecs else None
        v0 = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        v0 = _orthogonalize(v0.astype(np.complex128), basis)
        nrm = np.linalg.norm(v0)
        if nrm < 1e-8:  # random vector fell into the converged span; retry
            continue
        v0 /= nrm
        remaining = want - n_conv
        m_max = min(dim - n_conv, max(64, 2 * remaining + 32) + m_boost)
        vals, vecs, best = _lanczos_cycle(h, v0, basis, m_max, tol)
        if not vals:
            m_boost += 32
            last_unconverged = best
            continue

        cycle_bottom = min(vals)
        for val, u in zip(vals, vecs):
            if conv_vecs:  # defensive re-orthogonalization across cycles
                u = _orthogonalize(u, np.column_stack(conv_vecs))
                nn = np.linalg.norm(u)
                if nn < 0.5:  # duplicate of an already-converged pair
                    continue
                u = u / nn
            conv_vals.append(float(val))
            conv_vecs.append(u)

        if len(conv_vals) >= want:
            order = np.argsort(conv_vals)
            boundary = conv_vals[order[want - 1]]
            # cycle_bottom is the minimum of the not-yet-found spectrum; once
            # it clears the boundary, the lowest `want` pairs are complete.
            if cycle_bottom >= boundary - max(10 * tol, 1e-12):
                break
    else:
        raise ConvergenceError(
            f"Lanczos did not converge {k} pairs within {max_cycles} cycles "
            f"({len(conv_vals)} converged)",
            best_residuals=last_unconverged,
        )

    order = np.argsort(conv_vals)[: min(want, len(conv_vals))]
    values = np.array([conv_vals[i] for i in order])
    vectors = np.column_stack([conv_vecs[i] for i in order])
    gap = None
    if len(values) > k:
        gap = float(values[k] - values[k - 1])
        values = values[:k]
        vectors = vectors[:, :k]
    residuals = np.array(
        [np.linalg.norm(h.matvec(vectors[:, i]) - values[i] * vectors[:, i]) for i in range(k)]
    )
    return EigenPairs(values=values, vectors=vectors, residuals=residuals, boundary_gap=gap)


def dense_spectrum(h: SparseHermitian, cap: int = DEFAULT_ORACLE_CAP) -> EigenPairs:
    """Brute-force full eigendecomposition; the oracle for small dimensions."""
    if h.dim > cap:
        raise ValueError(f"dense oracle limited to dim <= {cap}, got {h.dim}")
    values, vectors = np.linalg.eigh(h.toarray())
    resid = h.mat.dot(vectors) - vectors * values[None, :]
    residuals = np.linalg.norm(resid, axis=0)
    return EigenPairs(values=values, vectors=vectors, residuals=residuals, boundary_gap=None)


def spectral_bounds(h: SparseHermitian, seed: int = 0) -> tuple[float, float]:
    """An interval strictly enclosing the spectrum, from converged extremal Ritz values.

    The Ritz interval is padded outward by 1e-3 of the spectral span (or by an
    absolute 1e-6 when the span is numerically zero).
    """
    if h.dim < 2:
        raise ValueError("spectral bounds need dim >= 2")
    e_min = lanczos_lowest(h, 1, tol=1e-9, seed=seed).values[0]
    e_max = -lanczos_lowest(-h, 1, tol=1e-9, seed=seed).values[0]
    span = e_max - e_min
    pad = 1e-6 if span < 1e-12 else 1e-3 * span
    return float(e_min - pad), float(e_max + pad)
