"""Link-pair entanglement measures: partial trace, partial transpose, negativity, purity.

The two link sites A and B are sites 1 and N.  All measures act on the
d_l^2 x d_l^2 reduced state obtained after tracing out the bulk, with index
order (A, B) row-major.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .eigensolver import EigenPairs
from .spins import SiteLayout

# Partial-transpose eigenvalues in (-NEG_FLOOR, 0) are roundoff, not entanglement.
NEG_FLOOR = 1e-12


@dataclass(frozen=True)
class LinkDensityMatrix:
    """Hermitian, PSD, trace-1 state of the two link sites."""

    d_link: int
    rho: np.ndarray

    def __post_init__(self):
        d2 = self.d_link * self.d_link
        if self.rho.shape != (d2, d2):
            raise ValueError(f"rho must be {d2}x{d2}, got {self.rho.shape}")
        if np.abs(self.rho - self.rho.conj().T).max() > 1e-10:
            raise ValueError("rho is not Hermitian")
        if abs(np.trace(self.rho).real - 1.0) > 1e-10:
            raise ValueError(f"rho trace is {np.trace(self.rho).real}, expected 1")
        if np.linalg.eigvalsh(self.rho).min() < -1e-10:
            raise ValueError("rho has a negative eigenvalue beyond the numerical floor")


@dataclass(frozen=True)
class SpectralEnsemble:
    """Boltzmann-weighted low-energy window at dimensionless inverse temperature beta.

    Weights are w_k = exp(-beta (E_k - E_0)) / Z~ (energies shifted by the
    ground energy before exponentiation so beta ~ 1e5 cannot underflow the
    whole sum).  truncation_margin = exp(-beta * (E_max - E_0)) bounds the
    relative weight of anything omitted above the window.
    """

    pairs: EigenPairs
    beta: float
    weights: np.ndarray
    truncation_margin: float

    @classmethod
    def from_pairs(cls, pairs: EigenPairs, beta: float) -> "SpectralEnsemble":
        if beta <= 0:
            raise ValueError(f"beta must be positive, got {beta}")
        shifted = pairs.values - pairs.values[0]
        w = np.exp(-beta * shifted)
        w /= w.sum()
        margin = float(np.exp(-beta * shifted[-1]))
        return cls(pairs=pairs, beta=beta, weights=w, truncation_margin=margin)


def _as_link_tensor(state: np.ndarray, layout: SiteLayout) -> np.ndarray:
    d_a = layout.dims[0]
    d_b = layout.dims[-1]
    mid = layout.total_dim // (d_a * d_b)
    return state.reshape(d_a, mid, d_b)


def reduce_to_links(state, layout: SiteLayout) -> LinkDensityMatrix:
    """Trace out the bulk, keeping sites 1 and N.

    Accepts a normalized pure-state vector or a SpectralEnsemble (which yields
    the weight-averaged reduction of its eigenstates).
    """
    d_a, d_b = layout.dims[0], layout.dims[-1]
    if d_a != d_b:
        raise ValueError("link sites must share one dimension")
    if isinstance(state, SpectralEnsemble):
        rho = np.zeros((d_a * d_b, d_a * d_b), dtype=np.complex128)
        for w, i in zip(state.weights, range(state.pairs.k)):
            if w == 0.0:
                continue
            rho += w * _pure_reduction(state.pairs.vectors[:, i], layout)
        return LinkDensityMatrix(d_link=d_a, rho=rho)
    state = np.asarray(state, dtype=np.complex128).ravel()
    if state.size != layout.total_dim:
        raise ValueError(f"state length {state.size} does not match layout dim {layout.total_dim}")
    if abs(np.linalg.norm(state) - 1.0) > 1e-10:
        raise ValueError("state is not normalized")
    return LinkDensityMatrix(d_link=d_a, rho=_pure_reduction(state, layout))


def _pure_reduction(state: np.ndarray, layout: SiteLayout) -> np.ndarray:
    psi = _as_link_tensor(state, layout)
    d_a, mid, d_b = psi.shape
    m = psi.transpose(0, 2, 1).reshape(d_a * d_b, mid)
    return m @ m.conj().T


def reduce_to_links_naive(state: np.ndarray, layout: SiteLayout) -> np.ndarray:
    """Index-summation reference for the partial trace; the checking route."""
    state = np.asarray(state).ravel()
    d_a, d_b = layout.dims[0], layout.dims[-1]
    mid = layout.total_dim // (d_a * d_b)
    stride_a = layout.strides[0]
    rho = np.zeros((d_a * d_b, d_a * d_b), dtype=np.complex128)
    for a in range(d_a):
        for b in range(d_b):
            for ap in range(d_a):
                for bp in range(d_b):
                    acc = 0.0 + 0.0j
                    for c in range(mid):
                        acc += state[a * stride_a + c * d_b + b] * np.conj(
                            state[ap * stride_a + c * d_b + bp]
                        )
                    rho[a * d_b + b, ap * d_b + bp] = acc
    return rho


def partial_transpose(rho: LinkDensityMatrix) -> np.ndarray:
    """Transpose over the first link: (i,j),(k,l) -> (k,j),(i,l)."""
    d = rho.d_link
    t = rho.rho.reshape(d, d, d, d).transpose(2, 1, 0, 3).reshape(d * d, d * d)
    return t


class LogNegativity(NamedTuple):
    ln_raw: float  # log2(2 N + 1)
    ln_normalized: float  # ln_raw / log2(d_link), in [0, 1]
    negativity: float  # absolute sum of negative partial-transpose eigenvalues


def log_negativity(rho: LinkDensityMatrix) -> LogNegativity:
    """Negativity and (normalized) logarithmic negativity of the link pair."""
    evals = np.linalg.eigvalsh(partial_transpose(rho))
    neg = float(-evals[evals <= -NEG_FLOOR].sum())
    ln_raw = float(np.log2(2.0 * neg + 1.0))
    return LogNegativity(ln_raw, ln_raw / np.log2(rho.d_link), neg)


def purity(ensemble: SpectralEnsemble) -> float:
    """Sum of squared Boltzmann weights over the computed window; 1 iff pure."""
    return float(np.sum(ensemble.weights**2))
