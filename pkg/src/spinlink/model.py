"""Chain Hamiltonian: spin-s_b bulk with NN + NNN couplings, weakly coupled end links.

H(lambda) = J * [ sum_{i=2}^{N-2} H_{i,i+1} + J2 * sum_{i=2}^{N-3} H_{i,i+2} ]
          + lambda*J * [ H_{1,2} + H_{N-1,N} + J2 * (H_{1,3} + H_{N-2,N}) ]

with the SU(2)-invariant pair coupling

H_{i,j} = S_i . S_j                                     if either spin is 1/2,
          cos(theta) S_i . S_j + sin(theta) (S_i.S_j)^2 otherwise.

Open boundary; J > 0 is antiferromagnetic and sets the energy unit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse

from .spins import SiteLayout, SparseHermitian, _spin_dim, embed_operator_coo, spin_operators

# Hard ceiling on the Hilbert-space dimension; assembling or diagonalizing
# beyond this would exhaust desk-scale memory, so we fail loudly instead.
DEFAULT_MAX_DIM = 4_194_304


class CapacityError(Exception):
    """Requested Hilbert space exceeds the configured memory budget."""


@dataclass(frozen=True)
class ChainSpec:
    """Full model description of an N-site chain with two end links.

    lam is the dimensionless link coupling (lambda = lambda_tilde / J >= 0),
    j2 the relative NNN strength, theta the bilinear-biquadratic angle in
    radians, and j > 0 the nearest-neighbor energy unit.  Inverse temperatures
    used downstream are dimensionless (beta = J / k_B T).
    """

    n_sites: int
    s_bulk: float
    s_link: float
    lam: float
    j2: float = 0.0
    theta: float = 0.0
    j: float = 1.0

    def __post_init__(self):
        if self.n_sites < 4:
            raise ValueError(f"n_sites must be >= 4 (two links + two bulk sites), got {self.n_sites}")
        _spin_dim(self.s_bulk)
        _spin_dim(self.s_link)
        if self.j <= 0:
            raise ValueError(f"j must be positive (antiferromagnetic), got {self.j}")
        if self.lam < 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        for name in ("lam", "j2", "theta", "j"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def d_link(self) -> int:
        return _spin_dim(self.s_link)

    @property
    def d_bulk(self) -> int:
        return _spin_dim(self.s_bulk)

    def layout(self) -> SiteLayout:
        return SiteLayout.for_chain(self.n_sites, self.s_bulk, self.s_link)


def two_site_coupling(s_i: float, s_j: float, theta: float) -> np.ndarray:
    """Dense pair coupling on the (2s_i+1)(2s_j+1)-dimensional product space.

    For a spin-1/2 member the biquadratic term is affine in the bilinear one,
    so the coupling reduces to the plain Heisenberg exchange and theta drops
    out entirely (no affine constant is kept).
    """
    oi = spin_operators(s_i)
    oj = spin_operators(s_j)
    ss = (
        np.kron(oi.sx, oj.sx)
        + np.kron(oi.sy, oj.sy)
        + np.kron(oi.sz, oj.sz)
    )
    if oi.d == 2 or oj.d == 2:
        return ss
    return np.cos(theta) * ss + np.sin(theta) * (ss @ ss)


def _bonds(spec: ChainSpec) -> list[tuple[int, int, float]]:
    """(site_i, site_j, prefactor) list for all pair terms of the Hamiltonian."""
    n = spec.n_sites
    lam_tilde = spec.lam * spec.j
    bonds: list[tuple[int, int, float]] = []
    for i in range(2, n - 1):  # bulk NN: i = 2 .. N-2
        bonds.append((i, i + 1, spec.j))
    if spec.j2 != 0.0:
        for i in range(2, n - 2):  # bulk NNN: i = 2 .. N-3
            bonds.append((i, i + 2, spec.j * spec.j2))
    bonds.append((1, 2, lam_tilde))
    bonds.append((n - 1, n, lam_tilde))
    if spec.j2 != 0.0:
        bonds.append((1, 3, lam_tilde * spec.j2))
        bonds.append((n - 2, n, lam_tilde * spec.j2))
    return bonds


def build_hamiltonian(spec: ChainSpec, max_dim: int = DEFAULT_MAX_DIM) -> tuple[SparseHermitian, SiteLayout]:
    """Assemble the full chain Hamiltonian as an immutable CSR matrix."""
    layout = spec.layout()
    if layout.total_dim > max_dim:
        raise CapacityError(
            f"total dimension {layout.total_dim} exceeds the budget of {max_dim}; "
            "reduce N or the spin dimensions, or raise max_dim explicitly"
        )

    def site_spin(site: int) -> float:
        return spec.s_link if site in (1, spec.n_sites) else spec.s_bulk

    pair_cache: dict[tuple[float, float], np.ndarray] = {}
    rows, cols, vals = [], [], []
    for i, j, pref in _bonds(spec):
        key = (site_spin(i), site_spin(j))
        if key not in pair_cache:
            pair_cache[key] = two_site_coupling(key[0], key[1], spec.theta)
        r, c, v = embed_operator_coo(pair_cache[key], (i, j), layout)
        rows.append(r)
        cols.append(c)
        vals.append(v * pref)

    mat = scipy.sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(layout.total_dim, layout.total_dim),
    ).tocsr()
    return SparseHermitian(mat), layout


def total_sz(layout: SiteLayout) -> SparseHermitian:
    """Diagonal operator sum_i S^z_i in the global basis."""
    diag = np.zeros(layout.total_dim)
    for k, d in enumerate(layout.dims):
        s = (d - 1) / 2.0
        m = s - np.arange(d)
        left = layout.total_dim // (layout.strides[k] * d)
        diag += np.tile(np.repeat(m, layout.strides[k]), left)
    return SparseHermitian(scipy.sparse.diags(diag).tocsr(), check=False)
