"""Spin-s operators, rotations, and the tensor-product layout of a mixed-dimension chain.

Conventions (hbar = 1):
  * a spin-s site has dimension d = 2s + 1,
  * the local basis |0>, |1>, ..., |2s> is ordered by descending S^z eigenvalue,
    so |0> carries the maximum eigenvalue +s,
  * the global basis of a chain is the row-major tensor product
    site 1 (x) site 2 (x) ... (x) site N; site N has stride 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse


def _spin_dim(s: float) -> int:
    """Validate a half-integer spin quantum number and return 2s+1."""
    two_s = 2.0 * s
    if abs(two_s - round(two_s)) > 1e-12 or round(two_s) < 1:
        raise ValueError(f"spin must be a positive half-integer (1/2, 1, 3/2, ...), got {s}")
    return int(round(two_s)) + 1


@dataclass(frozen=True)
class SpinOps:
    """The operator triple (S^x, S^y, S^z) for one spin-s site.

    sz is real diagonal with entries s, s-1, ..., -s; sx is real symmetric and
    sy purely imaginary antisymmetric, so that [sx, sy] = i sz (and cyclic).
    """

    s: float
    d: int
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray


def spin_operators(s: float) -> SpinOps:
    """Construct S^x, S^y, S^z for spin s in the descending-S^z basis."""
    d = _spin_dim(s)
    m = s - np.arange(d)  # eigenvalues s, s-1, ..., -s
    sz = np.diag(m).astype(np.complex128)
    # S+ |s,m> = sqrt(s(s+1) - m(m+1)) |s,m+1>; with descending ordering the
    # raising operator connects index i to i-1.
    up = np.sqrt(s * (s + 1.0) - m[1:] * (m[1:] + 1.0))
    sp = np.zeros((d, d), dtype=np.complex128)
    sp[np.arange(d - 1), np.arange(1, d)] = up
    sm = sp.conj().T
    sx = 0.5 * (sp + sm)
    sy = -0.5j * (sp - sm)
    return SpinOps(s=s, d=d, sx=sx, sy=sy, sz=sz)


def rotation_unitary(s: float, axis: str, angle: float) -> np.ndarray:
    """U = exp(-i * angle * S^axis) for axis in {x, y, z}."""
    if axis not in ("x", "y", "z"):
        raise ValueError(f"axis must be one of 'x', 'y', 'z', got {axis!r}")
    if not np.isfinite(angle):
        raise ValueError("rotation angle must be finite")
    ops = spin_operators(s)
    gen = {"x": ops.sx, "y": ops.sy, "z": ops.sz}[axis]
    return scipy.linalg.expm(-1j * angle * gen)


@dataclass(frozen=True)
class SiteLayout:
    """Per-site dimensions and index strides of the global row-major basis.

    Sites are numbered 1..N; sites 1 and N are the link sites A and B and the
    rest form the bulk.  stride(N) = 1 and stride(i) = stride(i+1)*dims(i+1).
    """

    dims: tuple[int, ...]
    strides: tuple[int, ...]
    total_dim: int

    @classmethod
    def from_dims(cls, dims: tuple[int, ...] | list[int]) -> "SiteLayout":
        dims = tuple(int(d) for d in dims)
        if len(dims) < 2 or any(d < 1 for d in dims):
            raise ValueError("layout needs at least two sites with dimension >= 1")
        strides = [1] * len(dims)
        for i in range(len(dims) - 2, -1, -1):
            strides[i] = strides[i + 1] * dims[i + 1]
        return cls(dims=dims, strides=tuple(strides), total_dim=strides[0] * dims[0])

    @classmethod
    def for_chain(cls, n_sites: int, s_bulk: float, s_link: float) -> "SiteLayout":
        """Layout [d_link, d_bulk, ..., d_bulk, d_link] for an N-site chain."""
        if n_sites < 4:
            raise ValueError(f"need at least 4 sites (two links + two bulk), got {n_sites}")
        d_b = _spin_dim(s_bulk)
        d_l = _spin_dim(s_link)
        return cls.from_dims((d_l,) + (d_b,) * (n_sites - 2) + (d_l,))

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    def site_spin_dim(self, site: int) -> int:
        """Dimension of a 1-based site index."""
        if not 1 <= site <= self.n_sites:
            raise ValueError(f"site {site} out of range 1..{self.n_sites}")
        return self.dims[site - 1]


class SparseHermitian:
    """Immutable CSR wrapper for a Hermitian operator on the chain Hilbert space."""

    __slots__ = ("mat", "dim")

    def __init__(self, mat: scipy.sparse.spmatrix, check: bool = True):
        mat = scipy.sparse.csr_matrix(mat)
        if mat.shape[0] != mat.shape[1]:
            raise ValueError("operator must be square")
        if check:
            dev = abs(mat - mat.getH()).max() if mat.nnz else 0.0
            scale = max(1.0, abs(mat).max() if mat.nnz else 0.0)
            if dev > 1e-12 * scale:
                raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3e})")
        mat.sum_duplicates()
        self.mat = mat
        self.dim = mat.shape[0]

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self.mat.dot(v)

    def toarray(self) -> np.ndarray:
        return self.mat.toarray()

    def diagonal(self) -> np.ndarray:
        return self.mat.diagonal()

    @property
    def nnz(self) -> int:
        return self.mat.nnz

    def __neg__(self) -> "SparseHermitian":
        return SparseHermitian(-self.mat, check=False)


def _rest_offsets(layout: SiteLayout, sites: tuple[int, ...]) -> np.ndarray:
    """Global indices of all basis states with the given sites fixed at index 0."""
    offs = np.zeros(1, dtype=np.int64)
    for k in range(layout.n_sites):
        if (k + 1) in sites:
            continue
        step = np.arange(layout.dims[k], dtype=np.int64) * layout.strides[k]
        offs = (offs[:, None] + step[None, :]).ravel()
    return offs


def embed_operator(op: np.ndarray, sites: tuple[int, ...] | int, layout: SiteLayout) -> SparseHermitian:
    """Embed an operator acting on one or two sites into the full chain basis.

    ``op`` is indexed row-major over the listed sites, identity everywhere
    else.  The Kronecker structure is exploited directly: only the nonzero
    entries of ``op`` are replicated across the untouched-site offsets, so no
    dense product over the full dimension is ever formed.
    """
    rows, cols, vals = embed_operator_coo(op, sites, layout)
    mat = scipy.sparse.coo_matrix(
        (vals, (rows, cols)), shape=(layout.total_dim, layout.total_dim)
    ).tocsr()
    return SparseHermitian(mat)


def embed_operator_coo(
    op: np.ndarray, sites: tuple[int, ...] | int, layout: SiteLayout
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """COO triplets of the embedded operator (used to assemble Hamiltonian sums)."""
    if isinstance(sites, int):
        sites = (sites,)
    sites = tuple(int(x) for x in sites)
    if len(set(sites)) != len(sites):
        raise ValueError(f"sites must be distinct, got {sites}")
    for x in sites:
        if not 1 <= x <= layout.n_sites:
            raise ValueError(f"site {x} out of range 1..{layout.n_sites}")
    op = np.asarray(op)
    block = 1
    for x in sites:
        block *= layout.dims[x - 1]
    if op.shape != (block, block):
        raise ValueError(f"operator shape {op.shape} does not match site dims product {block}")

    # decompose the local row/column indices into per-site digits
    r_loc, c_loc = np.nonzero(op)
    vals = np.ascontiguousarray(op[r_loc, c_loc], dtype=np.complex128)
    site_dims = [layout.dims[x - 1] for x in sites]
    site_strides = [layout.strides[x - 1] for x in sites]
    r_glob = np.zeros(len(r_loc), dtype=np.int64)
    c_glob = np.zeros(len(c_loc), dtype=np.int64)
    rr, cc = r_loc.astype(np.int64), c_loc.astype(np.int64)
    for d, stride in zip(reversed(site_dims), reversed(site_strides)):
        r_glob += (rr % d) * stride
        c_glob += (cc % d) * stride
        rr //= d
        cc //= d

    offs = _rest_offsets(layout, sites)
    rows = (r_glob[:, None] + offs[None, :]).ravel()
    cols = (c_glob[:, None] + offs[None, :]).ravel()
    return rows, cols, np.repeat(vals, len(offs))
