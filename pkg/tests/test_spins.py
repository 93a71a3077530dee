"""Spin operator algebra, rotations, and sparse embedding."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinlink import SiteLayout, embed_operator, rotation_unitary, spin_operators

from oracles import dense_embed

SPINS = [0.5, 1.0, 1.5, 2.0, 2.5]


@pytest.mark.parametrize("s", SPINS)
def test_commutators_and_casimir(s):
    o = spin_operators(s)
    eye = np.eye(o.d)
    assert np.abs(o.sx @ o.sy - o.sy @ o.sx - 1j * o.sz).max() < 1e-12
    assert np.abs(o.sy @ o.sz - o.sz @ o.sy - 1j * o.sx).max() < 1e-12
    assert np.abs(o.sz @ o.sx - o.sx @ o.sz - 1j * o.sy).max() < 1e-12
    assert np.abs(o.sx @ o.sx + o.sy @ o.sy + o.sz @ o.sz - s * (s + 1) * eye).max() < 1e-12


@pytest.mark.parametrize("s", SPINS)
def test_realness_and_symmetry(s):
    o = spin_operators(s)
    assert np.abs(o.sx.imag).max() == 0 and np.abs(o.sx - o.sx.T).max() == 0
    assert np.abs(o.sz.imag).max() == 0 and np.count_nonzero(o.sz - np.diag(np.diag(o.sz))) == 0
    assert np.abs(o.sy.real).max() == 0 and np.abs(o.sy + o.sy.T).max() == 0


def test_sz_descending_from_maximum():
    o = spin_operators(1.5)
    assert np.allclose(np.diag(o.sz).real, [1.5, 0.5, -0.5, -1.5])


def test_pauli_halves():
    o = spin_operators(0.5)
    assert np.allclose(o.sx, [[0, 0.5], [0.5, 0]])
    assert np.allclose(o.sy, [[0, -0.5j], [0.5j, 0]])
    assert np.allclose(o.sz, [[0.5, 0], [0, -0.5]])


def test_spin_one_ladder():
    o = spin_operators(1.0)
    r = 1.0 / np.sqrt(2.0)
    assert np.allclose(o.sx, [[0, r, 0], [r, 0, r], [0, r, 0]])
    assert np.allclose(np.diag(o.sz).real, [1, 0, -1])


@pytest.mark.parametrize("s", [0.0, -0.5, 0.3, 1.2])
def test_invalid_spin_rejected(s):
    with pytest.raises(ValueError):
        spin_operators(s)


@pytest.mark.parametrize("s", SPINS)
@pytest.mark.parametrize("axis", ["x", "y", "z"])
def test_rotation_unitarity(s, axis):
    u = rotation_unitary(s, axis, 0.8371)
    assert np.abs(u.conj().T @ u - np.eye(u.shape[0])).max() < 1e-12
    assert np.allclose(rotation_unitary(s, axis, 0.0), np.eye(u.shape[0]), atol=1e-14)


def test_qubit_rotation_closed_form():
    # Uz(phi) Uy(omega) |0> = cos(w/2)|0> + e^{i phi} sin(w/2)|1> up to global phase
    w, phi = 1.234, 2.5
    got = rotation_unitary(0.5, "z", phi) @ rotation_unitary(0.5, "y", w) @ np.array([1.0, 0.0])
    want = np.array([np.cos(w / 2), np.exp(1j * phi) * np.sin(w / 2)])
    assert abs(abs(np.vdot(want, got)) - 1.0) < 1e-12


def test_qutrit_rotation_closed_form():
    w, phi = 0.731, 4.2
    got = rotation_unitary(1.0, "z", phi) @ rotation_unitary(1.0, "y", w) @ np.array([1.0, 0, 0])
    c, s = np.cos(w / 2), np.sin(w / 2)
    want = np.array([np.exp(-1j * phi) * c * c, np.sqrt(2) * c * s, np.exp(1j * phi) * s * s])
    assert abs(abs(np.vdot(want, got)) - 1.0) < 1e-12


def test_layout_strides():
    lay = SiteLayout.for_chain(5, s_bulk=0.5, s_link=1.0)
    assert lay.dims == (3, 2, 2, 2, 3)
    assert lay.total_dim == 3 * 2 * 2 * 2 * 3
    assert lay.strides[-1] == 1
    for i in range(lay.n_sites - 1):
        assert lay.strides[i] == lay.strides[i + 1] * lay.dims[i + 1]


def test_embed_single_site_diag():
    lay = SiteLayout.from_dims((2, 2))
    sz = spin_operators(0.5).sz
    emb = embed_operator(sz, (1,), lay)
    assert np.allclose(emb.toarray(), np.diag([0.5, 0.5, -0.5, -0.5]))


def test_embed_identity_and_trace():
    lay = SiteLayout.from_dims((2, 3, 2))
    op = np.diag([1.0, 2.0, 3.0])
    emb = embed_operator(op, (2,), lay)
    assert np.allclose(np.eye(12), embed_operator(np.eye(3), (2,), lay).toarray())
    assert abs(np.trace(emb.toarray()) - np.trace(op) * 4) < 1e-12


@pytest.mark.parametrize("sites", [(1, 2), (1, 3), (2, 4), (1, 4)])
def test_embed_two_site_matches_dense_oracle(sites):
    dims = (2, 3, 2, 3)
    lay = SiteLayout.from_dims(dims)
    rng = np.random.default_rng(sum(sites))
    d = dims[sites[0] - 1] * dims[sites[1] - 1]
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    op = m + m.conj().T
    got = embed_operator(op, sites, lay).toarray()
    want = dense_embed(op, sites, dims)
    assert np.abs(got - want).max() < 1e-12


def test_embed_disjoint_sites_commute():
    lay = SiteLayout.from_dims((2, 2, 3, 2))
    a = embed_operator(spin_operators(0.5).sx, (1,), lay)
    b = embed_operator(spin_operators(1.0).sz, (3,), lay)
    assert np.abs((a.mat @ b.mat - b.mat @ a.mat).toarray()).max() < 1e-14


def test_embed_rejects_bad_input():
    lay = SiteLayout.from_dims((2, 2, 2))
    with pytest.raises(ValueError):
        embed_operator(np.eye(2), (5,), lay)
    with pytest.raises(ValueError):
        embed_operator(np.eye(3), (1,), lay)
    with pytest.raises(ValueError):
        embed_operator(np.eye(4), (2, 2), lay)


@settings(max_examples=25, deadline=None)
@given(
    s=st.sampled_from(SPINS),
    axis=st.sampled_from(["x", "y", "z"]),
    angle=st.floats(-10.0, 10.0, allow_nan=False),
)
def test_rotation_always_unitary(s, axis, angle):
    u = rotation_unitary(s, axis, angle)
    assert np.abs(u.conj().T @ u - np.eye(u.shape[0])).max() < 1e-11


@settings(max_examples=40, deadline=None)
@given(dims=st.lists(st.integers(1, 5), min_size=2, max_size=8))
def test_layout_laws(dims):
    lay = SiteLayout.from_dims(dims)
    assert lay.total_dim == int(np.prod(dims))
    assert lay.strides[-1] == 1
    # index decomposition round-trips through the strides
    idx = lay.total_dim - 1
    digits = [(idx // s) % d for s, d in zip(lay.strides, lay.dims)]
    assert digits == [d - 1 for d in lay.dims]
