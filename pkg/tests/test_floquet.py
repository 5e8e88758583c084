import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import CHECKER, TILTED, Z2, bases
from spectra.errors import NotHermitian
from spectra.floquet import (
    assemble_complex,
    assemble_plane_wave,
    assemble_real_space,
    bloch_eigenvalues,
    eigenvalues_sorted,
    f_symbol,
    grad_f,
)
from spectra.lattice import make_lattice
from spectra.potential import make_potential, random_potential

thetas = st.lists(st.floats(-2, 2, allow_nan=False), min_size=3, max_size=3)


def test_symbol_values():
    assert f_symbol([0.0, 0.0, 0.0]) == 6.0
    assert f_symbol([0.5, 0.5]) == -4.0
    assert abs(f_symbol([0.25, 0.25])) < 1e-15
    assert np.allclose(grad_f([0.25, 0.25]), [-4 * np.pi, -4 * np.pi], atol=1e-14)
    assert np.all(grad_f([0.0, 0.0]) == 0)


def test_z2_one_by_one():
    lat = make_lattice(Z2)
    for basis in (assemble_plane_wave, assemble_real_space):
        m = basis(lat, None, [0.3, 0.3]).entries
        assert m.shape == (1, 1)
        assert m[0, 0] == pytest.approx(4 * np.cos(0.6 * np.pi), abs=1e-14)
        assert m[0, 0].real == pytest.approx(-1.2360679774997898, abs=1e-14)


def test_tilted_free_at_origin():
    lat = make_lattice(TILTED)
    m = assemble_plane_wave(lat, None, [0.0, 0.0])
    assert sorted(np.diag(m.entries).real.round(12)) == [-2, -2, 0, 4]
    assert np.allclose(eigenvalues_sorted(m), [-2, -2, 0, 4], atol=1e-12)
    assert np.allclose(eigenvalues_sorted(assemble_real_space(lat, None, [0.0, 0.0])), [-2, -2, 0, 4], atol=1e-12)


def test_checkerboard_matrix():
    lat = make_lattice(CHECKER)
    pot = make_potential(lat, [-0.1, 0.1])
    m = assemble_plane_wave(lat, pot, [0.25, 0.25])
    assert np.allclose(m.entries, [[0, -0.1], [-0.1, 0]], atol=1e-15)
    assert np.allclose(eigenvalues_sorted(m), [-0.1, 0.1], atol=1e-15)
    assert np.allclose(eigenvalues_sorted(assemble_real_space(lat, None, [0, 0])), [-4, 4], atol=1e-12)


def test_complex_quasimomentum():
    lat = make_lattice(Z2)
    real = assemble_plane_wave(lat, None, [0.2, 0.1])
    assert np.array_equal(assemble_complex(lat, None, [0.2, 0.1]).entries, real.entries)
    for y in (0.5, 1.0, 2.0):
        m = assemble_complex(lat, None, [0.3 + 1j * y, 0.0])
        assert m.entries[0, 0] == pytest.approx(2 * np.cos(2 * np.pi * (0.3 + 1j * y)) + 2, rel=1e-14)
    assert abs(assemble_complex(lat, None, [0.3 + 3j, 0]).entries[0, 0]) > 1e7
    with pytest.raises(NotHermitian):
        eigenvalues_sorted(assemble_complex(make_lattice(TILTED), None, [0.1 + 0.2j, 0.3]))


def test_to_dict_shape():
    lat = make_lattice(CHECKER)
    d = assemble_plane_wave(lat, make_potential(lat, [-0.1, 0.1]), [0.25, 0.25]).to_dict()
    assert d["basis"] == "plane_wave" and len(d["real"]) == 2 and d["theta_imag"] == [0.0, 0.0]


@given(bases(max_index=30), st.integers(0, 2**31), thetas)
def test_cross_basis_oracle(basis, seed, theta):
    lat = make_lattice(basis)
    pot = random_potential(lat, 1.0, seed)
    theta = theta[: lat.dim]
    pw = assemble_plane_wave(lat, pot, theta)
    rs = assemble_real_space(lat, pot, theta)
    assert pw.hermitian_deviation() < 1e-12 and rs.hermitian_deviation() < 1e-12
    assert np.max(np.abs(eigenvalues_sorted(pw) - eigenvalues_sorted(rs))) < 1e-9


@given(bases(max_index=30), thetas)
def test_free_eigenvalues_are_shifted_symbol(basis, theta):
    lat = make_lattice(basis)
    theta = np.array(theta[: lat.dim])
    ev = eigenvalues_sorted(assemble_plane_wave(lat, None, theta))
    expected = np.sort(f_symbol(theta + lat.dual_reps))
    assert np.max(np.abs(ev - expected)) < 1e-12


@given(bases(max_index=30), st.integers(0, 2**31), thetas, st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_dual_periodicity(basis, seed, theta, shift):
    lat = make_lattice(basis)
    pot = random_potential(lat, 1.0, seed)
    theta = np.array(theta[: lat.dim])
    k = int(seed % lat.N)
    # a dual-lattice vector: a coset representative plus an integer vector
    b = lat.dual_reps[k] + np.array(shift[: lat.dim])
    e0 = bloch_eigenvalues(lat, pot, theta[None])[0]
    e1 = bloch_eigenvalues(lat, pot, (theta + b)[None])[0]
    assert np.max(np.abs(e0 - e1)) < 1e-12
