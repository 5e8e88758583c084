"""Bloch fiber matrices h(theta) in the plane-wave and real-space bases.

The plane-wave matrix at quasimomentum theta is indexed by the dual cosets b:
``delta_bc F(theta + b) + Vhat(b - c)``. The real-space matrix acts on values at
the primal representatives with quasi-periodic folding of the hopping terms.
Both are unitarily equivalent for real theta.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian
from .lattice import Lattice, reduce_points
from .potential import Potential, fourier, zero_potential

HERMITIAN_TOL = 1e-12


def f_symbol(theta) -> np.ndarray:
    """F(theta) = sum_i 2 cos(2 pi theta_i); broadcasts over leading axes, accepts complex."""
    theta = np.asarray(theta)
    return 2.0 * np.cos(2.0 * np.pi * theta).sum(axis=-1)


def grad_f(theta) -> np.ndarray:
    theta = np.asarray(theta)
    return -4.0 * np.pi * np.sin(2.0 * np.pi * theta)


@dataclass(frozen=True, eq=False)
class BlochMatrix:
    lattice: Lattice
    theta: np.ndarray
    entries: np.ndarray
    basis_tag: str  # "plane_wave" | "real_space"

    def hermitian_deviation(self) -> float:
        a = self.entries
        return float(np.max(np.abs(a - a.conj().T), initial=0.0))

    def to_dict(self) -> dict:
        a = self.entries
        theta = np.asarray(self.theta, dtype=complex)
        return {
            "basis": self.basis_tag,
            "theta_real": theta.real.tolist(),
            "theta_imag": theta.imag.tolist(),
            "real": a.real.tolist(),
            "imag": a.imag.tolist(),
        }


def _check(lat: Lattice, pot: Potential | None) -> Potential:
    if pot is None:
        return zero_potential(lat)
    if pot.lattice is not lat and not np.array_equal(pot.lattice.basis, lat.basis):
        raise ValueError("potential is defined on a different lattice")
    return pot


def coupling_matrix(lat: Lattice, pot: Potential | None) -> np.ndarray:
    """The constant part Vhat(b - c) of the plane-wave matrix."""
    pot = _check(lat, pot)
    c = fourier(pot).coeffs[lat.dual_difference_table]
    return 0.5 * (c + c.conj().T)


def plane_wave_stack(lat: Lattice, pot: Potential | None, thetas, coupling=None) -> np.ndarray:
    """Plane-wave matrices for a batch of quasimomenta, shape (K, N, N).

    ``thetas`` has shape (K, d) and may be complex. Pass a precomputed
    ``coupling`` to skip the Fourier transform in tight loops.
    """
    thetas = np.atleast_2d(np.asarray(thetas))
    if coupling is None:
        coupling = coupling_matrix(lat, pot)
    diag = f_symbol(thetas[:, None, :] + lat.dual_reps[None, :, :])  # (K, N)
    out = np.broadcast_to(coupling, (len(thetas),) + coupling.shape).astype(complex)
    idx = np.arange(lat.index)
    out[:, idx, idx] += diag
    return out


def assemble_plane_wave(lat: Lattice, pot: Potential | None, theta) -> BlochMatrix:
    theta = np.asarray(theta, dtype=float)
    return BlochMatrix(lat, theta, plane_wave_stack(lat, pot, theta[None])[0], "plane_wave")


def assemble_complex(lat: Lattice, pot: Potential | None, theta) -> BlochMatrix:
    """Analytic continuation of the plane-wave matrix to complex quasimomenta."""
    theta = np.asarray(theta, dtype=complex)
    return BlochMatrix(lat, theta, plane_wave_stack(lat, pot, theta[None])[0], "plane_wave")


def assemble_real_space(lat: Lattice, pot: Potential | None, theta) -> BlochMatrix:
    pot = _check(lat, pot)
    theta = np.asarray(theta, dtype=float)
    n, d = lat.index, lat.dim
    mat = np.zeros((n, n), dtype=complex)
    steps = np.vstack([np.eye(d, dtype=np.int64), -np.eye(d, dtype=np.int64)])
    for i, site in enumerate(lat.primal_reps):
        reps, shifts = reduce_points(lat, site[None, :] + steps)
        phases = np.exp(2j * np.pi * (shifts @ theta))
        for rep, ph in zip(reps, phases):
            mat[i, lat.primal_index(rep)] += ph
    mat[np.arange(n), np.arange(n)] += pot.values
    return BlochMatrix(lat, theta, mat, "real_space")


def eigenvalues_sorted(m: BlochMatrix) -> np.ndarray:
    """Ascending self-adjoint spectrum; raises NotHermitian for non-Hermitian input."""
    dev = m.hermitian_deviation()
    if not dev < HERMITIAN_TOL:
        raise NotHermitian(f"hermitian deviation {dev:.3e} (complex quasimomentum?)")
    return np.linalg.eigvalsh(m.entries)


def bloch_eigenvalues(lat: Lattice, pot: Potential | None, thetas, chunk: int = 65536) -> np.ndarray:
    """Sorted band values E_1 <= ... <= E_N for each real theta, shape (K, N)."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    coupling = coupling_matrix(lat, pot)
    out = np.empty((len(thetas), lat.index))
    for start in range(0, len(thetas), chunk):
        block = plane_wave_stack(lat, None, thetas[start:start + chunk], coupling)
        out[start:start + chunk] = np.linalg.eigvalsh(block)
    return out
