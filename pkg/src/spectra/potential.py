"""Gamma-periodic real potentials and their discrete Fourier transform."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import LengthMismatch, NotPeriodic, ValidationError
from .lattice import Lattice, dual_contains, reduce_points


@dataclass(frozen=True, eq=False)
class Potential:
    """Values of V on the canonical representatives ``lattice.primal_reps``."""

    lattice: Lattice
    values: np.ndarray

    def at(self, points) -> np.ndarray:
        """V at arbitrary integer points, folded through the lattice."""
        reps, _ = reduce_points(self.lattice, points)
        idx = [self.lattice.primal_index(r) for r in reps]
        return self.values[idx]

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True, eq=False)
class FourierPotential:
    """Coefficients on the dual representatives ``lattice.dual_reps``."""

    lattice: Lattice
    coeffs: np.ndarray


def make_potential(lat: Lattice, vals) -> Potential:
    v = np.asarray(vals, dtype=float).ravel()
    if v.size != lat.index:
        raise LengthMismatch(f"expected {lat.index} values, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("potential values must be finite")
    v = v.copy()
    v.setflags(write=False)
    return Potential(lat, v)


def zero_potential(lat: Lattice) -> Potential:
    return make_potential(lat, np.zeros(lat.index))


def direction_periodic(lat: Lattice, signs, p: int, vals) -> Potential:
    """V(n) = vals[(sum_i signs_i n_i) mod p].

    This is Gamma-periodic exactly when (1/p) * signs lies in the dual lattice.
    """
    signs = np.asarray(signs, dtype=np.int64)
    if signs.shape != (lat.dim,) or not np.all(np.abs(signs) == 1):
        raise ValueError(f"signs must be a vector of +-1 of length {lat.dim}")
    if int(p) < 2:
        raise ValueError("p must be at least 2")
    vals = np.asarray(vals, dtype=float).ravel()
    if vals.size != p:
        raise LengthMismatch(f"expected {p} values, got {vals.size}")
    if not dual_contains(lat, [Fraction(int(s), int(p)) for s in signs]):
        raise NotPeriodic(f"(1/{p}){signs.tolist()} is not in the dual lattice")
    k = (lat.primal_reps @ signs) % p
    return make_potential(lat, vals[k])


def checkerboard(lat: Lattice, v0: float, v1: float) -> Potential:
    return direction_periodic(lat, np.ones(lat.dim, dtype=np.int64), 2, [v0, v1])


def random_potential(lat: Lattice, amplitude: float, seed: int = 0) -> Potential:
    """Uniform random values rescaled so that the sup norm equals ``amplitude``."""
    rng = np.random.default_rng(seed)
    v = rng.uniform(-1.0, 1.0, lat.index)
    m = np.max(np.abs(v))
    return make_potential(lat, v * (amplitude / m) if m > 0 else v)


def _phases(lat: Lattice) -> np.ndarray:
    # exponent reduced mod N in integers before going to floating point
    n = lat.index
    k = (lat.primal_reps @ lat.dual_numer_reps.T) % n
    return np.exp(-2j * np.pi * k / n)


def fourier(pot: Potential) -> FourierPotential:
    """coeffs(b) = (1/N) sum_n V(n) exp(-2 pi i <n, b>)."""
    lat = pot.lattice
    return FourierPotential(lat, _phases(lat).T @ pot.values / lat.index)


def inverse_fourier(fp: FourierPotential) -> Potential:
    vals = _phases(fp.lattice).conj() @ fp.coeffs
    if np.max(np.abs(vals.imag), initial=0.0) > 1e-9:
        raise ValueError("coefficients do not describe a real potential")
    return make_potential(fp.lattice, vals.real)


def potential_from_config(lat: Lattice, desc: dict | None) -> Potential:
    """Build a potential from a config object (``type`` plus per-type fields)."""
    if desc is None:
        return zero_potential(lat)
    kind = desc.get("type", "explicit")
    try:
        if kind == "zero":
            return zero_potential(lat)
        if kind == "explicit":
            return make_potential(lat, desc["values"])
        if kind == "checkerboard":
            return checkerboard(lat, float(desc["v0"]), float(desc["v1"]))
        if kind == "direction_periodic":
            return direction_periodic(lat, desc["signs"], int(desc["p"]), desc["values"])
        if kind == "random":
            return random_potential(lat, float(desc["amplitude"]), int(desc.get("seed", 0)))
    except KeyError as exc:
        raise ValidationError(f"potential.{exc.args[0]}", "missing field") from None
    raise ValidationError("potential.type", f"unknown potential type {kind!r}")
