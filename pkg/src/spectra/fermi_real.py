"""Real Fermi surfaces of the free symbol and the level-crossing certificates.

A certificate for energy E is a pair of quasimomenta at which the eigenvalue
counting function N(theta, E) of the free fiber operator differs; its
existence shows E lies in the interior of some band of the free operator.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import EmptySurface, EvenLattice, NoGenericPoint, OutOfRange, TieAtLevel
from .floquet import assemble_real_space, f_symbol, grad_f
from .lattice import Lattice, is_even

RESIDUAL_TOL = 1e-12
TIE_TOL = 1e-12
DEFAULT_TAU = 1e-6
MAX_STEP = 0.05


def _wrap(theta: np.ndarray) -> np.ndarray:
    out = np.mod(theta, 1.0)
    out[out >= 1.0] = 0.0
    return out


@dataclass(frozen=True, eq=False)
class FermiSample:
    energy: float
    points: np.ndarray  # (k, d) in [0,1)^d
    generic: np.ndarray  # bool (k,)
    singular_adjacent: np.ndarray  # bool (k,)

    @property
    def residuals(self) -> np.ndarray:
        return np.abs(f_symbol(self.points) - self.energy)

    def write_csv(self, path) -> None:
        d = self.points.shape[1]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"theta{i + 1}" for i in range(d)] + ["residual", "generic"])
            for p, r, g in zip(self.points, self.residuals, self.generic):
                w.writerow([repr(float(x)) for x in p] + [repr(float(r)), int(bool(g))])


def singular_points(E: float, dim: int) -> list[tuple[float, ...]]:
    """Critical points {0,1/2}^d on the level set F = E (exact integer comparison)."""
    out = []
    for corner in product((0, 1), repeat=dim):
        value = 2 * (dim - 2 * sum(corner))
        if E == value:
            out.append(tuple(0.5 * c for c in corner))
    return out


def generic_mask(lat: Lattice, points, E: float, tau: float = DEFAULT_TAU) -> np.ndarray:
    """Vectorized genericity test for points already on the Fermi surface."""
    points = np.atleast_2d(points)
    ok = np.linalg.norm(grad_f(points), axis=1) > tau
    for k, b in enumerate(lat.dual_reps):
        if not np.any(lat.dual_numer_reps[k]):
            continue
        ok &= np.abs(f_symbol(points + b) - E) > tau
    return ok


def is_generic(lat: Lattice, theta, E: float, tau: float = DEFAULT_TAU) -> bool:
    """No nonzero dual translate of theta stays within tau of the level E, and grad F(theta) != 0."""
    theta = np.asarray(theta, dtype=float)
    if abs(f_symbol(theta) - E) >= RESIDUAL_TOL:
        raise ValueError(f"theta is not on the Fermi surface F = {E}")
    return bool(generic_mask(lat, theta[None], E, tau)[0])


def _near_singular(points: np.ndarray, E: float, radius: float) -> np.ndarray:
    corners = np.array(singular_points(E, points.shape[1])).reshape(-1, points.shape[1])
    if len(corners) == 0:
        return np.zeros(len(points), dtype=bool)
    diff = points[:, None, :] - corners[None, :, :]
    diff -= np.round(diff)
    return np.min(np.linalg.norm(diff, axis=2), axis=1) < radius


def fermi_sample(
    E: float,
    k: int,
    dim: int,
    seed: int = 0,
    lattice: Lattice | None = None,
    tau: float = DEFAULT_TAU,
    max_draws: int = 2_000_000,
    singular_radius: float = 1e-3,
) -> FermiSample:
    """Up to ``k`` points on {F = E}: theta_2..theta_d uniform, theta_1 solved by arccos.

    Genericity is judged against ``lattice`` (Z^d when omitted).
    """
    if abs(E) > 2 * dim:
        raise EmptySurface(f"|E| = {abs(E)} exceeds {2 * dim}")
    rng = np.random.default_rng(seed)
    if abs(E) == 2 * dim:
        pts = np.full((1, dim), 0.0 if E > 0 else 0.5)
    else:
        found, drawn = [], 0
        batch = max(4 * k, 1024)
        while sum(len(f) for f in found) < k and drawn < max_draws:
            rest = rng.random((batch, dim - 1))
            sgn = rng.choice((-1.0, 1.0), batch)
            drawn += batch
            x = (E - f_symbol(rest)) / 2.0 if dim > 1 else np.full(batch, E / 2.0)
            keep = np.abs(x) <= 1.0
            t1 = sgn[keep] * np.arccos(x[keep]) / (2 * np.pi)
            cand = _wrap(np.column_stack([t1, rest[keep]]))
            cand = cand[np.abs(f_symbol(cand) - E) < RESIDUAL_TOL]
            found.append(cand)
        pts = np.concatenate(found)[:k] if found else np.empty((0, dim))
    lat_mask = (
        generic_mask(lattice, pts, E, tau)
        if lattice is not None
        else np.linalg.norm(grad_f(pts), axis=1) > tau
    )
    return FermiSample(float(E), pts, lat_mask, _near_singular(pts, E, singular_radius))


def counting_function(lat: Lattice, theta, E: float) -> int:
    """N(theta, E) = #{j : E_j(theta) <= E} for the free operator.

    Computed both from the eigenvalues of the real-space fiber matrix and by
    counting dual translates with F(theta + b) <= E; the two must agree.
    """
    theta = np.asarray(theta, dtype=float)
    vals = f_symbol(theta[None, :] + lat.dual_reps)
    if np.any(np.abs(vals - E) < TIE_TOL):
        raise TieAtLevel(f"F(theta + b) within {TIE_TOL} of E = {E}")
    direct = int(np.count_nonzero(vals <= E))
    eig = np.linalg.eigvalsh(assemble_real_space(lat, None, theta).entries)
    spectral = int(np.count_nonzero(eig <= E))
    if direct != spectral:
        raise RuntimeError(f"counting formulas disagree: {direct} vs {spectral}")
    return direct


@dataclass(frozen=True)
class BzCertificate:
    energy: float
    theta1: tuple[float, ...]
    theta2: tuple[float, ...]
    count1: int
    count2: int
    method: str  # "gradient-walk" | "parity-walk"

    def to_dict(self) -> dict:
        return {
            "energy": self.energy,
            "theta1": list(self.theta1),
            "theta2": list(self.theta2),
            "count1": self.count1,
            "count2": self.count2,
            "method": self.method,
        }


def _walk(lat, theta, u, E, accept, t_max=MAX_STEP, t_min=1e-12):
    """Largest t = t_max / 2^k with tie-free endpoints whose counts satisfy ``accept``."""
    t = t_max
    while t >= t_min:
        a, b = theta - t * u, theta + t * u
        try:
            ca, cb = counting_function(lat, a, E), counting_function(lat, b, E)
        except TieAtLevel:
            ca = cb = None
        if ca is not None and accept(ca, cb):
            return a, b, ca, cb
        t /= 2.0
    return None


def _gradient_walk(lat, E, retries, rng, tau):
    sample = fermi_sample(E, retries, lat.dim, int(rng.integers(2**32)), lattice=lat, tau=tau)
    for theta in sample.points[sample.generic]:
        g = grad_f(theta)
        u = g / np.linalg.norm(g)
        hit = _walk(lat, theta, u, E, lambda a, b: a != b)
        if hit is not None:
            return hit
    return None


def _parity_walk(lat, retries, rng, tau):
    """d = 2, E = 0: walk off a point in the interior of a segment of F_0."""
    for _ in range(retries):
        t1 = rng.random()
        theta = _wrap(np.array([t1, rng.choice((-1.0, 1.0)) * t1 + 0.5]))
        shifted = theta[None, :] + lat.dual_reps
        vals = np.abs(f_symbol(shifted))
        on = vals < RESIDUAL_TOL
        if np.any((vals >= RESIDUAL_TOL) & (vals <= tau)):
            continue
        grads = grad_f(shifted)
        norms = np.linalg.norm(grads, axis=1)
        if np.any(norms[on] <= tau) or np.count_nonzero(on) % 2 == 0:
            continue
        phi = rng.uniform(0, 2 * np.pi)
        u = np.array([np.cos(phi), np.sin(phi)])
        if np.any(np.abs(grads[on] @ u) / norms[on] < 1e-3):
            continue
        hit = _walk(lat, theta, u, 0.0, lambda a, b: (a - b) % 2 == 1)
        if hit is not None:
            return hit
    return None


def bz_certificate(
    lat: Lattice,
    E: float,
    retries: int = 64,
    seed: int = 0,
    method: str = "auto",
    tau: float = DEFAULT_TAU,
) -> BzCertificate:
    """Find theta_1, theta_2 with N(theta_1, E) != N(theta_2, E).

    ``method="auto"`` uses the parity walk for d = 2 and E = 0 and the
    gradient walk at a generic Fermi point otherwise.
    """
    d = lat.dim
    if not abs(E) < 2 * d:
        raise OutOfRange(f"E = {E} is not inside (-{2 * d}, {2 * d})")
    if is_even(lat):
        raise EvenLattice("the counting function is constant for even lattices")
    if method == "auto":
        method = "parity-walk" if d == 2 and abs(E) < 1e-9 else "gradient-walk"
    rng = np.random.default_rng(seed)
    if method == "parity-walk":
        if d != 2 or abs(E) >= 1e-9:
            raise ValueError("the parity walk applies only to d = 2, E = 0")
        hit = _parity_walk(lat, retries, rng, tau)
    elif method == "gradient-walk":
        hit = _gradient_walk(lat, E, retries, rng, tau)
    else:
        raise ValueError(f"unknown method {method!r}")
    if hit is None:
        raise NoGenericPoint(f"no certificate for E = {E} after {retries} attempts")
    a, b, ca, cb = hit
    cert = BzCertificate(float(E), tuple(map(float, a)), tuple(map(float, b)), ca, cb, method)
    if counting_function(lat, a, E) == counting_function(lat, b, E):
        raise AssertionError("certificate failed revalidation")
    return cert


@dataclass
class SweepReport:
    energies: list[float]
    certificates: list[BzCertificate] = field(default_factory=list)
    failures: list[tuple[float, str]] = field(default_factory=list)

    @property
    def all_certified(self) -> bool:
        return not self.failures and len(self.certificates) == len(self.energies)

    def to_dict(self) -> dict:
        return {
            "n_energies": len(self.energies),
            "n_certified": len(self.certificates),
            "all_certified": self.all_certified,
            "failures": [{"energy": e, "reason": r} for e, r in self.failures],
            "certificates": [c.to_dict() for c in self.certificates],
        }


def bz_sweep(lat: Lattice, energies, retries: int = 64, seed: int = 0) -> SweepReport:
    if is_even(lat):
        raise EvenLattice("bz_sweep requires a lattice that is not even")
    energies = [float(e) for e in energies]
    report = SweepReport(energies)
    for i, E in enumerate(energies):
        try:
            report.certificates.append(bz_certificate(lat, E, retries, seed + i))
        except (NoGenericPoint, OutOfRange) as exc:
            report.failures.append((E, exc.reason))
    return report
