"""Band functions on the dual fundamental domain, band edges and spectral gaps.

Quasimomenta are parametrized by dual-basis coordinates eta in [0,1)^d via
theta = sum_i eta_i b_i, which tiles the fundamental domain exactly for any
lattice.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .floquet import bloch_eigenvalues, coupling_matrix, plane_wave_stack
from .lattice import Lattice
from .potential import Potential, zero_potential

DEFAULT_GAP_TOL = 1e-6
DEFAULT_EDGE_TOL = 1e-9


def lipschitz_constant(lat: Lattice) -> float:
    """C = 4 pi sqrt(d) max |b_i|: bound on |dE_j/d eta| along any single dual axis."""
    d = lat.dim
    return 4.0 * np.pi * np.sqrt(d) * float(np.max(np.linalg.norm(lat.dual_basis, axis=0)))


@dataclass(frozen=True, eq=False)
class BandGrid:
    lattice: Lattice
    potential: Potential
    resolution: tuple[int, ...]
    eta: np.ndarray  # (K, d)
    samples: np.ndarray  # (K, N), ascending along axis 1

    @property
    def thetas(self) -> np.ndarray:
        return self.eta @ self.lattice.dual_basis.T

    def grid_error_bound(self) -> float:
        """Worst-case distance between a band extremum and the best grid node value."""
        d = self.lattice.dim
        return lipschitz_constant(self.lattice) * d / (2.0 * min(self.resolution))

    def write_csv(self, path) -> None:
        d, n = self.lattice.dim, self.lattice.index
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"eta{i + 1}" for i in range(d)] + [f"E{j + 1}" for j in range(n)])
            for eta, row in zip(self.eta, self.samples):
                w.writerow([repr(float(x)) for x in eta] + [repr(float(x)) for x in row])


@dataclass(frozen=True)
class BandEdge:
    band: int  # 0-based
    lower: float
    upper: float
    argmin: tuple[float, ...]  # theta coordinates
    argmax: tuple[float, ...]

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def to_dict(self) -> dict:
        return {
            "band": self.band,
            "lower": self.lower,
            "upper": self.upper,
            "argmin": list(self.argmin),
            "argmax": list(self.argmax),
        }


@dataclass(frozen=True)
class BandSummary:
    edges: list[BandEdge]
    gaps: list[tuple[float, float]]
    is_interval: bool
    refined: bool = False
    edge_error: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "edges": [e.to_dict() for e in self.edges],
            "gaps": [list(g) for g in self.gaps],
            "is_interval": self.is_interval,
            "refined": self.refined,
            "edge_error": self.edge_error,
        }


def eta_grid(resolution) -> np.ndarray:
    axes = [np.arange(r) / r for r in resolution]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _resolution(lat: Lattice, resolution) -> tuple[int, ...]:
    if np.isscalar(resolution):
        res = (int(resolution),) * lat.dim
    else:
        res = tuple(int(r) for r in resolution)
    if len(res) != lat.dim or min(res) < 2:
        raise ValueError(f"resolution must give >= 2 nodes on each of {lat.dim} axes")
    return res


def compute_band_grid(lat: Lattice, pot: Potential | None, resolution) -> BandGrid:
    pot = zero_potential(lat) if pot is None else pot
    res = _resolution(lat, resolution)
    eta = eta_grid(res)
    samples = bloch_eigenvalues(lat, pot, eta @ lat.dual_basis.T)
    return BandGrid(lat, pot, res, eta, samples)


class _BandEvaluator:
    """E_j as a function of eta, with the Fourier coupling computed once."""

    def __init__(self, lat: Lattice, pot: Potential):
        self.lat = lat
        self.coupling = coupling_matrix(lat, pot)

    def __call__(self, eta: np.ndarray, band: int) -> np.ndarray:
        thetas = np.atleast_2d(eta) @ self.lat.dual_basis.T
        mats = plane_wave_stack(self.lat, None, thetas, self.coupling)
        return np.linalg.eigvalsh(mats)[:, band]


def _polish(evaluate, band, eta0, step, sign, tol, xtol, max_iter=80):
    """Nested 9-point-per-axis subgrids, each 4x finer, around the incumbent."""
    d = len(eta0)
    offsets = np.array(list(product(np.arange(-4, 5) / 4.0, repeat=d)))
    best_eta = np.asarray(eta0, dtype=float)
    best = sign * evaluate(best_eta[None], band)[0]
    for _ in range(max_iter):
        pts = best_eta + step * offsets
        vals = sign * evaluate(pts, band)
        k = int(np.argmax(vals))
        moved = vals[k] - best
        if vals[k] > best:
            best_eta, best = pts[k], vals[k]
        on_boundary = np.max(np.abs(offsets[k])) == 1.0
        if not (on_boundary and moved > tol):
            step /= 4.0
        if moved < tol and step < xtol:
            break
    return best_eta, sign * best


def _candidates(values: np.ndarray, k: int) -> np.ndarray:
    order = np.lexsort((np.arange(len(values)), -values))
    return order[: min(k, len(values))]


def _gaps(intervals: list[tuple[float, float]], threshold: float) -> list[tuple[float, float]]:
    gaps = []
    ordered = sorted(intervals)
    lo, hi = ordered[0]
    for a, b in ordered[1:]:
        if a > hi + threshold:
            gaps.append((hi, a))
            lo, hi = a, b
        else:
            hi = max(hi, b)
    return gaps


def band_edges(
    grid: BandGrid,
    refine: bool = True,
    tol: float = DEFAULT_EDGE_TOL,
    gap_tol: float = DEFAULT_GAP_TOL,
    candidates: int = 4,
    xtol: float = 1e-9,
) -> BandSummary:
    """Per-band extrema E_j^-/E_j^+ with their arg-extremizers in theta coordinates.

    With ``refine`` each extremum is polished from the ``candidates`` best grid
    nodes by nested subgrids until the edge moves by less than ``tol`` and the
    subgrid step is below ``xtol``.
    """
    lat = grid.lattice
    evaluate = _BandEvaluator(lat, grid.potential)
    step = 1.0 / min(grid.resolution)
    edges = []
    for j in range(lat.index):
        col = grid.samples[:, j]
        found = {}
        for sign in (-1, 1):
            best_eta, best_val = None, None
            for node in _candidates(sign * col, candidates if refine else 1):
                eta, val = grid.eta[node], col[node]
                if refine:
                    eta, val = _polish(evaluate, j, eta, step, sign, tol, xtol)
                if best_val is None or sign * val > sign * best_val:
                    best_eta, best_val = eta, val
            found[sign] = (float(best_val), tuple(float(x) for x in lat.dual_basis @ best_eta))
        edges.append(BandEdge(j, found[-1][0], found[1][0], found[-1][1], found[1][1]))
    err = tol if refine else grid.grid_error_bound()
    summary = BandSummary(edges, [], True, refine, err)
    gaps = spectral_gaps(summary, gap_tol)
    return BandSummary(edges, gaps, not gaps, refine, err)


def compute_band_summary(lat: Lattice, pot: Potential | None, resolution, **kwargs) -> BandSummary:
    return band_edges(compute_band_grid(lat, pot, resolution), **kwargs)


def spectral_gaps(summary: BandSummary, tol: float = DEFAULT_GAP_TOL) -> list[tuple[float, float]]:
    """Open intervals between merged bands wider than both ``tol`` and the edge error."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    threshold = max(tol, summary.edge_error)
    return _gaps([(e.lower, e.upper) for e in summary.edges], threshold)


def flat_band_check(summary: BandSummary) -> float:
    """Smallest band width min_j (E_j^+ - E_j^-)."""
    return min(e.width for e in summary.edges)
