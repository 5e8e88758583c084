"""det(h(theta) - E) as a Laurent polynomial in z = exp(2 pi i theta_1).

Also: discriminants, the double-root test at band edges, the separation scan
for large imaginary quasimomenta, and a box-counting probe for the level sets
{E_j = E_j^+-} of band functions.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .bands import BandSummary, _BandEvaluator, compute_band_summary, eta_grid
from .errors import DegenerateLeading, EdgeNotConverged, HypothesisFailed
from .floquet import coupling_matrix, f_symbol, plane_wave_stack
from .lattice import Lattice, sign_vector_gcd
from .potential import Potential, zero_potential

LEADING_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LaurentPoly:
    """sum_{k=-n}^{n} coeffs[k + n] z^k."""

    coeffs: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return (len(self.coeffs) - 1) // 2

    @property
    def poly(self) -> np.ndarray:
        """Coefficients of z^n * L(z), highest degree first (numpy.polyval order)."""
        return self.coeffs[::-1].copy()

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.polyval(self.poly, z) / z**self.n

    def poly_value(self, z):
        return np.polyval(self.poly, z)

    def poly_derivative(self, z):
        return np.polyval(np.polyder(self.poly), z)


def _next_pow2(m: int) -> int:
    p = 1
    while p < m:
        p *= 2
    return p


def direct_determinant(lat, pot, theta1, theta_rest, E, coupling=None) -> np.ndarray:
    """det(h(theta_1, theta_rest) - E) for an array of complex theta_1."""
    theta1 = np.atleast_1d(np.asarray(theta1, dtype=complex))
    rest = np.broadcast_to(np.asarray(theta_rest, dtype=complex), (len(theta1), lat.dim - 1))
    thetas = np.column_stack([theta1, rest])
    if coupling is None:
        coupling = coupling_matrix(lat, pot)
    mats = plane_wave_stack(lat, None, thetas, coupling)
    mats -= E * np.eye(lat.index)
    return np.linalg.det(mats)


def det_laurent(lat: Lattice, pot: Potential | None, theta_rest, E) -> LaurentPoly:
    """Laurent coefficients by evaluation on roots of unity and an inverse DFT."""
    pot = zero_potential(lat) if pot is None else pot
    n = lat.index
    m = _next_pow2(2 * n + 2)
    k = np.arange(m)
    z = np.exp(2j * np.pi * k / m)
    coupling = coupling_matrix(lat, pot)
    deg = np.arange(2 * n + 1)
    rest = np.broadcast_to(np.asarray(theta_rest, dtype=complex), (m, lat.dim - 1))

    def interpolate(rho):
        """Coefficients from the circle |z| = rho, with a roundoff estimate for each."""
        theta1 = k / m - 1j * np.log(rho) / (2 * np.pi)  # z = rho * exp(2 pi i k / m)
        mats = plane_wave_stack(lat, None, np.column_stack([theta1, rest]), coupling)
        mats -= E * np.eye(n)
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.linalg.det(mats) * (rho * z) ** n
            # Hadamard's bound prod_i |row_i| sets the scale of the determinant's roundoff
            rows = np.maximum(np.linalg.norm(mats, axis=2), np.finfo(float).tiny)
            log_h = np.max(np.sum(np.log(rows), axis=1))
            err = np.exp(log_h + (n - deg) * np.log(rho))
            c = np.fft.fft(vals)[: 2 * n + 1] / m / rho**deg
        if not np.all(np.isfinite(c)):
            err = np.full(2 * n + 1, np.inf)  # this circle overflowed
        return c, err

    coeffs, err = interpolate(1.0)  # coeffs[k] multiplies z^k in z^n * det
    big = float(np.max(np.abs(coeffs)))
    if big > 10.0:
        # Large middle coefficients swamp the unit-modulus ends on |z| = 1.
        # Interpolate on a few more circles and take each coefficient from the
        # one with the smallest roundoff estimate.
        cands, errs = [coeffs], [err]
        for s in (-1.0, -0.5, -0.25, 0.25, 0.5, 1.0):
            c, e = interpolate(big ** (s / n))
            cands.append(c)
            errs.append(e)
        best = np.argmin(np.array(errs), axis=0)
        coeffs = np.array(cands)[best, deg]
    lp = LaurentPoly(coeffs, {"theta_rest": np.asarray(theta_rest).tolist(), "E": E, "N": n})
    lead, trail = abs(coeffs[-1]), abs(coeffs[0])
    if abs(lead - 1) > LEADING_TOL or abs(trail - 1) > LEADING_TOL:
        raise DegenerateLeading(f"|leading| = {lead}, |trailing| = {trail}")
    return lp


def _as_poly(p) -> np.ndarray:
    if isinstance(p, LaurentPoly):
        c = p.poly
    else:
        c = np.trim_zeros(np.asarray(p, dtype=complex), "f")
    if len(c) == 0 or abs(c[0]) < LEADING_TOL:
        raise DegenerateLeading("leading coefficient vanishes")
    return c / c[0]


def polynomial_roots(p) -> np.ndarray:
    """Roots of the monic normalization, as eigenvalues of the companion matrix."""
    c = _as_poly(p)
    n = len(c) - 1
    if n == 0:
        return np.empty(0, dtype=complex)
    comp = np.zeros((n, n), dtype=complex)
    comp[0, :] = -c[1:]
    comp[np.arange(1, n), np.arange(n - 1)] = 1.0
    return np.linalg.eigvals(comp)


def discriminant(p) -> complex:
    """prod_{i<j} (z_i - z_j)^2 of the monic normalization of ``p``.

    ``p`` is a LaurentPoly or polynomial coefficients, highest degree first.
    """
    r = polynomial_roots(p)
    i, j = np.triu_indices(len(r), k=1)
    return complex(np.prod((r[i] - r[j]) ** 2))


def sylvester_discriminant(p) -> complex:
    """(-1)^(n(n-1)/2) Res(p, p') for monic p, via the Sylvester determinant."""
    c = _as_poly(p)
    n = len(c) - 1
    if n < 1:
        return 1.0 + 0j
    dc = np.polyder(c)
    size = 2 * n - 1
    S = np.zeros((size, size), dtype=complex)
    for r in range(n - 1):
        S[r, r:r + n + 1] = c
    for r in range(n):
        S[n - 1 + r, r:r + n] = dc
    sign = (-1) ** (n * (n - 1) // 2)
    return complex(sign * np.linalg.det(S))


@dataclass(frozen=True)
class DegeneracyReport:
    band: int
    sign: int
    energy: float
    theta: tuple[float, ...]
    residual: float  # |E_j(theta) - E|
    p_value: float  # |P(z*)|
    dp_value: float  # |P'(z*)|
    discriminant_abs: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.p_value < self.tol and self.dp_value < self.tol

    def to_dict(self) -> dict:
        return {
            "band": self.band,
            "edge": "upper" if self.sign > 0 else "lower",
            "energy": self.energy,
            "theta": list(self.theta),
            "residual": self.residual,
            "p_value": self.p_value,
            "dp_value": self.dp_value,
            "discriminant_abs": self.discriminant_abs,
            "passed": self.passed,
        }


def edge_degeneracy_at(lat, pot, theta, E, band=-1, sign=0, tol=1e-5) -> DegeneracyReport:
    """Double-root test of z^N det(h(., theta_rest) - E) at z* = exp(2 pi i theta_1).

    With ``band < 0`` the residual is taken against the nearest eigenvalue.
    """
    theta = np.asarray(theta, dtype=float)
    pot = zero_potential(lat) if pot is None else pot
    lp = det_laurent(lat, pot, theta[1:], E)
    zs = np.exp(2j * np.pi * theta[0])
    ev = np.linalg.eigvalsh(plane_wave_stack(lat, pot, theta[None])[0])
    residual = abs(ev[band] - E) if band >= 0 else np.min(np.abs(ev - E))
    return DegeneracyReport(
        band=band,
        sign=sign,
        energy=float(E),
        theta=tuple(map(float, theta)),
        residual=float(residual),
        p_value=float(abs(lp.poly_value(zs))),
        dp_value=float(abs(lp.poly_derivative(zs))),
        discriminant_abs=float(abs(discriminant(lp))),
        tol=tol,
    )


def edge_degeneracy_check(lat, pot, band: int, sign: int, summary: BandSummary, tol: float = 1e-5):
    """Check that a refined band edge is a root of multiplicity >= 2 in z."""
    edge = summary.edges[band]
    E, theta = (edge.upper, edge.argmax) if sign > 0 else (edge.lower, edge.argmin)
    rep = edge_degeneracy_at(lat, pot, theta, E, band, sign, tol)
    if rep.residual > tol:
        raise EdgeNotConverged(f"band {band} edge residual {rep.residual:.3e} exceeds {tol}")
    return rep


def internal_edges(summary: BandSummary) -> list[tuple[int, int]]:
    """(band, sign) pairs for every edge except the bottom of band 0 and the top of the last band."""
    n = len(summary.edges)
    out = []
    for j in range(n):
        if j > 0:
            out.append((j, -1))
        if j < n - 1:
            out.append((j, 1))
    return out


# ---------------------------------------------------------------- separation


def check_separation_hypothesis(lat: Lattice, u) -> None:
    """Raise HypothesisFailed if (1/p)(+-1, u) lies in Gamma' for some p >= 2."""
    u = [int(x) for x in u]
    if len(u) != lat.dim - 1 or any(abs(x) != 1 for x in u):
        raise ValueError(f"u must be a sign vector of length {lat.dim - 1}")
    for first in (1, -1):
        s = [first] + u
        g = sign_vector_gcd(lat, s)
        if g >= 2:
            raise HypothesisFailed(f"(1/{g}){s} lies in the dual lattice")


def _relation_defect(lat: Lattice, theta_rest, u) -> float:
    """Smallest violation over b != 0 and eps of the exceptional relation on theta'."""
    theta_rest = np.asarray(theta_rest, dtype=float)
    u = np.asarray(u, dtype=float)
    base = np.sum(np.exp(2j * np.pi * u * theta_rest))
    worst = np.inf
    for k, b in enumerate(lat.dual_reps):
        if not np.any(lat.dual_numer_reps[k]):
            continue
        shifted = np.sum(np.exp(2j * np.pi * u * (theta_rest + b[1:])))
        worst = min(worst, abs(shifted))
        for eps in (1, -1):
            worst = min(worst, abs(base - np.exp(2j * np.pi * eps * b[0]) * shifted))
    return float(worst)


def is_admissible(lat: Lattice, theta_rest, u, tol: float = 1e-6) -> bool:
    return _relation_defect(lat, theta_rest, u) > tol


def draw_admissible(lat: Lattice, u, seed: int = 0, tol: float = 1e-6, tries: int = 1000):
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        theta_rest = rng.random(lat.dim - 1)
        if is_admissible(lat, theta_rest, u, tol):
            return theta_rest
    raise HypothesisFailed("no admissible theta' found")


@dataclass
class SeparationReport:
    t_grid: list[float]
    violations: list[int]
    hits: list[int]  # samples meeting the b = 0 condition
    samples: int
    t0: float | None

    def to_dict(self) -> dict:
        return {
            "t_grid": self.t_grid,
            "violations": self.violations,
            "hits": self.hits,
            "samples_per_t": self.samples,
            "t0": self.t0,
        }


# |Im| beyond which 2cos(2 pi eta) dwarfs exp(pi t) + |F(...)| for every t we scan
_IM_CUTOFF = 700.0 / (2 * np.pi)


def _shifted_quantities(lat, theta_rest, u, t, eta):
    """|2cos 2pi(eta + b_1) + F(theta' + b' - i t u)| for every nonzero b, shape (K, N-1)."""
    out = []
    for k, b in enumerate(lat.dual_reps):
        if not np.any(lat.dual_numer_reps[k]):
            continue
        rest = f_symbol(theta_rest + b[1:] - 1j * t * u)
        out.append(np.abs(2 * np.cos(2 * np.pi * (eta + b[0])) + rest))
    return np.array(out).T.reshape(len(eta), -1)


def separation_scan(
    lat: Lattice,
    theta_rest,
    u,
    t_grid,
    samples: int = 10_000,
    seed: int = 0,
    strip: float = 20.0,
    admissibility_tol: float = 1e-6,
) -> SeparationReport:
    """Scan complex theta_1 for failures of the separation of diagonal entries.

    For each t, half of the samples cover [0,1) x i[-strip t, strip t]; the rest
    are concentrated near the zeros of the b = 0 entry, where its small values
    are computed from a product formula without cancellation.
    """
    check_separation_hypothesis(lat, u)
    theta_rest = np.asarray(theta_rest, dtype=float)
    u = np.asarray(u, dtype=float)
    if not is_admissible(lat, theta_rest, u, admissibility_tol):
        raise HypothesisFailed("theta' satisfies an exceptional relation")
    rng = np.random.default_rng(seed)
    t_grid = [float(t) for t in t_grid]
    violations, hits = [], []
    for t in t_grid:
        thr = np.exp(np.pi * t)
        base = f_symbol(theta_rest - 1j * t * u)
        n_uni = samples // 2
        eta_u = rng.random(n_uni) + 1j * rng.uniform(-strip * t, strip * t, n_uni)
        eta_u = eta_u[np.abs(eta_u.imag) < _IM_CUTOFF]
        q0_u = np.abs(2 * np.cos(2 * np.pi * eta_u) + base)
        # zeros of 2cos(2 pi eta) = -base, and a disk that covers the sublevel set
        root = np.arccos(-base / 2) / (2 * np.pi)
        n_t = samples - n_uni
        centres = np.where(rng.random(n_t) < 0.5, root, -root)
        slope = 4 * np.pi * abs(np.sin(2 * np.pi * root))
        radius = 2.0 * thr / max(slope, 1e-300)
        r = radius * np.sqrt(rng.random(n_t))
        delta = r * np.exp(2j * np.pi * rng.random(n_t))
        # 2cos(2 pi x) - 2cos(2 pi c) = -4 sin(pi (x + c)) sin(pi (x - c))
        q0_t = np.abs(-4 * np.sin(np.pi * (2 * centres + delta)) * np.sin(np.pi * delta))
        eta_t = centres + delta
        eta = np.concatenate([eta_u, eta_t])
        q0 = np.concatenate([q0_u, q0_t])
        inside = q0 <= thr
        qb = _shifted_quantities(lat, theta_rest, u, t, eta[inside])
        bad = int(np.count_nonzero(np.any(qb <= thr, axis=1))) if qb.size else 0
        violations.append(bad)
        hits.append(int(np.count_nonzero(inside)))
    t0 = None
    for i in range(len(t_grid) - 1, -1, -1):
        if violations[i]:
            break
        t0 = t_grid[i]
    return SeparationReport(t_grid, violations, hits, samples, t0)


# ---------------------------------------------------------------- dimension


@dataclass(frozen=True)
class DimensionEstimate:
    band: int
    sign: int
    edge: float
    resolutions: list[float]
    counts: list[int]
    slope: float
    threshold: str

    def to_dict(self) -> dict:
        return {
            "band": self.band,
            "edge": "upper" if self.sign > 0 else "lower",
            "energy": self.edge,
            "h": self.resolutions,
            "counts": self.counts,
            "slope": self.slope,
            "threshold": self.threshold,
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["h", "count"])
            for h, c in zip(self.resolutions, self.counts):
                w.writerow([repr(h), c])
            w.writerow(["slope", repr(self.slope)])


DEFAULT_H = (1 / 32, 1 / 64, 1 / 128, 1 / 256)


def _occupied_cells(values, edge, m, d, threshold, h, lip):
    """Cells of side h (samples at spacing h/2) that may meet {E = edge}."""
    dev = np.abs(values - edge)
    offs = list(product(range(3), repeat=d))

    def view(arr, o):
        return arr[tuple(slice(oi, oi + 2 * m, 2) for oi in o)]

    near = np.min([view(dev, o) for o in offs], axis=0)
    if threshold == "lipschitz":
        thr = lip * h
    elif threshold == "curvature":
        centre = view(values, (1,) * d)
        curv = np.zeros_like(centre)
        for o in product((-1, 0, 1), repeat=d):
            if o <= (0,) * d:
                continue  # each line through the centre once
            fwd = view(values, tuple(1 + x for x in o))
            back = view(values, tuple(1 - x for x in o))
            curv = np.maximum(curv, np.abs(fwd + back - 2 * centre))
        thr = curv + 1e-12 * max(1.0, abs(edge))
    else:
        raise ValueError(f"unknown threshold {threshold!r}")
    return near < thr


def levelset_dimension_probe(
    lat: Lattice,
    pot: Potential | None,
    band: int,
    sign: int,
    resolutions=DEFAULT_H,
    summary: BandSummary | None = None,
    threshold: str = "curvature",
) -> DimensionEstimate:
    """Box-counting estimate of the dimension of {theta : E_band(theta) = edge}.

    Cells are taken in dual-basis coordinates with 3^d samples each. The
    default "curvature" test marks a cell when some sample is within the local
    second difference of the edge value: at an extremum the first-order Taylor
    term vanishes, so the deviation of the nearest sample from the edge scales
    like the second difference. "lipschitz" uses the first-order bound C*h.
    """
    pot = zero_potential(lat) if pot is None else pot
    if summary is None:
        summary = compute_band_summary(lat, pot, 64 if lat.dim == 2 else 16)
    e = summary.edges[band]
    edge, arg = (e.upper, e.argmax) if sign > 0 else (e.lower, e.argmin)
    d = lat.dim
    evaluate = _BandEvaluator(lat, pot)
    lip = 4 * np.pi * np.sqrt(d) * float(np.max(np.linalg.norm(lat.dual_basis, axis=0)))
    known = np.mod(np.linalg.solve(lat.dual_basis, np.asarray(arg)), 1.0)
    hs, counts = [], []
    for h in resolutions:
        m = int(round(1 / h))
        if abs(m * h - 1) > 1e-9:
            raise ValueError(f"1/h must be an integer, got h = {h}")
        g = 2 * m
        eta = eta_grid((g + 1,) * d) * (g + 1) / g  # nodes j/g, j = 0..g
        vals = np.empty(len(eta))
        for start in range(0, len(eta), 65536):
            vals[start:start + 65536] = evaluate(eta[start:start + 65536], band)
        occ = _occupied_cells(vals.reshape((g + 1,) * d), edge, m, d, threshold, h, lip)
        occ[tuple(np.minimum((known * m).astype(int), m - 1))] = True
        hs.append(float(h))
        counts.append(int(np.count_nonzero(occ)))
    slope = float(np.polyfit(np.log(1 / np.array(hs)), np.log(counts), 1)[0])
    return DimensionEstimate(band, sign, float(edge), hs, counts, slope, threshold)
