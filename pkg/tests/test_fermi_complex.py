import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CHECKER, P3, TILTED, Z2, Z3, bases
from spectra.bands import compute_band_summary
from spectra.errors import DegenerateLeading, EdgeNotConverged, HypothesisFailed
from spectra.fermi_complex import (
    det_laurent,
    direct_determinant,
    discriminant,
    edge_degeneracy_at,
    edge_degeneracy_check,
    internal_edges,
    is_admissible,
    levelset_dimension_probe,
    polynomial_roots,
    separation_scan,
    sylvester_discriminant,
)
from spectra.lattice import make_lattice
from spectra.potential import checkerboard, direction_periodic, random_potential

ALL = [Z2, TILTED, CHECKER, P3, Z3]


def test_discriminant_examples():
    assert abs(discriminant([1, -2, 1])) < 1e-12
    assert discriminant([1, 0, 1]) == pytest.approx(-4)
    assert sylvester_discriminant([1, 0, 1]) == pytest.approx(-4)
    assert sorted(polynomial_roots([1, 0, -1]).real) == pytest.approx([-1, 1])
    with pytest.raises(DegenerateLeading):
        discriminant([0.0])


def test_free_z2_laurent():
    lp = det_laurent(make_lattice(Z2), None, [0.0], 4.0)
    assert np.allclose(lp.coeffs, [1, -2, 1], atol=1e-14)
    assert abs(discriminant(lp)) < 1e-12
    assert lp(1.0) == pytest.approx(0, abs=1e-14)
    rep = edge_degeneracy_at(make_lattice(Z2), None, [0.0, 0.0], 4.0)
    assert rep.p_value < 1e-12 and rep.dp_value < 1e-12 and rep.passed


@pytest.mark.parametrize("basis", ALL)
def test_free_extreme_energies_are_double_roots(basis):
    lat = make_lattice(basis)
    d = lat.dim
    for theta, E in (([0.0] * d, 2.0 * d), ([0.5] * d, -2.0 * d)):
        rep = edge_degeneracy_at(lat, None, theta, E)
        assert rep.residual < 1e-12 and rep.passed, rep


def test_random_potential_internal_edges():
    lat = make_lattice(TILTED)
    pot = random_potential(lat, 0.05, seed=11)
    s = compute_band_summary(lat, pot, 64)
    for j, sign in internal_edges(s):
        rep = edge_degeneracy_check(lat, pot, j, sign, s)
        assert rep.passed, rep.to_dict()


def test_internal_edges_listing():
    s = compute_band_summary(make_lattice(TILTED), None, 8)
    assert internal_edges(s) == [(0, 1), (1, -1), (1, 1), (2, -1), (2, 1), (3, -1)]


def test_edge_not_converged():
    lat = make_lattice(CHECKER)
    pot = checkerboard(lat, -0.1, 0.1)
    s = compute_band_summary(lat, pot, 32)
    bad = dataclasses.replace(s.edges[0], upper=s.edges[0].upper + 0.01)
    s_bad = dataclasses.replace(s, edges=[bad, s.edges[1]])
    with pytest.raises(EdgeNotConverged):
        edge_degeneracy_check(lat, pot, 0, 1, s_bad)


@settings(max_examples=40)
@given(
    bases(max_index=12),
    st.integers(0, 2**31),
    st.lists(st.floats(-1, 1), min_size=2, max_size=2),
    st.floats(-7, 7),
)
def test_laurent_layer(basis, seed, rest, E):
    lat = make_lattice(basis)
    pot = random_potential(lat, 1.0, seed)
    rng = np.random.default_rng(seed)
    theta_rest = np.array(rest[: lat.dim - 1]) + 1j * rng.normal(size=lat.dim - 1) * 0.3
    lp = det_laurent(lat, pot, theta_rest, E)  # raises unless |lead| = |trail| = 1
    assert abs(abs(lp.coeffs[-1]) - 1) < 1e-9 and abs(abs(lp.coeffs[0]) - 1) < 1e-9
    theta1 = rng.random(16) + 1j * rng.normal(size=16) * 0.2
    theta1[:8] = theta1[:8].real  # half on the unit circle
    z = np.exp(2j * np.pi * theta1)
    direct = direct_determinant(lat, pot, theta1, theta_rest, E)
    scale = np.maximum(np.abs(direct), np.abs(lp.poly) @ np.abs(z[None, :]) ** np.arange(2 * lat.N, -1, -1)[:, None] / np.abs(z) ** lat.N)
    assert np.all(np.abs(lp(z) - direct) <= 1e-8 * scale)


@given(st.integers(2, 8), st.integers(0, 2**31))
def test_companion_matches_sylvester(n, seed):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
    a, b = discriminant(c), sylvester_discriminant(c)
    assert abs(a - b) <= 1e-6 * max(abs(a), abs(b))


@pytest.mark.parametrize("basis", [TILTED, P3, Z3])
def test_discriminant_is_discrete_along_lines(basis):
    lat = make_lattice(basis)
    rng = np.random.default_rng(5)
    pot = random_potential(lat, 0.5, seed=5)
    base = rng.random(lat.dim - 1)
    mu = rng.normal(size=lat.dim - 1) + 1j * rng.normal(size=lat.dim - 1)
    ts = np.linspace(0, 1, 200)
    values = [abs(discriminant(det_laurent(lat, pot, base + t * mu, 0.7))) for t in ts]
    assert np.mean(np.array(values) > 1e-12) >= 0.95


def test_separation_trivial_for_z2():
    rep = separation_scan(make_lattice(Z2), [0.3], [1], range(1, 4), samples=500)
    assert rep.violations == [0, 0, 0] and rep.t0 == 1.0


def test_separation_finite_threshold():
    lat = make_lattice(TILTED)
    rep = separation_scan(lat, [0.3141], [1], range(1, 13), samples=2000, seed=1)
    assert rep.t0 is not None and rep.t0 <= 12
    assert all(v == 0 for t, v in zip(rep.t_grid, rep.violations) if t >= rep.t0)
    assert min(rep.hits) > 0
    small = separation_scan(lat, [0.3141], [1], [0.05], samples=2000, seed=1)
    assert small.violations[0] > 0  # the scan can see violations


def test_separation_hypothesis_failure():
    with pytest.raises(HypothesisFailed):
        separation_scan(make_lattice(P3), [0.2], [-1], [1.0])
    with pytest.raises(ValueError):
        separation_scan(make_lattice(TILTED), [0.2], [1, 1], [1.0])


def test_exceptional_theta_rejected():
    # b = (1/2, 0, 0) makes the relation e(t2) + e(t3) = -(e(t2) + e(t3)) hold when t3 = t2 + 1/2
    lat = make_lattice([[2, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert not is_admissible(lat, [0.2, 0.7], [1, 1])
    assert is_admissible(lat, [0.2, 0.4], [1, 1])
    with pytest.raises(HypothesisFailed):
        separation_scan(lat, [0.2, 0.7], [1, 1], [1.0])


@given(st.floats(0, 1))
def test_two_dimensional_theta_always_admissible(theta2):
    # in d = 2 the relation does not involve theta_2 once the sign hypothesis holds
    assert is_admissible(make_lattice(TILTED), [theta2], [1])


def test_dimension_point_locus():
    est = levelset_dimension_probe(make_lattice(Z2), None, 0, 1)
    assert est.slope < 0.5 and max(est.counts) <= 4


def test_dimension_checkerboard(tmp_path):
    lat = make_lattice(CHECKER)
    pot = checkerboard(lat, -0.1, 0.1)
    s = compute_band_summary(lat, pot, 64)
    for j, sign in internal_edges(s):
        est = levelset_dimension_probe(lat, pot, j, sign, summary=s)
        assert 0.85 <= est.slope <= 1.15
    est.write_csv(tmp_path / "d.csv")
    assert (tmp_path / "d.csv").read_text().splitlines()[0] == "h,count"


def test_dimension_p3():
    lat = make_lattice(P3)
    pot = direction_periodic(lat, (1, -1), 3, [0, 3, 3])
    est = levelset_dimension_probe(lat, pot, 0, 1)
    assert abs(est.edge) < 1e-8 and 0.85 <= est.slope <= 1.15


def test_dimension_options():
    lat = make_lattice(Z2)
    est = levelset_dimension_probe(lat, None, 0, 1, (1 / 8, 1 / 16), threshold="lipschitz")
    assert est.threshold == "lipschitz" and len(est.counts) == 2
    with pytest.raises(ValueError):
        levelset_dimension_probe(lat, None, 0, 1, (0.3,))
    with pytest.raises(ValueError):
        levelset_dimension_probe(lat, None, 0, 1, (1 / 8,), threshold="nope")
