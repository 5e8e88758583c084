from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import CHECKER, P3, TILTED, Z2, bases
from spectra.errors import DimensionMismatch, SingularBasis
from spectra.lattice import (
    classification_report,
    dual_contains,
    in_lattice,
    is_divisible,
    is_even,
    lattice_from_dict,
    make_lattice,
    reduce_mod_lattice,
    reduce_points,
)


def as_set(fracs):
    return {tuple(x % 1 for x in b) for b in fracs}


def test_identity_lattice():
    lat = make_lattice(Z2)
    assert lat.N == 1
    assert lat.primal_reps.tolist() == [[0, 0]]
    assert lat.dual_reps.tolist() == [[0.0, 0.0]]


def test_tilted_dual_reps():
    lat = make_lattice(TILTED)
    F = Fraction
    assert lat.N == 4
    expected = {(F(0), F(0)), (F(1, 2), F(3, 4)), (F(0), F(1, 2)), (F(1, 2), F(1, 4))}
    assert as_set(lat.dual_reps_exact) == expected


def test_checkerboard_lattice_reps():
    lat = make_lattice(CHECKER)
    assert lat.N == 2
    assert as_set(lat.dual_reps_exact) == {(0, 0), (Fraction(1, 2), Fraction(1, 2))}
    assert lat.primal_reps.tolist() == [[0, 0], [1, 0]]


def test_singular_basis():
    with pytest.raises(SingularBasis):
        make_lattice([[1, 2], [2, 4]])


def test_non_square_basis():
    with pytest.raises(DimensionMismatch):
        make_lattice([[1, 0, 0], [0, 1, 0]])


def test_dict_round_trip():
    lat = lattice_from_dict({"dim": 2, "basis": TILTED})
    assert lattice_from_dict(lat.to_dict()).basis.tolist() == TILTED
    with pytest.raises(DimensionMismatch):
        lattice_from_dict({"dim": 3, "basis": TILTED})


@pytest.mark.parametrize(
    "basis, point",
    [(Z2, (5, -3)), (CHECKER, (1, 1)), (TILTED, (3, 2))],
)
def test_reduce_to_origin(basis, point):
    rep, shift = reduce_mod_lattice(make_lattice(basis), point)
    assert rep.tolist() == [0, 0]
    assert shift.tolist() == list(point)


@pytest.mark.parametrize(
    "basis, v, expected",
    [
        (Z2, (3, -7), True),
        (TILTED, (Fraction(1, 2), Fraction(1, 2)), False),
        (P3, (Fraction(1, 3), Fraction(-1, 3)), True),
    ],
)
def test_dual_contains_examples(basis, v, expected):
    assert dual_contains(make_lattice(basis), v) is expected


@pytest.mark.parametrize("basis, expected", [(CHECKER, True), (TILTED, False), (Z2, False)])
def test_is_even_examples(basis, expected):
    assert is_even(make_lattice(basis)) is expected


def test_divisible_3z_cubed():
    flag, witness = is_divisible(make_lattice((3 * np.eye(3, dtype=int)).tolist()))
    assert flag and witness.p == 3


def test_tilted_not_divisible():
    flag, witness = is_divisible(make_lattice(TILTED))
    assert not flag and witness.p is None


def test_p3_divisible_witness():
    flag, witnesses = is_divisible(make_lattice(P3), all_witnesses=True)
    assert flag
    third = Fraction(1, 3)
    assert any(w.p == 3 and set(map(abs, w.vector)) == {third} for w in witnesses)
    assert all(dual_contains(make_lattice(P3), w.vector) for w in witnesses)


def test_classification_report_tilted():
    rep = classification_report(make_lattice(TILTED))
    assert (rep["N"], rep["even"], rep["divisible"]) == (4, False, False)


@given(bases(bound=5))
def test_dual_basis_biorthogonal(basis):
    lat = make_lattice(basis)
    d = lat.dim
    B = [[int(x) for x in row] for row in basis]
    D = lat.dual_basis_exact  # column j is b_j
    for i in range(d):
        for j in range(d):
            dot = sum(B[k][i] * D[k][j] for k in range(d))
            assert dot == (1 if i == j else 0)
    assert np.array_equal(lat.dual_numer, np.round(lat.dual_numer))
    assert len(lat.dual_reps) == lat.N == abs(round(np.linalg.det(np.array(basis, float))))


@given(bases(bound=5))
def test_primal_reps_distinct_cosets(basis):
    lat = make_lattice(basis)
    Binv = np.linalg.inv(lat.basis.astype(float))
    reps = lat.primal_reps
    diffs = reps[:, None, :] - reps[None, :, :]
    coords = np.einsum("ij,abj->abi", Binv, diffs)
    integral = np.all(np.abs(coords - np.round(coords)) < 1e-9, axis=2)
    assert np.array_equal(integral, np.eye(lat.N, dtype=bool))


@given(bases(bound=5))
def test_dual_reps_in_dual_and_distinct(basis):
    lat = make_lattice(basis)
    reps = lat.dual_reps_exact
    assert all(dual_contains(lat, b) for b in reps)
    assert len(as_set(reps)) == lat.N
    for e in np.eye(lat.dim, dtype=int):
        assert dual_contains(lat, e.tolist())


@given(bases(bound=5))
def test_even_and_divisibility_consistent(basis):
    lat = make_lattice(basis)
    even = is_even(lat)  # raises if the two evenness tests disagree
    flag, witnesses = is_divisible(lat, all_witnesses=True)
    if flag:
        assert all(dual_contains(lat, w.vector) for w in witnesses)
        if any(w.p == 2 for w in witnesses):
            assert even


@given(bases(bound=4), st.lists(st.integers(-50, 50), min_size=3, max_size=3))
def test_reduction_splits_point(basis, point):
    lat = make_lattice(basis)
    point = point[: lat.dim]
    rep, shift = reduce_mod_lattice(lat, point)
    assert (rep + shift).tolist() == point
    assert in_lattice(lat, shift)
    lat.primal_index(rep)  # rep is canonical
    reps, shifts = reduce_points(lat, [point, point])
    assert reps[0].tolist() == rep.tolist() and shifts[1].tolist() == shift.tolist()
