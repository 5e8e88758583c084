"""Full-rank sublattices of Z^d.

All classification logic is exact: primal data are integers, dual vectors are
stored as integer numerators over the common denominator ``N = |det basis|``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import gcd
from typing import Sequence

import numpy as np
from sympy import ZZ, Matrix
from sympy.matrices.normalforms import hermite_normal_form, smith_normal_decomp

from .errors import DimensionMismatch, SingularBasis


def _box(sizes):
    """Integer points of prod(range(s)), first coordinate varying fastest."""
    pts = [tuple(reversed(p)) for p in product(*(range(s) for s in reversed(sizes)))]
    return np.array(pts, dtype=np.int64).reshape(len(pts), len(sizes))


@dataclass(frozen=True, eq=False)
class Lattice:
    """A lattice Gamma in Z^d given by the columns of ``basis``.

    Attributes
    ----------
    basis : (d, d) int array, columns a_1..a_d.
    hnf : upper-triangular column basis of the same lattice, used for folding.
    dual_numer : (d, d) int array equal to N times the dual basis (columns N*b_j).
    primal_reps : (N, d) int array, canonical representatives of Z^d / Gamma.
    dual_numer_reps : (N, d) int array in [0, N), representatives of Gamma'/Z^d
        as numerators over N.
    elementary_divisors : Smith invariants of the basis; their product is N.
    """

    basis: np.ndarray
    hnf: np.ndarray
    dual_numer: np.ndarray
    primal_reps: np.ndarray
    dual_numer_reps: np.ndarray
    elementary_divisors: tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def index(self) -> int:
        return len(self.primal_reps)

    N = index

    @property
    def dual_basis(self) -> np.ndarray:
        return self.dual_numer / self.index

    @property
    def dual_basis_exact(self) -> list[list[Fraction]]:
        n = self.index
        return [[Fraction(int(x), n) for x in row] for row in self.dual_numer]

    @property
    def dual_reps(self) -> np.ndarray:
        return self.dual_numer_reps / self.index

    @property
    def dual_reps_exact(self) -> list[tuple[Fraction, ...]]:
        n = self.index
        return [tuple(Fraction(int(x), n) for x in row) for row in self.dual_numer_reps]

    @cached_property
    def _primal_lookup(self) -> dict[tuple[int, ...], int]:
        return {tuple(int(x) for x in r): i for i, r in enumerate(self.primal_reps)}

    @cached_property
    def _dual_lookup(self) -> dict[tuple[int, ...], int]:
        return {tuple(int(x) for x in r): i for i, r in enumerate(self.dual_numer_reps)}

    def primal_index(self, rep) -> int:
        return self._primal_lookup[tuple(int(x) for x in rep)]

    def dual_index(self, numer) -> int:
        """Index of the dual coset with numerator vector ``numer`` (any integers)."""
        n = self.index
        return self._dual_lookup[tuple(int(x) % n for x in numer)]

    @cached_property
    def dual_difference_table(self) -> np.ndarray:
        """table[b, c] = index of the coset b - c."""
        n = self.index
        diff = (self.dual_numer_reps[:, None, :] - self.dual_numer_reps[None, :, :]) % n
        look = self._dual_lookup
        return np.array(
            [[look[tuple(int(x) for x in diff[i, j])] for j in range(n)] for i in range(n)],
            dtype=np.int64,
        )

    def to_dict(self) -> dict:
        return {"dim": self.dim, "basis": self.basis.tolist()}


def make_lattice(basis) -> Lattice:
    """Build a :class:`Lattice` from a square integer matrix whose columns span Gamma."""
    arr = np.asarray(basis)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise DimensionMismatch(f"basis must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.equal(np.mod(arr, 1), 0)):
        raise ValueError("basis entries must be integers")
    arr = arr.astype(np.int64)
    d = arr.shape[0]
    M = Matrix(arr.tolist())
    det = int(M.det())
    if det == 0:
        raise SingularBasis(f"basis {arr.tolist()} is singular")
    n = abs(det)

    H = hermite_normal_form(M)
    hnf = np.array(H.tolist(), dtype=np.int64)
    assert abs(int(H.det())) == n

    # Gamma'/Z^d ~ Z^d / B^T Z^d through v -> B^T v; the Smith form of B^T
    # splits the quotient into cyclic factors.
    D, U, _ = smith_normal_decomp(M.T, domain=ZZ)
    divisors = tuple(abs(int(D[i, i])) for i in range(d))
    if int(np.prod(divisors)) != n:
        raise AssertionError("Smith invariants do not multiply to |det|")
    adj_t = np.array((M.inv() * n).T.tolist(), dtype=np.int64)  # N * B^{-T}
    Uinv = np.array(U.inv().tolist(), dtype=np.int64)
    ms = _box(divisors)
    dual_numer_reps = ((ms @ Uinv.T) @ adj_t.T) % n

    primal_reps = _box([int(hnf[i, i]) for i in range(d)])
    lat = Lattice(
        basis=arr,
        hnf=hnf,
        dual_numer=adj_t,
        primal_reps=primal_reps,
        dual_numer_reps=dual_numer_reps.astype(np.int64),
        elementary_divisors=divisors,
    )
    if len(lat._dual_lookup) != n or len(lat._primal_lookup) != n:
        raise AssertionError("coset enumeration produced duplicates")
    return lat


def lattice_from_dict(desc: dict) -> Lattice:
    lat = make_lattice(desc["basis"])
    if "dim" in desc and int(desc["dim"]) != lat.dim:
        raise DimensionMismatch(f"dim={desc['dim']} but basis is {lat.dim}x{lat.dim}")
    return lat


def reduce_points(lat: Lattice, points) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized folding: returns (reps, shifts) with points = reps + shifts."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.int64))
    x = pts.copy()
    H = lat.hnf
    for i in reversed(range(lat.dim)):
        q = np.floor_divide(x[:, i], H[i, i])
        x -= q[:, None] * H[:, i][None, :]
    return x, pts - x


def reduce_mod_lattice(lat: Lattice, point) -> tuple[np.ndarray, np.ndarray]:
    """Split an integer point into (representative in primal_reps, shift in Gamma)."""
    rep, shift = reduce_points(lat, [point])
    return rep[0], shift[0]


def in_lattice(lat: Lattice, v) -> bool:
    """Membership of an integer vector in Gamma."""
    return not np.any(reduce_mod_lattice(lat, v)[0])


def dual_contains(lat: Lattice, v: Sequence) -> bool:
    """True iff ``v`` (exact rationals, ints or floats) lies in Gamma'."""
    fr = [Fraction(x) for x in v]
    if len(fr) != lat.dim:
        raise DimensionMismatch(f"vector of length {len(fr)} in dimension {lat.dim}")
    for j in range(lat.dim):
        s = sum(int(lat.basis[i, j]) * fr[i] for i in range(lat.dim))
        if s.denominator != 1:
            return False
    return True


def sign_vector_gcd(lat: Lattice, signs) -> int:
    """gcd of B^T s; (1/p) s lies in Gamma' for some p >= 2 iff this is >= 2."""
    s = np.asarray(signs, dtype=np.int64)
    g = 0
    for x in lat.basis.T @ s:
        g = gcd(g, int(x))
    return g


def is_even(lat: Lattice) -> bool:
    half = [Fraction(1, 2)] * lat.dim
    by_dual = dual_contains(lat, half)
    by_parity = bool(np.all(lat.basis.sum(axis=0) % 2 == 0))
    if by_dual != by_parity:
        raise RuntimeError("evenness tests disagree")
    return by_dual


@dataclass(frozen=True)
class DivisibilityWitness:
    """A sign quadrant ``(signs, j)``; ``p`` and ``vector`` are None when it fails."""

    signs: tuple[int, ...]
    j: int
    p: int | None = None
    vector: tuple[Fraction, ...] | None = None

    def to_dict(self) -> dict:
        return {
            "signs": list(self.signs),
            "j": self.j,
            "p": self.p,
            "vector": None if self.vector is None else [str(x) for x in self.vector],
        }


def is_divisible(lat: Lattice, all_witnesses: bool = False):
    """Decide divisibility.

    Returns ``(flag, witness)``. When the lattice is not divisible the witness
    is the first failing quadrant. Otherwise it is the first satisfying
    quadrant, or the list of one witness per quadrant if ``all_witnesses``.
    """
    d = lat.dim
    found = []
    for eps in product((1, -1), repeat=d):
        for j in range(d):
            flipped = list(eps)
            flipped[j] = -flipped[j]
            best = None
            for s in (eps, tuple(flipped)):
                g = sign_vector_gcd(lat, s)
                if g >= 2 and (best is None or g > best[0]):
                    best = (g, s)
            if best is None:
                return False, DivisibilityWitness(tuple(eps), j)
            g, s = best
            found.append(DivisibilityWitness(tuple(eps), j, g, tuple(Fraction(x, g) for x in s)))
    return True, (found if all_witnesses else found[0])


def classification_report(lat: Lattice) -> dict:
    div, witness = is_divisible(lat)
    return {
        "N": lat.index,
        "even": is_even(lat),
        "divisible": div,
        "witness": witness.to_dict(),
    }
