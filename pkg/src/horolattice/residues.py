"""Primitive residue vectors mod q and their coset parametrization.

A residue vector r lies in (Z cap [1, q])^d with gcd(r, q) = 1.  These are in
bijection with (coset of the last-row congruence subgroup) x (unit mod q):
r = u * (last row of gamma) mod q.  This module enumerates and samples the
vectors, completes primitive integer vectors to determinant-one matrices, and
builds the (d+1) x (d+1) integral representatives [[(B - s r^t)/q, s], [-r^t, q]].
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    DimensionTooSmallError,
    NotAUnitError,
    NotPrimitiveError,
    NotUnimodularError,
    OutOfRangeError,
    TooLargeError,
)
from .intmat import IntMatrix, vecmat, xgcd, xgcd_list
from .numtheory import FactoredInt, as_factored, count_Rq, euler_phi

ENUM_CAP = 10**8  # full q**d sweeps
COSET_CAP = 10**6  # coset enumerations
_TABLE_CAP = 2 * 10**7  # q**d rows held in memory for canonical labelling


@dataclass(frozen=True)
class ResidueVector:
    """r in (Z cap [1, q])^d with gcd(r, q) = 1."""

    q: FactoredInt
    coords: tuple[int, ...]

    def __post_init__(self):
        qv = self.q.value
        if not self.coords:
            raise OutOfRangeError("residue vector needs at least one coordinate")
        if any(not 1 <= c <= qv for c in self.coords):
            raise OutOfRangeError(f"coordinates must lie in [1, {qv}]")
        if math.gcd(*self.coords, qv) != 1:
            raise NotPrimitiveError(f"gcd({self.coords}, {qv}) != 1")

    @property
    def d(self) -> int:
        return len(self.coords)

    @property
    def modulus(self) -> int:
        return self.q.value

    def tojson(self) -> dict:
        return {"q": self.modulus, "d": self.d, "coords": list(self.coords)}


@dataclass(frozen=True)
class ProjectivePoint:
    """Canonical representative of a primitive vector mod q under unit scaling.

    The representative is the lexicographically smallest unit multiple, with
    entries in [0, q).
    """

    q: FactoredInt
    rep: tuple[int, ...]

    def __post_init__(self):
        qv = self.q.value
        if any(not 0 <= v < qv for v in self.rep):
            raise OutOfRangeError(f"representative entries must lie in [0, {qv})")
        if math.gcd(*self.rep, qv) != 1:
            raise NotPrimitiveError(f"gcd({self.rep}, {qv}) != 1")


@functools.lru_cache(maxsize=256)
def _units_list(qv: int) -> tuple[int, ...]:
    if qv == 1:
        return (0,)
    return tuple(u for u in range(1, qv) if math.gcd(u, qv) == 1)


def canonical_rep(vec: Sequence[int], qv: int) -> tuple[int, ...]:
    """Lex-smallest unit multiple of vec mod q, entries in [0, q)."""
    vec = tuple(v % qv for v in vec)
    best = None
    for u in _units_list(qv):
        cand = tuple((u * v) % qv for v in vec)
        if best is None or cand < best:
            best = cand
    return best


def enumerate_Rq(q, d: int) -> Iterator[ResidueVector]:
    """All residue vectors for (q, d), lexicographically."""
    q = as_factored(q)
    qv = q.value
    if qv**d > ENUM_CAP:
        raise TooLargeError(f"q**d = {qv**d} exceeds the enumeration cap {ENUM_CAP}")
    for coords in itertools.product(range(1, qv + 1), repeat=d):
        if math.gcd(*coords, qv) == 1:
            yield ResidueVector(q, coords)


def sample_Rq(q, d: int, seed) -> ResidueVector:
    """Uniform sample by rejection from the uniform box [1, q]^d.

    Deterministic for a given seed (an int or a numpy SeedSequence).
    """
    q = as_factored(q)
    qv = q.value
    rng = np.random.default_rng(seed)
    while True:
        coords = tuple(int(v) for v in rng.integers(1, qv + 1, size=d))
        if math.gcd(*coords, qv) == 1:
            return ResidueVector(q, coords)


def _primitive_lift(vec: Sequence[int], qv: int) -> tuple[int, ...]:
    """An integer vector congruent to vec mod q with gcd of entries exactly 1."""
    vec = list(vec)
    d = len(vec)
    if math.gcd(*vec) == 1:
        return tuple(vec)
    if d == 1:
        raise DimensionTooSmallError(
            "a 1-dimensional residue class need not contain a +-1; no lift exists"
        )
    for i in range(d):
        cand = vec.copy()
        cand[i] += qv
        if math.gcd(*cand) == 1:
            return tuple(cand)
    # No single bump worked; push coordinate 1 through further residue classes.
    # Some multiple k*q must work since every prime obstructing the gcd rules
    # out at most one class of k modulo itself.
    for k in range(2, 64):
        cand = vec.copy()
        cand[0] += k * qv
        if math.gcd(*cand) == 1:
            return tuple(cand)
    raise NotPrimitiveError(f"no primitive lift found for {vec} mod {qv}")


def lift_primitive_mod_q(r: ResidueVector) -> tuple[int, ...]:
    """Lift r to an integer vector with gcd 1 (requires d >= 2)."""
    return _primitive_lift(r.coords, r.modulus)


def complete_to_sl(a: Sequence[int]) -> IntMatrix:
    """A determinant-one integer matrix whose last row is the primitive vector a.

    Column-reduces a to e_d by 2x2 determinant-one blocks and accumulates the
    inverse product, so no sign fix is ever needed.
    """
    a = [int(v) for v in a]
    d = len(a)
    if math.gcd(*a) != 1:
        raise NotPrimitiveError(f"gcd of {a} is not 1")
    if d == 1:
        if a[0] != 1:
            raise NotPrimitiveError("only (1,) has a determinant-one completion in dimension 1")
        return IntMatrix([[1]])
    b = a.copy()
    rows = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    for i in range(d - 1):
        bi, bj = b[i], b[i + 1]
        if bi == 0 and bj == 0:
            continue
        g, x, y = xgcd(bi, bj)
        # block [[bj/g, x], [-bi/g, y]] sends (bi, bj) to (0, g) with det one;
        # multiply its adjugate onto the accumulated inverse.
        ri = [y * p - x * q_ for p, q_ in zip(rows[i], rows[i + 1])]
        rj = [(bi // g) * p + (bj // g) * q_ for p, q_ in zip(rows[i], rows[i + 1])]
        rows[i], rows[i + 1] = ri, rj
        b[i], b[i + 1] = 0, g
    gamma = IntMatrix(rows)
    assert gamma.rows[-1] == tuple(a) and gamma.det() == 1
    return gamma


def index_gamma0(q, d: int) -> int:
    """Index of the last-row congruence subgroup inside SL_d(Z).

    Exactly q**(d-1) * prod_{p | q} (1 - p**-d) / (1 - p**-1), evaluated as the
    integer quotient count_Rq(q, d) / phi(q).
    """
    q = as_factored(q)
    return count_Rq(q, d) // euler_phi(q)


def coset_label(gamma: IntMatrix, q) -> ProjectivePoint:
    """Canonical label of the coset of gamma: its last row mod q up to units."""
    q = as_factored(q)
    if gamma.det() != 1:
        raise NotUnimodularError(f"determinant {gamma.det()} != 1")
    return ProjectivePoint(q, canonical_rep(gamma.rows[-1], q.value))


def _lex_less(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise lexicographic a < b for equal-shape 2-d int arrays."""
    less = np.zeros(len(a), dtype=bool)
    decided = np.zeros(len(a), dtype=bool)
    for j in range(a.shape[1]):
        lt = ~decided & (a[:, j] < b[:, j])
        gt = ~decided & (a[:, j] > b[:, j])
        less |= lt
        decided |= lt | gt
    return less


def _primitive_grid(qv: int, d: int) -> np.ndarray:
    """All vectors in [0, q)^d with gcd(vector, q) = 1, as int64 rows."""
    grid = np.indices((qv,) * d).reshape(d, -1).T.astype(np.int64)
    g = grid[:, 0]
    for j in range(1, d):
        g = np.gcd(g, grid[:, j])
    return grid[np.gcd(g, qv) == 1]


def _canonical_labels(rows: np.ndarray, qv: int) -> np.ndarray:
    """Canonical (lex-min unit multiple) label of each primitive row mod q."""
    best = rows % qv
    for u in _units_list(qv)[1:]:
        cand = (u * rows) % qv
        mask = _lex_less(cand, best)
        best[mask] = cand[mask]
    return best


def enumerate_cosets(q, d: int) -> Iterator[tuple[ProjectivePoint, IntMatrix]]:
    """One (label, representative gamma) pair per coset, in label order."""
    q = as_factored(q)
    qv = q.value
    index = index_gamma0(q, d)
    if index > COSET_CAP:
        raise TooLargeError(f"coset index {index} exceeds the cap {COSET_CAP}")
    if qv**d > _TABLE_CAP:
        raise TooLargeError(f"q**d = {qv**d} exceeds the labelling table cap {_TABLE_CAP}")
    prim = _primitive_grid(qv, d)
    labels = np.unique(_canonical_labels(prim, qv), axis=0)
    assert len(labels) == index
    for row in labels:
        rep = tuple(int(v) for v in row)
        point = ProjectivePoint(q, rep)
        if d == 1:
            gamma = IntMatrix.identity(1) if qv == 1 else complete_to_sl((1,))
        elif all(v == 0 for v in rep):  # q = 1
            gamma = IntMatrix.identity(d)
        else:
            gamma = complete_to_sl(_primitive_lift(rep, qv))
        yield point, gamma


def parametrize_r(gamma: IntMatrix, u: int, q) -> ResidueVector:
    """r = u * (last row of gamma) mod q, coordinates normalised to [1, q]."""
    q = as_factored(q)
    qv = q.value
    if gamma.det() != 1:
        raise NotUnimodularError(f"determinant {gamma.det()} != 1")
    if math.gcd(u, qv) != 1:
        raise NotAUnitError(f"{u} is not a unit mod {qv}")
    coords = tuple((u * v) % qv or qv for v in gamma.rows[-1])
    return ResidueVector(q, coords)


@functools.lru_cache(maxsize=65536)
def _coset_gamma(qv: int, label: tuple[int, ...]) -> IntMatrix:
    d = len(label)
    if all(v == 0 for v in label):  # q = 1
        return IntMatrix.identity(d)
    if d == 1:
        return complete_to_sl((1,))
    return complete_to_sl(_primitive_lift(label, qv))


def horosphere_representative(r: ResidueVector) -> IntMatrix:
    """The integral matrix [[(B - s r^t)/q, s], [-r^t, q]] of determinant one.

    gamma represents the coset labelled by r, B = diag(q, ..., q, 1) * gamma,
    u is the unit with r = u * (last row of gamma) mod q, and s = ubar * e_d.
    """
    q = r.q
    qv = q.value
    d = r.d
    gamma = _coset_gamma(qv, canonical_rep(r.coords, qv))
    a = gamma.rows[-1]
    g, coeffs = xgcd_list(list(a) + [qv])
    assert g == 1
    u = sum(c * rc for c, rc in zip(coeffs[:d], r.coords)) % qv
    ubar = pow(u, -1, qv)
    s = [0] * (d - 1) + [ubar]
    b_rows = [[qv * v for v in row] for row in gamma.rows[:-1]] + [list(a)]
    out = []
    for i in range(d):
        top = []
        for j in range(d):
            num = b_rows[i][j] - s[i] * r.coords[j]
            assert num % qv == 0
            top.append(num // qv)
        top.append(s[i])
        out.append(top)
    out.append([-c for c in r.coords] + [qv])
    rep = IntMatrix(out)
    assert rep.det() == 1
    return rep


def count_coset_solutions(x: Sequence[int], ell: int, q, d: int) -> int:
    """Number of coset representatives gamma admitting m with gamma^t m = x,
    (q/ell) | m_j for j < d and gcd(m_d, q/ell) = 1.

    The solution m = x gamma^{-1} is unique per gamma, so this is a filtered
    sweep over the coset enumeration.
    """
    q = as_factored(q)
    qv = q.value
    x = tuple(int(v) for v in x)
    if len(x) != d or all(v == 0 for v in x):
        raise OutOfRangeError("x must be a nonzero vector of length d")
    if ell < 1 or qv % ell != 0:
        raise OutOfRangeError(f"ell = {ell} must divide q = {qv}")
    qb = qv // ell
    count = 0
    for _, gamma in enumerate_cosets(q, d):
        m = vecmat(x, gamma.inverse_unimodular())
        if all(m[j] % qb == 0 for j in range(d - 1)) and math.gcd(m[-1], qb) == 1:
            count += 1
    return count
