"""Double-coset decomposition for B0 = diag(q, ..., q, 1) and Hecke averaging.

The left cosets SL_d(Z) (B0 delta), delta ranging over coset representatives
of the last-row congruence subgroup, partition the double coset of B0.  The
Hecke operator averages a lattice functional over these finitely many
translates, rescaled by q**(-(d-1)/d) so every translate is unimodular.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import NotUnimodularError, TooLargeError
from .intmat import IntMatrix, hnf
from .numtheory import FactoredInt, as_factored
from .residues import COSET_CAP, enumerate_cosets, index_gamma0


def b0_matrix(q: int, d: int) -> IntMatrix:
    """diag(q, ..., q, 1) with d - 1 copies of q."""
    return IntMatrix.diagonal([q] * (d - 1) + [1])


def gamma0_member(gamma: IntMatrix, q) -> bool:
    """True iff gamma's last row is congruent to (0, ..., 0, unit) mod q."""
    q = as_factored(q)
    qv = q.value
    if gamma.det() != 1:
        raise NotUnimodularError(f"determinant {gamma.det()} != 1")
    last = gamma.rows[-1]
    if any(v % qv for v in last[:-1]):
        return False
    # The corner entry is forced to be a unit once the rest of the row vanishes.
    assert math.gcd(last[-1], qv) == 1
    return True


@dataclass(frozen=True)
class HeckeOrbit:
    """The translates B0 * delta with the unimodular rescaling factor."""

    q: FactoredInt
    d: int
    reps: tuple[IntMatrix, ...]
    scale: float

    @property
    def index(self) -> int:
        return len(self.reps)


def hecke_orbit(q, d: int) -> HeckeOrbit:
    """All translates B0 * delta, one per coset representative."""
    q = as_factored(q)
    if index_gamma0(q, d) > COSET_CAP:
        raise TooLargeError(f"orbit of index {index_gamma0(q, d)} exceeds {COSET_CAP}")
    b0 = b0_matrix(q.value, d)
    reps = tuple(b0 @ gamma for _, gamma in enumerate_cosets(q, d))
    return HeckeOrbit(q, d, reps, q.value ** (-(d - 1) / d))


def orbit_class_forms(orbit: HeckeOrbit) -> list[IntMatrix]:
    """Row HNF of each translate: the canonical form of its left SL_d(Z) class."""
    return [hnf(rep.rows) for rep in orbit.reps]


def hecke_average(q, d: int, test_fn: Callable[[IntMatrix, float], float]) -> float:
    """Average test_fn over the orbit lattices at the identity point.

    test_fn receives (integer basis, scale); the lattice is the row span of
    the basis with every coordinate multiplied by scale.  The reduction runs
    in fixed rep order so the result does not depend on scheduling.
    """
    orbit = hecke_orbit(q, d)
    total = 0.0
    for rep in orbit.reps:
        total += test_fn(rep, orbit.scale)
    return total / orbit.index
