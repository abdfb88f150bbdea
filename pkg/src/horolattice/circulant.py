"""Circulant (Cayley) graphs of Z/qZ: exact diameters, word metric, and the
covering-radius sandwich.

The graph on Z/qZ with steps +-a_1, ..., +-a_d is vertex-transitive, so its
diameter is the eccentricity of vertex 0, and the distance from 0 to k is the
minimal l1 norm over the integer solutions of m . a = k (mod q).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import NotPrimitiveError, OutOfRangeError, TooLargeError
from .intmat import xgcd_list
from .lattices import SublatticeBasis, covering_radius_l1, cvp_l1, sublattice_from_residue
from .numtheory import as_factored
from .residues import ResidueVector

_MEM_CAP = 10**8  # q * d vertex-step budget


@dataclass(frozen=True)
class CirculantGraph:
    q: int
    generators: tuple[int, ...]

    def __post_init__(self):
        if self.q < 1:
            raise OutOfRangeError(f"q must be positive, got {self.q}")
        if any(not 1 <= a <= self.q for a in self.generators):
            raise OutOfRangeError(f"generators must lie in [1, {self.q}]")
        if math.gcd(*self.generators, self.q) != 1:
            raise NotPrimitiveError(
                f"gcd({self.generators}, {self.q}) != 1: the graph would be disconnected"
            )

    @property
    def d(self) -> int:
        return len(self.generators)


def bfs_distances(g: CirculantGraph) -> np.ndarray:
    """Distances from vertex 0 to every vertex, as an int16 array."""
    q = g.q
    if q * g.d > _MEM_CAP:
        raise TooLargeError(f"q * d = {q * g.d} exceeds the BFS memory cap {_MEM_CAP}")
    dist = np.full(q, -1, dtype=np.int16)
    dist[0] = 0
    steps = np.unique(
        np.concatenate([np.mod(g.generators, q), np.mod([-a for a in g.generators], q)])
    ).astype(np.int64)
    frontier = np.array([0], dtype=np.int64)
    level = 0
    while frontier.size:
        nxt = np.unique((frontier[:, None] + steps[None, :]).ravel() % q)
        nxt = nxt[dist[nxt] < 0]
        level += 1
        if level > 32000:
            raise TooLargeError("diameter exceeds the 16-bit distance budget")
        dist[nxt] = level
        frontier = nxt
    assert (dist >= 0).all()
    return dist


def diameter(g: CirculantGraph) -> int:
    """Exact diameter: the eccentricity of vertex 0 (vertex transitivity)."""
    return int(bfs_distances(g).max())


@functools.lru_cache(maxsize=256)
def _graph_lattice(g: CirculantGraph) -> tuple[SublatticeBasis, tuple[int, ...]]:
    """Kernel sublattice of the step vector plus Bezout coefficients x . a = 1 mod q."""
    rv = ResidueVector(as_factored(g.q), g.generators)
    lat = sublattice_from_residue(rv)
    gcd, coeffs = xgcd_list(list(g.generators) + [g.q])
    assert gcd == 1
    return lat, tuple(coeffs[: g.d])


def word_metric_distance(g: CirculantGraph, k: int, l: int) -> int:
    """Graph distance via the lattice formula min{|m|_1 : m . a = k - l mod q}.

    Computed as the exact l1 distance from a particular solution to the
    kernel sublattice; equals the BFS distance.
    """
    if not (0 <= k < g.q and 0 <= l < g.q):
        raise OutOfRangeError(f"vertices must lie in [0, {g.q})")
    if k == l:
        return 0
    lat, coeffs = _graph_lattice(g)
    t = (k - l) % g.q
    m0 = [t * c for c in coeffs]
    _, dist = cvp_l1(lat, m0)
    return int(round(dist))


@dataclass(frozen=True)
class SandwichReport:
    q: int
    a: tuple[int, ...]
    diam: int
    rho_scaled: float
    rho_lo: float
    rho_hi: float
    ok: bool


def check_sandwich(a: ResidueVector, eps: float = 1e-3) -> SandwichReport:
    """Verify q**(1/d) * rho - d/2 <= diam <= q**(1/d) * rho on one sample.

    rho is the certified covering-radius interval of the rescaled sublattice;
    eps (in rescaled coordinates) is both the certification tolerance and the
    slack applied on either side.
    """
    q = a.modulus
    d = a.d
    qd = q ** (1.0 / d)
    diam = diameter(CirculantGraph(q, a.coords))
    res = covering_radius_l1(sublattice_from_residue(a), eps * qd)
    lo_s, hi_s = res.lo / qd, res.hi / qd
    ok = (qd * lo_s - d / 2 - eps * qd) <= diam <= (qd * hi_s + eps * qd)
    return SandwichReport(
        q=q,
        a=a.coords,
        diam=diam,
        rho_scaled=0.5 * (lo_s + hi_s),
        rho_lo=lo_s,
        rho_hi=hi_s,
        ok=ok,
    )
