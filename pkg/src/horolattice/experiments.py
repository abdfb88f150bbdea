"""Equidistribution experiments over the residue-sublattice ensemble.

Averages of exact lattice point counts against their mean-value references
(region volume, and volume / zeta(d) for primitive points), exact torus
character averages, the empirical distribution of rescaled circulant
diameters, and Kolmogorov-Smirnov convergence diagnostics.
"""

from __future__ import annotations

import math
import time
from bisect import bisect_left
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circulant import CirculantGraph, bfs_distances
from .errors import OutOfRangeError, TooLargeError
from .intmat import IntMatrix
from .lattices import _greedy_reduce, covering_radius_l1, rescale_unimodular, sublattice_from_residue
from .numtheory import EPS, ExpSumValue, as_factored, count_Rq, divisors, moebius, riemann_zeta
from .residues import ResidueVector, enumerate_Rq, sample_Rq

_COUNT_CAP = 4 * 10**6  # coefficient vectors enumerated per point count
_EXHAUSTIVE_CAP = 10**6  # q**d budget for exhaustive averages


def derive_seed(master: int, *key: int) -> np.random.SeedSequence:
    """Per-sample seed stream: hash of (master seed, index path).

    Worker scheduling can never change a sample because each index owns its
    own deterministic stream.
    """
    return np.random.SeedSequence(entropy=master, spawn_key=key)


@dataclass(frozen=True)
class LatticeTestFn:
    """Exact point-count functional over a bounded region.

    kind: "count_all" counts nonzero lattice points in the region,
    "count_primitive" only those with coprime coefficient vector.
    region: "l2" or "linf" ball of the given radius.
    """

    kind: str
    region: str
    radius: float

    def __post_init__(self):
        if self.kind not in ("count_all", "count_primitive"):
            raise OutOfRangeError(f"unknown kind {self.kind!r}")
        if self.region not in ("l2", "linf"):
            raise OutOfRangeError(f"unknown region {self.region!r}")
        if self.radius <= 0:
            raise OutOfRangeError("radius must be positive")

    def __call__(self, basis: IntMatrix, scale: float = 1.0) -> float:
        rows, _ = _greedy_reduce([list(r) for r in basis.rows])
        rf = np.array(rows, dtype=float)
        d = len(rows)
        rad = self.radius / scale  # fold the scale into the region
        colsum = np.abs(np.linalg.inv(rf)).sum(axis=0)
        bound = np.floor(rad * colsum + 1e-9).astype(np.int64)
        total = int(np.prod(2 * bound + 1))
        if total > _COUNT_CAP:
            raise TooLargeError(f"point count would enumerate {total} coefficients")
        axes = [np.arange(-b, b + 1, dtype=np.int64) for b in bound]
        mesh = np.meshgrid(*axes, indexing="ij")
        coeffs = np.stack([m.ravel() for m in mesh], axis=1)
        coeffs = coeffs[np.any(coeffs != 0, axis=1)]
        pts = coeffs @ rf
        if self.region == "l2":
            inside = (pts * pts).sum(axis=1) <= rad * rad + 1e-9
        else:
            inside = np.abs(pts).max(axis=1) <= rad + 1e-9
        if self.kind == "count_primitive":
            g = coeffs[:, 0]
            for j in range(1, d):
                g = np.gcd(g, coeffs[:, j])
            inside &= np.abs(g) == 1
        return float(inside.sum())


def reference_value(f: LatticeTestFn, d: int) -> float:
    """Mean-value reference: region volume, divided by zeta(d) for primitives."""
    if f.region == "l2":
        vol = math.pi ** (d / 2) / math.gamma(d / 2 + 1) * f.radius**d
    else:
        vol = (2 * f.radius) ** d
    if f.kind == "count_primitive":
        vol /= riemann_zeta(d)
    return vol


def _lattice_of(a: ResidueVector):
    lat = rescale_unimodular(sublattice_from_residue(a), a.modulus)
    return lat.basis, lat.scale


def lattice_average(q, d: int, f: LatticeTestFn, n_samples: int, seed: int) -> float:
    """Average of f over the rescaled residue sublattices.

    Exhaustive over the whole ensemble when n_samples covers it (and the
    enumeration is affordable); otherwise Monte Carlo with per-index seeds.
    """
    q = as_factored(q)
    if n_samples < 1:
        raise OutOfRangeError("n_samples must be >= 1")
    population = count_Rq(q, d)
    if n_samples >= population and q.value**d <= _EXHAUSTIVE_CAP:
        vals = [f(*_lattice_of(a)) for a in enumerate_Rq(q, d)]
        return float(sum(vals) / len(vals))
    total = 0.0
    for i in range(n_samples):
        a = sample_Rq(q, d, derive_seed(seed, i))
        total += f(*_lattice_of(a))
    return total / n_samples


def torus_character_average(q, d: int, n: Sequence[int]) -> ExpSumValue:
    """(1 / #R_q) * sum over r of e(n . r / q), evaluated in exact integers.

    Moebius inversion over the joint gcd gives
    sum_{m | gcd(n, q)} mu(q/m) m**d, a Ramanujan-sum analogue; the only
    float operation is the final division.
    """
    q = as_factored(q)
    if len(n) != d:
        raise OutOfRangeError("frequency vector length must equal d")
    g = math.gcd(*[int(v) for v in n], q.value)
    total = 0
    for m in divisors(as_factored(g)):
        total += moebius(as_factored(q.value // m)) * m**d
    avg = total / count_Rq(q, d)
    return ExpSumValue(float(avg), 0.0, 4 * EPS)


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample multiset with complementary-CDF evaluation."""

    samples: tuple[float, ...]

    def __post_init__(self):
        if not self.samples:
            raise OutOfRangeError("empirical distribution needs at least one sample")
        if any(a > b for a, b in zip(self.samples, self.samples[1:])):
            raise ValueError("samples must be sorted ascending")

    @classmethod
    def from_values(cls, values) -> "EmpiricalDistribution":
        return cls(tuple(sorted(float(v) for v in values)))

    @property
    def n(self) -> int:
        return len(self.samples)

    def ccdf(self, r: float) -> float:
        """Fraction of samples >= r."""
        return (self.n - bisect_left(self.samples, r)) / self.n

    def tail_quantile(self, p: float) -> float:
        """Smallest sample value whose ccdf is <= p (the upper-p tail point)."""
        if not 0 < p <= 1:
            raise OutOfRangeError("tail probability must be in (0, 1]")
        idx = min(self.n - 1, max(0, math.ceil(self.n * (1 - p))))
        return self.samples[idx]


@dataclass(frozen=True)
class PsiSample:
    """One sampled generator tuple with both diameter and covering-radius data."""

    a: tuple[int, ...]
    diam: int | None
    rescaled: float | None
    rho_lo: float | None
    rho_hi: float | None


def psi_samples(
    q,
    d: int,
    n_samples: int,
    seed: int,
    eps: float = 1e-3,
    route: str = "bfs",
) -> list[PsiSample]:
    """Sampled diameters / covering radii feeding the tail-distribution estimate.

    route "bfs" records diam / q**(1/d), route "rho" the certified scaled
    covering-radius interval, "both" records the pair per sample so the
    sandwich can be audited.
    """
    if route not in ("bfs", "rho", "both"):
        raise OutOfRangeError(f"unknown route {route!r}")
    q = as_factored(q)
    qd = q.value ** (1.0 / d)
    out = []
    for i in range(n_samples):
        a = sample_Rq(q, d, derive_seed(seed, i))
        diam = rescaled = rho_lo = rho_hi = None
        if route in ("bfs", "both"):
            diam = int(bfs_distances(CirculantGraph(q.value, a.coords)).max())
            rescaled = diam / qd
        if route in ("rho", "both"):
            res = covering_radius_l1(sublattice_from_residue(a), eps * qd)
            rho_lo, rho_hi = res.lo / qd, res.hi / qd
        out.append(PsiSample(a.coords, diam, rescaled, rho_lo, rho_hi))
    return out


def psi_empirical(
    q,
    d: int,
    n_samples: int,
    seed: int,
    eps: float = 1e-3,
    route: str = "bfs",
) -> EmpiricalDistribution:
    """Empirical distribution of the rescaled diameter (or covering radius)."""
    samples = psi_samples(q, d, n_samples, seed, eps, route)
    if route == "rho":
        values = [0.5 * (s.rho_lo + s.rho_hi) for s in samples]
    else:
        values = [s.rescaled for s in samples]
    return EmpiricalDistribution.from_values(values)


def ks_distance(a: EmpiricalDistribution, b: EmpiricalDistribution) -> float:
    """Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|."""
    xs = np.array(a.samples)
    ys = np.array(b.samples)
    grid = np.concatenate([xs, ys])
    fa = np.searchsorted(xs, grid, side="right") / len(xs)
    fb = np.searchsorted(ys, grid, side="right") / len(ys)
    return float(np.abs(fa - fb).max())


@dataclass(frozen=True)
class ExperimentReport:
    """Config echo, per-q statistics and runtime for one experiment run."""

    config: dict
    seed: int
    results: tuple[dict, ...]
    ks_monotone_to_ref: bool
    runtime_s: float


def convergence_report(d: int, q_list: Sequence[int], n_samples: int, seed: int) -> ExperimentReport:
    """Empirical distributions along q_list with KS distances to the largest q.

    The largest q serves as the reference ensemble; the report flags whether
    the KS distance to it decreases along the list.
    """
    q_list = [int(q) for q in q_list]
    if len(q_list) < 2 or any(b <= a for a, b in zip(q_list, q_list[1:])):
        raise OutOfRangeError("q_list must be ascending with at least two entries")
    t0 = time.perf_counter()
    dists = [
        psi_empirical(q, d, n_samples, int(derive_seed(seed, idx).generate_state(1)[0]))
        for idx, q in enumerate(q_list)
    ]
    ref = dists[-1]
    results = []
    prev = None
    ks_ref_values = []
    for q, dist in zip(q_list, dists):
        ks_ref = ks_distance(dist, ref)
        ks_prev = ks_distance(dist, prev) if prev is not None else None
        results.append(
            {
                "q": q,
                "n": dist.n,
                "mean": float(np.mean(dist.samples)),
                "ks_to_ref": ks_ref,
                "ks_to_prev": ks_prev,
            }
        )
        ks_ref_values.append(ks_ref)
        prev = dist
    head = ks_ref_values[:-1]  # the reference's own distance is trivially 0
    monotone = all(b <= a for a, b in zip(head, head[1:]))
    return ExperimentReport(
        config={"d": d, "q_list": q_list, "n_samples": n_samples},
        seed=seed,
        results=tuple(results),
        ks_monotone_to_ref=monotone,
        runtime_s=time.perf_counter() - t0,
    )
