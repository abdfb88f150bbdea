"""Integer sublattices, exact l1 closest-vector queries, and certified
covering radii of the cross-polytope (equivalently l1 torus diameters).

The covering-radius search is a branch-and-bound over a box containing a
fundamental domain.  The distance-to-lattice function f is periodic and
1-Lipschitz for the l1 norm, so a cell [lo, hi] is certified by
min over nearby lattice points v of sum_j max(|lo_j - v_j|, |hi_j - v_j|),
and the search maintains a rigorous enclosure [max sampled f, max cell bound].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DeterminantMismatchError,
    DimensionTooLargeError,
    InvalidToleranceError,
    TooLargeError,
)
from .intmat import IntMatrix, hnf, xgcd
from .residues import ResidueVector

_CVP_CAP = 2 * 10**6  # enumerated coefficient vectors per query
_POINT_CAP = 4 * 10**6  # candidate lattice points per covering-radius run
_CHUNK = 2 * 10**6  # floats per pairwise-distance block


@dataclass
class SublatticeBasis:
    """Row basis of a finite-index integer sublattice with a uniform scale.

    The integer basis is normalised to row HNF on construction, so equal
    lattices compare equal.  Lattice points are scale * (c @ basis), c in Z^d.
    """

    d: int
    basis: IntMatrix
    scale: float = 1.0
    _reduced: tuple[IntMatrix, IntMatrix] | None = field(
        default=None, init=False, repr=False, compare=False
    )

    def __post_init__(self):
        if self.basis.nrows != self.d or self.basis.ncols != self.d:
            raise ValueError(f"basis must be {self.d} x {self.d}")
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        self.basis = hnf(self.basis.rows)  # raises SingularBasisError if rank-deficient

    def det(self) -> int:
        """|det| of the integer basis (the HNF diagonal product)."""
        out = 1
        for i in range(self.d):
            out *= self.basis.rows[i][i]
        return out

    def reduced(self) -> tuple[IntMatrix, IntMatrix]:
        """A greedily reduced basis R and the unimodular U with R = U @ basis."""
        if self._reduced is None:
            rows, u = _greedy_reduce([list(r) for r in self.basis.rows])
            self._reduced = (IntMatrix(rows), IntMatrix(u))
        return self._reduced


@dataclass(frozen=True)
class CoveringRadiusResult:
    """Certified enclosure lo <= rho <= hi with the best witness point found."""

    lo: float
    hi: float
    cells_explored: int
    deep_hole: tuple[float, ...]


def _greedy_reduce(rows: list[list[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Shorten a square integer basis by unimodular row operations.

    Pairwise nearest-integer size reduction plus a small-coefficient
    replacement sweep; each accepted change strictly decreases the total
    squared length, so the loop terminates.  Quality is ample for d <= 4.
    """
    d = len(rows)
    u = [[int(i == j) for j in range(d)] for i in range(d)]

    def l2(r):
        return sum(v * v for v in r)

    changed = True
    guard = 0
    while changed:
        changed = False
        guard += 1
        if guard > 1000:
            break
        order = sorted(range(d), key=lambda i: l2(rows[i]))
        rows = [rows[i] for i in order]
        u = [u[i] for i in order]
        for i in range(d):
            for j in range(d):
                if i == j:
                    continue
                den = l2(rows[j])
                if den == 0:
                    continue
                num = sum(a * b for a, b in zip(rows[i], rows[j]))
                mu = (2 * num + den) // (2 * den)  # nearest integer to num/den
                if mu:
                    cand = [a - mu * b for a, b in zip(rows[i], rows[j])]
                    if l2(cand) < l2(rows[i]):
                        rows[i] = cand
                        u[i] = [a - mu * b for a, b in zip(u[i], u[j])]
                        changed = True
        if d >= 2 and not changed:
            norms = [l2(r) for r in rows]
            for coeffs in np.ndindex(*(3,) * d):
                c = [v - 1 for v in coeffs]  # c in {-1, 0, 1}^d
                ones = [k for k in range(d) if abs(c[k]) == 1]
                if not ones:
                    continue
                vec = [sum(c[k] * rows[k][j] for k in range(d)) for j in range(d)]
                lv = l2(vec)
                k = max(ones, key=lambda t: norms[t])
                if lv < norms[k]:
                    rows[k] = vec
                    u[k] = [sum(c[t] * u[t][j] for t in range(d)) for j in range(d)]
                    changed = True
                    break
    return rows, u


def sublattice_from_residue(a: ResidueVector) -> SublatticeBasis:
    """HNF basis of {m in Z^d : m . a = 0 mod q}; index exactly q.

    Column-reduces the primitive vector (a, q) in Z^(d+1) to e_(d+1) while
    accumulating the unimodular transform; the first d transform columns span
    the kernel of the linear form, and dropping their last coordinate gives
    the sublattice.
    """
    qv = a.modulus
    d = a.d
    w = list(a.coords) + [qv]
    n = d + 1
    ucols = [[int(i == j) for i in range(n)] for j in range(n)]  # columns of U
    for i in range(n - 1):
        bi, bj = w[i], w[i + 1]
        if bi == 0 and bj == 0:
            continue
        g, x, y = xgcd(bi, bj)
        ci, cj = ucols[i], ucols[i + 1]
        ucols[i] = [(bj // g) * p - (bi // g) * r for p, r in zip(ci, cj)]
        ucols[i + 1] = [x * p + y * r for p, r in zip(ci, cj)]
        w[i], w[i + 1] = 0, g
    assert w[-1] == 1
    kernel_rows = [ucols[j][:d] for j in range(d)]
    basis = hnf(kernel_rows)
    out = SublatticeBasis(d, basis, 1.0)
    if out.det() != qv:
        raise DeterminantMismatchError(f"kernel index {out.det()} != q = {qv}")
    return out


def rescale_unimodular(s: SublatticeBasis, q) -> SublatticeBasis:
    """Apply the q**(-1/d) rescaling that makes an index-q sublattice unimodular."""
    qv = int(q) if not hasattr(q, "value") else q.value
    if s.det() != qv:
        raise DeterminantMismatchError(f"|det| = {s.det()} does not equal q = {qv}")
    return SublatticeBasis(s.d, s.basis, s.scale * qv ** (-1.0 / s.d))


def cvp_l1(lat: SublatticeBasis, x) -> tuple[np.ndarray, float]:
    """Exact l1 closest lattice point to x, by coefficient-box enumeration.

    The box is seeded by the rounded-coordinate candidate: any better vector v
    satisfies |coeff(v) - coeff(x)|_inf <= dist0 * max|inv(G)| per axis.  Ties
    are broken by the lexicographically smallest coefficient vector w.r.t. the
    stored (HNF) basis.
    """
    reduced, transform = lat.reduced()
    g = reduced.to_numpy(float) * lat.scale
    ginv = np.linalg.inv(g)
    x = np.asarray(x, dtype=float)
    c0f = x @ ginv
    c0 = np.rint(c0f)
    dist0 = float(np.abs(x - c0 @ g).sum())
    rad = dist0 * np.abs(ginv).max(axis=0) + 1e-9
    lo = np.floor(c0f - rad).astype(np.int64)
    hi = np.ceil(c0f + rad).astype(np.int64)
    total = int(np.prod(hi - lo + 1))
    if total > _CVP_CAP:
        raise TooLargeError(f"cvp enumeration of {total} coefficient vectors exceeds cap")
    axes = [np.arange(l, h + 1, dtype=np.int64) for l, h in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    coeffs = np.stack([m.ravel() for m in mesh], axis=1)
    dists = np.abs(coeffs @ g - x).sum(axis=1)
    dmin = float(dists.min())
    tie = np.flatnonzero(dists <= dmin + 1e-9)
    orig = coeffs[tie] @ transform.to_numpy(np.int64)
    best = tie[np.lexsort(orig.T[::-1])[0]]
    coeff_orig = coeffs[best] @ transform.to_numpy(np.int64)
    v = coeff_orig @ np.array(lat.basis.rows, dtype=float) * lat.scale
    return v, float(np.abs(x - v).sum())


def _pairwise_l1_min(a: np.ndarray, pts: np.ndarray, near: int = 0):
    """min over pts of the l1 distance from each row of a, chunked.

    With near > 0 also returns the indices of the `near` closest points per
    row (used to refine cell bounds).
    """
    n, d = a.shape
    m = len(pts)
    out = np.empty(n)
    idx = np.empty((n, near), dtype=np.int64) if near else None
    step = max(1, _CHUNK // max(m * d, 1))
    for s in range(0, n, step):
        blk = a[s : s + step]
        dist = np.abs(blk[:, None, :] - pts[None, :, :]).sum(axis=2)
        out[s : s + step] = dist.min(axis=1)
        if near:
            k = min(near, m)
            part = np.argpartition(dist, k - 1, axis=1)[:, :k]
            if k < near:
                part = np.pad(part, ((0, 0), (0, near - k)), mode="edge")
            idx[s : s + step] = part
    return (out, idx) if near else out


def _cell_upper_bounds(
    clo: np.ndarray, chi: np.ndarray, pts: np.ndarray, near_idx: np.ndarray
) -> np.ndarray:
    """Upper bound for sup over each box of the distance-to-lattice function.

    Combines the one-point bound min_v sup_x |x - v|_1 (valid since f <= each
    |. - v|_1) with two-point bounds over the points nearest the center:
    f <= (|. - v|_1 + |. - w|_1) / 2, whose box supremum separates per
    coordinate and is exact on flat l1 bisector pieces.
    """
    n, d = clo.shape
    m = len(pts)
    out = np.empty(n)
    step = max(1, _CHUNK // max(m * d, 1))
    for s in range(0, n, step):
        lo_blk = clo[s : s + step]
        hi_blk = chi[s : s + step]
        dist_lo = np.abs(lo_blk[:, None, :] - pts[None, :, :])
        dist_hi = np.abs(hi_blk[:, None, :] - pts[None, :, :])
        single = np.maximum(dist_lo, dist_hi).sum(axis=2).min(axis=1)
        near = pts[near_idx[s : s + step]]  # (chunk, k, d)
        k = near.shape[1]
        best_pair = np.full(len(lo_blk), np.inf)
        for i in range(k):
            for j in range(i + 1, k):
                va, vb = near[:, i, :], near[:, j, :]
                g_lo = np.abs(lo_blk - va) + np.abs(lo_blk - vb)
                g_hi = np.abs(hi_blk - va) + np.abs(hi_blk - vb)
                pair = 0.5 * np.maximum(g_lo, g_hi).sum(axis=1)
                best_pair = np.minimum(best_pair, pair)
        out[s : s + step] = np.minimum(single, best_pair)
    return out


def covering_radius_l1(lat: SublatticeBasis, eps: float) -> CoveringRadiusResult:
    """Certified interval around the l1 covering radius, hi - lo <= eps.

    Works on the integer basis and multiplies results by the scale at the
    end (covering radii are homogeneous under uniform scaling).
    """
    if eps <= 0:
        raise InvalidToleranceError(f"eps must be positive, got {eps}")
    if lat.d > 4:
        raise DimensionTooLargeError(f"covering radius capped at d <= 4, got {lat.d}")
    reduced, _ = lat.reduced()
    rf = reduced.to_numpy(float)
    s = lat.scale
    eps_int = eps / s
    r_cap = 0.5 * float(np.abs(rf).sum())  # rho <= half the sum of row l1 norms
    box_lo = np.minimum(rf, 0.0).sum(axis=0)
    box_hi = np.maximum(rf, 0.0).sum(axis=0)

    rinv = np.linalg.inv(rf)
    colmax = np.abs(rinv).max(axis=0)
    # Coefficient ranges that cover the nearest lattice point of every point
    # in the bounding box: box coefficients spread plus the r_cap reach.
    mid_c = ((box_lo + box_hi) / 2) @ rinv
    spread = ((box_hi - box_lo) / 2) @ np.abs(rinv)
    rad_c = spread + r_cap * colmax + 1e-9
    clo = np.floor(mid_c - rad_c).astype(np.int64)
    chi = np.ceil(mid_c + rad_c).astype(np.int64)
    total = int(np.prod(chi - clo + 1))
    if total > _POINT_CAP:
        raise TooLargeError(f"covering-radius candidate set of {total} points exceeds cap")
    axes = [np.arange(l, h + 1, dtype=np.int64) for l, h in zip(clo, chi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1).astype(float) @ rf
    boxgap = np.maximum(box_lo - pts, 0.0) + np.maximum(pts - box_hi, 0.0)
    pts = pts[boxgap.sum(axis=1) <= r_cap + 1e-6]

    cell_lo = box_lo[None, :].copy()
    cell_hi = box_hi[None, :].copy()
    lo = 0.0
    deep = (box_lo + box_hi) / 2
    prune_hi = 0.0
    cells = 0
    for _ in range(10000):
        centers = (cell_lo + cell_hi) / 2
        fvals = _pairwise_l1_min(centers, pts)
        top = int(np.argmax(fvals))
        if fvals[top] > lo:
            lo = float(fvals[top])
            deep = centers[top].copy()
        ubs = _cell_upper_bounds(cell_lo, cell_hi, pts)
        cells += len(centers)
        keep = ubs > lo + eps_int
        if (~keep).any():
            prune_hi = max(prune_hi, float(ubs[~keep].max()))
        if not keep.any():
            break
        cell_lo, cell_hi = cell_lo[keep], cell_hi[keep]
        widths = cell_hi - cell_lo
        axis = np.argmax(widths, axis=1)
        mid = (cell_lo + cell_hi) / 2
        left_hi = cell_hi.copy()
        left_hi[np.arange(len(axis)), axis] = mid[np.arange(len(axis)), axis]
        right_lo = cell_lo.copy()
        right_lo[np.arange(len(axis)), axis] = mid[np.arange(len(axis)), axis]
        cell_lo = np.concatenate([cell_lo, right_lo])
        cell_hi = np.concatenate([left_hi, cell_hi])
    else:
        raise TooLargeError("covering-radius search did not converge within the cell budget")
    hi = max(lo, prune_hi)
    return CoveringRadiusResult(lo * s, hi * s, cells, tuple(float(v) for v in deep * s))


def scaled_covering_radius(a: ResidueVector, eps: float = 1e-3) -> float:
    """Covering radius of the unimodular rescaling of the residue sublattice.

    By homogeneity the search runs on the integer kernel lattice (eps is in
    integer-lattice coordinates) and the midpoint is multiplied by q**(-1/d).
    """
    lat = sublattice_from_residue(a)
    res = covering_radius_l1(lat, eps)
    return 0.5 * (res.lo + res.hi) * a.modulus ** (-1.0 / a.d)
