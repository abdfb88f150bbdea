"""Primitive residue vectors mod q and their lattice statistics.

Library layout:

- numtheory: factorization, totients, Kloosterman / Ramanujan sums, Weil bound
- residues:  enumeration and coset parametrization of the vectors r in
             (Z cap [1, q])^d with gcd(r, q) = 1, determinant-one completions,
             and the (d+1)-dimensional integral representatives
- hecke:     the diag(q, ..., q, 1) double-coset orbit and Hecke averaging
- lattices:  kernel sublattices {m : m . a = 0 mod q}, exact l1 CVP, and
             certified covering radii of the cross-polytope
- circulant: circulant-graph diameters, the word metric, and the
             diameter / covering-radius sandwich
- experiments: equidistribution averages, empirical diameter distributions,
             and Kolmogorov-Smirnov convergence reports
- cli:       the `horolat` command exposing all of the above
"""

__version__ = "0.1.0"
