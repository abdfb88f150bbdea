"""Exact multiplicative number theory and exponential sums.

Everything is exact integer arithmetic except Kloosterman sums, which are
evaluated in double precision with a tracked error bound.  Moduli are capped
at 2**31, so trial-division factorization and direct unit sums suffice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import OutOfRangeError, OverflowLimitError, TooLargeError

MAX_MODULUS = 2**31
COUNT_LIMIT = 2**127
EPS = float(np.finfo(float).eps)

#: Rational lower bounds for 1/zeta(d), used in exact-integer size checks.
ZETA_INVERSE_LOWER = {2: Fraction(6079, 10000), 3: Fraction(8319, 10000)}

# zeta at small odd integers (classical constants); even values are pi powers.
_ZETA_ODD = {3: 1.2020569031595943, 5: 1.0369277551433699, 7: 1.0083492773819228}


def riemann_zeta(d: int) -> float:
    """zeta(d) for integer d in [2, 8]."""
    if d == 2:
        return math.pi**2 / 6
    if d == 4:
        return math.pi**4 / 90
    if d == 6:
        return math.pi**6 / 945
    if d == 8:
        return math.pi**8 / 9450
    if d in _ZETA_ODD:
        return _ZETA_ODD[d]
    raise OutOfRangeError(f"zeta tabulated only for 2 <= d <= 8, got {d}")


@dataclass(frozen=True)
class FactoredInt:
    """A positive integer together with its prime factorization.

    ``factors`` is a tuple of (prime, exponent) pairs with strictly increasing
    primes whose product reconstructs ``value``.  Build instances through
    :func:`factorize`; the constructor only checks cheap structural facts.
    """

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.value < 1:
            raise OutOfRangeError(f"value must be positive, got {self.value}")
        prod = 1
        prev = 1
        for p, e in self.factors:
            if p <= prev or e < 1:
                raise ValueError("factors must have increasing primes and exponents >= 1")
            prev = p
            prod *= p**e
        if prod != self.value:
            raise ValueError(f"factorization product {prod} != value {self.value}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def __int__(self) -> int:
        return self.value


def factorize(n: int) -> FactoredInt:
    """Trial-division factorization (2, 3, then the 6k+-1 wheel)."""
    if not 1 <= n <= MAX_MODULUS:
        raise OutOfRangeError(f"factorize requires 1 <= n <= 2**31, got {n}")
    m = n
    factors: list[tuple[int, int]] = []
    for p in (2, 3):
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
    p = 5
    while p * p <= m:
        for cand in (p, p + 2):
            if m % cand == 0:
                e = 0
                while m % cand == 0:
                    m //= cand
                    e += 1
                factors.append((cand, e))
        p += 6
    if m > 1:
        factors.append((m, 1))
    factors.sort()
    return FactoredInt(n, tuple(factors))


def as_factored(q) -> FactoredInt:
    """Coerce an int (or FactoredInt) to FactoredInt."""
    if isinstance(q, FactoredInt):
        return q
    return factorize(int(q))


def euler_phi(q) -> int:
    """Euler totient: the number of units mod q."""
    q = as_factored(q)
    out = q.value
    for p, _ in q.factors:
        out = out // p * (p - 1)
    return out


def moebius(q) -> int:
    q = as_factored(q)
    if any(e >= 2 for _, e in q.factors):
        return 0
    return -1 if len(q.factors) % 2 else 1


def sigma0(q) -> int:
    """Number of positive divisors."""
    q = as_factored(q)
    out = 1
    for _, e in q.factors:
        out *= e + 1
    return out


def divisors(q) -> list[int]:
    q = as_factored(q)
    out = [1]
    for p, e in q.factors:
        out = [d * p**k for k in range(e + 1) for d in out]
    return sorted(out)


def count_Rq(q, d: int) -> int:
    """Number of d-tuples of residues in (0, q] jointly coprime to q.

    Equals q**d * prod_{p | q} (1 - p**-d), computed exactly in integers
    (the d-dimensional Jordan analogue of the totient).
    """
    q = as_factored(q)
    if not 1 <= d <= 8:
        raise OutOfRangeError(f"dimension must be in [1, 8], got {d}")
    out = q.value**d
    for p, _ in q.factors:
        out = out // p**d * (p**d - 1)
    if out > COUNT_LIMIT:
        raise OverflowLimitError(f"count {out} exceeds 2**127")
    return out


def unit_residues(q: int) -> np.ndarray:
    """Units mod q as an int64 array ([0] for q = 1)."""
    if q == 1:
        return np.zeros(1, dtype=np.int64)
    u = np.arange(1, q, dtype=np.int64)
    return u[np.gcd(u, q) == 1]


@dataclass(frozen=True)
class ExpSumValue:
    """A floating-point exponential sum value with an accumulated error bound."""

    re: float
    im: float
    abs_err: float


def kloosterman(a: int, b: int, q) -> ExpSumValue:
    """Kloosterman sum S(a, b; q) = sum over units u of e((a*ubar + b*u)/q).

    The phase numerator is reduced mod q in exact integer arithmetic before
    any float enters, so abs_err stays a few ulp per summand.
    """
    qv = int(as_factored(q).value) if isinstance(q, FactoredInt) else int(q)
    if not 1 <= qv <= MAX_MODULUS:
        raise OutOfRangeError(f"kloosterman requires 1 <= q <= 2**31, got {qv}")
    a %= qv
    b %= qv
    if qv == 1:
        return ExpSumValue(1.0, 0.0, 8 * EPS)
    units = unit_residues(qv)
    ts = np.fromiter(
        ((a * pow(int(u), -1, qv) + b * int(u)) % qv for u in units),
        dtype=np.int64,
        count=len(units),
    )
    ang = 2 * np.pi * ts / qv
    re = float(np.cos(ang).sum())
    im = float(np.sin(ang).sum())
    return ExpSumValue(re, im, 8 * EPS * max(len(units), 1))


def kloosterman_table(q: int) -> np.ndarray:
    """All S(a, b; q) at once as a complex (q, q) array (a row, b column).

    Same sums as :func:`kloosterman`, vectorised for sweeps over residues.
    """
    if not 1 <= q <= 4096:
        raise TooLargeError(f"kloosterman_table is capped at q <= 4096, got {q}")
    if q == 1:
        return np.ones((1, 1), dtype=complex)
    units = unit_residues(q)
    inv = np.fromiter((pow(int(u), -1, q) for u in units), dtype=np.int64, count=len(units))
    ar = np.arange(q, dtype=np.int64)
    left = np.exp(2j * np.pi * np.outer(ar, inv) / q)  # e(a*ubar/q)
    right = np.exp(2j * np.pi * np.outer(units, ar) / q)  # e(b*u/q)
    return left @ right


def ramanujan_sum(n: int, q) -> int:
    """c_q(n) via the closed form mu(q/g) * phi(q) / phi(q/g), g = gcd(n, q)."""
    q = as_factored(q)
    g = math.gcd(n, q.value)
    m = q.value // g
    mu = moebius(m)
    if mu == 0:
        return 0
    return mu * (euler_phi(q) // euler_phi(m))


@dataclass(frozen=True)
class WeilCheck:
    lhs: float
    rhs: float
    holds: bool


def check_weil(a: int, b: int, q) -> WeilCheck:
    """Check |S(a, b; q)| <= sqrt(q) * gcd(a, b, q)**(1/2) * sigma0(q)."""
    q = as_factored(q)
    s = kloosterman(a, b, q)
    lhs = math.hypot(s.re, s.im)
    g = math.gcd(a, b, q.value)
    rhs = math.sqrt(q.value) * math.sqrt(g) * sigma0(q)
    return WeilCheck(lhs, rhs, lhs <= rhs + s.abs_err)
