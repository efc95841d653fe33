"""
Singular series of admissible tuples and the arithmetic around them.

``singular_series(D, P)`` evaluates the Euler product

    S(D) = prod_p (1 - 1/p)^(-n) (1 - nu_D(p)/p),    n = |D|,

over the primes ``p <= P`` and attaches a certified bound on the log of
the omitted tail. Local factors are available exactly as
:class:`fractions.Fraction` through :func:`local_factor`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .census import GapPattern
from .primes import factorize, is_prime, primes_array

__all__ = [
    "SingularSeriesValue",
    "GcdDecomposition",
    "TruncationError",
    "normalize",
    "nu",
    "nu_array",
    "local_factor",
    "log_local_factors",
    "minimal_truncation",
    "singular_series",
    "gcd_decompose",
    "primorial",
    "floor_primorial",
    "delta_product",
    "mertens_sum",
    "mertens_constant_estimate",
    "MERTENS_CONSTANT",
]

MERTENS_CONSTANT = 0.26149721284764278375


class TruncationError(ValueError):
    """The truncation point is too small for the tail bound to be valid."""


def normalize(D: Iterable[int]) -> tuple[int, ...]:
    """Sorted distinct elements shifted so the smallest is 0."""
    s = sorted(set(int(d) for d in D))
    if not s:
        raise ValueError("empty tuple")
    return tuple(d - s[0] for d in s)


def nu(D: Iterable[int], p: int) -> int:
    """Number of residue classes mod ``p`` occupied by ``D``."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    D = list(D)
    if not D:
        raise ValueError("empty tuple")
    return len({d % p for d in D})


def nu_array(D: Sequence[int], primes: np.ndarray) -> np.ndarray:
    """Vectorised :func:`nu` over an array of primes."""
    D = np.asarray(normalize(D), dtype=np.int64)
    primes = np.asarray(primes, dtype=np.int64)
    if len(D) == 1:
        return np.ones(len(primes), dtype=np.int64)
    res = np.sort(D[:, None] % primes[None, :], axis=0)
    return 1 + np.count_nonzero(np.diff(res, axis=0), axis=0)


def local_factor(D: Iterable[int], p: int) -> Fraction:
    """Exact ``(1 - 1/p)^(-n) (1 - nu_D(p)/p)``."""
    D = normalize(D)
    v = nu(D, p)
    n = len(D)
    return Fraction(p, p - 1) ** n * Fraction(p - v, p)


def log_local_factors(n: int, nus: np.ndarray, primes: np.ndarray) -> np.ndarray:
    """Logs of the local factors, one per prime; ``-inf`` where nu == p."""
    p = primes.astype(np.float64)
    with np.errstate(divide="ignore"):
        return -n * np.log1p(-1.0 / p) + np.log1p(-nus / p)


def minimal_truncation(D: Iterable[int]) -> int:
    """Smallest admissible truncation point for ``D``.

    Beyond ``max(D) - min(D)`` every prime sees ``n`` distinct classes, and
    for ``p >= 2 n^2`` the log local factor is at most ``n^2 / p^2`` in
    absolute value.
    """
    D = normalize(D)
    n = len(D)
    return max(D[-1], 2 * n * n, n + 1)


@lru_cache(maxsize=16)
def _primes_to(P: int) -> np.ndarray:
    arr = primes_array(P) if P >= 2 else np.empty(0, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SingularSeriesValue:
    value: float
    truncation_prime: int
    tail_bound: float
    zero_flag: bool
    log_value: float = -math.inf

    @property
    def lower(self) -> float:
        return self.value * math.exp(-self.tail_bound)

    @property
    def upper(self) -> float:
        return self.value * math.exp(self.tail_bound)

    def encloses(self, y: float) -> bool:
        return self.lower <= y <= self.upper

    def __float__(self) -> float:
        return self.value


def singular_series(D: Iterable[int], truncation_prime: int) -> SingularSeriesValue:
    """Truncated Euler product with a certified tail bound.

    The true value lies in ``[value * exp(-tail_bound), value * exp(tail_bound)]``.
    Raises :class:`TruncationError` below :func:`minimal_truncation`.
    """
    D = normalize(D)
    n = len(D)
    P = int(truncation_prime)
    if P < minimal_truncation(D):
        raise TruncationError(
            f"truncation {P} is below {minimal_truncation(D)} for a {n}-tuple of width {D[-1]}"
        )
    # only primes <= n can have every residue class occupied
    for p in range(2, n + 1):
        if is_prime(p) and nu(D, p) == p:
            return SingularSeriesValue(0.0, P, 0.0, True)
    if n == 1:
        return SingularSeriesValue(1.0, P, 0.0, False, 0.0)
    primes = _primes_to(P)
    nus = np.full(len(primes), n, dtype=np.int64)
    m = int(np.searchsorted(primes, D[-1], side="right"))
    nus[:m] = nu_array(D, primes[:m])
    log_value = math.fsum(log_local_factors(n, nus, primes))
    return SingularSeriesValue(math.exp(log_value), P, n * n / (P - 1), False, log_value)


# -- arithmetic of patterns ----------------------------------------------------

@dataclass(frozen=True)
class GcdDecomposition:
    d: int
    reduced: GapPattern

    def expand(self) -> GapPattern:
        return GapPattern(self.d * r for r in self.reduced)


def gcd_decompose(pattern: Sequence[int]) -> GcdDecomposition:
    pattern = GapPattern(pattern)
    d = pattern.gcd
    return GcdDecomposition(d, GapPattern(x // d for x in pattern))


def primorial(n: int) -> int:
    """Product of the first ``n`` primes."""
    if n < 1:
        raise ValueError(f"primorial needs n >= 1, got {n}")
    out, p = 1, 1
    for _ in range(n):
        p += 1
        while not is_prime(p):
            p += 1
        out *= p
    return out


def floor_primorial(y: float) -> int:
    """Largest primorial not exceeding ``y``."""
    if y < 2:
        raise ValueError(f"no primorial is <= {y}")
    out, p = 1, 1
    while True:
        p += 1
        while not is_prime(p):
            p += 1
        if out * p > y:
            return out
        out *= p


def delta_product(D: Iterable[int]) -> int:
    """Product of all positive pairwise differences of ``D``."""
    D = sorted(int(d) for d in D)
    if len(set(D)) != len(D):
        raise ValueError("elements must be distinct")
    return math.prod(b - a for a, b in itertools.combinations(D, 2))


def delta_primes(D: Iterable[int]) -> list[int]:
    """Primes dividing the Delta-product; exactly where residues can collide."""
    D = sorted(set(int(d) for d in D))
    ps: set[int] = set()
    for a, b in itertools.combinations(D, 2):
        ps.update(factorize(b - a))
    return sorted(ps)


def mertens_sum(x: int) -> float:
    """``sum_{p <= x} 1/p``, summed with ``math.fsum``."""
    if x < 2:
        return 0.0
    return math.fsum(1.0 / primes_array(int(x)).astype(np.float64))


def mertens_constant_estimate(x: int) -> float:
    """``sum_{p <= x} 1/p - log log x``, which tends to the Mertens constant."""
    if x < 3:
        raise ValueError("x must be >= 3")
    return mertens_sum(x) - math.log(math.log(x))
