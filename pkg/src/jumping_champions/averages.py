"""
Averages of singular series and the local identities behind them.

For a base tuple ``D`` and an extra element ``d0`` the ratio

    S(D + {d0}) / S(D) = prod_p (1 + a(p, v))

has an exact local term ``a(p, v)`` depending only on ``nu_D(p)`` and on
the class count ``v`` after adding ``d0``. Summed over the ``f(p, v)``
residue classes of ``d0`` producing each ``v``, the local terms cancel
exactly; that cancellation is what makes the ratio average to 1.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .census import BudgetExceeded
from .singular import (
    _primes_to,
    local_factor,
    minimal_truncation,
    normalize,
    nu,
    nu_array,
    singular_series,
)

__all__ = [
    "RatioTerm",
    "RatioValue",
    "AIdentityWitness",
    "AverageReport",
    "GallagherReport",
    "ORWReport",
    "local_term",
    "residue_multiplicity",
    "ratio_term",
    "ratio_S",
    "verify_A_identity",
    "average_ratio_sum",
    "gallagher_ms_average",
    "ms_constant",
    "orw_average",
    "reports_to_csv",
]


def local_term(p: int, nu_base: int, nu_ext: int) -> Fraction:
    """Exact ``a(p, v)``: the local factor ratio minus one."""
    if nu_ext not in (nu_base, nu_base + 1):
        raise ValueError(f"extended class count {nu_ext} must be {nu_base} or {nu_base + 1}")
    if nu_base >= p:
        raise ZeroDivisionError(f"base tuple fills every class mod {p}")
    return Fraction((nu_base - nu_ext + 1) * p - nu_base, (p - nu_base) * (p - 1))


def residue_multiplicity(p: int, nu_base: int, nu_ext: int) -> int:
    """Number of classes of ``d0`` mod ``p`` that give ``nu_ext`` classes."""
    return nu_base if nu_ext == nu_base else p - nu_base


@dataclass(frozen=True)
class RatioTerm:
    p: int
    nu_base: int
    nu_ext: int
    a_value: Fraction
    f_value: int


def ratio_term(D: Iterable[int], d0: int, p: int) -> RatioTerm:
    D = list(D)
    vb = nu(D, p)
    ve = nu(D + [d0], p)
    return RatioTerm(p, vb, ve, local_term(p, vb, ve), residue_multiplicity(p, vb, ve))


@dataclass(frozen=True)
class RatioValue:
    value: float
    tail_bound: float
    quotient: float  # S(D + d0) / S(D) from two separate products
    zero_flag: bool = False

    @property
    def paths_agree(self) -> bool:
        if self.zero_flag:
            return self.quotient == 0.0 == self.value
        return abs(math.log(self.value) - math.log(self.quotient)) <= self.tail_bound


def _log_ratio_terms(nb: np.ndarray, ne: np.ndarray, primes: np.ndarray) -> np.ndarray:
    p = primes.astype(np.float64)
    a = ((nb - ne + 1) * p - nb) / ((p - nb) * (p - 1))
    return np.log1p(a)


def ratio_S(D: Iterable[int], d0: int, truncation_prime: int) -> RatioValue:
    """``S(D + {d0}) / S(D)`` as a direct product of ``1 + a(p, v)``.

    The quotient of the two separately truncated singular series is
    computed alongside; ``tail_bound`` covers both truncations.
    """
    D = sorted(set(int(d) for d in D))
    if d0 in D:
        raise ValueError(f"d0 = {d0} already lies in {D}")
    ext = D + [int(d0)]
    P = max(int(truncation_prime), minimal_truncation(ext))
    base = singular_series(D, P)
    if base.zero_flag:
        raise ValueError(f"singular series of {D} vanishes; the ratio is undefined")
    full = singular_series(ext, P)
    tail = base.tail_bound + full.tail_bound
    if full.zero_flag:
        return RatioValue(0.0, 0.0, 0.0, True)
    primes = _primes_to(P)
    m = int(np.searchsorted(primes, max(ext) - min(ext), side="right"))
    nb = np.full(len(primes), len(D), dtype=np.int64)
    ne = nb + 1
    nb[:m] = nu_array(D, primes[:m])
    ne[:m] = nu_array(ext, primes[:m])
    log_val = math.fsum(_log_ratio_terms(nb, ne, primes))
    return RatioValue(math.exp(log_val), tail, full.value / base.value)


@dataclass(frozen=True)
class AIdentityWitness:
    p: int
    nu_base: int
    terms: tuple[tuple[Fraction, int], ...]  # (a(p, v), f(p, v)) per v
    total: Fraction
    trivial: bool = False

    @property
    def is_zero(self) -> bool:
        return self.total == 0


def verify_A_identity(p: int, D: Iterable[int]) -> AIdentityWitness:
    """Exact ``sum_v a(p, v) f(p, v)`` over ``v in {nu, nu + 1}``.

    When ``D`` already fills every class mod ``p`` the ``nu + 1`` branch is
    empty and a trivial witness with total 0 is returned.
    """
    vb = nu(D, p)
    if vb == p:
        return AIdentityWitness(p, vb, (), Fraction(0), trivial=True)
    terms = tuple((local_term(p, vb, v), residue_multiplicity(p, vb, v)) for v in (vb, vb + 1))
    return AIdentityWitness(p, vb, terms, sum((a * f for a, f in terms), Fraction(0)))


def check_ratio_identity(D: Iterable[int], d0: int, p: int) -> bool:
    """``(1 + a(p)) * local_factor(D, p) == local_factor(D + {d0}, p)`` exactly."""
    D = list(D)
    t = ratio_term(D, d0, p)
    return (1 + t.a_value) * local_factor(D, p) == local_factor(D + [d0], p)


# -- averages ------------------------------------------------------------------

@dataclass
class AverageReport:
    D: tuple[int, ...]
    H: int
    h: int
    sum: float
    deviation: float
    normalized: float
    terms: int = 0
    trivial: bool = False

    def row(self) -> dict:
        return {
            "D": " ".join(map(str, self.D)),
            "H": self.H,
            "sum": repr(self.sum),
            "deviation": repr(self.deviation),
            "normalized": repr(self.normalized),
        }


def average_ratio_sum(D: Iterable[int], H: int, truncation_prime: int) -> AverageReport:
    """``sum_{1 <= d0 <= H, d0 not in D} S(D + {d0}) / S(D)`` against ``H``.

    Each ratio is the Euler product of ``1 + a(p, v)`` truncated at
    ``truncation_prime`` (raised if needed so every extension is
    admissible). Extensions whose singular series vanishes add 0.
    """
    D = tuple(sorted(set(int(d) for d in D)))
    if H < 1:
        raise ValueError("H must be >= 1")
    h = max(H, max(D))
    base_series = singular_series(D, max(truncation_prime, minimal_truncation(D)))
    if base_series.zero_flag:
        return AverageReport(D, H, h, 0.0, float(H), H**0.5, 0, trivial=True)

    lo = min(min(D), 1)
    width = max(max(D), H) - lo
    n = len(D) + 1
    P = max(int(truncation_prime), width, 2 * n * n, n + 1)
    primes = _primes_to(P)
    pf = primes.astype(np.float64)
    nb = nu_array(D, primes) if len(D) > 1 else np.ones(len(primes), dtype=np.int64)
    # generic term: d0 opens a new class mod p
    with np.errstate(divide="ignore"):
        generic = np.log1p(-nb / ((pf - nb) * (pf - 1)))
    # collision term: d0 lands on an occupied class
    collide = np.log1p(1.0 / (pf - 1))
    Darr = np.asarray(D, dtype=np.int64)

    # only primes up to the width can divide some d0 - d_i
    m = int(np.searchsorted(primes, width, side="right"))
    small = primes[:m]
    generic_small, collide_small = generic[:m], collide[:m]
    # -inf here (a prime whose classes get filled) correctly yields 0
    with np.errstate(divide="ignore"):
        generic_tail = math.fsum(generic[m:])

    vals = []
    for d0 in range(1, H + 1):
        if d0 in D:
            continue
        hit = np.any((Darr[:, None] - d0) % small[None, :] == 0, axis=0)
        logs = np.where(hit, collide_small, generic_small)
        vals.append(math.exp(math.fsum(logs) + generic_tail) if np.all(np.isfinite(logs)) else 0.0)
    total = math.fsum(vals)
    dev = abs(total - H)
    return AverageReport(D, H, h, total, dev, dev / math.sqrt(H), len(vals))


def reports_to_csv(reports: Iterable[AverageReport], header_comment: str | None = None) -> str:
    buf = io.StringIO()
    if header_comment:
        buf.write(f"# {header_comment}\n")
    w = csv.DictWriter(buf, fieldnames=["D", "H", "sum", "deviation", "normalized"])
    w.writeheader()
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()


def ms_constant() -> float:
    """``1 - gamma - log(2 pi)``, the secondary constant of the pair average."""
    return 1.0 - float(np.euler_gamma) - math.log(2 * math.pi)


@dataclass
class GallagherReport:
    k: int
    D_limit: int
    tuples: int
    brute_sum: float
    leading: float
    three_term: float
    rel_err_leading: float
    rel_err_three_term: float


_GALLAGHER_BUDGET = {2: 300, 3: 60}


def _series_cache(truncation_prime):
    cache: dict[tuple[int, ...], float] = {}

    def S(tup):
        key = normalize(tup)
        if key not in cache:
            cache[key] = singular_series(key, max(truncation_prime, minimal_truncation(key))).value
        return cache[key]

    return S


def gallagher_ms_average(k: int, D_limit: int, truncation_prime: int = 10**4) -> GallagherReport:
    """Brute-force average of ``S`` over distinct ``k``-tuples in ``[1, D]``.

    Compared with the leading term ``D^k`` and with the three-term
    expansion ``D^k - C(k,2) D^(k-1) log D + C(k,2)(1 - gamma - log 2pi) D^(k-1)``.
    """
    if k not in _GALLAGHER_BUDGET:
        raise ValueError("k must be 2 or 3")
    if D_limit > _GALLAGHER_BUDGET[k]:
        raise BudgetExceeded(
            f"brute force over {k}-tuples needs D <= {_GALLAGHER_BUDGET[k]}, got {D_limit}"
        )
    S = _series_cache(truncation_prime)
    D = D_limit
    # ordered distinct tuples; every permutation of a set has the same S
    sets = [S(combo) for combo in itertools.combinations(range(1, D + 1), k)]
    total = math.fsum(sets) * math.factorial(k)
    count = len(sets) * math.factorial(k)
    c2 = math.comb(k, 2)
    leading = float(D**k)
    three = D**k - c2 * D ** (k - 1) * math.log(D) + c2 * ms_constant() * D ** (k - 1)
    return GallagherReport(
        k, D, count, total, leading, three,
        _rel(total, leading), _rel(total, three),
    )


def _rel(ref: float, approx: float) -> float:
    return abs(ref - approx) / ref if ref else math.inf


@dataclass
class ORWReport:
    k: int
    D: int
    H: int
    terms: int
    brute_sum: float
    main_term: float
    deviation: float
    normalized: float  # deviation / (main term / H^(1/2))
    degenerate: bool = False


def orw_average(k: int, D: int, H: int, truncation_prime: int = 10**4, budget: int = 10**6) -> ORWReport:
    """``sum_{1 <= d_1 < ... < d_{k-2} < H} S(0, d_1, ..., d_{k-2}, D)`` vs ``S({0, D}) H^(k-2)/(k-2)!``."""
    if k < 3:
        raise ValueError("k must be >= 3")
    if not 1 <= H <= D:
        raise ValueError(f"need 1 <= H <= D, got H={H}, D={D}")
    n_terms = math.comb(H - 1, k - 2)
    if n_terms > budget:
        raise BudgetExceeded(f"{n_terms} tuples exceed the budget of {budget}")
    S = _series_cache(truncation_prime)
    vals = [S((0, *inner, D)) for inner in itertools.combinations(range(1, H), k - 2)]
    total = math.fsum(vals)
    main = S((0, D)) * H ** (k - 2) / math.factorial(k - 2)
    dev = abs(total - main)
    scale = main / math.sqrt(H) if main else math.inf
    return ORWReport(
        k, D, H, len(vals), total, main, dev,
        dev / scale if scale not in (0, math.inf) else math.inf,
        degenerate=len(vals) == 0,
    )
