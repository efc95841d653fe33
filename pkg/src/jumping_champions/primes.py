"""
Prime generation and factorization utilities.

The sieve is a segmented, odd-only Sieve of Eratosthenes. Segments are
produced in increasing order and are immutable once yielded, so a
consumer can keep a reference to any of them while the stream advances.
"""

from __future__ import annotations

import math
import random
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Iterator

import numpy as np

DEFAULT_SEGMENT_SIZE = 1 << 20
MAX_LIMIT = (1 << 64) - 1

__all__ = [
    "DEFAULT_SEGMENT_SIZE",
    "MAX_LIMIT",
    "PrimeSegment",
    "SieveConfig",
    "primes_up_to",
    "sieve_range",
    "primes_array",
    "prime_flags",
    "count_primes",
    "is_prime",
    "factorize",
    "omega_with_multiplicity",
    "is_squarefree",
]


@dataclass(frozen=True)
class SieveConfig:
    limit: int
    segment_size: int = DEFAULT_SEGMENT_SIZE

    def __post_init__(self):
        if self.limit < 2:
            raise ValueError(f"limit must be >= 2, got {self.limit}")
        if self.segment_size < 2:
            raise ValueError(f"segment_size must be >= 2, got {self.segment_size}")
        if self.limit > MAX_LIMIT:
            raise OverflowError(
                f"limit {self.limit} exceeds the supported 64-bit range ({MAX_LIMIT})"
            )


@dataclass(frozen=True)
class PrimeSegment:
    """Primes in the half-open integer range ``[lo, hi)``."""

    lo: int
    hi: int
    primes: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty segment [{self.lo}, {self.hi})")
        self.primes.setflags(write=False)

    def __len__(self) -> int:
        return len(self.primes)


def _dtype_for(limit: int):
    return np.int64 if limit < (1 << 63) else np.uint64


_PLAIN_SIEVE_MAX = 1 << 24


def _small_primes(n: int) -> np.ndarray:
    """All primes <= n; used for base primes."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    if n > _PLAIN_SIEVE_MAX:
        # base primes of a huge limit: sieve them segment by segment
        base = _small_primes(math.isqrt(n))[1:]
        step = DEFAULT_SEGMENT_SIZE * 8
        parts = [
            _sieve_odd_block(lo, min(lo + step, n + 1), base).astype(np.uint32)
            for lo in range(0, n + 1, step)
        ]
        return np.concatenate(parts)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _sieve_odd_block(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    """Primes in [lo, hi) given every odd prime <= isqrt(hi - 1) in ``base``."""
    first = lo | 1
    if first < 3:
        first = 3
    out_dtype = _dtype_for(hi)
    if first >= hi:
        odd = np.empty(0, dtype=out_dtype)
    else:
        n_odd = (hi - first + 1) // 2
        mask = np.ones(n_odd, dtype=bool)
        span = hi - first
        small = base
        if hi < (1 << 62) and len(base) and int(base[-1]) > span:
            # primes with 2p > span strike at most one odd number here
            cut = int(np.searchsorted(base, span // 2 + 1))
            small, big = base[:cut], base[cut:].astype(np.int64)
            big = big[big * big < hi]
            start = first + (-first) % big
            start = np.maximum(start, big * big)
            start = np.where(start & 1, start, start + big)
            mask[(start[start < hi] - first) >> 1] = False
        for p in small:
            p = int(p)
            pp = p * p
            if pp >= hi:
                break
            start = pp if pp >= first else first + (-first) % p
            if not start & 1:
                start += p
            if start >= hi:
                continue
            mask[(start - first) >> 1 :: p] = False
        idx = np.flatnonzero(mask)
        if out_dtype is np.uint64:
            odd = np.uint64(first) + np.uint64(2) * idx.astype(np.uint64)
        else:
            odd = first + 2 * idx
    if lo <= 2 < hi:
        return np.concatenate([np.array([2], dtype=odd.dtype), odd])
    return odd


def sieve_range(lo: int, hi: int) -> np.ndarray:
    """Return the primes in ``[lo, hi)`` as an increasing numpy array."""
    if hi > MAX_LIMIT + 1:
        raise OverflowError(f"upper end {hi} exceeds the supported 64-bit range")
    lo = max(lo, 0)
    if hi <= lo:
        return np.empty(0, dtype=np.int64)
    base = _small_primes(math.isqrt(hi - 1))
    return _sieve_odd_block(lo, hi, base[1:])


def primes_up_to(
    limit: int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    *,
    start: int = 0,
    workers: int = 1,
    dump: IO[str] | None = None,
) -> Iterator[PrimeSegment]:
    """Stream the primes ``<= limit`` as consecutive :class:`PrimeSegment` s.

    Segments tile ``[start, limit + 1)`` in order. With ``workers > 1``
    segments are sieved on a thread pool; they are still handed out in
    index order and at most ``2 * workers`` are held in flight.

    If ``dump`` is given, each segment's primes are written to it as
    newline-delimited decimal text.
    """
    cfg = SieveConfig(limit=limit, segment_size=segment_size)
    base = _small_primes(math.isqrt(cfg.limit))[1:]
    bounds = [
        (lo, min(lo + cfg.segment_size, cfg.limit + 1))
        for lo in range(max(start, 0), cfg.limit + 1, cfg.segment_size)
    ]

    def make(b):
        return PrimeSegment(b[0], b[1], _sieve_odd_block(b[0], b[1], base))

    def emit(seg):
        if dump is not None and len(seg):
            dump.write("\n".join(map(str, seg.primes.tolist())))
            dump.write("\n")
        return seg

    if workers <= 1:
        for b in bounds:
            yield emit(make(b))
        return

    with ThreadPoolExecutor(max_workers=workers) as pool:
        pending: deque = deque()
        it = iter(bounds)
        for b in it:
            pending.append(pool.submit(make, b))
            if len(pending) >= 2 * workers:
                break
        while pending:
            seg = pending.popleft().result()
            nxt = next(it, None)
            if nxt is not None:
                pending.append(pool.submit(make, nxt))
            yield emit(seg)


def primes_array(limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE) -> np.ndarray:
    """All primes ``<= limit`` in one array."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    return np.concatenate([s.primes for s in primes_up_to(limit, segment_size)])


def prime_flags(limit: int) -> np.ndarray:
    """Boolean table ``flags[n] == is_prime(n)`` for ``0 <= n <= limit``."""
    flags = np.zeros(max(limit, 1) + 1, dtype=bool)
    if limit >= 2:
        flags[primes_array(limit)] = True
    return flags[: limit + 1]


def count_primes(limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE) -> int:
    if limit < 2:
        return 0
    return sum(len(s) for s in primes_up_to(limit, segment_size))


# -- primality and factorization ---------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
# The bases above give a deterministic answer for every n below this bound.
_MR_DETERMINISTIC_BOUND = 318665857834031151167461
_TRIAL_PRIMES = tuple(int(p) for p in _small_primes(1000))


def is_prime(n: int) -> bool:
    """Deterministic primality test for ``0 <= n < 3.18e23``.

    Trial division by the primes below 1000, then Miller-Rabin with the
    first twelve prime bases, which has no pseudoprimes in this range.
    """
    if n < 0:
        raise ValueError(f"is_prime expects n >= 0, got {n}")
    if n < 2:
        return False
    for p in _TRIAL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n < 1000 * 1000:
        return True
    if n >= _MR_DETERMINISTIC_BOUND:
        raise OverflowError(f"{n} is outside the deterministic primality range")
    d, s = n - 1, 0
    while not d & 1:
        d >>= 1
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        c = rng.randrange(1, n)
        f = lambda v: (v * v + c) % n  # noqa: E731
        x = y = rng.randrange(2, n)
        d = 1
        while d == 1:
            x = f(x)
            y = f(f(y))
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of ``n >= 1`` as ``{prime: exponent}``."""
    if n < 1:
        raise ValueError(f"factorize expects n >= 1, got {n}")
    out: dict[int, int] = {}
    for p in _TRIAL_PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n == 1:
        return dict(sorted(out.items()))
    rng = random.Random(n)
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        d = _pollard_rho(m, rng)
        stack += [d, m // d]
    return dict(sorted(out.items()))


def omega_with_multiplicity(n: int) -> int:
    """Number of prime factors of ``n`` counted with multiplicity (12 -> 3).

    This is the count usually written Omega(n); the name spells out the
    multiplicity convention to avoid confusion with the distinct count.
    """
    if n == 0:
        raise ValueError("omega_with_multiplicity is undefined at 0")
    if n < 0:
        raise ValueError(f"omega_with_multiplicity expects n >= 1, got {n}")
    return sum(factorize(n).values())


def is_squarefree(n: int) -> bool:
    if n < 1:
        raise ValueError(f"is_squarefree expects n >= 1, got {n}")
    return all(e == 1 for e in factorize(n).values())
