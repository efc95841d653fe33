"""
Census of gap patterns among runs of consecutive primes.

A run ``p_n, ..., p_{n+k}`` of consecutive primes matches the pattern
``(d_1, ..., d_k)`` when ``p_{n+i} - p_n = d_i``. The census counts
every pattern seen up to a sequence of checkpoints. Two anchor
conventions decide when a run counts as "below x":

* ``largest_le_x``  -- the run's last prime ``p_{n+k} <= x``
* ``smallest_le_x`` -- the run's first prime ``p_n <= x``

The first is the jumping-champion counting function; the second lines up
exactly with tuple counts ``m <= x`` and is what the Bonferroni check
uses.
"""

from __future__ import annotations

import csv
import enum
import itertools
import json
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .primes import DEFAULT_SEGMENT_SIZE, is_squarefree, prime_flags, primes_up_to, sieve_range

__all__ = [
    "Anchor",
    "GapPattern",
    "CensusSnapshot",
    "ChampionRecord",
    "GapCensus",
    "BonferroniReport",
    "BudgetExceeded",
    "MAX_K",
    "run_census",
    "champions_of",
    "pi_tuple_empirical",
    "bonferroni_check",
    "write_snapshots_csv",
    "read_snapshots_csv",
    "write_snapshots_json",
    "read_snapshots_json",
]

MAX_K = 8


class BudgetExceeded(RuntimeError):
    """A brute-force computation would exceed its configured work budget."""


class Anchor(str, enum.Enum):
    LARGEST_LE_X = "largest_le_x"
    SMALLEST_LE_X = "smallest_le_x"


class GapPattern(tuple):
    """Strictly increasing positive differences ``d_1 < ... < d_k``.

    A plain tuple subclass, so ``counts[(2, 6)]`` and
    ``counts[GapPattern((2, 6))]`` address the same entry.
    """

    __slots__ = ()

    def __new__(cls, diffs: Iterable[int]):
        diffs = tuple(int(d) for d in diffs)
        if not diffs:
            raise ValueError("a gap pattern needs at least one difference")
        if diffs[0] < 1 or any(a >= b for a, b in zip(diffs, diffs[1:])):
            raise ValueError(f"differences must be positive and strictly increasing: {diffs}")
        return super().__new__(cls, diffs)

    @classmethod
    def parse(cls, text: str) -> "GapPattern":
        """Parse ``"2-6"`` or ``"2,6"``."""
        parts = text.replace(",", "-").split("-")
        return cls(int(float(p)) for p in parts if p.strip())

    @property
    def k(self) -> int:
        return len(self)

    @property
    def gcd(self) -> int:
        return math.gcd(*self)

    @property
    def label(self) -> str:
        return "-".join(map(str, self))

    def with_zero(self) -> tuple[int, ...]:
        return (0, *self)

    def __repr__(self) -> str:
        return f"GapPattern({self.label})"


@dataclass
class CensusSnapshot:
    x: int
    k: int
    counts: dict[GapPattern, int]
    anchor_convention: Anchor = Anchor.LARGEST_LE_X
    primes_seen: int = 0

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def __getitem__(self, pattern) -> int:
        return self.counts.get(tuple(pattern), 0)

    def top(self, n: int = 10) -> list[tuple[GapPattern, int]]:
        return sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0]))[:n]


@dataclass
class ChampionRecord:
    x: int
    k: int
    champions: tuple[GapPattern, ...]
    max_count: int
    gcds: dict[GapPattern, int] = field(default_factory=dict)

    def gcd_squarefree(self, pattern) -> bool:
        return is_squarefree(self.gcds[pattern])


# -- window tallying -----------------------------------------------------------

def _windows(primes: np.ndarray, k: int) -> np.ndarray:
    """Rows ``p[i+j] - p[i]`` for ``j = 1..k`` over every complete window."""
    n = len(primes) - k
    if n <= 0:
        return np.empty((0, k), dtype=np.int64)
    p = primes.astype(np.int64) if primes.dtype != np.uint64 else primes
    return np.stack([(p[j : j + n] - p[:n]).astype(np.int64) for j in range(1, k + 1)], axis=1)


def _tally(diffs: np.ndarray) -> Iterator[tuple[tuple[int, ...], int]]:
    """Yield ``(pattern, count)`` for the rows of a 2-D difference array."""
    if len(diffs) == 0:
        return
    k = diffs.shape[1]
    if k == 1:
        vals, cnts = np.unique(diffs[:, 0], return_counts=True)
        for v, c in zip(vals.tolist(), cnts.tolist()):
            yield (v,), c
        return
    gaps = np.diff(diffs, axis=1, prepend=0)
    base = int(gaps.max()) + 1
    if base ** k < (1 << 62):
        weights = base ** np.arange(k, dtype=np.int64)
        keys = gaps @ weights
        vals, first, cnts = np.unique(keys, return_index=True, return_counts=True)
        rows = diffs[first].tolist()
        for row, c in zip(rows, cnts.tolist()):
            yield tuple(row), c
    else:
        rows, cnts = np.unique(diffs, axis=0, return_counts=True)
        for row, c in zip(rows.tolist(), cnts.tolist()):
            yield tuple(row), c


class GapCensus:
    """Incremental census over an ordered prime stream.

    Feed primes in increasing order with :meth:`feed`; call
    :meth:`advance_to` to count every complete window whose anchor is
    ``<= x``. Windows become complete once all ``k + 1`` of their primes
    have been fed, so with ``smallest_le_x`` the stream must run ``k``
    primes past ``x`` before :meth:`ready_for` reports true.
    """

    def __init__(self, k: int, convention: Anchor | str = Anchor.LARGEST_LE_X):
        if not 1 <= k <= MAX_K:
            raise ValueError(f"k must lie in [1, {MAX_K}], got {k}")
        self.k = k
        self.convention = Anchor(convention)
        self.counts: Counter = Counter()
        self.tail = np.empty(0, dtype=np.int64)  # the open window: last <= k primes fed
        self.covered = 0  # every prime < covered has been fed
        self.primes_seen = 0
        self.counted_upto = -1
        self._pending_anchor: list[np.ndarray] = []
        self._pending_diffs: list[np.ndarray] = []

    def feed(self, primes: np.ndarray, covered: int | None = None) -> None:
        primes = np.asarray(primes)
        if len(primes):
            if len(self.tail) and primes[0] <= self.tail[-1]:
                raise ValueError("primes must be fed in strictly increasing order")
            buf = np.concatenate([self.tail.astype(primes.dtype), primes])
            w = _windows(buf, self.k)
            if len(w):
                anchor_idx = self.k if self.convention is Anchor.LARGEST_LE_X else 0
                anchors = buf[anchor_idx : anchor_idx + len(w)]
                self._pending_anchor.append(np.asarray(anchors))
                self._pending_diffs.append(w)
            self.tail = buf[-self.k :].copy()
            self.primes_seen += len(primes)
        if covered is not None:
            self.covered = max(self.covered, covered)
        elif len(primes):
            self.covered = max(self.covered, int(primes[-1]) + 1)

    def ready_for(self, x: int) -> bool:
        """True when every window anchored at or below ``x`` is complete."""
        if self.covered <= x:
            return False
        if self.convention is Anchor.LARGEST_LE_X:
            return True
        return len(self.tail) == self.k and int(self.tail[0]) > x

    def advance_to(self, x: int) -> None:
        if x < self.counted_upto:
            raise ValueError("checkpoints must be nondecreasing")
        if not self._pending_anchor:
            self.counted_upto = x
            return
        anchors = np.concatenate(self._pending_anchor)
        diffs = np.concatenate(self._pending_diffs)
        cut = int(np.searchsorted(anchors, x, side="right"))
        for pattern, c in _tally(diffs[:cut]):
            self.counts[pattern] += c
        self._pending_anchor = [anchors[cut:]] if cut < len(anchors) else []
        self._pending_diffs = [diffs[cut:]] if cut < len(anchors) else []
        self.counted_upto = x

    def snapshot(self, x: int) -> CensusSnapshot:
        self.advance_to(x)
        counts = {GapPattern(p): c for p, c in self.counts.items()}
        return CensusSnapshot(x, self.k, counts, self.convention, self.primes_seen)

    # -- resumable state -------------------------------------------------------

    def state(self) -> dict:
        anchors = np.concatenate(self._pending_anchor) if self._pending_anchor else np.empty(0)
        diffs = (
            np.concatenate(self._pending_diffs)
            if self._pending_diffs
            else np.empty((0, self.k), dtype=np.int64)
        )
        return {
            "k": self.k,
            "convention": self.convention.value,
            "covered": self.covered,
            "last_prime": int(self.tail[-1]) if len(self.tail) else None,
            "open_window": [int(p) for p in self.tail],
            "primes_seen": self.primes_seen,
            "counted_upto": self.counted_upto,
            "counts": {"-".join(map(str, p)): c for p, c in sorted(self.counts.items())},
            "pending_anchors": [int(a) for a in anchors],
            "pending_diffs": diffs.tolist(),
        }

    @classmethod
    def from_state(cls, state: Mapping) -> "GapCensus":
        self = cls(int(state["k"]), state["convention"])
        self.covered = int(state["covered"])
        self.tail = np.array(state["open_window"], dtype=np.int64)
        self.primes_seen = int(state["primes_seen"])
        self.counted_upto = int(state["counted_upto"])
        self.counts = Counter(
            {tuple(int(v) for v in key.split("-")): int(c) for key, c in state["counts"].items()}
        )
        if state["pending_anchors"]:
            self._pending_anchor = [np.array(state["pending_anchors"], dtype=np.int64)]
            self._pending_diffs = [np.array(state["pending_diffs"], dtype=np.int64).reshape(-1, self.k)]
        return self

    def save(self, path: str | os.PathLike) -> None:
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps(self.state()))
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "GapCensus":
        return cls.from_state(json.loads(Path(path).read_text()))


def run_census(
    checkpoints: Sequence[int],
    k: int,
    convention: Anchor | str = Anchor.LARGEST_LE_X,
    *,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    workers: int = 1,
    state_path: str | os.PathLike | None = None,
) -> list[CensusSnapshot]:
    """Count every ``k``-difference pattern at each checkpoint.

    Snapshots are cumulative. If ``state_path`` is given the census state
    is saved after every checkpoint, and an existing state file there is
    resumed from (its ``k`` and convention must match). Checkpoints at or
    below the resumed position are recomputed from the stored counts only
    if they equal it; earlier ones are not available and raise.
    """
    if k == 0:
        raise ValueError("k must be >= 1")
    checkpoints = [int(x) for x in checkpoints]
    if not checkpoints:
        return []
    if any(x < 2 for x in checkpoints) or any(a >= b for a, b in zip(checkpoints, checkpoints[1:])):
        raise ValueError("checkpoints must be strictly increasing and >= 2")
    convention = Anchor(convention)

    census = None
    if state_path is not None and Path(state_path).exists():
        census = GapCensus.load(state_path)
        if census.k != k or census.convention is not convention:
            raise ValueError(f"state file {state_path} was written for a different census")
    if census is None:
        census = GapCensus(k, convention)

    todo = list(checkpoints)
    if todo[0] < census.counted_upto:
        raise ValueError(
            f"checkpoint {todo[0]} lies before the resumed position {census.counted_upto}"
        )
    snaps: list[CensusSnapshot] = []

    def drain():
        while todo and census.ready_for(todo[0]):
            snaps.append(census.snapshot(todo.pop(0)))
            if state_path is not None:
                census.save(state_path)

    drain()
    limit = checkpoints[-1]
    if todo and census.covered <= limit:
        for seg in primes_up_to(limit, segment_size, start=census.covered, workers=workers):
            census.feed(seg.primes, covered=seg.hi)
            drain()
            if todo:
                # windows anchored below the next checkpoint count in every later
                # snapshot; tallying them now keeps memory flat
                census.advance_to(min(todo[0], seg.hi - 1))
            if not todo:
                break
    # smallest-element anchoring needs k primes beyond the last checkpoint
    step = max(1024, 64 * k * int(math.log(limit + 2)))
    while todo:
        lo = census.covered
        census.feed(sieve_range(lo, lo + step), covered=lo + step)
        drain()
    return snaps


def champions_of(snapshot: CensusSnapshot) -> ChampionRecord:
    """Every pattern attaining the maximal count (ties are all kept)."""
    if not snapshot.counts:
        raise ValueError(f"empty census snapshot at x={snapshot.x}")
    top = max(snapshot.counts.values())
    champs = tuple(sorted(GapPattern(p) for p, c in snapshot.counts.items() if c == top))
    return ChampionRecord(snapshot.x, snapshot.k, champs, top, {p: p.gcd for p in champs})


# -- tuple counts and inclusion-exclusion --------------------------------------

def _tuple_mask(flags: np.ndarray, x: int, offsets: Iterable[int]) -> np.ndarray:
    """``mask[m - 1]`` is true iff ``m + d`` is prime for every offset (1 <= m <= x)."""
    mask = np.ones(x, dtype=bool)
    for d in offsets:
        mask &= flags[1 + d : x + 1 + d]
    return mask


def pi_tuple_empirical(x: int, offsets: Iterable[int], *, flags: np.ndarray | None = None) -> int:
    """Number of ``1 <= m <= x`` with ``m + d`` prime for every ``d`` in ``offsets``."""
    offsets = sorted(set(int(d) for d in offsets))
    if any(d < 0 for d in offsets):
        raise ValueError("offsets must be nonnegative")
    if x < 1:
        return 0
    need = x + (offsets[-1] if offsets else 0)
    if flags is None or len(flags) <= need:
        flags = prime_flags(need)
    return int(np.count_nonzero(_tuple_mask(flags, x, offsets)))


@dataclass
class BonferroniReport:
    x: int
    pattern: GapPattern
    depth_pairs: int  # the I of the truncation
    H: int
    lower: int
    count: int
    upper: int
    lower_terms: list[int]
    upper_terms: list[int]

    @property
    def holds(self) -> bool:
        return self.lower <= self.count <= self.upper

    def __str__(self) -> str:
        return f"{self.lower} <= {self.count} <= {self.upper}"


def _alternating_sum(x, base, interior, depth, flags) -> tuple[int, list[int]]:
    """Truncated inclusion-exclusion over subsets of ``interior`` of size <= depth."""
    per_size = []
    for i in range(depth + 1):
        per_size.append(
            sum(
                int(np.count_nonzero(_tuple_mask(flags, x, base + list(sub))))
                for sub in itertools.combinations(interior, i)
            )
        )
    return sum((-1) ** i * t for i, t in enumerate(per_size)), per_size


def bonferroni_check(
    x: int,
    pattern: Sequence[int],
    I: int,
    H: int | None = None,
    *,
    budget: int = 10**9,
) -> BonferroniReport:
    """Sandwich the run count between truncated inclusion-exclusion sums.

    The lower bound sums ``2I + 2`` levels over interior offsets
    ``0 < m < d_k``; the upper bound sums ``2I + 1`` levels over
    ``0 < m < H``. Runs are anchored at their smallest prime, matching the
    ``m <= x`` convention of the tuple counts, so both inequalities are
    exact finite statements.

    Raises :class:`BudgetExceeded` when ``d_k ** (2I + 1) * x`` is larger
    than ``budget``, and ``AssertionError`` if an inequality is violated.
    """
    pattern = GapPattern(pattern)
    dk = pattern[-1]
    H = dk if H is None else H
    if not 1 <= H <= dk:
        raise ValueError(f"H must satisfy 1 <= H <= d_k = {dk}, got {H}")
    if I < 0:
        raise ValueError("I must be >= 0")
    need = dk ** (2 * I + 1) * x
    if need > budget:
        raise BudgetExceeded(
            f"Bonferroni check needs a budget of {need} (d_k^(2I+1) * x) but only {budget} is allowed"
        )

    flags = prime_flags(x + dk)
    base = [0, *pattern]
    members = set(pattern)
    lower, lower_terms = _alternating_sum(
        x, base, [m for m in range(1, dk) if m not in members], 2 * I + 1, flags
    )
    upper, upper_terms = _alternating_sum(
        x, base, [m for m in range(1, H) if m not in members], 2 * I, flags
    )
    snap = run_census([x], pattern.k, Anchor.SMALLEST_LE_X)[0]
    report = BonferroniReport(x, pattern, I, H, lower, snap[pattern], upper, lower_terms, upper_terms)
    if not report.holds:
        raise AssertionError(f"Bonferroni inequality violated for {pattern} at x={x}: {report}")
    return report


# -- persistence ---------------------------------------------------------------

SNAPSHOT_FIELDS = ("x", "k", "pattern", "count")


def _snapshot_rows(snaps: Iterable[CensusSnapshot]):
    for s in snaps:
        for p, c in sorted(s.counts.items()):
            yield {"x": s.x, "k": s.k, "pattern": GapPattern(p).label, "count": c}


def write_snapshots_csv(snaps: Iterable[CensusSnapshot], path, header_comment: str | None = None) -> None:
    with open(path, "w", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        w = csv.DictWriter(fh, fieldnames=SNAPSHOT_FIELDS)
        w.writeheader()
        w.writerows(_snapshot_rows(snaps))


def _group_rows(rows, convention) -> list[CensusSnapshot]:
    out: dict[tuple[int, int], CensusSnapshot] = {}
    for r in rows:
        key = (int(r["x"]), int(r["k"]))
        snap = out.setdefault(key, CensusSnapshot(key[0], key[1], {}, Anchor(convention)))
        snap.counts[GapPattern.parse(str(r["pattern"]))] = int(r["count"])
    return list(out.values())


def read_snapshots_csv(path, convention=Anchor.LARGEST_LE_X) -> list[CensusSnapshot]:
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return _group_rows(csv.DictReader(lines), convention)


def write_snapshots_json(snaps: Iterable[CensusSnapshot], path, meta: dict | None = None) -> None:
    doc = {"meta": meta or {}, "rows": list(_snapshot_rows(snaps))}
    Path(path).write_text(json.dumps(doc, indent=1))


def read_snapshots_json(path, convention=Anchor.LARGEST_LE_X) -> list[CensusSnapshot]:
    return _group_rows(json.loads(Path(path).read_text())["rows"], convention)
