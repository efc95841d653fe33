"""
Hardy-Littlewood style predictions for tuple and run counts.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from scipy import integrate

from .census import GapPattern
from .singular import (
    SingularSeriesValue,
    floor_primorial,
    primorial,
    minimal_truncation,
    normalize,
    singular_series,
)

__all__ = [
    "DEFAULT_TRUNCATION",
    "Prediction",
    "TuplePrediction",
    "RegimeWarning",
    "li_power",
    "predict_pi_tuple",
    "predict_N",
    "sieve_upper_bound",
    "predict_champion",
    "default_family",
    "tied_leaders",
]

DEFAULT_TRUNCATION = 10**6


class RegimeWarning(UserWarning):
    """A prediction was requested outside the regime its formula is meant for."""


def li_power(x: float, n: int) -> float:
    """``int_2^x dt / log(t)^n`` by adaptive quadrature.

    Integrated in ``u = log t`` where the integrand ``e^u / u^n`` is smooth;
    the relative error target is 1e-12.
    """
    if x < 2:
        raise ValueError(f"li_power needs x >= 2, got {x}")
    if n < 1:
        raise ValueError(f"li_power needs n >= 1, got {n}")
    a, b = math.log(2.0), math.log(x)
    if b == a:
        return 0.0
    # scale out e^b so the integrand stays O(1) for large x
    val, err = integrate.quad(
        lambda u: math.exp(u - b) / u**n, a, b, epsabs=0.0, epsrel=1e-12, limit=500
    )
    return val * math.exp(b)


def _truncation_for(D, truncation_prime):
    return max(truncation_prime, minimal_truncation(D))


@dataclass(frozen=True)
class TuplePrediction:
    x: int
    offsets: tuple[int, ...]
    value: float  # S(D) * int_2^x dt / log^n t
    crude: float  # S(D) * x / log^n x
    series: SingularSeriesValue

    @property
    def zero_flag(self) -> bool:
        return self.series.zero_flag

    def __float__(self) -> float:
        return self.value


def predict_pi_tuple(
    x: int, D: Iterable[int], truncation_prime: int = DEFAULT_TRUNCATION
) -> TuplePrediction:
    """Predicted number of ``m <= x`` with every ``m + d`` prime."""
    D = normalize(D)
    series = singular_series(D, _truncation_for(D, truncation_prime))
    n = len(D)
    if series.zero_flag:
        return TuplePrediction(x, D, 0.0, 0.0, series)
    return TuplePrediction(
        x,
        D,
        series.value * li_power(x, n),
        series.value * x / math.log(x) ** n,
        series,
    )


@dataclass
class Prediction:
    x: int
    D: GapPattern
    main_term: float
    corrected: float
    correction_factor: float
    sieve_upper: float
    singular_series: float
    main_term_crude: float
    corrected_crude: float
    in_regime: bool = True
    notes: list[str] = field(default_factory=list)


def predict_N(
    x: int,
    pattern: Sequence[int],
    truncation_prime: int = DEFAULT_TRUNCATION,
    *,
    warn: bool = True,
) -> Prediction:
    """First-order prediction for the number of runs matching ``pattern``.

    ``main_term`` is ``S({0} + D) * int_2^x dt/log^(k+1) t``;
    ``corrected`` multiplies it by ``1 - d_k / log x``. The ``*_crude``
    fields use ``x / log^(k+1) x`` instead of the integral.
    """
    pattern = GapPattern(pattern)
    k = pattern.k
    logx = math.log(x)
    tp = predict_pi_tuple(x, pattern.with_zero(), truncation_prime)
    factor = 1.0 - pattern[-1] / logx
    in_regime = pattern[-1] < logx
    notes = []
    if not in_regime:
        msg = f"d_k = {pattern[-1]} >= log x = {logx:.3f}; correction is outside its regime"
        notes.append(msg)
        if warn:
            warnings.warn(msg, RegimeWarning, stacklevel=2)
    sieve = (
        math.nan
        if tp.zero_flag
        else 2 ** (k + 1) * math.factorial(k + 1) * tp.series.value * x / logx ** (k + 1)
    )
    return Prediction(
        x=x,
        D=pattern,
        main_term=tp.value,
        corrected=tp.value * factor,
        correction_factor=factor,
        sieve_upper=sieve,
        singular_series=tp.series.value,
        main_term_crude=tp.crude,
        corrected_crude=tp.crude * factor,
        in_regime=in_regime,
        notes=notes,
    )


def sieve_upper_bound(x: int, D: Iterable[int], truncation_prime: int = DEFAULT_TRUNCATION) -> float:
    """``2^n n! S(D) x / log^n x``, the classical sieve upper bound without slack.

    The tail enclosure of ``S(D)`` is used at its upper end so the bound
    never understates the formula.
    """
    D = normalize(D)
    series = singular_series(D, _truncation_for(D, truncation_prime))
    if series.zero_flag:
        raise ValueError(f"the sieve bound is undefined for {D}: its singular series vanishes")
    n = len(D)
    return 2**n * math.factorial(n) * series.upper * x / math.log(x) ** n


def default_family(x: int, k: int, dmax: int | None = None) -> list[GapPattern]:
    """Candidate champions: all admissible patterns up to ``dmax`` plus primorial multiples.

    ``dmax`` defaults to ``3 k log x``. The primorial-scaled sets are
    ``P * {1, ..., k}`` for every primorial ``P`` with ``k P <= dmax``,
    plus ``floor_primorial(sqrt(log x)) * {1, ..., k}``.
    """
    logx = math.log(x)
    if dmax is None:
        dmax = max(k + 1, int(3 * k * logx))

    def admissible(combo):
        D = (0, *combo)
        return not singular_series(D, minimal_truncation(D)).zero_flag

    fam = {GapPattern(c) for c in itertools.combinations(range(1, dmax + 1), k) if admissible(c)}
    scales = {floor_primorial(max(2.0, math.sqrt(logx)))}
    i = 1
    while k * primorial(i) <= dmax:
        scales.add(primorial(i))
        i += 1
    for s in scales:
        scaled = tuple(s * i for i in range(1, k + 1))
        if admissible(scaled):
            fam.add(GapPattern(scaled))
    return sorted(fam)


def predict_champion(
    x: int,
    k: int,
    family: Iterable[Sequence[int]] | None = None,
    truncation_prime: int = DEFAULT_TRUNCATION,
    *,
    key: str = "corrected",
) -> list[tuple[GapPattern, float, Prediction]]:
    """Rank candidate patterns by predicted count, best first.

    Ties in the predicted value are broken by the pattern itself, so the
    ranking is deterministic; :func:`tied_leaders` reports them.
    """
    fam = default_family(x, k) if family is None else [GapPattern(p) for p in family]
    if not fam:
        raise ValueError("empty candidate family")
    if any(p.k != k for p in fam):
        raise ValueError(f"every candidate must have k = {k} differences")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        preds = [predict_N(x, p, truncation_prime) for p in dict.fromkeys(fam)]
    preds.sort(key=lambda pr: (-getattr(pr, key), pr.D))
    return [(pr.D, getattr(pr, key), pr) for pr in preds]


def tied_leaders(ranking, rel_tol: float = 1e-12) -> list[GapPattern]:
    top = ranking[0][1]
    return [p for p, v, _ in ranking if math.isclose(v, top, rel_tol=rel_tol)]
