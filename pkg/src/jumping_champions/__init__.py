"""Jumping champions among consecutive primes, and the singular series behind them."""

__version__ = "0.1.0"

from .primes import (
    PrimeSegment,
    SieveConfig,
    count_primes,
    factorize,
    is_prime,
    is_squarefree,
    omega_with_multiplicity,
    prime_flags,
    primes_array,
    primes_up_to,
    sieve_range,
)
from .census import (
    Anchor,
    BonferroniReport,
    BudgetExceeded,
    CensusSnapshot,
    ChampionRecord,
    GapCensus,
    GapPattern,
    bonferroni_check,
    champions_of,
    pi_tuple_empirical,
    run_census,
)
from .singular import (
    GcdDecomposition,
    SingularSeriesValue,
    TruncationError,
    delta_product,
    floor_primorial,
    gcd_decompose,
    local_factor,
    mertens_constant_estimate,
    mertens_sum,
    nu,
    primorial,
    singular_series,
)
from .hardy_littlewood import (
    Prediction,
    li_power,
    predict_champion,
    predict_N,
    predict_pi_tuple,
    sieve_upper_bound,
)
from .averages import (
    average_ratio_sum,
    gallagher_ms_average,
    orw_average,
    ratio_S,
    verify_A_identity,
)
