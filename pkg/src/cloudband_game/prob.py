"""Binomial machinery and the cloud-band functionality probability.

The number of VMs a burst of ``attacks`` DDoS attempts actually takes down is
binomial with per-VM success probability ``p``. A band that keeps at least
``min_functional`` VMs running stays functional, so with ``defenses``
recoveries available the band survives exactly when the exploited count stays
within ``defenses - min_functional + 1``. That yields a piecewise rule:

* below the maintenance floor (defenses < min_functional) the band is down,
* once defenses cover the worst case (defenses >= attacks + min_functional)
  the band is certainly up,
* in between, the survival probability is a binomial CDF.

Everything here is a pure function; the Monte Carlo estimator owns its RNG
stream via an explicit seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Exact integer log-binomial keeps the CDF within ~1e-13 of an
# arbitrary-precision reference; above this trial count the log-gamma form
# takes over (it stays finite up to trial counts of 1e5 and beyond).
_EXACT_LOG_COMB_MAX_N = 1030


@dataclass(frozen=True)
class FunctionalityQuery:
    """One band's survival question: attack/defense counts, floor, and p."""

    attacks: int
    defenses: int
    min_functional: int
    attack_success_prob: float


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    stderr: float
    trials: int


def _check_query(q: FunctionalityQuery) -> None:
    if q.attacks < 0:
        raise ValueError(f"attacks must be >= 0, got {q.attacks}")
    if q.defenses < 0:
        raise ValueError(f"defenses must be >= 0, got {q.defenses}")
    if q.min_functional < 1:
        raise ValueError(f"min_functional must be >= 1, got {q.min_functional}")
    if not 0.0 <= q.attack_success_prob <= 1.0:
        raise ValueError(
            f"attack_success_prob must lie in [0, 1], got {q.attack_success_prob}"
        )


def _log_binom(n: int, k: int) -> float:
    if n <= _EXACT_LOG_COMB_MAX_N:
        return math.log(math.comb(n, k))
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def binom_pmf(n: int, k: int, p: float) -> float:
    """P[Binomial(n, p) = k], computed in log space.

    Exact at p = 0 and p = 1; finite for n up to 1e5 (tail terms underflow
    to 0 instead of overflowing).
    """
    if n < 0:
        raise ValueError(f"trial count must be >= 0, got {n}")
    if not 0 <= k <= n:
        raise ValueError(f"success count must lie in [0, {n}], got {k}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    if p == 0.0:
        return 1.0 if k == 0 else 0.0
    if p == 1.0:
        return 1.0 if k == n else 0.0
    log_term = _log_binom(n, k) + k * math.log(p) + (n - k) * math.log1p(-p)
    return math.exp(log_term)


def binom_cdf(n: int, k: int, p: float) -> float:
    """P[Binomial(n, p) <= k]; k above n is clamped to n."""
    if n < 0:
        raise ValueError(f"trial count must be >= 0, got {n}")
    if k < 0:
        raise ValueError(f"success count must be >= 0, got {k}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    if k >= n:
        return 1.0
    total = 0.0
    for j in range(k + 1):
        total += binom_pmf(n, j, p)
    return min(total, 1.0)


def pmf_prefix_sums(n: int, p: float) -> np.ndarray:
    """CDF values P[X <= k] for k = 0..n, term-for-term consistent with
    binom_cdf (same summation order, so identical bits)."""
    terms = np.array([binom_pmf(n, j, p) for j in range(n + 1)], dtype=np.float64)
    sums = np.cumsum(terms)
    np.minimum(sums, 1.0, out=sums)
    sums[-1] = 1.0
    return sums


def functionality_probability(q: FunctionalityQuery) -> float:
    """Probability the band keeps serving under ``q.attacks`` attacks.

    Piecewise: 0 when defenses sit below the maintenance floor, 1 when they
    cover worst-case exploitation plus the floor, and otherwise the binomial
    CDF at ``defenses - min_functional + 1`` (clamped to the attack count).
    """
    _check_query(q)
    if q.defenses < q.min_functional:
        return 0.0
    if q.defenses >= q.attacks + q.min_functional:
        return 1.0
    bound = min(q.defenses - q.min_functional + 1, q.attacks)
    return binom_cdf(q.attacks, bound, q.attack_success_prob)


def monte_carlo_functionality(
    q: FunctionalityQuery, trials: int, seed: int
) -> MonteCarloEstimate:
    """Simulation estimate of functionality_probability with its standard error.

    Each trial draws an exploited count ~ Binomial(attacks, p); the band
    counts as functional when defenses reach the floor and the exploited
    count stays within ``defenses - min_functional + 1``. Deterministic for a
    given seed.
    """
    _check_query(q)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    if q.defenses < q.min_functional:
        functional = np.zeros(trials, dtype=bool)
    else:
        exploited = rng.binomial(q.attacks, q.attack_success_prob, size=trials)
        functional = exploited <= q.defenses - q.min_functional + 1
    mean = float(np.count_nonzero(functional)) / trials
    stderr = math.sqrt(mean * (1.0 - mean) / trials)
    return MonteCarloEstimate(estimate=mean, stderr=stderr, trials=trials)


def min_defenses_for_target(
    attacks: int, min_functional: int, p: float, target: float
) -> int:
    """Smallest defense count whose functionality probability reaches target.

    Searches [min_functional, attacks + min_functional]; the upper end always
    has probability 1, so a result exists for any target in (0, 1]. Binary
    search is valid because the probability is non-decreasing in defenses.
    """
    if not 0.0 < target <= 1.0:
        raise ValueError(f"target must lie in (0, 1], got {target}")
    lo = min_functional
    hi = attacks + min_functional
    while lo < hi:
        mid = (lo + hi) // 2
        prob = functionality_probability(
            FunctionalityQuery(attacks, mid, min_functional, p)
        )
        if prob >= target:
            hi = mid
        else:
            lo = mid + 1
    return lo
