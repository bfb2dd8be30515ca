"""Defender and attacker utilities over strategy profiles.

The defender earns each band's loss value weighted by its survival
probability and pays a per-defense cost; the attacker earns each band's gain
weighted by breakdown probability and pays a per-attack cost. On top of the
per-band sums, a breakdown of the entry band lets attacks propagate down the
chain: band k contributes its loss (gain) weighted by the product of the
adjacent propagation probabilities on the path from band 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .model import (
    ATTACKER,
    DEFENDER,
    AllocationStrategy,
    GameSpec,
    InvalidSpecError,
    check_strategy,
    validate_spec,
)
from .prob import FunctionalityQuery, functionality_probability


@dataclass(frozen=True)
class ProfileEvaluation:
    """Both utilities for one strategy profile, plus the shared band probabilities."""

    defender_strategy: AllocationStrategy
    attacker_strategy: AllocationStrategy
    band_probabilities: tuple[float, ...]
    defender_utility: float
    attacker_utility: float


def cascade_weight(spec: GameSpec, weights: Sequence[float]) -> float:
    """Sum over bands 2..n of (product of propagation probs from band 1) * weight."""
    acc = 0.0
    f_prod = 1.0
    for k in range(1, len(spec.bands)):
        f_prod *= spec.propagation_probs[k - 1]
        acc += f_prod * weights[k]
    return acc


def cascade_loss(
    band_probs: Sequence[float], spec: GameSpec, weights: Sequence[float]
) -> float:
    """Expected downstream damage seeded by an entry-band breakdown.

    Zero for a single band. ``weights`` holds the per-band value at stake
    (defender losses or attacker gains); entry 0 is unused.
    """
    n = len(spec.bands)
    if len(band_probs) != n or len(weights) != n:
        raise InvalidSpecError(
            f"expected {n} band probabilities and weights, "
            f"got {len(band_probs)} and {len(weights)}"
        )
    return (1.0 - band_probs[0]) * cascade_weight(spec, weights)


def band_probabilities(
    spec: GameSpec, s_d: AllocationStrategy, s_a: AllocationStrategy
) -> tuple[float, ...]:
    """Per-band functionality probability for one strategy profile."""
    if s_d.role != DEFENDER or s_a.role != ATTACKER:
        raise InvalidSpecError("expected a defender strategy and an attacker strategy")
    check_strategy(spec, s_d)
    check_strategy(spec, s_a)
    return tuple(
        functionality_probability(
            FunctionalityQuery(
                attacks=alpha,
                defenses=delta,
                min_functional=band.min_functional,
                attack_success_prob=band.attack_success_prob,
            )
        )
        for band, delta, alpha in zip(spec.bands, s_d.counts, s_a.counts)
    )


def _defender_utility_from_probs(
    spec: GameSpec, probs: Sequence[float], deltas: Sequence[int]
) -> float:
    gain = 0.0
    for k, band in enumerate(spec.bands):
        gain += probs[k] * band.defender_loss
    cost = 0.0
    for k, band in enumerate(spec.bands):
        cost += band.defense_unit_cost * deltas[k]
    losses = [band.defender_loss for band in spec.bands]
    return gain - cost - (1.0 - probs[0]) * cascade_weight(spec, losses)


def _attacker_utility_from_probs(
    spec: GameSpec, probs: Sequence[float], alphas: Sequence[int]
) -> float:
    gain = 0.0
    for k, band in enumerate(spec.bands):
        gain += (1.0 - probs[k]) * band.attacker_gain
    cost = 0.0
    for k, band in enumerate(spec.bands):
        cost += band.attack_unit_cost * alphas[k]
    gains = [band.attacker_gain for band in spec.bands]
    return gain - cost + (1.0 - probs[0]) * cascade_weight(spec, gains)


def defender_utility(
    spec: GameSpec, s_d: AllocationStrategy, s_a: AllocationStrategy
) -> float:
    """Survival-weighted band values, minus defense cost and cascade losses."""
    spec = validate_spec(spec)
    probs = band_probabilities(spec, s_d, s_a)
    return _defender_utility_from_probs(spec, probs, s_d.counts)


def attacker_utility(
    spec: GameSpec, s_d: AllocationStrategy, s_a: AllocationStrategy
) -> float:
    """Breakdown-weighted band gains, minus attack cost, plus cascade gains."""
    spec = validate_spec(spec)
    probs = band_probabilities(spec, s_d, s_a)
    return _attacker_utility_from_probs(spec, probs, s_a.counts)


def evaluate_profile(
    spec: GameSpec, s_d: AllocationStrategy, s_a: AllocationStrategy
) -> ProfileEvaluation:
    """Both utilities computed from one shared band-probability vector."""
    spec = validate_spec(spec)
    probs = band_probabilities(spec, s_d, s_a)
    return ProfileEvaluation(
        defender_strategy=s_d,
        attacker_strategy=s_a,
        band_probabilities=probs,
        defender_utility=_defender_utility_from_probs(spec, probs, s_d.counts),
        attacker_utility=_attacker_utility_from_probs(spec, probs, s_a.counts),
    )
