"""Domain types for the cloud-band attack/defense game.

A cloud system is an ordered chain of cloud-bands. Each band holds a pool of
VMs, needs a minimum number of functional VMs to keep serving, and carries its
own attack/defense economics. Strategies assign integer attack or defense
counts per band; the game is played over finite per-band grids of allowed
counts.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

DEFENDER = "defender"
ATTACKER = "attacker"
ROLES = (DEFENDER, ATTACKER)

# Default per-band economics applied when a band spec leaves them out.
DEFAULT_DEFENDER_LOSS = 20.0
DEFAULT_ATTACKER_GAIN = 15.0
DEFAULT_DEFENSE_UNIT_COST = 0.5
DEFAULT_ATTACK_UNIT_COST = 0.4

ENUMERATION_CAP = 10_000_000


class InvalidSpecError(ValueError):
    """A game spec, strategy, or query violates one of its invariants."""


class StrategySpaceTooLarge(RuntimeError):
    """An enumeration or table would exceed the configured size cap."""

    def __init__(self, size: int, cap: int, what: str = "strategy space"):
        self.size = size
        self.cap = cap
        super().__init__(f"{what} has {size} entries, exceeding the cap of {cap}")


@dataclass(frozen=True)
class CloudBandSpec:
    """One cloud-band: VM capacity, maintenance floor, and economics.

    ``min_functional`` is the number of operational VMs the band needs to keep
    serving clients. ``attack_success_prob`` is the per-VM probability that a
    launched attack takes its target down.
    """

    band_id: int
    capacity: int
    min_functional: int
    attack_success_prob: float
    defender_loss: float = DEFAULT_DEFENDER_LOSS
    attacker_gain: float = DEFAULT_ATTACKER_GAIN
    defense_unit_cost: float = DEFAULT_DEFENSE_UNIT_COST
    attack_unit_cost: float = DEFAULT_ATTACK_UNIT_COST


@dataclass(frozen=True)
class GameSpec:
    """Full game: ordered bands, adjacent propagation probabilities, grids.

    ``propagation_probs[k]`` is the probability that an exploited VM in band
    k+1 (1-based) yields an internal attack on band k+2; length is n-1.
    Grids are per-band tuples of allowed integer counts; helpers below accept
    ``{"start": a, "stop": b, "step": s}`` ranges and normalize them.
    """

    bands: tuple[CloudBandSpec, ...]
    propagation_probs: tuple[float, ...]
    defender_grid: tuple[tuple[int, ...], ...]
    attacker_grid: tuple[tuple[int, ...], ...]

    @property
    def n_bands(self) -> int:
        return len(self.bands)


@dataclass(frozen=True)
class AllocationStrategy:
    """Integer allocation of attacks or defenses, one count per band."""

    role: str
    counts: tuple[int, ...]

    def __post_init__(self):
        if self.role not in ROLES:
            raise InvalidSpecError(f"unknown role {self.role!r}")
        if any(c < 0 for c in self.counts):
            raise InvalidSpecError(f"negative count in strategy {self.counts}")


@dataclass(frozen=True)
class MixedStrategy:
    """Probability vector over one player's enumerated pure strategies."""

    role: str
    weights: tuple[float, ...]

    def __post_init__(self):
        if self.role not in ROLES:
            raise InvalidSpecError(f"unknown role {self.role!r}")
        if not self.weights:
            raise InvalidSpecError("mixed strategy needs at least one weight")
        if any(w < -1e-12 or w > 1.0 + 1e-12 for w in self.weights):
            raise InvalidSpecError("mixed strategy weights must lie in [0, 1]")
        total = sum(self.weights)
        if abs(total - 1.0) > 1e-9:
            raise InvalidSpecError(f"mixed strategy weights sum to {total}, not 1")


def _normalize_grid(grid, band: CloudBandSpec) -> tuple[int, ...]:
    """Turn a grid description into an explicit increasing tuple of ints."""
    if isinstance(grid, dict):
        try:
            start, stop = int(grid["start"]), int(grid["stop"])
        except KeyError as exc:
            raise InvalidSpecError(
                f"band {band.band_id}: grid range needs 'start' and 'stop'"
            ) from exc
        step = int(grid.get("step", 1))
        if step < 1:
            raise InvalidSpecError(f"band {band.band_id}: grid step must be >= 1")
        values = tuple(range(start, stop + 1, step))
    else:
        values = tuple(int(v) for v in grid)
    if not values:
        raise InvalidSpecError(f"band {band.band_id}: grid is empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise InvalidSpecError(
            f"band {band.band_id}: grid values must be strictly increasing"
        )
    if values[0] < 0 or values[-1] > band.capacity:
        raise InvalidSpecError(
            f"band {band.band_id}: grid values must lie in [0, capacity={band.capacity}]"
        )
    return values


def _check_band(band: CloudBandSpec) -> None:
    if band.capacity < 1:
        raise InvalidSpecError(f"band {band.band_id}: capacity must be positive")
    if not 0 < band.min_functional <= band.capacity:
        raise InvalidSpecError(
            f"band {band.band_id}: need 0 < min_functional <= capacity, "
            f"got min_functional={band.min_functional}, capacity={band.capacity}"
        )
    if not 0.0 <= band.attack_success_prob <= 1.0:
        raise InvalidSpecError(
            f"band {band.band_id}: attack_success_prob must lie in [0, 1]"
        )
    for name in ("defender_loss", "attacker_gain", "defense_unit_cost", "attack_unit_cost"):
        if getattr(band, name) < 0:
            raise InvalidSpecError(f"band {band.band_id}: {name} must be >= 0")


def validate_spec(spec: GameSpec) -> GameSpec:
    """Check every invariant and return the spec with grids normalized.

    Raises InvalidSpecError naming the first violated invariant and the
    offending band. Idempotent: validating an already validated spec returns
    an equal spec.
    """
    if not spec.bands:
        raise InvalidSpecError("spec needs at least one band")
    for band in spec.bands:
        _check_band(band)
    n = len(spec.bands)
    if len(spec.propagation_probs) != n - 1:
        raise InvalidSpecError(
            f"propagation_probs has length {len(spec.propagation_probs)}, "
            f"expected {n - 1} for {n} band(s)"
        )
    for i, f in enumerate(spec.propagation_probs):
        if not 0.0 <= f <= 1.0:
            raise InvalidSpecError(f"propagation_probs[{i}] must lie in [0, 1]")
    for name, grids in (("defender_grid", spec.defender_grid),
                        ("attacker_grid", spec.attacker_grid)):
        if len(grids) != n:
            raise InvalidSpecError(
                f"{name} has {len(grids)} entries, expected one per band ({n})"
            )
    defender = tuple(_normalize_grid(g, b) for g, b in zip(spec.defender_grid, spec.bands))
    attacker = tuple(_normalize_grid(g, b) for g, b in zip(spec.attacker_grid, spec.bands))
    return replace(spec, defender_grid=defender, attacker_grid=attacker)


def strategy_space_size(spec: GameSpec, role: str) -> int:
    grids = spec.defender_grid if role == DEFENDER else spec.attacker_grid
    return math.prod(len(g) for g in grids)


def enumerate_strategies(
    spec: GameSpec, role: str, cap: int = ENUMERATION_CAP
) -> list[AllocationStrategy]:
    """All pure strategies for one role: the per-band grid product.

    Ordering is lexicographic over band counts and reproducible across runs.
    Refuses (StrategySpaceTooLarge) when the product exceeds ``cap``.
    """
    if role not in ROLES:
        raise InvalidSpecError(f"unknown role {role!r}")
    spec = validate_spec(spec)
    grids = spec.defender_grid if role == DEFENDER else spec.attacker_grid
    size = math.prod(len(g) for g in grids)
    if size > cap:
        raise StrategySpaceTooLarge(size, cap, f"{role} strategy space")
    return [AllocationStrategy(role, counts) for counts in itertools.product(*grids)]


def check_strategy(spec: GameSpec, strategy: AllocationStrategy) -> None:
    """Validate a strategy against a spec (length and capacity bounds)."""
    if len(strategy.counts) != len(spec.bands):
        raise InvalidSpecError(
            f"strategy has {len(strategy.counts)} counts for {len(spec.bands)} band(s)"
        )
    for band, c in zip(spec.bands, strategy.counts):
        if not 0 <= c <= band.capacity:
            raise InvalidSpecError(
                f"band {band.band_id}: count {c} outside [0, capacity={band.capacity}]"
            )


def _band_from_dict(data: dict, position: int) -> CloudBandSpec:
    known = {
        "band_id", "capacity", "min_functional", "attack_success_prob",
        "defender_loss", "attacker_gain", "defense_unit_cost", "attack_unit_cost",
    }
    unknown = set(data) - known
    if unknown:
        raise InvalidSpecError(f"band {position}: unknown field(s) {sorted(unknown)}")
    try:
        return CloudBandSpec(
            band_id=int(data.get("band_id", position)),
            capacity=int(data["capacity"]),
            min_functional=int(data["min_functional"]),
            attack_success_prob=float(data.get("attack_success_prob", 0.1)),
            defender_loss=float(data.get("defender_loss", DEFAULT_DEFENDER_LOSS)),
            attacker_gain=float(data.get("attacker_gain", DEFAULT_ATTACKER_GAIN)),
            defense_unit_cost=float(data.get("defense_unit_cost", DEFAULT_DEFENSE_UNIT_COST)),
            attack_unit_cost=float(data.get("attack_unit_cost", DEFAULT_ATTACK_UNIT_COST)),
        )
    except KeyError as exc:
        raise InvalidSpecError(f"band {position}: missing field {exc.args[0]!r}") from exc


def game_spec_from_dict(data: dict) -> GameSpec:
    """Build and validate a GameSpec from a JSON-shaped dict."""
    if "bands" not in data or not isinstance(data["bands"], list):
        raise InvalidSpecError("spec document needs a 'bands' list")
    bands = tuple(_band_from_dict(b, i + 1) for i, b in enumerate(data["bands"]))
    spec = GameSpec(
        bands=bands,
        propagation_probs=tuple(float(f) for f in data.get("propagation_probs", [])),
        defender_grid=tuple(data.get("defender_grid", [])),
        attacker_grid=tuple(data.get("attacker_grid", [])),
    )
    return validate_spec(spec)


def load_game_spec(path: str | Path) -> GameSpec:
    """Load a GameSpec from a JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return game_spec_from_dict(data)


def game_spec_to_dict(spec: GameSpec) -> dict:
    """JSON-shaped dict mirroring the field names (round-trips via from_dict)."""
    return {
        "bands": [
            {
                "band_id": b.band_id,
                "capacity": b.capacity,
                "min_functional": b.min_functional,
                "attack_success_prob": b.attack_success_prob,
                "defender_loss": b.defender_loss,
                "attacker_gain": b.attacker_gain,
                "defense_unit_cost": b.defense_unit_cost,
                "attack_unit_cost": b.attack_unit_cost,
            }
            for b in spec.bands
        ],
        "propagation_probs": list(spec.propagation_probs),
        "defender_grid": [list(g) for g in spec.defender_grid],
        "attacker_grid": [list(g) for g in spec.attacker_grid],
    }
