"""Named scenarios, parameter sweeps, and plot-ready data emission.

Three sweep kinds:

* ``probability_curve``: functionality probability versus defense count at a
  fixed attack count, one curve per attack success probability,
* ``utility_surface``: defender utility over an attack x defense grid for a
  single band,
* ``threshold_table``: smallest defense count reaching a target probability,
  per attack count and success probability.

Results are written as whitespace-separated text tables (header ``x y`` or
``x y z``) that plotting pipelines consume directly; emission is
deterministic, byte for byte.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import (
    ATTACKER,
    DEFENDER,
    AllocationStrategy,
    CloudBandSpec,
    GameSpec,
    InvalidSpecError,
    game_spec_from_dict,
    validate_spec,
)
from .payoff import defender_utility
from .prob import FunctionalityQuery, functionality_probability, min_defenses_for_target

KIND_CURVE = "probability_curve"
KIND_SURFACE = "utility_surface"
KIND_THRESHOLD = "threshold_table"
KINDS = (KIND_CURVE, KIND_SURFACE, KIND_THRESHOLD)

DEFAULT_TARGET = 0.90

# Built-in single-band scenario presets: attack count and maintenance floor
# vary, everything else stays at the baseline parameterization.
SCENARIO_PARAMS = {
    "scenario-i": {"attacks": 30, "min_functional": 20},
    "scenario-ii": {"attacks": 30, "min_functional": 25},
    "scenario-iii": {"attacks": 30, "min_functional": 30},
    "scenario-iv": {"attacks": 50, "min_functional": 20},
    "scenario-v": {"attacks": 50, "min_functional": 25},
    "scenario-vi": {"attacks": 50, "min_functional": 30},
}
SCENARIO_NAMES = tuple(SCENARIO_PARAMS)
SCENARIO_P_VALUES = (0.1, 0.15, 0.2, 0.25)
SCENARIO_DELTA_RANGE = (20, 42)
BASELINE_CAPACITY = 100


@dataclass(frozen=True)
class SweepRequest:
    """One sweep: the band under study, axis ranges, and p values."""

    kind: str
    band: CloudBandSpec
    alpha_values: tuple[int, ...]
    delta_values: tuple[int, ...]
    p_values: tuple[float, ...]
    target: float = DEFAULT_TARGET


@dataclass(frozen=True)
class SweepSeries:
    """One curve/surface/threshold row set at a single p value."""

    p: float
    values: np.ndarray


@dataclass(frozen=True)
class SweepResult:
    request: SweepRequest
    series: tuple[SweepSeries, ...]
    metadata: dict


def _check_axis(name: str, values) -> tuple[int, ...]:
    vals = tuple(int(v) for v in values)
    if not vals:
        raise InvalidSpecError(f"{name} must be non-empty")
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise InvalidSpecError(f"{name} values must be strictly increasing")
    if vals[0] < 0:
        raise InvalidSpecError(f"{name} values must be >= 0")
    return vals


def validate_request(req: SweepRequest) -> SweepRequest:
    if req.kind not in KINDS:
        raise InvalidSpecError(f"unknown sweep kind {req.kind!r}; expected one of {KINDS}")
    _check_axis("alpha_range", req.alpha_values)
    _check_axis("delta_range", req.delta_values)
    if not req.p_values:
        raise InvalidSpecError("p_values must be non-empty")
    for p in req.p_values:
        if not 0.0 <= p <= 1.0:
            raise InvalidSpecError(f"p value {p} outside [0, 1]")
    if not 0.0 < req.target <= 1.0:
        raise InvalidSpecError(f"target must lie in (0, 1], got {req.target}")
    if req.kind == KIND_CURVE and len(req.alpha_values) != 1:
        raise InvalidSpecError(
            "probability_curve sweeps need a single attack count "
            f"(got {len(req.alpha_values)} alpha values)"
        )
    return req


def _metadata(req: SweepRequest) -> dict:
    from . import __version__

    return {
        "tool": "cloudband-game",
        "version": __version__,
        "kind": req.kind,
        "min_functional": req.band.min_functional,
        "alpha_values": list(req.alpha_values),
        "delta_values": list(req.delta_values),
        "p_values": list(req.p_values),
        "target": req.target,
    }


def run_probability_curves(req: SweepRequest) -> SweepResult:
    """Functionality probability versus defenses, one series per p."""
    validate_request(req)
    if req.kind != KIND_CURVE:
        raise InvalidSpecError(f"expected kind {KIND_CURVE!r}, got {req.kind!r}")
    alpha = req.alpha_values[0]
    series = []
    for p in req.p_values:
        probs = np.array([
            functionality_probability(
                FunctionalityQuery(alpha, delta, req.band.min_functional, p)
            )
            for delta in req.delta_values
        ])
        probs.setflags(write=False)
        series.append(SweepSeries(p=p, values=probs))
    return SweepResult(request=req, series=tuple(series), metadata=_metadata(req))


def run_utility_surface(req: SweepRequest) -> SweepResult:
    """Defender utility over the attack x defense grid for the request's band."""
    validate_request(req)
    if req.kind != KIND_SURFACE:
        raise InvalidSpecError(f"expected kind {KIND_SURFACE!r}, got {req.kind!r}")
    series = []
    for p in req.p_values:
        band = CloudBandSpec(
            band_id=req.band.band_id,
            capacity=req.band.capacity,
            min_functional=req.band.min_functional,
            attack_success_prob=p,
            defender_loss=req.band.defender_loss,
            attacker_gain=req.band.attacker_gain,
            defense_unit_cost=req.band.defense_unit_cost,
            attack_unit_cost=req.band.attack_unit_cost,
        )
        spec = validate_spec(GameSpec(
            bands=(band,),
            propagation_probs=(),
            defender_grid=(req.delta_values,),
            attacker_grid=(req.alpha_values,),
        ))
        grid = np.empty((len(req.alpha_values), len(req.delta_values)))
        for i, alpha in enumerate(req.alpha_values):
            for j, delta in enumerate(req.delta_values):
                grid[i, j] = defender_utility(
                    spec,
                    AllocationStrategy(DEFENDER, (delta,)),
                    AllocationStrategy(ATTACKER, (alpha,)),
                )
        grid.setflags(write=False)
        series.append(SweepSeries(p=p, values=grid))
    return SweepResult(request=req, series=tuple(series), metadata=_metadata(req))


def run_threshold_table(req: SweepRequest) -> SweepResult:
    """Smallest defense count reaching the target probability, per (alpha, p)."""
    validate_request(req)
    if req.kind != KIND_THRESHOLD:
        raise InvalidSpecError(f"expected kind {KIND_THRESHOLD!r}, got {req.kind!r}")
    series = []
    for p in req.p_values:
        mins = np.array([
            min_defenses_for_target(alpha, req.band.min_functional, p, req.target)
            for alpha in req.alpha_values
        ], dtype=np.int64)
        mins.setflags(write=False)
        series.append(SweepSeries(p=p, values=mins))
    return SweepResult(request=req, series=tuple(series), metadata=_metadata(req))


def run_sweep(req: SweepRequest) -> SweepResult:
    runners = {
        KIND_CURVE: run_probability_curves,
        KIND_SURFACE: run_utility_surface,
        KIND_THRESHOLD: run_threshold_table,
    }
    validate_request(req)
    return runners[req.kind](req)


def _fmt(value) -> str:
    return format(float(value), ".6g")


def emit_sweep(result: SweepResult, directory: str | Path) -> list[Path]:
    """Write one text table per series; returns the paths written.

    Curves: ``Pk-a<alpha>-min<min>-pk-<p>.txt`` with header ``x y`` (defense
    count, probability). Surfaces: ``Uk-<amin>-<amax>-pk-<p>.txt`` with header
    ``x y z`` (attacks, defenses, utility). Threshold tables land in a single
    ``thresholds-min<min>-target-<target>.txt`` with header ``x y z``
    (attacks, p, smallest defense count). Rows ascend lexicographically in
    the axis columns; numbers carry 6 significant digits. Re-emitting the
    same result is byte-identical.
    """
    directory = Path(directory)
    os.makedirs(directory, exist_ok=True)
    req = result.request
    mn = req.band.min_functional
    paths = []
    if req.kind == KIND_CURVE:
        alpha = req.alpha_values[0]
        for s in result.series:
            path = directory / f"Pk-a{alpha}-min{mn}-pk-{s.p:g}.txt"
            lines = ["x y"]
            lines += [
                f"{_fmt(delta)} {_fmt(prob)}"
                for delta, prob in zip(req.delta_values, s.values)
            ]
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            paths.append(path)
    elif req.kind == KIND_SURFACE:
        a_lo, a_hi = req.alpha_values[0], req.alpha_values[-1]
        for s in result.series:
            path = directory / f"Uk-{a_lo}-{a_hi}-pk-{s.p:g}.txt"
            lines = ["x y z"]
            for i, alpha in enumerate(req.alpha_values):
                for j, delta in enumerate(req.delta_values):
                    lines.append(f"{_fmt(alpha)} {_fmt(delta)} {_fmt(s.values[i, j])}")
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            paths.append(path)
    else:
        path = directory / f"thresholds-min{mn}-target-{req.target:g}.txt"
        lines = ["x y z"]
        for i, alpha in enumerate(req.alpha_values):
            for s in result.series:
                lines.append(f"{_fmt(alpha)} {_fmt(s.p)} {_fmt(s.values[i])}")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        paths.append(path)
    return paths


def read_sweep_file(path: str | Path) -> tuple[list[str], np.ndarray]:
    """Parse an emitted table back into (header columns, value rows)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        data = np.loadtxt(fh, ndmin=2)
    return header, data


def scenario_request(name: str) -> SweepRequest:
    """The probability-curve request behind a built-in scenario name."""
    if name not in SCENARIO_PARAMS:
        raise InvalidSpecError(
            f"unknown scenario {name!r}; valid names: {', '.join(SCENARIO_NAMES)}"
        )
    params = SCENARIO_PARAMS[name]
    lo, hi = SCENARIO_DELTA_RANGE
    band = CloudBandSpec(
        band_id=1,
        capacity=BASELINE_CAPACITY,
        min_functional=params["min_functional"],
        attack_success_prob=SCENARIO_P_VALUES[0],
    )
    return SweepRequest(
        kind=KIND_CURVE,
        band=band,
        alpha_values=(params["attacks"],),
        delta_values=tuple(range(lo, hi + 1)),
        p_values=SCENARIO_P_VALUES,
        target=DEFAULT_TARGET,
    )


def scenario_thresholds(name: str) -> dict[float, int]:
    """Per-p smallest defense count reaching the scenario's target."""
    req = scenario_request(name)
    alpha = req.alpha_values[0]
    return {
        p: min_defenses_for_target(alpha, req.band.min_functional, p, req.target)
        for p in req.p_values
    }


def baseline_game_spec(p: float = 0.1, min_functional: int = 20) -> GameSpec:
    """Single-band game at the baseline economics.

    Defense grid 20..70, attack grid 10..50; used by the CLI's built-in
    'baseline' spec.
    """
    return validate_spec(GameSpec(
        bands=(CloudBandSpec(
            band_id=1,
            capacity=BASELINE_CAPACITY,
            min_functional=min_functional,
            attack_success_prob=p,
        ),),
        propagation_probs=(),
        defender_grid=(tuple(range(20, 71)),),
        attacker_grid=(tuple(range(10, 51)),),
    ))


BUILTIN_SPECS = {"baseline": baseline_game_spec}


def request_from_dict(data: dict) -> SweepRequest:
    """Build a SweepRequest from a JSON-shaped dict."""
    if "kind" not in data:
        raise InvalidSpecError("sweep request needs a 'kind'")
    band_field = data.get("band")
    if band_field is None:
        raise InvalidSpecError("sweep request needs a 'band'")
    if isinstance(band_field, list):
        if len(band_field) != 1:
            raise InvalidSpecError(
                "sweeps are defined per band; pass exactly one band, "
                f"got {len(band_field)}"
            )
        band_field = band_field[0]
    # Reuse the game-spec loader for defaults and validation of the band.
    band_spec = game_spec_from_dict({
        "bands": [band_field],
        "propagation_probs": [],
        "defender_grid": [[0]],
        "attacker_grid": [[0]],
    }).bands[0]

    def axis(field: str):
        raw = data.get(field)
        if raw is None:
            raise InvalidSpecError(f"sweep request needs {field!r}")
        if isinstance(raw, dict):
            step = int(raw.get("step", 1))
            if step < 1:
                raise InvalidSpecError(f"{field}: step must be >= 1")
            return tuple(range(int(raw["start"]), int(raw["stop"]) + 1, step))
        return tuple(int(v) for v in raw)

    req = SweepRequest(
        kind=str(data["kind"]),
        band=band_spec,
        alpha_values=axis("alpha_range"),
        delta_values=axis("delta_range"),
        p_values=tuple(float(p) for p in data.get("p_values", [])),
        target=float(data.get("target", DEFAULT_TARGET)),
    )
    return validate_request(req)


def load_sweep_request(path: str | Path) -> SweepRequest:
    with open(path, "r", encoding="utf-8") as fh:
        return request_from_dict(json.load(fh))
