"""Payoff tables and solution concepts.

Builds the dense utility matrices over both players' enumerated strategy
spaces, then solves them: best response sets, pure Nash enumeration, mixed
Nash via support enumeration, and the defender-first sequential (leader/
follower) solution by backward induction.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .model import (
    ATTACKER,
    DEFENDER,
    ENUMERATION_CAP,
    AllocationStrategy,
    GameSpec,
    InvalidSpecError,
    MixedStrategy,
    StrategySpaceTooLarge,
    validate_spec,
)
from .payoff import cascade_weight
from .prob import pmf_prefix_sums

THREADS_ENV_VAR = "CLOUDBAND_GAME_THREADS"

# Tolerance for indifference / no-deviation checks on mixed equilibria.
EPSILON = 1e-9
# Mixed equilibria whose weight vectors differ by less than this are duplicates.
DEDUP_TOL = 1e-7
# Support enumeration is exponential; refuse beyond this many pure strategies.
MIXED_DIM_LIMIT = 64

TIE_BREAK_LEX = "lex"
TIE_BREAK_DEFENDER_FAVOR = "defender-favor"

CONCEPT_PURE = "pure_nash"
CONCEPT_MIXED = "mixed_nash"
CONCEPT_STACKELBERG = "stackelberg_defender_first"
CONCEPT_BEST_RESPONSE = "best_response"


@dataclass
class PayoffTable:
    """Dense utility matrices: rows = defender strategies, cols = attacker."""

    spec: GameSpec | None
    defender_counts: np.ndarray  # (|S_D|, n) int64, lexicographic rows
    attacker_counts: np.ndarray  # (|S_A|, n) int64, lexicographic rows
    defender_payoffs: np.ndarray  # (|S_D|, |S_A|) float64
    attacker_payoffs: np.ndarray  # (|S_D|, |S_A|) float64

    def __post_init__(self):
        for arr in (self.defender_counts, self.attacker_counts,
                    self.defender_payoffs, self.attacker_payoffs):
            arr.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.defender_payoffs.shape

    def defender_strategy(self, i: int) -> AllocationStrategy:
        return AllocationStrategy(DEFENDER, tuple(int(c) for c in self.defender_counts[i]))

    def attacker_strategy(self, j: int) -> AllocationStrategy:
        return AllocationStrategy(ATTACKER, tuple(int(c) for c in self.attacker_counts[j]))

    @property
    def defender_strategies(self) -> list[AllocationStrategy]:
        return [self.defender_strategy(i) for i in range(self.shape[0])]

    @property
    def attacker_strategies(self) -> list[AllocationStrategy]:
        return [self.attacker_strategy(j) for j in range(self.shape[1])]

    @classmethod
    def from_matrices(
        cls, defender_payoffs, attacker_payoffs, spec: GameSpec | None = None
    ) -> "PayoffTable":
        """Wrap plain matrices (test fixtures, externally supplied games)."""
        d = np.array(defender_payoffs, dtype=np.float64, order="C")
        a = np.array(attacker_payoffs, dtype=np.float64, order="C")
        if d.shape != a.shape or d.ndim != 2:
            raise InvalidSpecError(
                f"payoff matrices must share a 2-D shape, got {d.shape} and {a.shape}"
            )
        if not (np.isfinite(d).all() and np.isfinite(a).all()):
            raise InvalidSpecError("payoff matrices must be finite")
        return cls(
            spec=spec,
            defender_counts=np.arange(d.shape[0], dtype=np.int64).reshape(-1, 1),
            attacker_counts=np.arange(d.shape[1], dtype=np.int64).reshape(-1, 1),
            defender_payoffs=d,
            attacker_payoffs=a,
        )


@dataclass(frozen=True)
class EquilibriumResult:
    """One solution: strategy profile (pure or mixed), both utilities, concept tag."""

    concept: str
    defender: AllocationStrategy | MixedStrategy
    attacker: AllocationStrategy | MixedStrategy
    defender_utility: float
    attacker_utility: float


def _worker_count(n_rows: int) -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "").strip()
    if raw in ("", "0"):
        workers = os.cpu_count() or 1
    else:
        try:
            workers = int(raw)
        except ValueError as exc:
            raise ValueError(
                f"{THREADS_ENV_VAR} must be a non-negative integer, got {raw!r}"
            ) from exc
        if workers < 0:
            raise ValueError(f"{THREADS_ENV_VAR} must be >= 0, got {workers}")
        if workers == 0:
            workers = os.cpu_count() or 1
    return max(1, min(workers, n_rows))


def _band_prob_matrix(
    d_values: Sequence[int], a_values: Sequence[int], min_functional: int, p: float
) -> np.ndarray:
    """Functionality probability over a (defense grid x attack grid) block.

    Entry [i, j] is bit-identical to functionality_probability at
    (attacks=a_values[j], defenses=d_values[i]).
    """
    d_arr = np.asarray(d_values, dtype=np.int64)
    out = np.empty((len(d_values), len(a_values)), dtype=np.float64)
    for j, alpha in enumerate(a_values):
        prefix = pmf_prefix_sums(int(alpha), p)
        bounds = np.clip(d_arr - min_functional + 1, 0, int(alpha))
        col = prefix[bounds]
        col[d_arr < min_functional] = 0.0
        col[d_arr >= int(alpha) + min_functional] = 1.0
        out[:, j] = col
    return out


def _index_matrix(grid_sizes: Sequence[int]) -> np.ndarray:
    """Lexicographic enumeration indices: row r holds the per-band grid index."""
    total = math.prod(grid_sizes)
    idx = np.unravel_index(np.arange(total), tuple(grid_sizes))
    return np.ascontiguousarray(np.stack(idx, axis=1).astype(np.int64))


def build_payoff_table(spec: GameSpec, cap: int = ENUMERATION_CAP) -> PayoffTable:
    """Materialize both utility matrices over the full strategy product.

    Deterministic and independent of worker count; refuses with the computed
    size when |S_D| * |S_A| exceeds ``cap``. Worker fan-out is capped by the
    CLOUDBAND_GAME_THREADS environment variable (0 or unset picks the CPU
    count).
    """
    spec = validate_spec(spec)
    n = spec.n_bands
    d_sizes = [len(g) for g in spec.defender_grid]
    a_sizes = [len(g) for g in spec.attacker_grid]
    n_rows = math.prod(d_sizes)
    n_cols = math.prod(a_sizes)
    if n_rows * n_cols > cap:
        raise StrategySpaceTooLarge(n_rows * n_cols, cap, "payoff table")

    d_idx = _index_matrix(d_sizes)
    a_idx = _index_matrix(a_sizes)
    d_counts = np.empty_like(d_idx)
    a_counts = np.empty_like(a_idx)
    for k in range(n):
        d_counts[:, k] = np.asarray(spec.defender_grid[k], dtype=np.int64)[d_idx[:, k]]
        a_counts[:, k] = np.asarray(spec.attacker_grid[k], dtype=np.int64)[a_idx[:, k]]

    band_probs = np.zeros((n, max(d_sizes), max(a_sizes)), dtype=np.float64)
    for k, band in enumerate(spec.bands):
        band_probs[k, : d_sizes[k], : a_sizes[k]] = _band_prob_matrix(
            spec.defender_grid[k], spec.attacker_grid[k],
            band.min_functional, band.attack_success_prob,
        )

    # Per-strategy totals and cascade weights, accumulated in band order so
    # table entries match the scalar utility functions bit for bit.
    d_cost = np.zeros(n_rows, dtype=np.float64)
    a_cost = np.zeros(n_cols, dtype=np.float64)
    for k, band in enumerate(spec.bands):
        d_cost += band.defense_unit_cost * d_counts[:, k]
        a_cost += band.attack_unit_cost * a_counts[:, k]
    d_loss = np.array([b.defender_loss for b in spec.bands], dtype=np.float64)
    a_gain = np.array([b.attacker_gain for b in spec.bands], dtype=np.float64)
    wd = cascade_weight(spec, [b.defender_loss for b in spec.bands])
    wa = cascade_weight(spec, [b.attacker_gain for b in spec.bands])

    d_out = np.empty((n_rows, n_cols), dtype=np.float64)
    a_out = np.empty((n_rows, n_cols), dtype=np.float64)

    workers = _worker_count(n_rows)
    if workers == 1:
        _kernels.fill_payoff_rows(band_probs, d_idx, a_idx, d_cost, a_cost,
                                  d_loss, a_gain, wd, wa, d_out, a_out, 0, n_rows)
    else:
        # Rows partition into disjoint blocks, so results do not depend on
        # scheduling; the numba kernel releases the GIL.
        bounds = np.linspace(0, n_rows, workers + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_kernels.fill_payoff_rows, band_probs, d_idx, a_idx,
                            d_cost, a_cost, d_loss, a_gain, wd, wa,
                            d_out, a_out, int(lo), int(hi))
                for lo, hi in zip(bounds[:-1], bounds[1:])
                if lo < hi
            ]
            for fut in futures:
                fut.result()

    return PayoffTable(
        spec=spec,
        defender_counts=d_counts,
        attacker_counts=a_counts,
        defender_payoffs=d_out,
        attacker_payoffs=a_out,
    )


def best_response(table: PayoffTable, role: str, opponent_index: int) -> list[int]:
    """All strategy indices attaining the exact payoff maximum.

    For the defender the opponent index picks a column of the defender
    matrix; for the attacker it picks a row of the attacker matrix. The
    canonical representative is the lexicographically smallest strategy
    vector (see canonical_index).
    """
    if role == DEFENDER:
        if not 0 <= opponent_index < table.shape[1]:
            raise IndexError(f"attacker index {opponent_index} out of range")
        values = table.defender_payoffs[:, opponent_index]
    elif role == ATTACKER:
        if not 0 <= opponent_index < table.shape[0]:
            raise IndexError(f"defender index {opponent_index} out of range")
        values = table.attacker_payoffs[opponent_index, :]
    else:
        raise InvalidSpecError(f"unknown role {role!r}")
    return [int(i) for i in np.flatnonzero(values == values.max())]


def canonical_index(table: PayoffTable, role: str, indices: Sequence[int]) -> int:
    """The index among ``indices`` with the lexicographically smallest vector."""
    counts = table.defender_counts if role == DEFENDER else table.attacker_counts
    return min(indices, key=lambda i: tuple(counts[i]))


def pure_nash(table: PayoffTable) -> list[EquilibriumResult]:
    """All cells where both strategies are mutual best responses."""
    d = table.defender_payoffs
    a = table.attacker_payoffs
    d_best = d == d.max(axis=0, keepdims=True)
    a_best = a == a.max(axis=1, keepdims=True)
    cells = np.argwhere(d_best & a_best)
    return [
        EquilibriumResult(
            concept=CONCEPT_PURE,
            defender=table.defender_strategy(int(i)),
            attacker=table.attacker_strategy(int(j)),
            defender_utility=float(d[i, j]),
            attacker_utility=float(a[i, j]),
        )
        for i, j in cells
    ]


def _support_weights(payoffs: np.ndarray, rows, cols) -> np.ndarray | None:
    """Row-player weights over ``rows`` that equalize the column payoffs.

    Solves the indifference system for a square support pair; returns None
    when the system is singular or produces negative weights.
    """
    k = len(rows)
    m = np.empty((k + 1, k + 1), dtype=np.float64)
    m[:k, :k] = payoffs[np.ix_(rows, cols)].T
    m[:k, k] = -1.0
    m[k, :k] = 1.0
    m[k, k] = 0.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        sol = np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError:
        return None
    if not np.isfinite(sol).all():
        return None
    weights = sol[:k]
    if (weights < -EPSILON).any():
        return None
    weights = np.clip(weights, 0.0, None)
    total = weights.sum()
    if total <= 0.0:
        return None
    return weights / total


def _is_mixed_equilibrium(
    a: np.ndarray, b: np.ndarray, sigma_d: np.ndarray, sigma_a: np.ndarray,
    support_d, support_a,
) -> tuple[float, float] | None:
    u_d = float(sigma_d @ a @ sigma_a)
    u_a = float(sigma_d @ b @ sigma_a)
    d_dev = a @ sigma_a
    a_dev = sigma_d @ b
    if d_dev.max() > u_d + EPSILON or a_dev.max() > u_a + EPSILON:
        return None
    if max(abs(d_dev[i] - u_d) for i in support_d) > EPSILON:
        return None
    if max(abs(a_dev[j] - u_a) for j in support_a) > EPSILON:
        return None
    return u_d, u_a


def mixed_nash(table: PayoffTable, max_support: int | None = None) -> list[EquilibriumResult]:
    """Mixed equilibria by support enumeration over equal-size support pairs.

    For each candidate pair the indifference equations are solved; solutions
    must make every support strategy payoff-equal and leave no pure strategy
    strictly better (within 1e-9). Singular systems are skipped. Duplicates
    (weight vectors within 1e-7) are collapsed. Exponential in the support
    bound, hence the hard dimension limit.
    """
    n_rows, n_cols = table.shape
    if max(n_rows, n_cols) > MIXED_DIM_LIMIT:
        raise StrategySpaceTooLarge(
            max(n_rows, n_cols), MIXED_DIM_LIMIT, "support enumeration dimension"
        )
    a = table.defender_payoffs
    b = table.attacker_payoffs
    k_max = min(n_rows, n_cols)
    if max_support is not None:
        if max_support < 1:
            raise InvalidSpecError(f"max_support must be >= 1, got {max_support}")
        k_max = min(k_max, max_support)

    results: list[EquilibriumResult] = []
    seen: list[np.ndarray] = []
    for k in range(1, k_max + 1):
        for rows in itertools.combinations(range(n_rows), k):
            for cols in itertools.combinations(range(n_cols), k):
                x = _support_weights(b, rows, cols)
                if x is None:
                    continue
                y = _support_weights(a.T, cols, rows)
                if y is None:
                    continue
                sigma_d = np.zeros(n_rows)
                sigma_d[list(rows)] = x
                sigma_a = np.zeros(n_cols)
                sigma_a[list(cols)] = y
                utilities = _is_mixed_equilibrium(a, b, sigma_d, sigma_a, rows, cols)
                if utilities is None:
                    continue
                stacked = np.concatenate([sigma_d, sigma_a])
                if any(np.max(np.abs(stacked - s)) < DEDUP_TOL for s in seen):
                    continue
                seen.append(stacked)
                results.append(EquilibriumResult(
                    concept=CONCEPT_MIXED,
                    defender=MixedStrategy(DEFENDER, tuple(float(w) for w in sigma_d)),
                    attacker=MixedStrategy(ATTACKER, tuple(float(w) for w in sigma_a)),
                    defender_utility=utilities[0],
                    attacker_utility=utilities[1],
                ))
    return results


def stackelberg_solve(table: PayoffTable, tie_break: str = TIE_BREAK_LEX) -> EquilibriumResult:
    """Defender-first backward induction.

    For every defender row the attacker replies with a best response; the
    defender picks the row maximizing its own payoff under that reply.
    Attacker ties break to the lexicographically smallest vector ('lex') or,
    under 'defender-favor', to the reply the defender likes best.
    """
    if tie_break not in (TIE_BREAK_LEX, TIE_BREAK_DEFENDER_FAVOR):
        raise InvalidSpecError(
            f"tie_break must be '{TIE_BREAK_LEX}' or '{TIE_BREAK_DEFENDER_FAVOR}', "
            f"got {tie_break!r}"
        )
    n_rows = table.shape[0]
    d = table.defender_payoffs
    replies = np.empty(n_rows, dtype=np.int64)
    for i in range(n_rows):
        br = best_response(table, ATTACKER, i)
        if tie_break == TIE_BREAK_DEFENDER_FAVOR and len(br) > 1:
            best_val = max(d[i, j] for j in br)
            br = [j for j in br if d[i, j] == best_val]
        replies[i] = canonical_index(table, ATTACKER, br)
    leader_values = d[np.arange(n_rows), replies]
    best_rows = np.flatnonzero(leader_values == leader_values.max())
    i_star = canonical_index(table, DEFENDER, [int(i) for i in best_rows])
    j_star = int(replies[i_star])
    return EquilibriumResult(
        concept=CONCEPT_STACKELBERG,
        defender=table.defender_strategy(i_star),
        attacker=table.attacker_strategy(j_star),
        defender_utility=float(d[i_star, j_star]),
        attacker_utility=float(table.attacker_payoffs[i_star, j_star]),
    )


def expected_utilities(table: PayoffTable, result: EquilibriumResult) -> tuple[float, float]:
    """Recompute a result's utilities from the table (pure or mixed)."""

    def weight_vector(strategy, counts: np.ndarray, size: int) -> np.ndarray:
        if isinstance(strategy, MixedStrategy):
            return np.asarray(strategy.weights, dtype=np.float64)
        rows = np.flatnonzero((counts == np.asarray(strategy.counts)).all(axis=1))
        if rows.size == 0:
            raise InvalidSpecError(f"strategy {strategy.counts} not in the table")
        vec = np.zeros(size)
        vec[rows[0]] = 1.0
        return vec

    sigma_d = weight_vector(result.defender, table.defender_counts, table.shape[0])
    sigma_a = weight_vector(result.attacker, table.attacker_counts, table.shape[1])
    return (
        float(sigma_d @ table.defender_payoffs @ sigma_a),
        float(sigma_d @ table.attacker_payoffs @ sigma_a),
    )
