"""Command-line front end.

Subcommands: ``prob`` (functionality probability, optionally with a Monte
Carlo cross-check), ``utility`` (both utilities for one strategy profile),
``solve`` (pure/mixed/sequential equilibria), ``sweep`` (run a sweep request
file), and ``scenario`` (built-in scenario presets).

Exit codes: 0 success, 2 input or domain error, 3 strategy-space cap refusal.
Output is deterministic for a fixed invocation and seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .game import (
    CONCEPT_MIXED,
    CONCEPT_PURE,
    CONCEPT_STACKELBERG,
    TIE_BREAK_DEFENDER_FAVOR,
    TIE_BREAK_LEX,
    EquilibriumResult,
    PayoffTable,
    build_payoff_table,
    mixed_nash,
    pure_nash,
    stackelberg_solve,
)
from .model import (
    ATTACKER,
    DEFENDER,
    AllocationStrategy,
    ENUMERATION_CAP,
    InvalidSpecError,
    MixedStrategy,
    StrategySpaceTooLarge,
    load_game_spec,
)
from .payoff import evaluate_profile
from .prob import (
    FunctionalityQuery,
    functionality_probability,
    min_defenses_for_target,
    monte_carlo_functionality,
)
from .runner import (
    BUILTIN_SPECS,
    KIND_CURVE,
    KIND_THRESHOLD,
    SCENARIO_NAMES,
    emit_sweep,
    load_sweep_request,
    run_sweep,
    scenario_request,
)

# Default RNG seed so Monte Carlo output is reproducible without flags.
DEFAULT_SEED = 1729

FORMATS = ("text", "tsv", "json")


def _print_json(obj) -> None:
    print(json.dumps(obj, sort_keys=True, indent=2))


def _print_tsv(rows: list[tuple]) -> None:
    for row in rows:
        print("\t".join(str(c) for c in row))


def _parse_counts(raw: str, flag: str) -> tuple[int, ...]:
    try:
        counts = tuple(int(part) for part in raw.split(","))
    except ValueError:
        raise InvalidSpecError(f"{flag} must be a comma-separated list of integers")
    if not counts:
        raise InvalidSpecError(f"{flag} must list at least one count")
    return counts


def _load_spec(args):
    if getattr(args, "builtin", None):
        if args.builtin not in BUILTIN_SPECS:
            raise InvalidSpecError(
                f"unknown built-in spec {args.builtin!r}; "
                f"valid names: {', '.join(sorted(BUILTIN_SPECS))}"
            )
        return BUILTIN_SPECS[args.builtin]()
    if getattr(args, "spec", None):
        return load_game_spec(args.spec)
    raise InvalidSpecError("pass --spec <file> or --builtin <name>")


def _strategy_payload(strategy):
    if isinstance(strategy, MixedStrategy):
        return {"kind": "mixed", "weights": list(strategy.weights)}
    return {"kind": "pure", "counts": list(strategy.counts)}


def _strategy_cell(strategy) -> str:
    if isinstance(strategy, MixedStrategy):
        return "w=" + ";".join(repr(w) for w in strategy.weights)
    return ";".join(str(c) for c in strategy.counts)


def _strategy_text(strategy) -> str:
    if isinstance(strategy, MixedStrategy):
        parts = [
            f"{i}:{w:.6g}" for i, w in enumerate(strategy.weights) if w > 0.0
        ]
        return "mixed(" + ", ".join(parts) + ")"
    return "(" + ", ".join(str(c) for c in strategy.counts) + ")"


def cmd_prob(args) -> int:
    if not 0.0 <= args.p <= 1.0:
        raise InvalidSpecError(f"--p must lie in [0, 1], got {args.p}")
    if args.attacks < 0:
        raise InvalidSpecError(f"--attacks must be >= 0, got {args.attacks}")
    if args.defenses < 0:
        raise InvalidSpecError(f"--defenses must be >= 0, got {args.defenses}")
    if args.min < 1:
        raise InvalidSpecError(f"--min must be >= 1, got {args.min}")
    query = FunctionalityQuery(args.attacks, args.defenses, args.min, args.p)
    analytic = functionality_probability(query)
    mc = None
    if args.mc_trials is not None:
        if args.mc_trials < 1:
            raise InvalidSpecError(f"--mc-trials must be >= 1, got {args.mc_trials}")
        mc = monte_carlo_functionality(query, args.mc_trials, args.seed)

    if args.format == "json":
        _print_json({
            "attacks": args.attacks,
            "defenses": args.defenses,
            "min_functional": args.min,
            "attack_success_prob": args.p,
            "p_functional": analytic,
            "monte_carlo": None if mc is None else {
                "estimate": mc.estimate,
                "stderr": mc.stderr,
                "trials": mc.trials,
                "seed": args.seed,
            },
        })
    elif args.format == "tsv":
        rows = [("p_functional", repr(analytic))]
        if mc is not None:
            rows += [
                ("mc_estimate", repr(mc.estimate)),
                ("mc_stderr", repr(mc.stderr)),
                ("mc_trials", mc.trials),
                ("mc_seed", args.seed),
            ]
        _print_tsv(rows)
    else:
        print(f"P(functional) = {analytic:.6g}")
        if mc is not None:
            print(
                f"Monte Carlo estimate = {mc.estimate:.6g} "
                f"(stderr {mc.stderr:.3g}, trials {mc.trials}, seed {args.seed})"
            )
    return 0


def cmd_utility(args) -> int:
    spec = _load_spec(args)
    s_d = AllocationStrategy(DEFENDER, _parse_counts(args.defenses, "--defenses"))
    s_a = AllocationStrategy(ATTACKER, _parse_counts(args.attacks, "--attacks"))
    evaluation = evaluate_profile(spec, s_d, s_a)

    if args.format == "json":
        _print_json({
            "defender_strategy": list(s_d.counts),
            "attacker_strategy": list(s_a.counts),
            "band_probabilities": list(evaluation.band_probabilities),
            "defender_utility": evaluation.defender_utility,
            "attacker_utility": evaluation.attacker_utility,
        })
    elif args.format == "tsv":
        rows = [
            ("defender_strategy", _strategy_cell(s_d)),
            ("attacker_strategy", _strategy_cell(s_a)),
        ]
        rows += [
            (f"band_probability_{k + 1}", repr(p))
            for k, p in enumerate(evaluation.band_probabilities)
        ]
        rows += [
            ("defender_utility", repr(evaluation.defender_utility)),
            ("attacker_utility", repr(evaluation.attacker_utility)),
        ]
        _print_tsv(rows)
    else:
        probs = ", ".join(f"{p:.6g}" for p in evaluation.band_probabilities)
        print(f"band probabilities: {probs}")
        print(f"defender utility: {evaluation.defender_utility:.6g}")
        print(f"attacker utility: {evaluation.attacker_utility:.6g}")
    return 0


def _load_table(args) -> PayoffTable:
    if getattr(args, "table", None):
        with open(args.table, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        for key in ("defender_payoffs", "attacker_payoffs"):
            if key not in data:
                raise InvalidSpecError(f"payoff table file needs {key!r}")
        return PayoffTable.from_matrices(data["defender_payoffs"], data["attacker_payoffs"])
    spec = _load_spec(args)
    return build_payoff_table(spec, cap=args.cap)


def _result_payload(result: EquilibriumResult) -> dict:
    return {
        "defender": _strategy_payload(result.defender),
        "attacker": _strategy_payload(result.attacker),
        "defender_utility": result.defender_utility,
        "attacker_utility": result.attacker_utility,
    }


def cmd_solve(args) -> int:
    table = _load_table(args)
    if args.concept == "pure":
        results = pure_nash(table)
        concept = CONCEPT_PURE
    elif args.concept == "mixed":
        results = mixed_nash(table, max_support=args.max_support)
        concept = CONCEPT_MIXED
    else:
        results = [stackelberg_solve(table, tie_break=args.tie_break)]
        concept = CONCEPT_STACKELBERG

    if args.format == "json":
        payload = {
            "concept": concept,
            "equilibria": [_result_payload(r) for r in results],
        }
        if concept == CONCEPT_STACKELBERG:
            payload["tie_break"] = args.tie_break
        _print_json(payload)
    elif args.format == "tsv":
        rows = [("concept", "defender", "attacker", "defender_utility", "attacker_utility")]
        for r in results:
            rows.append((
                concept,
                _strategy_cell(r.defender),
                _strategy_cell(r.attacker),
                repr(r.defender_utility),
                repr(r.attacker_utility),
            ))
        _print_tsv(rows)
    else:
        print(f"concept: {concept}")
        if not results:
            print("none")
        for idx, r in enumerate(results, start=1):
            print(
                f"equilibrium {idx}: defender={_strategy_text(r.defender)} "
                f"attacker={_strategy_text(r.attacker)} "
                f"u_d={r.defender_utility:.6g} u_a={r.attacker_utility:.6g}"
            )
    return 0


def _threshold_entries(result) -> list[dict]:
    req = result.request
    entries = []
    if req.kind == KIND_CURVE:
        alpha = req.alpha_values[0]
        for s in result.series:
            entries.append({
                "alpha": alpha,
                "p": s.p,
                "min_defenses": min_defenses_for_target(
                    alpha, req.band.min_functional, s.p, req.target
                ),
            })
    elif req.kind == KIND_THRESHOLD:
        for i, alpha in enumerate(req.alpha_values):
            for s in result.series:
                entries.append({
                    "alpha": alpha,
                    "p": s.p,
                    "min_defenses": int(s.values[i]),
                })
    return entries


def _emit_and_report(result, args, header: str | None = None) -> int:
    paths: list[Path] = []
    if args.out is not None:
        paths = emit_sweep(result, args.out)
    thresholds = _threshold_entries(result)

    if args.format == "json":
        _print_json({
            "kind": result.request.kind,
            "files": [str(p) for p in paths],
            "thresholds": thresholds,
            "metadata": result.metadata,
        })
    elif args.format == "tsv":
        rows = [("file", str(p)) for p in paths]
        rows += [
            ("threshold", e["alpha"], format(e["p"], "g"), e["min_defenses"])
            for e in thresholds
        ]
        _print_tsv(rows)
    else:
        if header:
            print(header)
        for p in paths:
            print(f"wrote {p}")
        if thresholds:
            print(f"smallest defenses reaching P >= {result.request.target:g}:")
            for e in thresholds:
                print(f"  alpha={e['alpha']} p={e['p']:g} -> {e['min_defenses']}")
    return 0


def cmd_sweep(args) -> int:
    req = load_sweep_request(args.request)
    result = run_sweep(req)
    return _emit_and_report(result, args)


def cmd_scenario(args) -> int:
    req = scenario_request(args.name)
    result = run_sweep(req)
    header = (
        f"{args.name}: attacks={req.alpha_values[0]} "
        f"min_functional={req.band.min_functional}"
    )
    return _emit_and_report(result, args, header=header)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cloudband-game",
        description="Attack/defense game solver for multi-band cloud models.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_prob = sub.add_parser("prob", help="functionality probability for one band")
    p_prob.add_argument("--attacks", type=int, required=True)
    p_prob.add_argument("--defenses", type=int, required=True)
    p_prob.add_argument("--min", type=int, required=True,
                        help="minimum functional VMs (maintenance floor)")
    p_prob.add_argument("--p", type=float, required=True,
                        help="per-VM attack success probability")
    p_prob.add_argument("--mc-trials", type=int, default=None,
                        help="also report a Monte Carlo estimate over this many trials")
    p_prob.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_prob.add_argument("--format", choices=FORMATS, default="text")
    p_prob.set_defaults(func=cmd_prob)

    p_util = sub.add_parser("utility", help="utilities for one strategy profile")
    p_util.add_argument("--spec", help="GameSpec JSON file")
    p_util.add_argument("--builtin", help="name of a built-in spec (baseline)")
    p_util.add_argument("--defenses", required=True,
                        help="comma-separated defense counts, one per band")
    p_util.add_argument("--attacks", required=True,
                        help="comma-separated attack counts, one per band")
    p_util.add_argument("--format", choices=FORMATS, default="text")
    p_util.set_defaults(func=cmd_utility)

    p_solve = sub.add_parser("solve", help="solve the game for an equilibrium")
    p_solve.add_argument("--spec", help="GameSpec JSON file")
    p_solve.add_argument("--builtin", help="name of a built-in spec (baseline)")
    p_solve.add_argument("--table",
                         help="JSON file with defender_payoffs/attacker_payoffs matrices")
    p_solve.add_argument("--concept", choices=("pure", "mixed", "stackelberg"),
                         required=True)
    p_solve.add_argument("--tie-break", choices=(TIE_BREAK_LEX, TIE_BREAK_DEFENDER_FAVOR),
                         default=TIE_BREAK_LEX,
                         help="follower tie handling for the sequential solve")
    p_solve.add_argument("--max-support", type=int, default=None,
                         help="support size bound for mixed equilibria")
    p_solve.add_argument("--cap", type=int, default=ENUMERATION_CAP,
                         help="payoff table entry cap")
    p_solve.add_argument("--format", choices=FORMATS, default="text")
    p_solve.set_defaults(func=cmd_solve)

    p_sweep = sub.add_parser("sweep", help="run a sweep request file")
    p_sweep.add_argument("--request", required=True, help="SweepRequest JSON file")
    p_sweep.add_argument("--out", default=None, help="directory for emitted data files")
    p_sweep.add_argument("--format", choices=FORMATS, default="text")
    p_sweep.set_defaults(func=cmd_sweep)

    p_scen = sub.add_parser("scenario", help="run a built-in scenario preset")
    p_scen.add_argument("--name", required=True,
                        help=f"one of: {', '.join(SCENARIO_NAMES)}")
    p_scen.add_argument("--out", default=None, help="directory for emitted data files")
    p_scen.add_argument("--format", choices=FORMATS, default="text")
    p_scen.set_defaults(func=cmd_scenario)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StrategySpaceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InvalidSpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
