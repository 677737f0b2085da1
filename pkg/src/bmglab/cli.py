"""Command line interface.

Five subcommands: ``simulate`` (one play-through to CSV), ``regret-curve``
(k-adaptive regret of a learner across horizons and seeds), ``hardness-demo``
(formula game payoff and assignment recovery), ``counterexample-demo`` (the
two-environment lower-bound construction), and ``samp-check`` (sampler law
diagnostics on the tiny game).

Exit codes: 0 on success, 1 when a ``--check`` assertion fails, 2 on bad
configuration or input.

Every CSV starts with ``# bmglab <command> schema=v1 config=<hash>`` where
the hash digests the resolved parameters, so outputs are traceable to the
invocation that made them.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from contextlib import nullcontext

import numpy as np

from . import learners
from .adversaries import (
    AdversaryStrategy,
    alternating_tourists,
    oblivious_from_sequence,
    tourist_a1,
    tourist_a2,
)
from .engine import (
    Defender,
    FixedStrategyDefender,
    ScriptedDefender,
    TRANSCRIPT_COLUMNS,
    k_adaptive_regret,
    play,
)
from .experts import (
    FixedStrategy,
    enumerate_composite_experts,
    enumerate_fixed_strategies,
    enumerate_k_adaptive,
    speeding_always_li,
    speeding_hi_every_kth,
)
from .games import (
    Game,
    GameConfigError,
    build_counterexample_game,
    build_speeding_game,
    build_tiny_game,
    load_game_file,
)
from .hardness import (
    assignment_recovery,
    build_hardness_game,
    fixed_from_assignment,
    max3sat_adversary,
    parse_dimacs,
    random_cnf3,
)
from .learners import TraceTable, samp, tree_log_weight, tree_probability
from .seeding import substream

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2

# Master seed for the lower-bound demo, chosen so the pinned Exp3 run draws
# the staying action first and misses the one-round-only open door.
COUNTEREXAMPLE_SEED = 0


class CheckFailure(Exception):
    """A --check assertion did not hold."""


# =============================================================================
# Spec parsing helpers
# =============================================================================


def _parse_seeds(spec: str) -> list[int]:
    spec = spec.strip()
    if ":" in spec:
        lo, hi = spec.split(":", 1)
        start, stop = int(lo), int(hi)
        if stop <= start:
            raise ValueError(f"empty seed range {spec!r}")
        return list(range(start, stop))
    return [int(tok) for tok in spec.split(",") if tok.strip()]


def _parse_int_list(spec: str) -> list[int]:
    return [int(tok) for tok in spec.replace(",", " ").split()]


def _build_game(spec: str) -> Game:
    name, _, param = spec.partition(":")
    if name == "speeding":
        return build_speeding_game(int(param) if param else 7)
    if name == "counterexample":
        return build_counterexample_game()
    if name == "tiny":
        return build_tiny_game(perfect_information=True)
    if name == "tiny-imperfect":
        return build_tiny_game(perfect_information=False)
    return load_game_file(spec)


def _build_adversary(spec: str, k: int) -> AdversaryStrategy:
    name, _, param = spec.partition(":")
    if name == "a1":
        return tourist_a1(k)
    if name == "a2":
        return tourist_a2(k)
    if name == "alternating":
        return alternating_tourists(k)
    if name == "seq":
        return oblivious_from_sequence(_parse_int_list(param), name="seq")
    if name == "script":
        with open(param, "r", encoding="utf-8") as fh:
            return oblivious_from_sequence(_parse_int_list(fh.read()), name="script")
    raise ValueError(
        f"unknown adversary {spec!r}; use a1, a2, alternating, seq:..., or script:PATH"
    )


def _build_experts(spec: str, game: Game, block_len: int):
    name, _, param = spec.partition(":")
    if name == "speeding-pair":
        return [speeding_always_li(game), speeding_hi_every_kth(game)]
    if name == "all-fixed":
        return enumerate_fixed_strategies(game)
    if name == "composite" and param == "all":
        return enumerate_composite_experts(game, block_len)
    if name == "fixed":
        actions = _parse_int_list(param)
        if len(actions) == 1:
            actions = actions * game.n_states
        if len(actions) != game.n_states:
            raise ValueError(
                f"fixed strategy table has {len(actions)} entries but "
                f"{game.name} has {game.n_states} states"
            )
        return [FixedStrategy(actions=tuple(actions))]
    raise ValueError(
        f"unknown expert set {spec!r}; use speeding-pair, all-fixed, "
        f"composite:all, or fixed:..."
    )


def _build_defender(
    spec: str,
    game: Game,
    horizon: int,
    k: int,
    gamma: float | None,
    experts,
) -> Defender:
    name, _, param = spec.partition(":")
    if name == "exp3":
        return learners.Exp3Defender(gamma=gamma)
    if name == "block-exp3":
        if experts is None:
            raise ValueError("block-exp3 needs an expert set")
        return learners.BlockExp3Defender(game, experts, k, horizon, gamma=gamma)
    if name == "trace-hedge":
        return learners.TraceHedgeDefender(game, gamma if gamma else 0.5, horizon)
    if name == "phased-trace-hedge":
        return learners.PhasedTraceHedgeDefender(
            game, gamma if gamma else 0.5, horizon
        )
    if name == "fixed":
        actions = _parse_int_list(param)
        if len(actions) == 1:
            actions = actions * game.n_states
        if len(actions) != game.n_states:
            raise ValueError(
                f"fixed strategy table has {len(actions)} entries but "
                f"{game.name} has {game.n_states} states"
            )
        return FixedStrategyDefender(FixedStrategy(actions=tuple(actions)))
    if name == "script":
        return ScriptedDefender(_parse_int_list(param))
    raise ValueError(
        f"unknown defender {spec!r}; use exp3, block-exp3, trace-hedge, "
        f"phased-trace-hedge, fixed:..., or script:..."
    )


def _config_hash(params: dict) -> str:
    blob = json.dumps(params, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _out_handle(path: str):
    if path == "-":
        return nullcontext(sys.stdout)
    return open(path, "w", newline="", encoding="utf-8")


def _emit(fh, command: str, params: dict, columns, rows) -> None:
    fh.write(f"# bmglab {command} schema=v1 config={_config_hash(params)}\n")
    for key in sorted(params):
        fh.write(f"# {key}={params[key]}\n")
    writer = csv.writer(fh)
    writer.writerow(columns)
    writer.writerows(rows)


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


# =============================================================================
# simulate
# =============================================================================


def _cmd_simulate(args) -> int:
    game = _build_game(args.game)
    adversary = _build_adversary(args.adversary, args.k)
    experts = _build_experts(args.experts, game, 1) if args.experts else None
    defender = _build_defender(
        args.defender, game, args.rounds, args.k, args.gamma, experts
    )
    transcript = play(game, defender, adversary, args.rounds, args.seed)
    params = {
        "game": game.name,
        "adversary": adversary.name,
        "defender": args.defender,
        "rounds": args.rounds,
        "seed": args.seed,
    }
    rows = [
        (
            t,
            transcript.states[t],
            transcript.defender_actions[t],
            transcript.adversary_actions[t],
            transcript.outcomes[t],
            repr(transcript.rewards[t]),
        )
        for t in range(args.rounds)
    ]
    with _out_handle(args.out) as fh:
        _emit(fh, "simulate", params, TRANSCRIPT_COLUMNS, rows)
    _note(
        f"simulate: {args.rounds} rounds, total reward "
        f"{transcript.total_reward():.6g}, average {transcript.average_reward():.6g}"
    )
    if args.check:
        experts2 = _build_experts(args.experts, game, 1) if args.experts else None
        defender2 = _build_defender(
            args.defender, game, args.rounds, args.k, args.gamma, experts2
        )
        replay = play(game, defender2, adversary, args.rounds, args.seed)
        if (
            replay.states != transcript.states
            or replay.defender_actions != transcript.defender_actions
            or replay.adversary_actions != transcript.adversary_actions
            or replay.outcomes != transcript.outcomes
            or replay.rewards != transcript.rewards
        ):
            raise CheckFailure("replay with the same seed diverged")
        _note("check ok: replay is deterministic")
    return EXIT_OK


# =============================================================================
# regret-curve
# =============================================================================


def _cmd_regret_curve(args) -> int:
    game = _build_game(args.game)
    horizons = _parse_int_list(args.rounds)
    seeds = _parse_seeds(args.seeds)
    if not horizons or not seeds:
        raise ValueError("need at least one horizon and one seed")
    params = {
        "game": game.name,
        "learner": args.learner,
        "adversary": args.adversary,
        "experts": args.experts,
        "k": args.k,
        "gamma": args.gamma,
        "rounds": args.rounds,
        "seeds": args.seeds,
    }
    columns = (
        "learner",
        "horizon",
        "seed",
        "k",
        "n_experts",
        "best_expert",
        "best_average",
        "algorithm_average",
        "regret",
        "eval_mode",
    )
    rows = []
    means = []
    for horizon in horizons:
        block = learners.block_length(horizon, args.k)
        experts = _build_experts(args.experts, game, block)
        total = 0.0
        for seed in seeds:
            adversary = _build_adversary(args.adversary, args.k)
            defender = _build_defender(
                args.learner, game, horizon, args.k, args.gamma, experts
            )
            report = k_adaptive_regret(
                game,
                defender,
                adversary,
                horizon,
                args.k,
                experts,
                seed=seed,
                expert_set=args.experts,
                samples=args.samples,
            )
            total += report.regret
            rows.append(
                (
                    args.learner,
                    horizon,
                    seed,
                    args.k,
                    report.n_experts,
                    report.best_expert,
                    f"{report.best_average:.10g}",
                    f"{report.algorithm_average:.10g}",
                    f"{report.regret:.10g}",
                    report.eval_mode,
                )
            )
        mean = total / len(seeds)
        means.append(mean)
        rows.append(
            (args.learner, horizon, "mean", args.k, len(experts), "", "", "",
             f"{mean:.10g}", "")
        )
        _note(f"regret-curve: T={horizon} mean regret {mean:.6g}")
    with _out_handle(args.out) as fh:
        _emit(fh, "regret-curve", params, columns, rows)
    if args.check:
        for earlier, later in zip(means, means[1:]):
            if not later < earlier:
                raise CheckFailure(
                    f"mean regret did not decrease: {earlier:.6g} -> {later:.6g}"
                )
        _note("check ok: mean regret strictly decreases across horizons")
    return EXIT_OK


# =============================================================================
# hardness-demo
# =============================================================================


def _cmd_hardness_demo(args) -> int:
    if args.cnf:
        with open(args.cnf, "r", encoding="utf-8") as fh:
            cnf = parse_dimacs(fh.read())
        planted = None
    else:
        rng = substream(args.seed, "planted")
        planted = [int(b) for b in rng.integers(0, 2, size=args.vars)]
        cnf = random_cnf3(
            args.vars, args.n_clauses, seed=args.seed, planted=planted
        )
    hg = build_hardness_game(cnf)
    horizon = args.phases * hg.n_slots

    name, _, param = args.defender.partition(":")
    if name == "honest":
        if args.assignment:
            assignment = _parse_int_list(args.assignment)
        elif planted is not None:
            assignment = planted
        else:
            raise ValueError(
                "honest defender needs --assignment when the formula comes "
                "from a file"
            )
        strategy = fixed_from_assignment(hg, assignment)
    elif name == "assignment":
        strategy = fixed_from_assignment(hg, _parse_int_list(param))
    elif name == "random":
        rng = substream(args.seed, "defender-draw")
        strategy = FixedStrategy(
            actions=tuple(int(a) for a in rng.integers(0, 3, size=hg.game.n_states))
        )
    else:
        raise ValueError(
            f"unknown hardness defender {args.defender!r}; use honest, "
            f"assignment:..., or random"
        )

    result = assignment_recovery(hg, strategy, horizon, seed=args.seed)
    params = {
        "vars": cnf.n_vars,
        "clauses": cnf.n_clauses,
        "slots": hg.n_slots,
        "phases": args.phases,
        "defender": args.defender,
        "seed": args.seed,
        "cnf": args.cnf or "random-planted",
    }
    columns = ("phase", "clause", "raw_payoff", "fraction", "best_fraction")
    rows = [
        (phase, clause, raw, f"{frac:.10g}", f"{best:.10g}")
        for phase, clause, raw, frac, best in result.rows
    ]
    with _out_handle(args.out) as fh:
        _emit(fh, "hardness-demo", params, columns, rows)
    _note(
        f"hardness-demo: mean phase payoff {result.mean_phase_payoff:.6g}, "
        f"best fraction {result.best_fraction:.6g} (phase {result.best_phase}), "
        f"assignment {''.join(map(str, result.assignment))}"
    )
    if args.check:
        if not result.best_fraction + 1e-9 >= result.mean_phase_payoff:
            raise CheckFailure(
                f"recovered fraction {result.best_fraction:.6g} fell below the "
                f"mean phase payoff {result.mean_phase_payoff:.6g}"
            )
        _note("check ok: recovered fraction covers the mean phase payoff")
    return EXIT_OK


# =============================================================================
# counterexample-demo
# =============================================================================


def _counterexample_runs(horizon: int, seed: int, samples: int):
    """(defender name, environment name, RegretReport) for the 3 x 2 grid."""
    game = build_counterexample_game()
    experts = enumerate_fixed_strategies(game)
    environments = (
        ("always-block", oblivious_from_sequence([1], name="always-block")),
        ("allow-once", oblivious_from_sequence([0] + [1] * (horizon - 1),
                                               name="allow-once")),
    )
    defenders = (
        ("always-enter", lambda: FixedStrategyDefender(FixedStrategy((0, 0)))),
        ("always-stay", lambda: FixedStrategyDefender(FixedStrategy((1, 1)))),
        ("exp3", lambda: learners.Exp3Defender()),
    )
    for d_name, make in defenders:
        for e_name, adversary in environments:
            report = k_adaptive_regret(
                game,
                make(),
                adversary,
                horizon,
                1,
                experts,
                seed=seed,
                expert_set="all-fixed",
                samples=samples,
            )
            yield d_name, e_name, report


def _cmd_counterexample_demo(args) -> int:
    params = {"rounds": args.rounds, "seed": args.seed}
    columns = (
        "defender",
        "environment",
        "horizon",
        "seed",
        "best_average",
        "algorithm_average",
        "regret",
    )
    rows = []
    worst: dict[str, float] = {}
    for d_name, e_name, report in _counterexample_runs(
        args.rounds, args.seed, args.samples
    ):
        rows.append(
            (
                d_name,
                e_name,
                args.rounds,
                args.seed,
                f"{report.best_average:.10g}",
                f"{report.algorithm_average:.10g}",
                f"{report.regret:.10g}",
            )
        )
        worst[d_name] = max(worst.get(d_name, float("-inf")), report.regret)
    with _out_handle(args.out) as fh:
        _emit(fh, "counterexample-demo", params, columns, rows)
    for d_name, regret in worst.items():
        _note(f"counterexample-demo: {d_name} worst-case regret {regret:.6g}")
    if args.check:
        bad = {d: r for d, r in worst.items() if r < 0.2}
        if bad:
            raise CheckFailure(
                f"defender(s) escaped the lower bound: "
                + ", ".join(f"{d}={r:.4g}" for d, r in bad.items())
            )
        _note("check ok: every defender suffers >= 0.2 regret somewhere")
    return EXIT_OK


# =============================================================================
# samp-check
# =============================================================================


def _cmd_samp_check(args) -> int:
    game = build_tiny_game(perfect_information=True)
    table = TraceTable(game, block_len=2, eta=args.eta)
    rng = substream(args.seed, "updates")
    for _ in range(args.updates):
        root = int(rng.integers(game.n_states))
        script = [int(a) for a in rng.integers(0, game.n_adversary_actions, size=2)]
        table.update(root, script)

    trees = enumerate_k_adaptive(game, 2)
    params = {
        "game": game.name,
        "updates": args.updates,
        "draws": args.draws,
        "eta": args.eta,
        "seed": args.seed,
    }
    columns = ("root", "tree", "actions", "sampler_prob", "weight_prob",
               "empirical_prob")
    rows = []
    worst_tv = 0.0
    worst_gap = 0.0
    draw_rng = substream(args.seed, "draws")
    for root in range(game.n_states):
        sampler = np.array([tree_probability(table, root, t) for t in trees])
        logw = np.array([tree_log_weight(table, root, t) for t in trees])
        weights = np.exp(logw - logw.max())
        weights /= weights.sum()
        counts = np.zeros(len(trees))
        index = {t.actions: i for i, t in enumerate(trees)}
        for _ in range(args.draws):
            counts[index[samp(table, root, draw_rng).actions]] += 1
        empirical = counts / args.draws
        tv = 0.5 * float(np.abs(empirical - sampler).sum())
        gap = float(np.abs(sampler - weights).max())
        worst_tv = max(worst_tv, tv)
        worst_gap = max(worst_gap, gap)
        for i, tree in enumerate(trees):
            rows.append(
                (
                    root,
                    i,
                    "".join(map(str, tree.actions)),
                    f"{sampler[i]:.10g}",
                    f"{weights[i]:.10g}",
                    f"{empirical[i]:.10g}",
                )
            )
        _note(f"samp-check: root {root} TV {tv:.6g}, weight gap {gap:.3g}")
    with _out_handle(args.out) as fh:
        _emit(fh, "samp-check", params, columns, rows)
    if args.check:
        if worst_gap > 1e-9:
            raise CheckFailure(
                f"sampler law deviates from explicit weights by {worst_gap:.3g}"
            )
        if worst_tv > 0.02:
            raise CheckFailure(f"empirical TV {worst_tv:.4g} exceeds 0.02")
        _note("check ok: sampler matches the explicit weight law")
    return EXIT_OK


# =============================================================================
# Entry point
# =============================================================================


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bmglab",
        description="Bounded-memory game lab: simulation, regret, hardness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="play one run and write the transcript")
    p.add_argument("--game", required=True,
                   help="speeding[:k], counterexample, tiny, tiny-imperfect, or a JSON path")
    p.add_argument("--defender", required=True,
                   help="exp3, block-exp3, trace-hedge, phased-trace-hedge, fixed:..., script:...")
    p.add_argument("--adversary", required=True,
                   help="a1, a2, alternating, seq:0,1,..., script:PATH")
    p.add_argument("--experts", default=None,
                   help="expert set for block-exp3 (speeding-pair, all-fixed, ...)")
    p.add_argument("--rounds", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=7, help="adversary adaptiveness")
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--out", default="-")
    p.add_argument("--check", action="store_true",
                   help="verify same-seed replay determinism")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("regret-curve", help="k-adaptive regret across horizons")
    p.add_argument("--game", required=True)
    p.add_argument("--learner", required=True)
    p.add_argument("--adversary", required=True)
    p.add_argument("--experts", required=True)
    p.add_argument("--rounds", required=True, help="comma list, e.g. 100,1000,10000")
    p.add_argument("--seeds", default="0:20", help="N, a,b,c, or lo:hi")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--out", default="-")
    p.add_argument("--check", action="store_true",
                   help="require the mean regret to strictly decrease")
    p.set_defaults(fn=_cmd_regret_curve)

    p = sub.add_parser("hardness-demo",
                       help="formula game: phase payoffs and assignment recovery")
    p.add_argument("--cnf", default=None, help="DIMACS file; default random planted")
    p.add_argument("--vars", type=int, default=7)
    p.add_argument("--n-clauses", type=int, default=25)
    p.add_argument("--phases", type=int, default=100)
    p.add_argument("--defender", default="honest",
                   help="honest, assignment:0,1,..., or random")
    p.add_argument("--assignment", default=None,
                   help="assignment for --defender honest with --cnf")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.add_argument("--check", action="store_true",
                   help="require recovered fraction >= mean phase payoff")
    p.set_defaults(fn=_cmd_hardness_demo)

    p = sub.add_parser("counterexample-demo",
                       help="every defender loses somewhere on the two-state game")
    p.add_argument("--rounds", type=int, default=2000)
    p.add_argument("--seed", type=int, default=COUNTEREXAMPLE_SEED)
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--out", default="-")
    p.add_argument("--check", action="store_true",
                   help="require worst-case regret >= 0.2 for every defender")
    p.set_defaults(fn=_cmd_counterexample_demo)

    p = sub.add_parser("samp-check",
                       help="compare the tree sampler to its explicit weight law")
    p.add_argument("--updates", type=int, default=10)
    p.add_argument("--draws", type=int, default=100000)
    p.add_argument("--eta", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.add_argument("--check", action="store_true",
                   help="require TV <= 0.02 and exact weight agreement")
    p.set_defaults(fn=_cmd_samp_check)

    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.fn(args)
    except CheckFailure as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (GameConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
