"""Command-line harness: exploration runs, transformable-node profiling,
search-space queries, random baselines and synthetic bandit checks.

Every command takes an explicit --seed; there is no wall-clock default, so
identical invocations produce byte-identical outputs.  Set FLOWTUNE_LOG to
debug/info/warning/error for logging verbosity, or to "timing" to record
real per-pull wall times in the elapsed_ms column (off by default because
it breaks byte-for-byte reproducibility).
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import logging
import os
import random
import sys

from .aig import Aig, Objective, equivalent, metrics
from .aiger import parse_aiger, write_aiger
from .bandit import derive_seed, run_bernoulli_random, run_bernoulli_ucb
from .blif import parse_blif
from .errors import ParseError
from .flowspace import (Multiset, count_m_repetition, count_multiset,
                        count_none_repetition, flow_length,
                        sample_permutation)
from .multistage import (DEFAULT_PRESET, SCHEDULE_PRESETS, StageSchedule,
                         run)
from .randgen import GenSpec, gen_random
from .transforms import (DEFAULT_KINDS, FlowCache, TransformKind, apply,
                         count_transformable)

log = logging.getLogger("flowtune")

EXHAUSTIVE_LIMIT = 16
RANDOM_CHECK_PATTERNS = 4096


def _setup_logging() -> bool:
    """Configure logging from FLOWTUNE_LOG; returns whether to measure time."""
    raw = os.environ.get("FLOWTUNE_LOG", "").lower()
    measure = raw == "timing"
    level = {
        "debug": logging.DEBUG,
        "info": logging.INFO,
        "timing": logging.INFO,
        "warning": logging.WARNING,
        "error": logging.ERROR,
    }.get(raw, logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    return measure


def _parse_kinds(spec: str | None) -> tuple[TransformKind, ...]:
    if not spec:
        return DEFAULT_KINDS
    kinds = []
    for name in spec.split(","):
        name = name.strip()
        try:
            kinds.append(TransformKind(name))
        except ValueError:
            valid = ", ".join(k.value for k in TransformKind)
            raise SystemExit(f"error: unknown transform {name!r} (valid: {valid})")
    return tuple(kinds)


def _load_circuit(args) -> Aig:
    if args.generate and args.input:
        raise SystemExit("error: --input and --generate are mutually exclusive")
    if args.generate:
        try:
            ni, na, no = (int(x) for x in args.generate.split(","))
        except ValueError:
            raise SystemExit("error: --generate expects INPUTS,ANDS,OUTPUTS")
        return gen_random(GenSpec(ni, na, no, args.seed))
    if not args.input:
        raise SystemExit("error: provide --input FILE or --generate I,A,O")
    try:
        with open(args.input) as fh:
            text = fh.read()
    except OSError as exc:
        raise SystemExit(f"error: cannot read {args.input}: {exc}")
    fmt = args.format
    if fmt == "auto":
        fmt = "blif" if args.input.endswith(".blif") else "aiger"
    try:
        return parse_blif(text) if fmt == "blif" else parse_aiger(text)
    except ParseError as exc:
        for diag in exc.diagnostics:
            print(f"{args.input}:{diag}", file=sys.stderr)
        raise SystemExit(1)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def _open_out(path):
    if path is None:
        return contextlib.nullcontext(sys.stdout)
    return open(path, "w", newline="")


def _flow_str(flow) -> str:
    return ";".join(k.value for k in flow)


EXPLORE_FIELDS = ["stage", "iteration", "arm_id", "first_transform", "flow",
                  "value", "reward_delta", "q_mean", "ucb_bonus",
                  "cumulative_regret", "nodes", "depth", "elapsed_ms"]


def cmd_explore(args) -> int:
    measure = _setup_logging()
    aig = _load_circuit(args)
    kinds = _parse_kinds(args.kinds)
    objective = Objective(args.objective)
    if args.stages or args.iters:
        if not (args.stages and args.iters):
            raise SystemExit("error: --stages and --iters go together")
        schedule = StageSchedule(args.stages, args.iters, args.top_k)
    else:
        schedule = StageSchedule.from_preset(args.preset, args.top_k)
    if args.reps > 1:
        schedule.per_stage_multisets = [Multiset.uniform(kinds, args.reps)
                                        for _ in range(schedule.stages)]
    result = run(aig, schedule, objective, kinds, seed=args.seed,
                 jobs=args.jobs, measure_time=measure)

    optimized, _ = FlowCache().apply_flow(aig, result.best_flow_overall) \
        if result.best_flow_overall else (aig.compact(), None)
    if aig.num_inputs <= EXHAUSTIVE_LIMIT:
        check_mode = "exhaustive"
        ok = equivalent(aig, optimized, "exhaustive")
    else:
        check_mode = "random"
        ok = equivalent(aig, optimized, "random",
                        count=RANDOM_CHECK_PATTERNS, seed=args.seed)
    if not ok:
        print("error: optimized circuit failed the equivalence check",
              file=sys.stderr)
        return 2

    prefix = args.out
    with open(prefix + ".csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(EXPLORE_FIELDS)
        for r in result.log:
            w.writerow([r.stage, r.iteration, r.arm_id, r.first.value,
                        _flow_str(r.flow), _fmt(r.value), _fmt(r.reward_delta),
                        _fmt(r.q_mean), _fmt(r.ucb_bonus),
                        _fmt(r.cumulative_regret), r.nodes, r.depth,
                        _fmt(r.elapsed_ms)])
    summary = {
        "input": args.input or f"generate:{args.generate}",
        "seed": args.seed,
        "objective": objective.value,
        "kinds": [k.value for k in kinds],
        "schedule": {"stages": schedule.stages,
                     "iters_per_stage": schedule.iters_per_stage,
                     "top_k": schedule.top_k},
        "pulls": len(result.log),
        "initial": {"nodes": result.initial_qor.and_count,
                    "depth": result.initial_qor.depth,
                    "objective_value": result.initial_qor.objective_value},
        "final": {"nodes": result.final_qor.and_count,
                  "depth": result.final_qor.depth,
                  "objective_value": result.final_qor.objective_value},
        "best_flow": [k.value for k in result.best_flow_overall],
        "equivalence": {"mode": check_mode, "ok": ok},
    }
    with open(prefix + ".json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(prefix + ".aag", "w") as fh:
        fh.write(write_aiger(optimized))
    log.info("explore done: %d -> %d nodes", result.initial_qor.and_count,
             result.final_qor.and_count)
    return 0


def profile_positions(aig: Aig, kinds, num_flows: int, seed: int):
    """Per-position transformed-node statistics over random flows.

    Each flow is a none-repetition permutation of the enabled kinds; counts
    are normalized per flow to position 1 (0 when position 1 found nothing).
    Returns a list of dicts, one per position.
    """
    multiset = Multiset.uniform(kinds)
    rng = random.Random(derive_seed(seed, "profile"))
    length = multiset.total
    rel = [[] for _ in range(length)]
    absolute = [[] for _ in range(length)]
    cache = FlowCache()
    for _ in range(num_flows):
        flow = sample_permutation(multiset, rng)
        _, reports = cache.apply_flow(aig, flow)
        base = reports[0].tnodes
        for pos, rep in enumerate(reports):
            absolute[pos].append(rep.tnodes)
            rel[pos].append(rep.tnodes / base if base else 0.0)
    out = []
    for pos in range(length):
        out.append({
            "position": pos + 1,
            "mean_rel": sum(rel[pos]) / num_flows,
            "min_rel": min(rel[pos]),
            "max_rel": max(rel[pos]),
            "mean_tnodes": sum(absolute[pos]) / num_flows,
        })
    return out


def cmd_profile(args) -> int:
    _setup_logging()
    aig = _load_circuit(args)
    kinds = _parse_kinds(args.kinds)
    stats = profile_positions(aig, kinds, args.flows, args.seed)
    with _open_out(args.out) as fh:
        w = csv.writer(fh)
        w.writerow(["position", "mean_rel", "min_rel", "max_rel", "mean_tnodes"])
        for row in stats:
            w.writerow([row["position"], _fmt(row["mean_rel"]),
                        _fmt(row["min_rel"]), _fmt(row["max_rel"]),
                        _fmt(row["mean_tnodes"])])
    return 0


def cmd_space(args) -> int:
    _setup_logging()
    if args.mvec:
        m_vec = [int(x) for x in args.mvec.split(",")]
        print(f"multiset flows: {count_multiset(m_vec)}")
        print(f"L = {flow_length(m_vec)}")
        return 0
    if args.n is None:
        raise SystemExit("error: provide --n N [--m M] or --mvec M0,M1,...")
    if args.m is None or args.m == 1:
        print(f"none-repetition flows: {count_none_repetition(args.n)}")
    else:
        print(f"{args.m}-repetition flows: {count_m_repetition(args.n, args.m)}")
        print(f"L = {args.n * args.m}")
    return 0


BASELINE_FIELDS = ["iteration", "flow", "value", "best_value", "nodes", "depth"]


def random_baseline(aig: Aig, multiset: Multiset, budget: int, seed: int,
                    objective: Objective = Objective.NODE_COUNT,
                    cache: FlowCache | None = None):
    """Evaluate `budget` uniform flows, each from the original circuit.

    Returns (rows, best_value, best_qor); rows follow BASELINE_FIELDS.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    rng = random.Random(derive_seed(seed, "baseline"))
    cache = cache if cache is not None else FlowCache()
    base = metrics(aig, objective).objective_value
    rows = []
    best_value = None
    best_qor = metrics(aig, objective)
    for it in range(1, budget + 1):
        flow = sample_permutation(multiset, rng)
        result, _ = cache.apply_flow(aig, flow)
        qor = metrics(result, objective)
        value = float(base - qor.objective_value)
        if best_value is None or value > best_value:
            best_value = value
            best_qor = qor
        rows.append({"iteration": it, "flow": flow, "value": value,
                     "best_value": best_value, "nodes": qor.and_count,
                     "depth": qor.depth})
    return rows, best_value, best_qor


def cmd_random_baseline(args) -> int:
    _setup_logging()
    aig = _load_circuit(args)
    kinds = _parse_kinds(args.kinds)
    multiset = Multiset.uniform(kinds, args.reps)
    rows, best_value, best_qor = random_baseline(
        aig, multiset, args.budget, args.seed, Objective(args.objective))
    with _open_out(args.out) as fh:
        w = csv.writer(fh)
        w.writerow(BASELINE_FIELDS)
        for r in rows:
            w.writerow([r["iteration"], _flow_str(r["flow"]), _fmt(r["value"]),
                        _fmt(r["best_value"]), r["nodes"], r["depth"]])
    log.info("baseline best value %s (%d nodes)", best_value,
             best_qor.and_count)
    return 0


SYNTH_FIELDS = ["step", "ucb_arm", "ucb_reward", "ucb_cum_regret",
                "rand_arm", "rand_reward", "rand_cum_regret"]


def cmd_bandit_synthetic(args) -> int:
    _setup_logging()
    means = [float(x) for x in args.means.split(",")]
    if len(means) < 2 or any(not 0.0 <= m <= 1.0 for m in means):
        raise SystemExit("error: --means needs >= 2 values in [0, 1]")
    ucb = run_bernoulli_ucb(means, args.steps, args.seed)
    rnd = run_bernoulli_random(means, args.steps, args.seed)
    with _open_out(args.out) as fh:
        w = csv.writer(fh)
        w.writerow(SYNTH_FIELDS)
        for i in range(args.steps):
            w.writerow([i + 1, ucb.arms[i], _fmt(ucb.rewards[i]),
                        _fmt(ucb.regret[i]), rnd.arms[i], _fmt(rnd.rewards[i]),
                        _fmt(rnd.regret[i])])
    best = max(range(len(means)), key=lambda i: means[i])
    shares = " ".join(f"{p / args.steps:.4f}" for p in ucb.pulls)
    print(f"# pull shares (ucb): {shares}", file=sys.stderr)
    print(f"# best-arm share (ucb): {ucb.pulls[best] / args.steps:.4f}",
          file=sys.stderr)
    print(f"# final regret ucb={ucb.regret[-1]:.2f} random={rnd.regret[-1]:.2f}",
          file=sys.stderr)
    return 0


def _add_circuit_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="circuit file (.aag or .blif)")
    p.add_argument("--format", choices=["auto", "aiger", "blif"], default="auto")
    p.add_argument("--generate", metavar="I,A,O",
                   help="generate a seeded random circuit instead of reading one")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="flowtune",
        description="Autonomous synthesis-flow exploration on AIGs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("explore", help="run the multi-stage bandit exploration")
    _add_circuit_args(p)
    p.add_argument("--kinds", help="comma-separated transform kinds (default: all six)")
    p.add_argument("--objective", choices=[o.value for o in Objective],
                   default=Objective.NODE_COUNT.value)
    p.add_argument("--preset", choices=sorted(SCHEDULE_PRESETS),
                   default=DEFAULT_PRESET, help="s:m schedule preset")
    p.add_argument("--stages", type=int, help="explicit stage count (with --iters)")
    p.add_argument("--iters", type=int, help="iterations per stage (with --stages)")
    p.add_argument("--top-k", type=int, default=2, dest="top_k")
    p.add_argument("--reps", type=int, default=1,
                   help="per-stage repetitions of each kind")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel workers for arm initialization")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True,
                   help="output prefix (.csv, .json, .aag are written)")
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("profile", help="transformed-node share per flow position")
    _add_circuit_args(p)
    p.add_argument("--kinds")
    p.add_argument("--flows", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("space", help="exact search-space sizes")
    p.add_argument("--n", type=int, help="number of distinct transformations")
    p.add_argument("--m", type=int, help="repetitions of every transformation")
    p.add_argument("--mvec", help="comma-separated per-kind repetition counts")
    p.set_defaults(func=cmd_space)

    p = sub.add_parser("random-baseline", help="uniform random flow sampling")
    _add_circuit_args(p)
    p.add_argument("--kinds")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--objective", choices=[o.value for o in Objective],
                   default=Objective.NODE_COUNT.value)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_random_baseline)

    p = sub.add_parser("bandit-synthetic", help="UCB1 on Bernoulli arms")
    p.add_argument("--means", required=True, help="comma-separated arm means")
    p.add_argument("--steps", type=int, default=10000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bandit_synthetic)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
