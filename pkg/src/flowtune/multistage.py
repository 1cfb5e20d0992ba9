"""Multi-stage bandit exploration with committed best flows.

Exploration runs s stages of m iterations each (s*m pulls total).  Within
a stage the input circuit is frozen; when the stage ends its best observed
flow is committed, producing the next stage's input.  The next stage
starts from the top-k arms of the previous one: their mean values merge
into the initial estimate for every new arm, and their best flows form a
prefix pool that new samples are concatenated onto.  The committed flow's
own prefix degenerates to the empty prefix (it is already applied);
other retained prefixes are re-evaluated fresh on the committed circuit.

A stage whose best observed value is negative commits nothing, so the
committed circuit's objective never regresses across stage boundaries.
"""

from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass, field

from .aig import Aig, Objective, QoR, metrics
from .bandit import (Arm, ArmStats, RegretLog, derive_seed, optimistic_init,
                     pull, select_arm, ucb_bonus, update)
from .flowspace import Flow, Multiset
from .transforms import FlowCache, TransformKind

log = logging.getLogger("flowtune")

# (stages, iterations per stage) options sharing one total budget; the
# 2:30 shape is the default for area-style objectives
SCHEDULE_PRESETS: dict[str, tuple[int, int]] = {
    "1:60": (1, 60),
    "2:30": (2, 30),
    "3:20": (3, 20),
    "4:15": (4, 15),
    "6:10": (6, 10),
}
DEFAULT_PRESET = "2:30"


@dataclass
class StageSchedule:
    stages: int
    iters_per_stage: int
    top_k: int = 2
    per_stage_multisets: list[Multiset] | None = None

    def __post_init__(self):
        if self.stages < 1 or self.iters_per_stage < 1 or self.top_k < 1:
            raise ValueError(f"invalid schedule: {self}")
        if (self.per_stage_multisets is not None
                and len(self.per_stage_multisets) != self.stages):
            raise ValueError("need one multiset per stage")

    @property
    def total_explorations(self) -> int:
        return self.stages * self.iters_per_stage

    @classmethod
    def from_preset(cls, name: str, top_k: int = 2) -> "StageSchedule":
        s, m = SCHEDULE_PRESETS[name]
        return cls(s, m, top_k)


@dataclass
class LogRow:
    stage: int
    iteration: int
    arm_id: int
    first: TransformKind
    flow: Flow
    value: float
    reward_delta: float
    q_mean: float
    ucb_bonus: float | None  # None while the arm was must-pull
    cumulative_regret: float
    nodes: int
    depth: int
    elapsed_ms: float


@dataclass
class StageResult:
    stats: list[ArmStats]
    arms: list[Arm]
    best_flow: Flow
    best_value: float
    committed_flow: Flow
    regret: RegretLog


@dataclass
class ExplorationResult:
    best_flow_overall: Flow
    initial_qor: QoR
    final_qor: QoR
    per_stage: list[StageResult]
    log: list[LogRow] = field(default_factory=list)


def run_stage(aig: Aig, arms: list[Arm], m: int, stats: list[ArmStats],
              seed: int, stage_idx: int = 0,
              objective: Objective = Objective.NODE_COUNT,
              cache: FlowCache | None = None,
              prefix_pool: list[Flow] | None = None,
              rows: list[LogRow] | None = None,
              regret_offset: float = 0.0,
              measure_time: bool = False) -> StageResult:
    """One bounded bandit episode of m select/pull/update rounds."""
    if m < 1:
        raise ValueError("a stage needs at least one iteration")
    if not arms:
        raise ValueError("a stage needs at least one arm")
    regret = RegretLog()
    best_flow: Flow | None = None
    best_value = None
    for it in range(1, m + 1):
        arm_id = select_arm(stats, it)
        s = stats[arm_id]
        bonus = ucb_bonus(it, s.pulls) if s.pulls >= 1 else None
        rng = random.Random(derive_seed(seed, "pull", stage_idx, it, arm_id))
        t0 = time.perf_counter() if measure_time else 0.0
        flow, value, after = pull(arms[arm_id], aig, objective, rng,
                                  cache=cache, prefix_pool=prefix_pool)
        elapsed = (time.perf_counter() - t0) * 1000.0 if measure_time else 0.0
        step = update(stats, arm_id, value, flow, regret)
        if best_value is None or value > best_value:
            best_value = value
            best_flow = flow
        if rows is not None:
            rows.append(LogRow(
                stage=stage_idx, iteration=it, arm_id=arm_id,
                first=arms[arm_id].first, flow=flow, value=value,
                reward_delta=step.reward_delta, q_mean=stats[arm_id].mean_value,
                ucb_bonus=bonus,
                cumulative_regret=regret_offset + step.cumulative_regret,
                nodes=after.and_count, depth=after.depth, elapsed_ms=elapsed))
    committed = best_flow if best_value >= 0 else ()
    return StageResult(stats, arms, best_flow, best_value, committed, regret)


def carryover(prev: StageResult, top_k: int, next_multiset: Multiset,
              enabled_kinds) -> tuple[list[Flow], list[Arm], list[ArmStats]]:
    """Fold a finished stage into the next stage's starting state.

    Returns the prefix pool (one entry per retained arm, the committed
    flow replaced by the empty prefix), the fresh arm set, and initial
    statistics whose mean is the merged mean of the retained arms.
    """
    n_arms = len(prev.stats)
    if top_k > n_arms:
        log.warning("top_k=%d clamped to arm count %d", top_k, n_arms)
        top_k = n_arms
    ranked = sorted(range(n_arms),
                    key=lambda i: (-prev.stats[i].mean_value, i))[:top_k]
    prefix_pool: list[Flow] = []
    for i in ranked:
        bf = prev.stats[i].best_flow
        if bf is None or bf == prev.committed_flow:
            prefix_pool.append(())
        else:
            prefix_pool.append(bf)
    merged_q = sum(prev.stats[i].mean_value for i in ranked) / len(ranked)
    arms = [Arm(i, kind, next_multiset) for i, kind in enumerate(enabled_kinds)]
    stats = [ArmStats(pulls=1, mean_value=merged_q, max_abs=abs(merged_q))
             for _ in arms]
    return prefix_pool, arms, stats


def run(aig: Aig, schedule: StageSchedule,
        objective: Objective = Objective.NODE_COUNT,
        enabled_kinds=None, seed: int = 0, jobs: int = 1,
        cache: FlowCache | None = None,
        measure_time: bool = False) -> ExplorationResult:
    """Full multi-stage exploration; deterministic in (circuit, schedule, seed)."""
    enabled = (tuple(TransformKind) if enabled_kinds is None
               else tuple(enabled_kinds))
    if not enabled:
        raise ValueError("at least one transform kind must be enabled")
    multisets = schedule.per_stage_multisets
    if multisets is None:
        multisets = [Multiset.uniform(enabled)] * schedule.stages
    for ms in multisets:
        if set(ms.counts) != set(enabled):
            raise ValueError("stage multisets must cover exactly the enabled kinds")
    cache = cache if cache is not None else FlowCache()

    current = aig if aig._compact else aig.compact()
    initial_qor = metrics(current, objective)
    rows: list[LogRow] = []
    per_stage: list[StageResult] = []
    committed: list[Flow] = []
    regret_offset = 0.0
    prefix_pool: list[Flow] | None = None
    stats: list[ArmStats] | None = None
    arms: list[Arm] = []

    for stage_idx in range(schedule.stages):
        if stage_idx == 0:
            arms = [Arm(i, kind, multisets[0]) for i, kind in enumerate(enabled)]
            stats = optimistic_init(current, arms,
                                    derive_seed(seed, "stage", 0), jobs=jobs)
            prefix_pool = None
        result = run_stage(current, arms, schedule.iters_per_stage, stats,
                           seed, stage_idx, objective, cache, prefix_pool,
                           rows, regret_offset, measure_time)
        per_stage.append(result)
        regret_offset += result.regret.cumulative_regret
        committed.append(result.committed_flow)
        if result.committed_flow:
            current, _ = cache.apply_flow(current, result.committed_flow)
        log.info("stage %d: best value %.3f, committed %d steps, %d nodes",
                 stage_idx, result.best_value, len(result.committed_flow),
                 metrics(current).and_count)
        if stage_idx + 1 < schedule.stages:
            prefix_pool, arms, stats = carryover(
                result, schedule.top_k, multisets[stage_idx + 1], enabled)

    best_overall: Flow = tuple(k for f in committed for k in f)
    final_qor = metrics(current, objective)
    return ExplorationResult(best_overall, initial_qor, final_qor,
                             per_stage, rows)
