"""Domain-specific UCB1 bandit over first-transform-conditioned flows.

Arms are distributions of flow permutations constrained to start with a
fixed transformation.  Pulling an arm samples one such flow, applies it to
the stage-input circuit and scores the objective gain (higher is better).
Selection maximizes mean gain, normalized into [0, 1] by the running
maximum absolute gain, plus the sqrt(ln t / 2N) confidence bonus.

Optimistic initialization scores each arm by transformable-node counts
taken per kind on the stage-input graph, weighted by position along one
sampled flow (earlier positions dominate), so no transformation is
actually applied.  Arm evaluations are independent and may run in
parallel; results merge in arm-id order, so the outcome is identical for
any worker count.

Reward bookkeeping records both the action value and the cross-arm delta
r_t = value(t) - value(t-1); selection uses the running mean of action
values, the delta is kept for analysis.
"""

from __future__ import annotations

import hashlib
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .aig import Aig, Objective, QoR, metrics
from .flowspace import Flow, Multiset, sample_conditioned
from .transforms import (FlowCache, TransformKind, apply_flow,
                         count_transformable)

_INIT_POSITION_DECAY = 0.5


def derive_seed(*parts) -> int:
    """Stable child seed from mixed int parts (immune to hash salting)."""
    text = ":".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


@dataclass
class Arm:
    """One conditioned-permutation arm."""

    id: int
    first: TransformKind
    multiset: Multiset


@dataclass
class ArmStats:
    pulls: int = 0
    mean_value: float = 0.0
    best_value: float | None = None
    best_flow: Flow | None = None
    last_value: float | None = None
    max_abs: float = 0.0  # largest |value| this arm has contributed


@dataclass
class RegretStep:
    step: int
    arm_id: int
    value: float
    reward_delta: float
    instant_regret: float
    cumulative_regret: float


@dataclass
class RegretLog:
    steps: list[RegretStep] = field(default_factory=list)

    @property
    def cumulative_regret(self) -> float:
        return self.steps[-1].cumulative_regret if self.steps else 0.0

    def record(self, arm_id: int, value: float, best_mean: float) -> RegretStep:
        prev_value = self.steps[-1].value if self.steps else 0.0
        delta = value - prev_value
        instant = max(0.0, best_mean - value)
        cum = self.cumulative_regret + instant
        step = RegretStep(len(self.steps) + 1, arm_id, value, delta, instant, cum)
        self.steps.append(step)
        return step

    def gaps(self, stats: list[ArmStats]) -> list[float]:
        """Per-arm mean gap against the empirically best arm."""
        means = [s.mean_value for s in stats]
        best = max(means) if means else 0.0
        return [best - m for m in means]


def ucb_bonus(t: float, n_a: int) -> float:
    """Confidence bonus sqrt(ln t / 2 N), natural log."""
    if t < 1 or n_a < 1:
        raise ValueError("t and n_a must be >= 1")
    return math.sqrt(math.log(t) / (2.0 * n_a))


def select_arm(stats: list[ArmStats], t: int) -> int:
    """Arm index maximizing normalized mean plus bonus.

    Arms never pulled (and not optimistically initialized) are must-pull,
    lowest id first.  Ties break toward the lowest id.
    """
    if not stats:
        raise ValueError("no arms to select from")
    for i, s in enumerate(stats):
        if s.pulls == 0:
            return i
    scale = max((s.max_abs for s in stats), default=0.0)
    best_i = 0
    best_score = -math.inf
    for i, s in enumerate(stats):
        q = s.mean_value / scale if scale > 0 else 0.0
        score = q + ucb_bonus(t, s.pulls)
        if score > best_score:
            best_score = score
            best_i = i
    return best_i


def _init_total(aig: Aig, arm: Arm, seed: int) -> float:
    rng = random.Random(seed)
    flow = sample_conditioned(arm.first, arm.multiset, rng)
    total = 0.0
    weight = 1.0
    counts: dict[TransformKind, int] = {}
    for kind in flow:
        c = counts.get(kind)
        if c is None:
            c = count_transformable(aig, kind)
            counts[kind] = c
        total += weight * c
        weight *= _INIT_POSITION_DECAY
    return total


def optimistic_init(aig: Aig, arms: list[Arm], seed: int,
                    jobs: int = 1) -> list[ArmStats]:
    """Pre-seed each arm with one counting-only dry run (pulls = 1).

    Totals are normalized to [0, 1] by the largest total across arms so
    they live on the same scale the bandit normalizes gains to.
    """
    g = aig if aig._compact else aig.compact()
    seeds = [derive_seed(seed, "init", arm.id) for arm in arms]
    if jobs > 1 and len(arms) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            totals = list(pool.map(lambda sa: _init_total(g, sa[0], sa[1]),
                                   zip(arms, seeds)))
    else:
        totals = [_init_total(g, arm, s) for arm, s in zip(arms, seeds)]
    top = max(totals) if totals else 0.0
    stats = []
    for total in totals:
        q = total / top if top > 0 else 0.0
        stats.append(ArmStats(pulls=1, mean_value=q, max_abs=abs(q)))
    return stats


def pull(arm: Arm, aig: Aig, objective: Objective, rng: random.Random,
         cache: FlowCache | None = None,
         prefix_pool: list[Flow] | None = None) -> tuple[Flow, float, QoR]:
    """Sample one flow from the arm and score it against the stage input.

    The value is the objective gain: objective(stage input) minus
    objective(result), so removed nodes score positive under the node-count
    objective.
    """
    prefix: Flow = ()
    if prefix_pool:
        prefix = prefix_pool[rng.randrange(len(prefix_pool))]
    flow = prefix + sample_conditioned(arm.first, arm.multiset, rng)
    if cache is not None:
        result, _ = cache.apply_flow(aig, flow)
    else:
        result, _ = apply_flow(aig, flow)
    before = metrics(aig, objective)
    after = metrics(result, objective)
    return flow, float(before.objective_value - after.objective_value), after


def update(stats: list[ArmStats], arm_id: int, value: float,
           flow: Flow | None, log: RegretLog | None = None) -> RegretStep | None:
    """Fold one observation into the arm's running statistics."""
    s = stats[arm_id]
    s.pulls += 1
    s.mean_value += (value - s.mean_value) / s.pulls
    s.last_value = value
    if abs(value) > s.max_abs:
        s.max_abs = abs(value)
    if s.best_value is None or value > s.best_value:
        s.best_value = value
        s.best_flow = flow
    if log is not None:
        best_mean = max(x.mean_value for x in stats)
        return log.record(arm_id, value, best_mean)
    return None


# ----- synthetic stationary bandit ----------------------------------------------


@dataclass
class BernoulliRun:
    means: list[float]
    pulls: list[int]
    rewards: list[float]  # reward at each step
    arms: list[int]  # chosen arm at each step
    regret: list[float]  # cumulative expected regret per step


def run_bernoulli_ucb(means, steps: int, seed: int) -> BernoulliRun:
    """Pure UCB1 on stationary Bernoulli arms (standalone property check)."""
    means = list(means)
    rng = random.Random(derive_seed(seed, "bernoulli-ucb"))
    stats = [ArmStats() for _ in means]
    best = max(means)
    run = BernoulliRun(means, [0] * len(means), [], [], [])
    cum = 0.0
    for t in range(1, steps + 1):
        a = select_arm(stats, t)
        reward = 1.0 if rng.random() < means[a] else 0.0
        update(stats, a, reward, None)
        run.pulls[a] += 1
        run.arms.append(a)
        run.rewards.append(reward)
        cum += best - means[a]
        run.regret.append(cum)
    return run


def run_bernoulli_random(means, steps: int, seed: int) -> BernoulliRun:
    """Uniform-random policy baseline on the same arms."""
    means = list(means)
    rng = random.Random(derive_seed(seed, "bernoulli-random"))
    best = max(means)
    run = BernoulliRun(means, [0] * len(means), [], [], [])
    cum = 0.0
    for _ in range(steps):
        a = rng.randrange(len(means))
        reward = 1.0 if rng.random() < means[a] else 0.0
        run.pulls[a] += 1
        run.arms.append(a)
        run.rewards.append(reward)
        cum += best - means[a]
        run.regret.append(cum)
    return run
