"""Bernoulli bandit environments, seeded episodes, multi-run aggregation,
and the small-instance empirical privacy audit.

Randomness is organised as one stream per (run, arm, role), so results are
bit-identical regardless of how runs are distributed over workers.
"""

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .noise import RngStream
from .policies import PolicyConfig, make_policy

ROLE_REWARD = 0
ROLE_MECHANISM = 1
ROLE_AUDIT_BASE = 2
ROLE_AUDIT_FLIP = 3

_MAX_ARMS = 1 << 16
_MAX_ROLE = 1 << 4

TWO_ARM_MEANS = (0.9, 0.6)
TEN_ARM_MEANS = (0.1, 0.1, 0.1, 0.1, 0.55, 0.2, 0.1, 0.1, 0.1, 0.1)

AUDIT_MAX_HORIZON = 6
_AUDIT_MIN_SAMPLES = 1000


def stream_id(run: int, arm: int = 0, role: int = 0) -> int:
    """Pack (run, arm, role) into one 64-bit stream id."""
    if not 0 <= run < 1 << 43:
        raise ValueError(f"run index out of range: {run}")
    if not 0 <= arm < _MAX_ARMS:
        raise ValueError(f"arm index out of range: {arm}")
    if not 0 <= role < _MAX_ROLE:
        raise ValueError(f"role out of range: {role}")
    return (run << 20) | (arm << 4) | role


@dataclass(frozen=True)
class BanditInstance:
    """Independent Bernoulli arms with the given success means."""

    means: tuple[float, ...]

    def __post_init__(self):
        if not self.means:
            raise ValueError("an instance needs at least one arm")
        if any(not 0.0 <= m <= 1.0 for m in self.means):
            raise ValueError(f"arm means must lie in [0, 1], got {self.means}")

    @property
    def n_arms(self) -> int:
        return len(self.means)

    @property
    def best_mean(self) -> float:
        return max(self.means)

    @property
    def gaps(self) -> tuple[float, ...]:
        best = self.best_mean
        return tuple(best - m for m in self.means)


@dataclass
class RunResult:
    """One episode: traces of actions, rewards, and both regret notions.

    pseudo_regret accumulates the gap of each chosen arm; empirical_regret is
    t * best_mean minus the collected reward. Both are cumulative.
    """

    actions: np.ndarray
    rewards: np.ndarray
    pseudo_regret: np.ndarray
    empirical_regret: np.ndarray
    seed: int
    run_index: int


@dataclass
class ExperimentSummary:
    """Cross-run aggregate of per-timestep pseudo-regret curves."""

    mean_regret: np.ndarray
    min_regret: np.ndarray
    max_regret: np.ndarray
    final_regret_per_run: np.ndarray
    runs: int
    seed: int
    config_echo: dict = field(default_factory=dict)

    @property
    def final_spread(self) -> float:
        """Best-to-worst final regret spread across runs."""
        return float(self.max_regret[-1] - self.min_regret[-1])


def _mechanism_rng_factory(seed: int, run_index: int):
    return lambda arm: RngStream(seed, stream_id(run_index, arm, ROLE_MECHANISM))


def run_episode(policy_config: PolicyConfig, instance: BanditInstance, horizon: int,
                seed: int, run_index: int = 0) -> RunResult:
    """Play one seeded episode of `horizon` steps against Bernoulli rewards."""
    policy = make_policy(policy_config, instance.n_arms,
                         _mechanism_rng_factory(seed, run_index))
    if horizon < policy.init_steps:
        raise ValueError(
            f"horizon {horizon} is shorter than the {policy.init_steps}-step "
            f"initialisation phase of {policy_config.kind}")
    means = instance.means
    gaps = instance.gaps
    reward_draws = [
        RngStream(seed, stream_id(run_index, a, ROLE_REWARD)).uniform
        for a in range(instance.n_arms)
    ]
    actions = np.empty(horizon, dtype=np.int64)
    rewards = np.empty(horizon, dtype=np.float64)
    pseudo = np.empty(horizon, dtype=np.float64)
    select = policy.select_action
    update = policy.update
    cum_gap = 0.0
    for t in range(horizon):
        a = select()
        r = 1.0 if reward_draws[a]() < means[a] else 0.0
        update(a, r)
        actions[t] = a
        rewards[t] = r
        cum_gap += gaps[a]
        pseudo[t] = cum_gap
    empirical = instance.best_mean * np.arange(1, horizon + 1, dtype=np.float64) \
        - np.cumsum(rewards)
    return RunResult(actions=actions, rewards=rewards, pseudo_regret=pseudo,
                     empirical_regret=empirical, seed=seed, run_index=run_index)


def _episode_task(args):
    policy_config, instance, horizon, seed, run_index = args
    return run_episode(policy_config, instance, horizon, seed, run_index)


def run_experiment(policy_config: PolicyConfig, instance: BanditInstance, horizon: int,
                   runs: int, seed: int, workers: int = 1,
                   config_echo: dict | None = None) -> ExperimentSummary:
    """Aggregate pseudo-regret over `runs` seeded episodes.

    Runs may fan out to a process pool; the reduction is ordered by run index,
    so the summary is bit-identical for any worker count.
    """
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    tasks = [(policy_config, instance, horizon, seed, run) for run in range(runs)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_episode_task, tasks, chunksize=max(1, runs // (4 * workers))))
    else:
        results = [_episode_task(t) for t in tasks]
    mean = np.zeros(horizon, dtype=np.float64)
    low = np.full(horizon, np.inf)
    high = np.full(horizon, -np.inf)
    finals = np.empty(runs, dtype=np.float64)
    for result in results:
        trace = result.pseudo_regret
        mean += trace
        np.minimum(low, trace, out=low)
        np.maximum(high, trace, out=high)
        finals[result.run_index] = trace[-1]
    mean /= runs
    # Summation round-off can push the mean an ulp outside the envelope.
    np.clip(mean, low, high, out=mean)
    return ExperimentSummary(mean_regret=mean, min_regret=low, max_regret=high,
                             final_regret_per_run=finals, runs=runs, seed=seed,
                             config_echo=dict(config_echo or {}))


def play_tape(policy, tape) -> list[int]:
    """Drive a policy with a fixed time-indexed reward tape; returns the action trace."""
    actions = []
    for r in tape:
        a = policy.select_action()
        policy.update(a, r)
        actions.append(a)
    return actions


@dataclass
class AuditResult:
    """Outcome of a one-flip neighbouring-tape audit.

    max_log_ratio is the add-one-smoothed max over (step, action) of the
    absolute log probability ratio. unbounded_events lists (step, action)
    pairs observed under one tape but never under the other, where the raw
    (unsmoothed) ratio is infinite.
    """

    max_log_ratio: float
    unbounded_events: list[tuple[int, int]]
    samples: int

    @property
    def unbounded(self) -> bool:
        return bool(self.unbounded_events)


def _sample_action_counts(policy_config, n_arms, tape, samples, rngs):
    horizon = len(tape)
    counts = np.zeros((horizon, n_arms), dtype=np.int64)
    factory = lambda arm: rngs[arm]
    for _ in range(samples):
        policy = make_policy(policy_config, n_arms, factory)
        for t, r in enumerate(tape):
            a = policy.select_action()
            policy.update(a, r)
            counts[t, a] += 1
    return counts


def empirical_privacy_audit(policy_config: PolicyConfig, n_arms: int, tape,
                            flip_index: int | None, samples: int, seed: int) -> AuditResult:
    """Monte-Carlo check of the one-flip action-distribution ratio.

    Runs the policy `samples` times on the tape and on its one-flip neighbour,
    estimates per-step marginal action probabilities, and reports the largest
    smoothed log ratio. Rewards come from the fixed tapes, never from arm
    distributions; the two estimators use disjoint noise streams.
    flip_index=None audits the tape against an identical copy (the zero-
    difference control, whose ratio should vanish up to sampling noise).
    """
    tape = [float(r) for r in tape]
    if not 1 <= len(tape) <= AUDIT_MAX_HORIZON:
        raise ValueError(f"audit horizon must lie in [1, {AUDIT_MAX_HORIZON}], got {len(tape)}")
    if any(r not in (0.0, 1.0) for r in tape):
        raise ValueError("audit tapes must be binary {0, 1} reward sequences")
    if flip_index is not None and not 0 <= flip_index < len(tape):
        raise ValueError(f"flip_index {flip_index} outside the tape")
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if samples < _AUDIT_MIN_SAMPLES:
        warnings.warn(
            f"audit with {samples} samples: log-ratio estimates will be dominated "
            f"by smoothing; use at least {_AUDIT_MIN_SAMPLES}",
            stacklevel=2)
    flipped = list(tape)
    if flip_index is not None:
        flipped[flip_index] = 1.0 - flipped[flip_index]
    base_rngs = [RngStream(seed, stream_id(0, a, ROLE_AUDIT_BASE)) for a in range(n_arms)]
    flip_rngs = [RngStream(seed, stream_id(0, a, ROLE_AUDIT_FLIP)) for a in range(n_arms)]
    counts = _sample_action_counts(policy_config, n_arms, tape, samples, base_rngs)
    counts_flip = _sample_action_counts(policy_config, n_arms, flipped, samples, flip_rngs)
    # Add-one (Laplace) smoothing over the action alphabet.
    p = (counts + 1.0) / (samples + n_arms)
    p_flip = (counts_flip + 1.0) / (samples + n_arms)
    ratios = np.abs(np.log(p) - np.log(p_flip))
    unbounded = [(int(t), int(a))
                 for t, a in zip(*np.nonzero((counts == 0) != (counts_flip == 0)))]
    return AuditResult(max_log_ratio=float(ratios.max()),
                       unbounded_events=unbounded, samples=samples)
