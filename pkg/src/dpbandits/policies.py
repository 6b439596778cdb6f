"""UCB-family bandit policies: plain UCB plus three differentially private variants.

All four share the same skeleton: a round-robin initialisation phase followed
by greedy selection on per-arm optimistic indices, ties broken by lowest arm
index. They differ in how the mean estimate reaches the index:

* ``ucb``            -- true empirical mean.
* ``dp-ucb-bound``   -- noisy running sum from a per-arm hybrid mechanism,
  plus an explicit bonus covering the mechanism's noise.
* ``dp-ucb``         -- same noisy sums, but every step also inserts 0 into
  every other arm's mechanism so all arms share one noise level and no bonus
  is needed.
* ``dp-ucb-int``     -- noisy mean released lazily every f pulls with noise
  scale n^(v/2-1); the confidence radius sqrt(2 ln t / n) stays a deterministic
  function of public counts and is recomputed at selection time.

Step counts t are 1-based and ln(t) is evaluated at the step being selected.
"""

import math
from dataclasses import dataclass

from .continual import HybridMechanism
from .interval import SCHEDULE_VARIANTS, IntervalMeanState, ReleaseSchedule
from .noise import RngStream

VARIANTS = ("ucb", "dp-ucb-bound", "dp-ucb", "dp-ucb-int")

_SQRT8 = math.sqrt(8.0)


def argmax_lowest(values) -> int:
    """Index of the maximum, lowest index on ties."""
    best = -math.inf
    pick = 0
    for i, v in enumerate(values):
        if v > best:
            best = v
            pick = i
    return pick


def nu_bonus(n_a: int, t: int, epsilon: float) -> float:
    """Index bonus covering the hybrid mechanism's noise on one arm's sum.

    (sqrt(8)/epsilon) * ln(4t^4) when n_a is a power of two (a fresh total was
    just released, so only one Laplace term is live; n_a = 1 counts as 2^0),
    otherwise the same base times (ln(n_a) + 1).
    """
    if not (isinstance(n_a, int) and n_a >= 1):
        raise ValueError(f"n_a must be an integer >= 1, got {n_a!r}")
    if not t >= 1:
        raise ValueError(f"t must be >= 1, got {t}")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    base = _SQRT8 / epsilon * math.log(4.0 * float(t) ** 4)
    if n_a & (n_a - 1) == 0:
        return base
    return base * math.log(n_a) + base


@dataclass(frozen=True)
class PolicyConfig:
    """Which policy to run and its mechanism-level parameters.

    noise_off and force_nu_zero are test-only hooks: they zero all release
    noise (for oracle equivalence checks) and drop the dp-ucb-bound privacy
    bonus; neither belongs in a production run.
    """

    kind: str
    epsilon: float | None = None
    v: float = 1.1
    schedule: str = "simple"
    noise_off: bool = False
    force_nu_zero: bool = False

    def __post_init__(self):
        if self.kind not in VARIANTS:
            raise ValueError(f"kind must be one of {VARIANTS}, got {self.kind!r}")
        if self.kind == "ucb":
            if self.epsilon is not None:
                raise ValueError("ucb takes no epsilon")
        else:
            if self.epsilon is None or not self.epsilon > 0:
                raise ValueError(f"{self.kind} needs a positive epsilon, got {self.epsilon}")
        if self.kind == "dp-ucb-int":
            if not self.epsilon <= 1.0:
                raise ValueError(f"dp-ucb-int needs epsilon in (0, 1], got {self.epsilon}")
            if not 1.0 < self.v <= 1.5:
                raise ValueError(f"v must lie in (1, 1.5], got {self.v}")
            if self.schedule not in SCHEDULE_VARIANTS:
                raise ValueError(
                    f"schedule must be one of {SCHEDULE_VARIANTS}, got {self.schedule!r}")


class _IndexPolicy:
    """Round-robin initialisation, then argmax over per-arm indices."""

    init_steps: int

    def __init__(self, n_arms: int):
        if n_arms < 1:
            raise ValueError(f"need at least one arm, got {n_arms}")
        self.n_arms = n_arms
        self.t = 0
        self.pulls = [0] * n_arms
        self.reward_sums = [0.0] * n_arms

    def select_action(self) -> int:
        step = self.t + 1
        if step <= self.init_steps:
            return (step - 1) % self.n_arms
        ln_t = math.log(step)
        best = -math.inf
        pick = 0
        for a in range(self.n_arms):
            v = self._index(a, step, ln_t)
            if v > best:
                best = v
                pick = a
        return pick

    def update(self, arm: int, reward: float) -> None:
        if not 0 <= arm < self.n_arms:
            raise ValueError(f"arm index {arm} out of range for {self.n_arms} arms")
        if not 0.0 <= reward <= 1.0:
            raise ValueError(f"reward {reward} outside [0, 1]")
        self.t += 1
        self.pulls[arm] += 1
        self.reward_sums[arm] += reward
        self._absorb(arm, reward)

    def _index(self, arm: int, step: int, ln_t: float) -> float:
        raise NotImplementedError

    def _absorb(self, arm: int, reward: float) -> None:
        raise NotImplementedError


class UcbPolicy(_IndexPolicy):
    """Non-private UCB: empirical mean + sqrt(2 ln t / n)."""

    kind = "ucb"

    def __init__(self, n_arms: int):
        super().__init__(n_arms)
        self.init_steps = n_arms

    def _index(self, arm, step, ln_t):
        n = self.pulls[arm]
        return self.reward_sums[arm] / n + math.sqrt(2.0 * ln_t / n)

    def _absorb(self, arm, reward):
        pass


class DpUcbBoundPolicy(_IndexPolicy):
    """Hybrid-mechanism sums with the explicit privacy bonus nu/n.

    Each arm owns an independent mechanism at the full epsilon: one reward
    flip touches a single mechanism, so budgets are not split across arms.
    """

    kind = "dp-ucb-bound"

    def __init__(self, n_arms: int, epsilon: float, rngs: list[RngStream],
                 noise_off: bool = False, force_nu_zero: bool = False):
        super().__init__(n_arms)
        if len(rngs) != n_arms:
            raise ValueError(f"need one rng stream per arm, got {len(rngs)} for {n_arms}")
        self.init_steps = n_arms
        self.epsilon = epsilon
        self.mechanisms = [HybridMechanism(epsilon, noise_off=noise_off) for _ in range(n_arms)]
        self.rngs = rngs
        self.force_nu_zero = force_nu_zero

    def _index(self, arm, step, ln_t):
        n = self.pulls[arm]
        mean = self.mechanisms[arm].query() / n
        radius = math.sqrt(2.0 * ln_t / n)
        if self.force_nu_zero:
            return mean + radius
        return mean + radius + nu_bonus(n, step, self.epsilon) / n

    def _absorb(self, arm, reward):
        self.mechanisms[arm].insert(reward, self.rngs[arm])


class DpUcbPolicy(DpUcbBoundPolicy):
    """Zero-insertion variant: no bonus, every mechanism grows every step.

    Inserting 0 into the other arms' mechanisms leaves their sums unchanged
    but keeps all noise levels equal; their pull counts are not touched.
    """

    kind = "dp-ucb"

    def __init__(self, n_arms: int, epsilon: float, rngs: list[RngStream],
                 noise_off: bool = False):
        super().__init__(n_arms, epsilon, rngs, noise_off=noise_off, force_nu_zero=True)

    def _absorb(self, arm, reward):
        for a, mech in enumerate(self.mechanisms):
            mech.insert(reward if a == arm else 0.0, self.rngs[a])


class DpUcbIntPolicy(_IndexPolicy):
    """Interval-release policy: lazily refreshed noisy means.

    The initialisation phase plays round-robin for n_arms * f0 steps so every
    arm enters the greedy phase with one cached release. An arm's noisy mean
    is re-released only when its own pull count crosses a schedule checkpoint;
    the sqrt(2 ln t / n) radius is public information and recomputed fresh at
    every selection.
    """

    kind = "dp-ucb-int"

    def __init__(self, n_arms: int, epsilon: float, v: float, rngs: list[RngStream],
                 schedule: str = "simple", noise_off: bool = False):
        super().__init__(n_arms)
        if len(rngs) != n_arms:
            raise ValueError(f"need one rng stream per arm, got {len(rngs)} for {n_arms}")
        self.schedule = ReleaseSchedule(epsilon=epsilon, v=v, variant=schedule)
        self.states = [IntervalMeanState(self.schedule) for _ in range(n_arms)]
        self.rngs = rngs
        self.noise_off = noise_off
        self.init_steps = n_arms * self.schedule.f0

    @property
    def epsilon(self):
        return self.schedule.epsilon

    def _index(self, arm, step, ln_t):
        n = self.pulls[arm]
        return self.states[arm].cached_release + math.sqrt(2.0 * ln_t / n)

    def _absorb(self, arm, reward):
        state = self.states[arm]
        state.record(reward)
        if state.due:
            state.release(self.rngs[arm], noise_off=self.noise_off)


def make_policy(config: PolicyConfig, n_arms: int, rng_factory=None):
    """Build the configured policy; rng_factory(arm) supplies per-arm streams."""
    if config.kind == "ucb":
        return UcbPolicy(n_arms)
    if rng_factory is None:
        raise ValueError(f"{config.kind} needs an rng_factory for its noise streams")
    rngs = [rng_factory(a) for a in range(n_arms)]
    if config.kind == "dp-ucb-bound":
        return DpUcbBoundPolicy(n_arms, config.epsilon, rngs, noise_off=config.noise_off,
                                force_nu_zero=config.force_nu_zero)
    if config.kind == "dp-ucb":
        return DpUcbPolicy(n_arms, config.epsilon, rngs, noise_off=config.noise_off)
    return DpUcbIntPolicy(n_arms, config.epsilon, config.v, rngs,
                          schedule=config.schedule, noise_off=config.noise_off)
