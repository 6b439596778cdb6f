"""Lazy interval release of private means.

An arm's noisy mean is recomputed only when its pull count reaches the next
checkpoint of a release schedule; each release adds Laplace noise of scale
n^(v/2-1), which is n^(-v/2)-DP for the mean of n rewards in [0, 1]. Between
checkpoints the cached release is reused, so no privacy is spent.
"""

import math
from dataclasses import dataclass

from .noise import LaplaceParams, RngStream, sample_laplace

SCHEDULE_VARIANTS = ("simple", "adaptive-x", "adaptive-y")


def _ceil_inverse(epsilon: float) -> int:
    # The 1e-12 slack absorbs float error when 1/epsilon sits on an integer.
    return math.ceil(1.0 / epsilon - 1e-12)


def _check_epsilon(epsilon):
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")


def _check_v(v):
    if not 1.0 < v <= 1.5:
        raise ValueError(f"v must lie in (1, 1.5], got {v}")


@dataclass(frozen=True)
class ReleaseSchedule:
    """Checkpoint sequence W_0 = 0 < W_1 < ... in pull-count space.

    Every gap W_{n+1} - W_n lies in [1, ceil(1/epsilon)]. The simple variant
    uses the constant gap ceil(1/epsilon); the adaptive variants scan for the
    earliest next checkpoint that keeps the composed privacy budget on track
    (one of the two scan rules is used for an entire run, never mixed).
    """

    epsilon: float
    v: float = 1.1
    variant: str = "simple"

    def __post_init__(self):
        _check_epsilon(self.epsilon)
        _check_v(self.v)
        if self.variant not in SCHEDULE_VARIANTS:
            raise ValueError(
                f"variant must be one of {SCHEDULE_VARIANTS}, got {self.variant!r}")

    @property
    def f0(self) -> int:
        """First release gap; at most ceil(1/epsilon)."""
        return self.next_checkpoint(0)

    def next_checkpoint(self, w: int) -> int:
        """Checkpoint following w (w itself must be a checkpoint or 0)."""
        if w < 0:
            raise ValueError(f"checkpoint must be nonnegative, got {w}")
        if self.variant == "simple":
            return w + _ceil_inverse(self.epsilon)
        exponent = self.v / 2.0 if self.variant == "adaptive-x" else self.v
        cap = w + _ceil_inverse(self.epsilon)
        total = 0.0
        comp = 0.0  # Kahan compensation; the partial sums are long for small epsilon
        i = w
        while True:
            i += 1
            term = float(i) ** -exponent
            y = term - comp
            t = total + y
            comp = (t - total) - y
            total = t
            # Stop once the window sum covers (1/epsilon) times the current
            # term; guaranteed no later than the cap since terms decrease.
            if total >= term / self.epsilon or i >= cap:
                return i


def release_noise_scale(n: int, v: float) -> float:
    """Laplace scale n^(v/2-1) used for the n-th-pull mean release."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return float(n) ** (v / 2.0 - 1.0)


def privacy_per_release(n: int, v: float) -> float:
    """Per-release privacy n^(-v/2): mean sensitivity 1/n over noise scale n^(v/2-1).

    v = 1 is accepted for the bare formula even though schedules require v > 1.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 1.0 <= v <= 1.5:
        raise ValueError(f"v must lie in [1, 1.5], got {v}")
    return float(n) ** (-v / 2.0)


class IntervalMeanState:
    """Per-arm running sum with a noisy mean cached at schedule checkpoints."""

    __slots__ = ("schedule", "reward_sum", "pulls", "cached_release", "release_count",
                 "_next_w")

    def __init__(self, schedule: ReleaseSchedule):
        self.schedule = schedule
        self.reward_sum = 0.0
        self.pulls = 0
        self.cached_release: float | None = None
        self.release_count = 0
        self._next_w = schedule.next_checkpoint(0)

    def record(self, reward: float) -> None:
        """Absorb one reward in [0, 1] (validated by the policy layer)."""
        self.pulls += 1
        self.reward_sum += reward

    @property
    def due(self) -> bool:
        """True when the pull count sits on the next release checkpoint."""
        return self.pulls == self._next_w

    def release(self, rng: RngStream, noise_off: bool = False) -> float:
        """Release and cache the noisy mean: sum/n + Laplace(n^(v/2-1)).

        The result is intentionally not clamped to [0, 1]. Meant to be called
        at checkpoints; the schedule position only advances then.
        """
        if self.pulls == 0:
            raise ValueError("release on an arm with no observations")
        value = self.reward_sum / self.pulls
        if not noise_off:
            scale = release_noise_scale(self.pulls, self.schedule.v)
            value += sample_laplace(LaplaceParams(scale=scale), rng)
        self.cached_release = value
        self.release_count += 1
        if self.pulls == self._next_w:
            self._next_w = self.schedule.next_checkpoint(self._next_w)
        return value
