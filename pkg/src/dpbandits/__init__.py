"""Differentially private UCB bandits: mechanisms, policies, accounting, simulation."""

from .accountant import PrivacySpec, calibrate_epsilon, total_privacy_closed, total_privacy_exact, zeta
from .bounds import (
    GapProfile,
    lambert_w_neg1_approx,
    regret_bound_dpucb,
    regret_bound_dpucb_bound,
    regret_bound_interval,
    regret_bound_ucb,
)
from .continual import BinaryMechanism, HybridMechanism, hybrid_error_bound
from .harness import (
    AuditResult,
    BanditInstance,
    ExperimentSummary,
    RunResult,
    empirical_privacy_audit,
    play_tape,
    run_episode,
    run_experiment,
)
from .interval import IntervalMeanState, ReleaseSchedule, privacy_per_release, release_noise_scale
from .noise import LaplaceParams, RngStream, laplace_inverse_cdf, laplace_tail_threshold, sample_laplace
from .policies import (
    DpUcbBoundPolicy,
    DpUcbIntPolicy,
    DpUcbPolicy,
    PolicyConfig,
    UcbPolicy,
    make_policy,
    nu_bonus,
)

__version__ = "0.1.0"

__all__ = [
    "AuditResult",
    "BanditInstance",
    "BinaryMechanism",
    "DpUcbBoundPolicy",
    "DpUcbIntPolicy",
    "DpUcbPolicy",
    "ExperimentSummary",
    "GapProfile",
    "HybridMechanism",
    "IntervalMeanState",
    "LaplaceParams",
    "PolicyConfig",
    "PrivacySpec",
    "ReleaseSchedule",
    "RngStream",
    "RunResult",
    "UcbPolicy",
    "calibrate_epsilon",
    "empirical_privacy_audit",
    "hybrid_error_bound",
    "lambert_w_neg1_approx",
    "laplace_inverse_cdf",
    "laplace_tail_threshold",
    "make_policy",
    "nu_bonus",
    "play_tape",
    "privacy_per_release",
    "regret_bound_dpucb",
    "regret_bound_dpucb_bound",
    "regret_bound_interval",
    "regret_bound_ucb",
    "release_noise_scale",
    "run_episode",
    "run_experiment",
    "sample_laplace",
    "total_privacy_closed",
    "total_privacy_exact",
    "zeta",
]
