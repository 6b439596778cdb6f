import math

import numpy as np
import pytest

from dpbandits import (
    BanditInstance,
    PolicyConfig,
    RngStream,
    empirical_privacy_audit,
    run_episode,
    run_experiment,
    total_privacy_exact,
)
from dpbandits.accountant import PrivacySpec
from dpbandits.harness import ROLE_REWARD, TEN_ARM_MEANS, TWO_ARM_MEANS, stream_id

UCB = PolicyConfig(kind="ucb")
TWO_ARMS = BanditInstance(means=TWO_ARM_MEANS)


def test_scenario_constants_match_experiment_setup():
    assert TWO_ARM_MEANS == (0.9, 0.6)
    assert len(TEN_ARM_MEANS) == 10
    assert sorted(TEN_ARM_MEANS, reverse=True)[:2] == [0.55, 0.2]
    assert TEN_ARM_MEANS.count(0.1) == 8


def test_single_arm_has_zero_pseudo_regret():
    result = run_episode(UCB, BanditInstance(means=(0.35,)), 200, seed=1)
    assert np.all(result.pseudo_regret == 0.0)


def test_deterministic_arms_trace_matches_hand_stepped_oracle():
    # Arms {1.0, 0.0} pay deterministically, so a plain re-implementation of
    # the UCB recursion predicts the entire action trace.
    instance = BanditInstance(means=(1.0, 0.0))
    result = run_episode(UCB, instance, 100, seed=3)

    pulls = [0, 0]
    sums = [0.0, 0.0]
    expected = []
    for t in range(1, 101):
        if t <= 2:
            arm = t - 1
        else:
            best, arm = -math.inf, 0
            for a in (0, 1):
                index = sums[a] / pulls[a] + math.sqrt(2 * math.log(t) / pulls[a])
                if index > best:
                    best, arm = index, a
        pulls[arm] += 1
        sums[arm] += 1.0 if arm == 0 else 0.0
        expected.append(arm)
    assert result.actions.tolist() == expected
    # The suboptimal arm is pulled only logarithmically often.
    assert pulls[1] <= 8 * math.log(100) + 10


def test_identical_seeds_identical_runs():
    a = run_episode(PolicyConfig(kind="dp-ucb", epsilon=1.0), TWO_ARMS, 500, seed=42)
    b = run_episode(PolicyConfig(kind="dp-ucb", epsilon=1.0), TWO_ARMS, 500, seed=42)
    assert np.array_equal(a.actions, b.actions)
    assert np.array_equal(a.rewards, b.rewards)
    assert np.array_equal(a.pseudo_regret, b.pseudo_regret)
    assert np.array_equal(a.empirical_regret, b.empirical_regret)


def test_pseudo_regret_equals_gap_weighted_counts():
    for config in (UCB, PolicyConfig(kind="dp-ucb-int", epsilon=0.5)):
        result = run_episode(config, TWO_ARMS, 400, seed=9)
        counts = np.bincount(result.actions, minlength=2)
        expected = sum(g * c for g, c in zip(TWO_ARMS.gaps, counts))
        assert result.pseudo_regret[-1] == pytest.approx(expected, abs=1e-9)
        assert np.all(np.diff(result.pseudo_regret) >= -1e-12)


def test_horizon_shorter_than_init_phase():
    config = PolicyConfig(kind="dp-ucb-int", epsilon=0.1)  # f = 10, init = 20
    with pytest.raises(ValueError):
        run_episode(config, TWO_ARMS, 15, seed=1)


def test_reward_streams_depend_only_on_arm_draws():
    # The k-th reward of an arm is a fixed function of (seed, run, arm).
    draws = RngStream(11, stream_id(0, 0, ROLE_REWARD)).uniforms(50)
    result = run_episode(UCB, BanditInstance(means=(0.5, 0.0)), 50, seed=11)
    pulls_of_zero = np.flatnonzero(result.actions == 0)
    expected = (draws[: len(pulls_of_zero)] < 0.5).astype(float)
    assert np.array_equal(result.rewards[pulls_of_zero], expected)


def test_experiment_single_run_collapses():
    summary = run_experiment(UCB, TWO_ARMS, 300, runs=1, seed=5)
    assert np.array_equal(summary.mean_regret, summary.min_regret)
    assert np.array_equal(summary.mean_regret, summary.max_regret)
    assert summary.final_spread == 0.0


def test_experiment_pointwise_envelope_and_determinism():
    summary = run_experiment(UCB, TWO_ARMS, 400, runs=8, seed=6)
    assert np.all(summary.min_regret <= summary.mean_regret + 1e-12)
    assert np.all(summary.mean_regret <= summary.max_regret + 1e-12)
    again = run_experiment(UCB, TWO_ARMS, 400, runs=8, seed=6)
    assert np.array_equal(summary.mean_regret, again.mean_regret)
    assert np.array_equal(summary.final_regret_per_run, again.final_regret_per_run)


def test_worker_count_does_not_change_results():
    sequential = run_experiment(PolicyConfig(kind="dp-ucb", epsilon=1.0), TWO_ARMS, 300,
                                runs=6, seed=7, workers=1)
    parallel = run_experiment(PolicyConfig(kind="dp-ucb", epsilon=1.0), TWO_ARMS, 300,
                              runs=6, seed=7, workers=2)
    assert np.array_equal(sequential.mean_regret, parallel.mean_regret)
    assert np.array_equal(sequential.min_regret, parallel.min_regret)
    assert np.array_equal(sequential.max_regret, parallel.max_regret)


def test_mean_empirical_regret_converges_to_pseudo():
    # Both notions share the same expectation; with 200 runs the gap stays
    # within three standard errors of the per-run differences.
    diffs = []
    for run in range(200):
        result = run_episode(UCB, TWO_ARMS, 1500, seed=13, run_index=run)
        diffs.append(result.empirical_regret[-1] - result.pseudo_regret[-1])
    diffs = np.asarray(diffs)
    se = diffs.std(ddof=1) / math.sqrt(len(diffs))
    assert abs(diffs.mean()) <= 3 * se


def test_audit_zero_difference_tapes():
    # Identical tapes: the two estimators sample one distribution, so the max
    # log ratio vanishes up to Monte-Carlo noise.
    config = PolicyConfig(kind="dp-ucb-int", epsilon=1.0)
    result = empirical_privacy_audit(config, 2, [1.0, 0.0, 1.0, 1.0], flip_index=None,
                                     samples=100_000, seed=21)
    assert result.max_log_ratio <= 0.05
    assert not result.unbounded


def test_audit_noisy_policy_within_accountant_budget():
    config = PolicyConfig(kind="dp-ucb-int", epsilon=1.0, v=1.1)
    tape = [1.0, 0.0, 1.0, 1.0]
    result = empirical_privacy_audit(config, 2, tape, flip_index=1, samples=200_000, seed=23)
    spec = PrivacySpec(epsilon=1.0, v=1.1, target_delta=math.exp(-10))
    budget = total_privacy_exact(len(tape), spec)
    assert result.max_log_ratio <= budget + 0.1
    assert not result.unbounded


def test_audit_flags_non_private_policy():
    # Noise-off UCB is deterministic given the tape: a one-flip neighbour can
    # produce actions the base tape never produces, an infinite raw ratio.
    config = PolicyConfig(kind="ucb")
    result = empirical_privacy_audit(config, 2, [1.0, 0.0, 0.0, 1.0], flip_index=0,
                                     samples=2_000, seed=29)
    assert result.unbounded
    assert result.unbounded_events
    assert result.max_log_ratio > 0.0


def test_audit_validation_and_warning():
    config = PolicyConfig(kind="ucb")
    with pytest.raises(ValueError):
        empirical_privacy_audit(config, 2, [1.0] * 7, flip_index=0, samples=10, seed=1)
    with pytest.raises(ValueError):
        empirical_privacy_audit(config, 2, [0.5, 1.0], flip_index=0, samples=10, seed=1)
    with pytest.raises(ValueError):
        empirical_privacy_audit(config, 2, [1.0, 0.0], flip_index=5, samples=10, seed=1)
    with pytest.warns(UserWarning):
        empirical_privacy_audit(config, 2, [1.0, 0.0], flip_index=0, samples=50, seed=1)


def test_instance_validation():
    with pytest.raises(ValueError):
        BanditInstance(means=())
    with pytest.raises(ValueError):
        BanditInstance(means=(0.5, 1.3))
    with pytest.raises(ValueError):
        run_experiment(UCB, TWO_ARMS, 100, runs=0, seed=1)
