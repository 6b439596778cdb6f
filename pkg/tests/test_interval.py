import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpbandits import IntervalMeanState, ReleaseSchedule, RngStream, privacy_per_release, release_noise_scale


def scan_oracle(w, epsilon, v, exponent):
    # Independent plain-float scan of the checkpoint condition.
    total = 0.0
    x = w
    while True:
        x += 1
        total += x ** -exponent
        if total >= x ** -exponent / epsilon:
            return x


def test_simple_checkpoint_is_ceil_inverse():
    assert ReleaseSchedule(epsilon=0.1).next_checkpoint(0) == 10
    assert ReleaseSchedule(epsilon=0.1).next_checkpoint(10) == 20
    assert ReleaseSchedule(epsilon=1.0).f0 == 1
    assert ReleaseSchedule(epsilon=0.3).f0 == 4  # ceil(10/3)


def test_adaptive_x_first_checkpoints():
    assert ReleaseSchedule(epsilon=1.0, v=1.1, variant="adaptive-x").next_checkpoint(0) == 1
    # 1 + 2^-0.55 ~ 1.683 >= 2 * 2^-0.55 ~ 1.366 first holds at x' = 2.
    assert ReleaseSchedule(epsilon=0.5, v=1.1, variant="adaptive-x").next_checkpoint(0) == 2


@pytest.mark.parametrize("variant,exponent_of_v", [("adaptive-x", 0.5), ("adaptive-y", 1.0)])
@pytest.mark.parametrize("epsilon", [0.13, 0.25, 0.5, 1.0])
@pytest.mark.parametrize("v", [1.05, 1.1, 1.5])
def test_adaptive_checkpoints_match_scan_oracle(variant, exponent_of_v, epsilon, v):
    schedule = ReleaseSchedule(epsilon=epsilon, v=v, variant=variant)
    w = 0
    for _ in range(40):
        nxt = schedule.next_checkpoint(w)
        assert nxt == scan_oracle(w, epsilon, v, v * exponent_of_v)
        w = nxt


@pytest.mark.parametrize("variant", ["simple", "adaptive-x", "adaptive-y"])
@pytest.mark.parametrize("epsilon", [0.1, 0.25, 0.5, 1.0])
@pytest.mark.parametrize("v", [1.05, 1.1, 1.5])
def test_gaps_bounded_by_ceil_inverse(variant, epsilon, v):
    # ~10^4 checkpoints across the grid; every gap lies in [1, ceil(1/eps)].
    schedule = ReleaseSchedule(epsilon=epsilon, v=v, variant=variant)
    cap = math.ceil(1.0 / epsilon - 1e-12)
    w = 0
    for _ in range(280):
        nxt = schedule.next_checkpoint(w)
        assert 1 <= nxt - w <= cap
        w = nxt
    if variant == "simple":
        assert w == 280 * cap


def test_release_mean_noise_off():
    state = IntervalMeanState(ReleaseSchedule(epsilon=0.25))
    for v in (1.0, 1.0, 1.0, 0.0):
        state.record(v)
    assert state.due
    assert state.release(RngStream(1, 0), noise_off=True) == 0.75
    assert state.cached_release == 0.75


def test_release_noise_scales():
    assert release_noise_scale(1, 1.5) == 1.0
    # 16^-0.45, frozen from a 40-digit evaluation.
    assert release_noise_scale(16, 1.1) == pytest.approx(0.2871745887492588, rel=1e-12)


def test_privacy_per_release_values():
    assert privacy_per_release(1, 1.2) == 1.0
    assert privacy_per_release(4, 1.0) == 0.5
    assert privacy_per_release(100, 1.1) == pytest.approx(0.07943282347242815, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(min_value=1, max_value=10**6),
       v=st.floats(min_value=1.0, max_value=1.5))
def test_laplace_identity(n, v):
    # per-release epsilon * noise scale * n = 1: sensitivity of the mean is
    # 1/n and epsilon = sensitivity / scale.
    assert privacy_per_release(n, v) * release_noise_scale(n, v) * n == pytest.approx(1.0, rel=1e-12)


def test_cached_release_changes_only_at_checkpoints():
    state = IntervalMeanState(ReleaseSchedule(epsilon=0.5))  # f = 2
    rng = RngStream(3, 1)
    releases = []
    for pull in range(1, 9):
        state.record(1.0)
        before = state.cached_release
        if state.due:
            state.release(rng)
            releases.append(pull)
        else:
            assert state.cached_release == before
    assert releases == [2, 4, 6, 8]
    assert state.release_count == 4


def test_release_not_clamped():
    # A huge noise scale at n = 1 routinely pushes the release outside [0, 1].
    outside = 0
    for sid in range(64):
        state = IntervalMeanState(ReleaseSchedule(epsilon=1.0, v=1.5))
        state.record(1.0)
        value = state.release(RngStream(9, sid))
        if not 0.0 <= value <= 1.0:
            outside += 1
    assert outside > 0


def test_release_on_empty_state():
    state = IntervalMeanState(ReleaseSchedule(epsilon=0.5))
    with pytest.raises(ValueError):
        state.release(RngStream(1, 0))


def test_parameter_validation():
    with pytest.raises(ValueError):
        ReleaseSchedule(epsilon=0.0)
    with pytest.raises(ValueError):
        ReleaseSchedule(epsilon=1.5)
    with pytest.raises(ValueError):
        ReleaseSchedule(epsilon=0.5, v=1.0)
    with pytest.raises(ValueError):
        ReleaseSchedule(epsilon=0.5, v=1.6)
    with pytest.raises(ValueError):
        ReleaseSchedule(epsilon=0.5, variant="fibonacci")
    with pytest.raises(ValueError):
        privacy_per_release(0, 1.1)
    with pytest.raises(ValueError):
        privacy_per_release(4, 1.6)
    with pytest.raises(ValueError):
        release_noise_scale(0, 1.1)
