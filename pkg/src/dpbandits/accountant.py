"""Privacy composition accounting for the interval-release policy.

The per-release privacy of arm means decays as n^(-v/2); composing every step
of a run (a conservative upper bound on the lazy schedule's true release set)
gives the run-level (eps', delta') guarantee. Both the exact composition sums
and the closed zeta-based forms are provided, together with the inversion that
calibrates the mechanism-level epsilon to a target (eps', delta').
"""

import math
from dataclasses import dataclass
from functools import lru_cache


@lru_cache(maxsize=None)
def zeta(v: float, tol: float = 1e-9) -> float:
    """Riemann zeta(v) for v > 1 to absolute error <= tol.

    Partial sum of N terms plus the integral-test tail N^(1-v)/(v-1), with the
    next two Euler-Maclaurin corrections so N stays small as v -> 1. N is
    chosen adaptively from the magnitude of the first omitted correction.
    """
    if not v > 1.0:
        raise ValueError(f"zeta diverges for v <= 1, got {v}")
    if not (tol > 0 and math.isfinite(tol)):
        raise ValueError(f"tol must be a positive finite real, got {tol}")
    n = 64
    while n ** -(v + 2.0) > 0.1 * tol and n < 2**24:
        n *= 2
    partial = math.fsum(k ** -v for k in range(1, n + 1))
    tail = n ** (1.0 - v) / (v - 1.0) - 0.5 * n ** -v + v / 12.0 * n ** -(v + 1.0)
    return partial + tail


@dataclass(frozen=True)
class PrivacySpec:
    """Mechanism-level budget and the run-level target it composes to.

    epsilon is the per-mechanism parameter in (0, 1], v the noise-decay
    exponent in (1, 1.5]; target_delta is the delta' of the composed
    guarantee and target_epsilon the eps' when the spec was calibrated from
    a target rather than given directly.
    """

    epsilon: float
    v: float
    target_delta: float = 1.0
    target_epsilon: float | None = None

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if not 1.0 < self.v <= 1.5:
            raise ValueError(f"v must lie in (1, 1.5], got {self.v}")
        if not 0.0 < self.target_delta <= 1.0:
            raise ValueError(f"target_delta must lie in (0, 1], got {self.target_delta}")
        if self.target_epsilon is not None and not 0.0 < self.target_epsilon <= 1.0:
            raise ValueError(f"target_epsilon must lie in (0, 1], got {self.target_epsilon}")

    @classmethod
    def from_target(cls, target_epsilon: float, target_delta: float, v: float) -> "PrivacySpec":
        """Spec whose mechanism epsilon is calibrated to meet (eps', delta')."""
        eps = calibrate_epsilon(target_epsilon, target_delta, v)
        return cls(epsilon=eps, v=v, target_delta=target_delta, target_epsilon=target_epsilon)


def _check_t(t):
    if not (isinstance(t, int) and t >= 1):
        raise ValueError(f"t must be an integer >= 1, got {t!r}")


def total_privacy_exact(t: int, spec: PrivacySpec) -> float:
    """Composed eps' after t steps via the exact term-by-term sums.

    Returns min of the basic composition sum(eps * n^(-v/2)) and the advanced
    branch eps * sum(n^(-v/2) * (e^(n^(-v/2)) - 1))
    + sqrt(eps * 2 ln(1/delta') * sum(n^(-v))).
    """
    _check_t(t)
    eps, v = spec.epsilon, spec.v
    log_inv_delta = -math.log(spec.target_delta)
    half = 0.5 * v
    simple = eps * math.fsum(n ** -half for n in range(1, t + 1))
    linear = math.fsum((x := n ** -half) * math.expm1(x) for n in range(1, t + 1))
    quadratic = math.fsum(n ** -v for n in range(1, t + 1))
    advanced = eps * linear + math.sqrt(eps * 2.0 * log_inv_delta * quadratic)
    return min(simple, advanced)


def total_privacy_closed(spec: PrivacySpec, t: int) -> float:
    """Closed-form upper bound on the composed eps' after t steps.

    min of the integral-test bound eps*(t^(1-v/2) - v/2)/(1 - v/2) and the
    zeta branch 2*eps*zeta(v) + sqrt(2*eps*zeta(v)*ln(1/delta')).
    """
    _check_t(t)
    eps, v = spec.epsilon, spec.v
    if v == 2.0:  # unreachable through PrivacySpec validation
        raise ValueError("v = 2 zeroes the integral-test denominator")
    log_inv_delta = -math.log(spec.target_delta)
    integral = eps * (t ** (1.0 - 0.5 * v) - 0.5 * v) / (1.0 - 0.5 * v)
    z = zeta(v)
    zeta_branch = 2.0 * eps * z + math.sqrt(2.0 * eps * z * log_inv_delta)
    return min(integral, zeta_branch)


def calibrate_epsilon(target_epsilon: float, target_delta: float, v: float) -> float:
    """Mechanism-level epsilon whose composed zeta branch equals the target eps'.

    Exact algebraic inverse of 2*eps*zeta(v) + sqrt(2*eps*zeta(v)*ln(1/delta'))
    = eps'.
    """
    if not 0.0 < target_epsilon <= 1.0:
        raise ValueError(f"target_epsilon must lie in (0, 1], got {target_epsilon}")
    if not 0.0 < target_delta <= 1.0:
        raise ValueError(f"target_delta must lie in (0, 1], got {target_delta}")
    if not 1.0 < v <= 1.5:
        raise ValueError(f"v must lie in (1, 1.5], got {v}")
    z = zeta(v)
    log_inv_delta = -math.log(target_delta)
    root = math.sqrt((log_inv_delta + 4.0 * target_epsilon) / (8.0 * z)) \
        - math.sqrt(log_inv_delta / (8.0 * z))
    return root * root
