"""Seeded uniform streams and Laplace sampling primitives.

Every stochastic component in this package draws through an :class:`RngStream`,
so a simulation is fully determined by its (seed, stream_id) pairs. Streams are
backed by counter-based Philox generators keyed on the pair: distinct stream
ids give statistically independent sequences and identical pairs reproduce the
identical sequence on any platform.
"""

import math
from dataclasses import dataclass

import numpy as np

_U64 = 2**64
# Substituted for a zero uniform so the inverse CDF stays finite (measure-zero event).
_TINY = 2.0**-53


class RngStream:
    """One independently seeded uniform stream.

    A stream is single-owner: it is never shared between concurrent tasks.
    The harness derives one stream per (run, arm, mechanism role).
    """

    __slots__ = ("seed", "stream_id", "_random")

    def __init__(self, seed: int, stream_id: int = 0):
        for name, value in (("seed", seed), ("stream_id", stream_id)):
            if not isinstance(value, int) or not 0 <= value < _U64:
                raise ValueError(f"{name} must be an integer in [0, 2**64), got {value!r}")
        self.seed = seed
        self.stream_id = stream_id
        key = np.array([seed, stream_id], dtype=np.uint64)
        self._random = np.random.Generator(np.random.Philox(key=key)).random

    def uniform(self) -> float:
        """One uniform draw in [0, 1)."""
        return self._random()

    def uniforms(self, n: int) -> np.ndarray:
        """`n` uniform draws; consumes the same stream positions as `n` scalar draws."""
        return self._random(n)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


@dataclass(frozen=True)
class LaplaceParams:
    """Location/scale of a Laplace distribution; scale must be positive."""

    scale: float
    location: float = 0.0

    def __post_init__(self):
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError(f"scale must be a positive finite real, got {self.scale}")
        if not math.isfinite(self.location):
            raise ValueError(f"location must be finite, got {self.location}")


def laplace_inverse_cdf(params: LaplaceParams, u: float) -> float:
    """Map one uniform draw u in [0, 1) to a Laplace variate.

    u = 0.5 maps exactly to the location (the distribution's median).
    """
    if not 0.0 <= u < 1.0:
        raise ValueError(f"uniform draw must lie in [0, 1), got {u}")
    if u >= 0.5:
        inner = 2.0 * (1.0 - u)
        sign = 1.0
    else:
        inner = 2.0 * u
        sign = -1.0
    if inner <= 0.0:
        inner = _TINY
    return params.location - params.scale * sign * math.log(inner)


def sample_laplace(params: LaplaceParams, rng: RngStream, size: int | None = None):
    """Draw from Laplace(location, scale) by inverse CDF.

    Consumes exactly one uniform per variate, which is what makes replaying a
    stream reproduce the exact noise sequence. With `size` set, returns an
    ndarray computed from the same stream positions as repeated scalar calls.
    """
    if size is None:
        return laplace_inverse_cdf(params, rng.uniform())
    u = rng.uniforms(size)
    inner = np.where(u >= 0.5, 2.0 * (1.0 - u), 2.0 * u)
    sign = np.where(u >= 0.5, 1.0, -1.0)
    np.maximum(inner, _TINY, out=inner)
    return params.location - params.scale * sign * np.log(inner)


def laplace_tail_threshold(scale: float, gamma: float) -> float:
    """Threshold x with Pr(|Y| >= x) = gamma for Y ~ Laplace(scale), i.e. scale*ln(1/gamma)."""
    if not (scale > 0 and math.isfinite(scale)):
        raise ValueError(f"scale must be a positive finite real, got {scale}")
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    return scale * math.log(1.0 / gamma)
