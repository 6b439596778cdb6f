"""Streaming epsilon-DP running sums: binary-tree blocks, logarithm releases,
and the hybrid of the two, plus the tightened high-probability error bound.

The hybrid mechanism continually releases the running sum of a stream of
statistics in [0, 1]. At item counts 2^k it releases a fresh noisy total
(true sum + Laplace(1/epsilon)); between powers of two it covers the current
block [2^k, 2^{k+1}) with a binary tree whose nodes each receive one Laplace
draw when their span completes, so any query combines at most
log2(block) + 1 noise terms and is deterministic between inserts.
"""

import math

from .noise import LaplaceParams, RngStream, sample_laplace


class BinaryMechanism:
    """Noisy prefix sums over one fixed-length block of [0, 1] statistics.

    Per-node noise scale is ceil(log2(m))/epsilon for block length m, the
    standard split of the epsilon budget across tree levels. Noise is drawn
    once when a node's span completes and cached; prefix queries then add the
    cached noisy sums of the nodes covering the prefix (one per set bit of the
    item count), so repeated queries return the identical value.
    """

    __slots__ = (
        "epsilon",
        "block_length",
        "depth",
        "noise_scale",
        "items_seen",
        "_open_true",
        "_frontier_noisy",
        "_noise_off",
        "_items",
    )

    def __init__(self, epsilon: float, block_length: int, noise_off: bool = False,
                 track_items: bool = False):
        if not (epsilon > 0 and math.isfinite(epsilon)):
            raise ValueError(f"epsilon must be a positive finite real, got {epsilon}")
        if block_length < 1 or block_length & (block_length - 1) != 0:
            raise ValueError(f"block_length must be a power of two >= 1, got {block_length}")
        self.epsilon = epsilon
        self.block_length = block_length
        self.depth = block_length.bit_length() - 1
        self.noise_scale = self.depth / epsilon
        self.items_seen = 0
        # Per level l: true sum of the open span of 2^l items, and the cached
        # noisy sum of the last completed node at that level.
        self._open_true = [0.0] * (self.depth + 1)
        self._frontier_noisy = [0.0] * (self.depth + 1)
        self._noise_off = noise_off
        # Raw item values, kept only in test mode for node-sum introspection.
        self._items = [] if track_items else None

    def insert(self, r: float, rng: RngStream) -> None:
        if not 0.0 <= r <= 1.0:
            raise ValueError(f"statistic {r} outside [0, 1] violates the sensitivity assumption")
        if self.items_seen >= self.block_length:
            raise ValueError("block is full")
        self.items_seen += 1
        i = self.items_seen
        if self._items is not None:
            self._items.append(r)
        # The node completing at item i spans the last 2^level items, where
        # level counts the trailing zero bits of i.
        level = (i & -i).bit_length() - 1
        opened = self._open_true
        true_sum = r
        for l in range(level):
            true_sum += opened[l]
            opened[l] = 0.0
        opened[level] = true_sum
        if self._noise_off or self.noise_scale == 0.0:
            noisy = true_sum
        else:
            noisy = true_sum + sample_laplace(LaplaceParams(scale=self.noise_scale), rng)
        self._frontier_noisy[level] = noisy

    def prefix_sum(self) -> float:
        """Noisy sum of all items inserted so far; deterministic between inserts."""
        total = 0.0
        i = self.items_seen
        frontier = self._frontier_noisy
        while i:
            level = (i & -i).bit_length() - 1
            total += frontier[level]
            i &= i - 1
        return total

    def noise_terms_in_prefix(self) -> int:
        """Number of Laplace draws contributing to the current prefix query."""
        return self.items_seen.bit_count()

    def completed_node_sums(self) -> dict[tuple[int, int], float]:
        """True span sums of every completed node; requires track_items mode.

        Keyed by (level, index) with 1-based index; a node at level l covers
        items ((index-1)*2^l, index*2^l].
        """
        if self._items is None:
            raise ValueError("node introspection requires track_items=True")
        sums = {}
        for level in range(self.depth + 1):
            span = 1 << level
            for idx in range(1, self.items_seen // span + 1):
                sums[(level, idx)] = math.fsum(self._items[(idx - 1) * span: idx * span])
        return sums


class HybridMechanism:
    """Continually released epsilon-DP running sum of a [0, 1] statistic stream.

    Statistics outside [0, 1] are rejected, never clamped. Noise is committed
    at insert time; queries are pure reads.
    """

    __slots__ = ("epsilon", "n", "true_sum", "_log_snapshot", "_block", "_noise_off")

    def __init__(self, epsilon: float, noise_off: bool = False):
        if not (epsilon > 0 and math.isfinite(epsilon)):
            raise ValueError(f"epsilon must be a positive finite real, got {epsilon}")
        self.epsilon = epsilon
        self.n = 0
        self.true_sum = 0.0
        self._log_snapshot = 0.0
        self._block: BinaryMechanism | None = None
        self._noise_off = noise_off

    def insert(self, r: float, rng: RngStream) -> None:
        """Absorb one statistic; at item counts 2^k a fresh total is released."""
        if not 0.0 <= r <= 1.0:
            raise ValueError(f"statistic {r} outside [0, 1] violates the sensitivity assumption")
        self.n += 1
        self.true_sum += r
        if self.n & (self.n - 1) == 0:
            # Logarithm-mechanism release; n = 1 counts as 2^0. A new block
            # of length n covers [n, 2n).
            noise = 0.0 if self._noise_off else sample_laplace(
                LaplaceParams(scale=1.0 / self.epsilon), rng)
            self._log_snapshot = self.true_sum + noise
            self._block = BinaryMechanism(self.epsilon, self.n, noise_off=self._noise_off)
        else:
            self._block.insert(r, rng)

    def query(self) -> float:
        """Current noisy running sum; identical on repeated calls without inserts."""
        if self.n == 0:
            raise ValueError("query on an empty mechanism")
        return self._log_snapshot + self._block.prefix_sum()

    def query_noise_terms(self) -> int:
        """Laplace draws contributing to the current query (snapshot + tree nodes)."""
        if self.n == 0:
            raise ValueError("query on an empty mechanism")
        return 1 + self._block.noise_terms_in_prefix()


def hybrid_error_bound(epsilon: float, gamma: float, n: float) -> float:
    """High-probability error of the hybrid mechanism after n items.

    With probability at least 1 - gamma the released sum is within
    (sqrt(8)/epsilon) * ln(4/gamma) * (ln(n) + 1) of the true sum. gamma is a
    failure probability; the algebraic form stays positive for gamma < 4 and
    that full range is accepted.
    """
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise ValueError(f"epsilon must be a positive finite real, got {epsilon}")
    if not 0.0 < gamma < 4.0:
        raise ValueError(f"gamma must lie in (0, 4), got {gamma}")
    if not n >= 1:
        raise ValueError(f"n must be >= 1, got {n}")
    base = math.sqrt(8.0) / epsilon * math.log(4.0 / gamma)
    return base * math.log(n) + base
