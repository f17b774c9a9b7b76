"""Per-shot keyed uniforms.

Shot ``k`` under ``seed`` always receives the same uniform, regardless of
how the shot range is split across calls or workers. Backed by numpy's
Philox counter-based generator: word ``k`` of the stream keyed by ``seed``
lives in counter block ``k // 4``.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_WORDS_PER_BLOCK = 4


def shot_uniforms(seed: int, start: int, stop: int) -> np.ndarray:
    """Uniforms in [0, 1) for shot indices ``start <= k < stop``."""
    if not 0 <= start <= stop:
        raise ValueError("need 0 <= start <= stop")
    block, offset = divmod(start, _WORDS_PER_BLOCK)
    gen = np.random.Philox(key=int(seed) & _MASK64, counter=block)
    raw = gen.random_raw(stop - start + offset)[offset:]
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def inverse_cdf(probabilities, uniforms: np.ndarray) -> np.ndarray:
    """Outcome indices drawn by inverting the cumulative distribution."""
    p = np.asarray(probabilities, dtype=float)
    cdf = np.cumsum(p)
    cdf /= cdf[-1]
    idx = np.searchsorted(cdf, uniforms, side="right")
    last = int(np.flatnonzero(p > 0)[-1])
    return np.minimum(idx, last)


def partitions(shots: int, workers: int) -> list[tuple[int, int]]:
    """Contiguous shot-index ranges covering ``range(shots)``."""
    bounds = np.linspace(0, shots, max(1, workers) + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def sample_counts(probabilities, shots: int, seed: int, workers: int = 1) -> np.ndarray:
    """Outcome counts for ``shots`` seeded draws.

    ``workers > 1`` evaluates the shot ranges separately (in threads) and
    sums them; the result is identical to the serial run.
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    n = len(probabilities)

    def run(bounds):
        u = shot_uniforms(seed, *bounds)
        return np.bincount(inverse_cdf(probabilities, u), minlength=n)

    chunks = partitions(shots, workers)
    if len(chunks) == 1:
        return run(chunks[0])
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        return sum(pool.map(run, chunks))
