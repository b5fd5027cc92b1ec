"""Deterministic counter-based noise streams.

All randomness in the package flows through Philox4x64 generators keyed by
``(seed, stream)`` with the 256-bit block counter's top word set to a step
index.  The i-th variate of step k is therefore a pure function of
``(seed, stream, k, i)`` — replay is bit-identical no matter how the work is
chunked, threaded, or resumed.

Streams:

* ``STREAM_STEPS`` — one block per Euler step; consumed as standard normals.
* ``STREAM_INIT`` — initial-condition sampling.

Uniforms are built from one uint64 per variate as ``(word + 0.5) * 2**-64``,
which lands strictly inside (0, 1); normals apply the exact inverse standard
normal CDF to those uniforms, so no rejection step can desynchronize the
counter.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

__all__ = [
    "STREAM_STEPS",
    "STREAM_INIT",
    "philox_generator",
    "open_uniforms",
    "step_normals",
    "init_generator",
]

STREAM_STEPS = 0
STREAM_INIT = 1

_MAX_SEED = 2**63


def _check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    if not 0 <= int(seed) < _MAX_SEED:
        raise ValueError(f"seed must lie in [0, 2**63), got {seed!r}")
    return int(seed)


def philox_generator(seed: int, stream: int, block: int = 0) -> np.random.Generator:
    """Philox generator keyed by (seed, stream), positioned at ``block``.

    The key is the 128-bit pair [seed, stream]; ``block`` occupies the top
    word of the counter so distinct blocks yield independent, reproducible
    segments regardless of how many variates earlier blocks consumed.
    """
    seed = _check_seed(seed)
    if not isinstance(stream, (int, np.integer)) or stream < 0:
        raise ValueError(f"stream must be a non-negative integer, got {stream!r}")
    if not isinstance(block, (int, np.integer)) or block < 0:
        raise ValueError(f"block must be a non-negative integer, got {block!r}")
    bits = np.random.Philox(counter=[0, 0, 0, int(block)], key=[seed, int(stream)])
    return np.random.Generator(bits)


def open_uniforms(seed: int, stream: int, n: int, block: int = 0) -> np.ndarray:
    """n uniforms strictly inside (0, 1): one uint64 word each, no endpoints."""
    gen = philox_generator(seed, stream, block)
    raw = gen.integers(0, 2**64, size=int(n), dtype=np.uint64, endpoint=False)
    return (raw.astype(np.float64) + 0.5) * 2.0**-64


def step_normals(seed: int, step_index: int, n: int) -> np.ndarray:
    """The n standard normals belonging to Euler step ``step_index``."""
    return ndtri(open_uniforms(seed, STREAM_STEPS, n, block=step_index))


def init_generator(seed: int) -> np.random.Generator:
    """Generator reserved for sampling the initial particle positions."""
    return philox_generator(seed, STREAM_INIT)
