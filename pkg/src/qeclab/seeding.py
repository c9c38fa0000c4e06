"""Deterministic randomness: named sub-streams and a stateless bit mixer.

Every stochastic stage derives its generator from (manifest seed, stage
label), so stages are individually reproducible regardless of run order.
"""
from __future__ import annotations

import hashlib

import numpy as np

_U64 = np.uint64


def named_rng(seed: int, label: str) -> np.random.Generator:
    """Generator for sub-stream ``label`` of a run seeded with ``seed``."""
    digest = hashlib.sha256(label.encode()).digest()
    return np.random.default_rng([seed, int.from_bytes(digest[:8], "little")])


_MASK64 = 0xFFFFFFFFFFFFFFFF


def _mix_scalar(v: int) -> int:
    v = (v + 0x9E3779B97F4A7C15) & _MASK64
    v = ((v ^ (v >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    v = ((v ^ (v >> 27)) * 0x94D049BB133111EB) & _MASK64
    return v ^ (v >> 31)


def mix_bits(values: np.ndarray, seed: int) -> np.ndarray:
    """Stateless 64-bit mix (splitmix64 finalizer) of values xor seed key."""
    v = np.asarray(values, dtype=np.uint64) ^ _U64(_mix_scalar(seed & _MASK64))
    with np.errstate(over="ignore"):
        v = v + _U64(0x9E3779B97F4A7C15)
        v = (v ^ (v >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
        v = (v ^ (v >> _U64(27))) * _U64(0x94D049BB133111EB)
    return v ^ (v >> _U64(31))
