"""Shared helpers for the test suite."""
from __future__ import annotations

import numpy as np


def random_state(n: int, rng) -> np.ndarray:
    """Unit-norm dense state on n qubits."""
    v = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return v / np.linalg.norm(v)


def random_table_signs(width: int, rng) -> np.ndarray:
    return rng.random(1 << width) < 0.5
