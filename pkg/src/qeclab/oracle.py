"""Naive reference implementations used as ground truth in tests.

Everything here is small-n, single-threaded, and written against the
definitions directly: bit strings are manipulated as text, operators are
materialized as explicit matrices, and sums run in plain Python loops.
None of it shares code with the fast paths it checks.
"""
from __future__ import annotations

import numpy as np

from .noise import (
    AllSet,
    BlockSet,
    ControlledBitFlip,
    ControlledPhase,
    EmptySet,
    ExplicitSet,
    PhasePartition,
    SeededSet,
    SingletonSet,
)
from .seeding import mix_bits

MATRIX_CAP = 10
SCAN_CAP = 5


def bits_of(x: int, width: int) -> str:
    """x as the string x_1 x_2 ... x_width (first variable first)."""
    return format(x, f"0{width}b")[::-1]


def from_bits(s: str) -> int:
    """Inverse of bits_of."""
    return int(s[::-1] or "0", 2)


def naive_inner(phi, psi) -> complex:
    """<phi, psi>, conjugate-linear in the left argument, plain summation."""
    if len(phi) != len(psi):
        raise ValueError("length mismatch")
    total = 0j
    for a, b in zip(phi, psi):
        total += complex(a).conjugate() * complex(b)
    return total


def _member(spec, v: int, width: int) -> bool:
    if isinstance(spec, AllSet):
        return True
    if isinstance(spec, EmptySet):
        return False
    if isinstance(spec, SingletonSet):
        return v == spec.value
    if isinstance(spec, ExplicitSet):
        return bool(spec.members[v])
    if isinstance(spec, SeededSet):
        if spec.density >= 1.0:
            return True
        threshold = int(spec.density * 2.0**64)
        return int(mix_bits(np.array([v], dtype=np.uint64), spec.seed)[0]) < threshold
    if isinstance(spec, BlockSet):
        content = from_bits(bits_of(v, width)[spec.offset : spec.offset + spec.width])
        return bool(spec.members[content])
    raise TypeError(f"unknown set spec {spec!r}")


def operator_matrix(error, n: int) -> np.ndarray:
    """Explicit 2**n x 2**n matrix of a bit-flip, phase, or partitioned phase."""
    if n > MATRIX_CAP:
        raise ValueError(f"operator_matrix is capped at n <= {MATRIX_CAP}")
    dim = 2**n
    mat = np.zeros((dim, dim), dtype=complex)
    if isinstance(error, ControlledBitFlip):
        i = error.target
        for x in range(dim):
            s = bits_of(x, n)
            deleted = s[: i - 1] + s[i:]
            if _member(error.controls, from_bits(deleted), n - 1):
                flipped = s[: i - 1] + ("1" if s[i - 1] == "0" else "0") + s[i:]
                mat[from_bits(flipped), x] = 1.0
            else:
                mat[x, x] = 1.0
        return mat
    if isinstance(error, ControlledPhase):
        for x in range(dim):
            inside = _member(error.members, x, n)
            mat[x, x] = np.exp(1j * error.theta) if inside else 1.0
        return mat
    if isinstance(error, PhasePartition):
        for x in range(dim):
            mat[x, x] = np.exp(1j * error.angles[error.assignment[x]])
        return mat
    raise TypeError(f"unknown error operator {error!r}")


def exhaustive_bitflip_scan(phi) -> tuple[float, int, int]:
    """Maximize |phi^* E phi - phi^* phi| over every controlled bit-flip.

    Iterates all n qubits and all 2**(2**(n-1)) control subsets per qubit;
    ties go to the all-strings subset.  Returns (max drop, subset bitmask,
    target qubit); the bitmask has bit y set when string y is a control.
    """
    n = len(bin(len(phi))) - 3
    if 2**n != len(phi):
        raise ValueError("state length is not a power of two")
    if n > SCAN_CAP:
        raise ValueError(f"exhaustive scan is capped at n <= {SCAN_CAP}")
    norm_sq = naive_inner(phi, phi)
    half = 2 ** (n - 1)
    full_mask = 2**half - 1
    best = (-1.0, full_mask, 1)
    for i in range(1, n + 1):
        pair_of = {}
        for y in range(half):
            s = bits_of(y, n - 1)
            x0 = from_bits(s[: i - 1] + "0" + s[i - 1 :])
            x1 = from_bits(s[: i - 1] + "1" + s[i - 1 :])
            pair_of[y] = (x0, x1)
        # Descending order puts the all-strings subset first, so equal drops
        # never displace it: ties break toward S = All.
        for subset in range(full_mask, -1, -1):
            out = list(phi)
            for y in range(half):
                if subset & (1 << y):
                    x0, x1 = pair_of[y]
                    out[x0], out[x1] = out[x1], out[x0]
            drop = abs(naive_inner(phi, out) - norm_sq)
            if drop > best[0]:
                best = (drop, subset, i)
    return best


def naive_influence(values) -> np.ndarray:
    """Per-coordinate influences of a table or state by direct double loop.

    For entry j: the mean over x of |g(x) - g(x with variable j+1 flipped)|^2.
    """
    values = list(values)
    size = len(values)
    width = len(bin(size)) - 3
    if 2**width != size:
        raise ValueError("table length is not a power of two")
    if width > 12:
        raise ValueError("naive_influence is capped at width <= 12")
    out = np.zeros(width)
    for j in range(width):
        acc = 0.0
        for x in range(size):
            s = bits_of(x, width)
            flipped = s[:j] + ("1" if s[j] == "0" else "0") + s[j + 1 :]
            d = complex(values[x]) - complex(values[from_bits(flipped)])
            acc += abs(d) ** 2
        out[j] = acc / size
    return out
