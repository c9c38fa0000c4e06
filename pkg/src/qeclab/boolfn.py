"""Truth-table Boolean functions with values in {+1/2, -1/2}.

Inputs are integers read as bit strings: bit ``i`` of ``x`` is variable
``x_{i+1}``.  Tables are stored as sign bits (True = +1/2) and are
immutable after construction, so they can be shared freely across threads.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Dense truth tables are capped at 2**26 entries.
WIDTH_CAP = 26

NEG = -0.5
POS = 0.5


@dataclass
class BooleanFunctionTable:
    """A function {0,1}^width -> {+1/2, -1/2}, tabulated over all inputs."""

    width: int
    signs: np.ndarray  # bool, length 2**width, True = +1/2

    def __post_init__(self) -> None:
        if not 1 <= self.width <= WIDTH_CAP:
            raise ValueError(f"width must be in [1, {WIDTH_CAP}], got {self.width}")
        self.signs = np.asarray(self.signs, dtype=bool)
        if self.signs.shape != (1 << self.width,):
            raise ValueError(
                f"table must have exactly 2**{self.width} entries, got {self.signs.shape}"
            )
        self.signs.setflags(write=False)

    @property
    def size(self) -> int:
        return 1 << self.width

    @property
    def count_positive(self) -> int:
        return int(np.count_nonzero(self.signs))

    @property
    def is_balanced(self) -> bool:
        return 2 * self.count_positive == self.size

    def values(self) -> np.ndarray:
        """Materialize the table as a float64 array of +/-0.5."""
        return np.where(self.signs, POS, NEG)

    def eval(self, x: int) -> float:
        """Value at input ``x``; raises on out-of-range inputs."""
        if not 0 <= x < self.size:
            raise ValueError(f"input {x} out of range for width {self.width}")
        return POS if self.signs[x] else NEG


@dataclass
class InfluenceProfile:
    """Per-variable influences of a table, plus their maximum."""

    per_variable: np.ndarray = field(repr=False)
    max_influence: float = 0.0

    def __post_init__(self) -> None:
        self.per_variable = np.asarray(self.per_variable, dtype=float)
        self.per_variable.setflags(write=False)
        self.max_influence = float(self.per_variable.max())


def default_tribe_width(n_prime: int) -> int:
    """Width minimizing |Pr[all tribes miss] - 1/2| over w in [1, n'].

    The closer the raw OR-of-ANDs sits to the balanced point
    (1 - 2**-w)**floor(n'/w) = 1/2, the fewer points exact balancing has
    to flip, which keeps the measured influence small.  Ties go to the
    smaller width.
    """

    def bias(w: int) -> float:
        return abs((1.0 - 2.0**-w) ** (n_prime // w) - 0.5)

    return min(range(1, n_prime + 1), key=lambda w: (bias(w), w))


def _bit_block_table(pattern: np.ndarray, offset: int, width: int, total: int) -> np.ndarray:
    """Lift a table over bits [offset, offset+width) to all 2**total inputs."""
    out = np.tile(np.repeat(pattern, 1 << offset), 1 << (total - offset - width))
    return out


def tribes(n_prime: int, w: int | None = None) -> BooleanFunctionTable:
    """OR of ANDs over floor(n'/w) disjoint width-w variable blocks.

    Maps to +1/2 when some block is all-ones, -1/2 otherwise.  Variables
    past the last full block are irrelevant (their influence is 0).
    """
    if not 1 <= n_prime <= WIDTH_CAP:
        raise ValueError(f"n_prime must be in [1, {WIDTH_CAP}], got {n_prime}")
    if w is None:
        w = default_tribe_width(n_prime)
    if not 1 <= w <= n_prime:
        raise ValueError(f"tribe width must be in [1, {n_prime}], got {w}")
    n_tribes = n_prime // w
    and_pattern = np.zeros(1 << w, dtype=bool)
    and_pattern[-1] = True  # AND is true only on the all-ones block
    signs = np.zeros(1 << n_prime, dtype=bool)
    for k in range(n_tribes):
        signs |= _bit_block_table(and_pattern, k * w, w, n_prime)
    return BooleanFunctionTable(n_prime, signs)


def balance(f: BooleanFunctionTable) -> BooleanFunctionTable:
    """Return an exactly balanced copy of ``f``.

    Flips the lowest-indexed inputs carrying the majority sign, just enough
    to reach 2**(width-1) entries of each sign.  Already-balanced tables are
    returned unchanged.
    """
    half = f.size // 2
    excess = f.count_positive - half
    if excess == 0:
        return f
    majority = excess > 0
    signs = f.signs.copy()
    (candidates,) = np.nonzero(signs == majority)
    signs[candidates[: abs(excess)]] = not majority
    return BooleanFunctionTable(f.width, signs)


def influence_profile(f: BooleanFunctionTable) -> InfluenceProfile:
    """Exact influences: I_j = #{x : f(x) != f(x xor e_j)} / 2**width.

    Counted over unordered pairs; every value is a dyadic rational with
    denominator 2**width, so the float result is exact.
    """
    per = np.empty(f.width, dtype=float)
    for j in range(f.width):
        paired = f.signs.reshape(-1, 2, 1 << j)
        pairs = int(np.count_nonzero(paired[:, 0, :] != paired[:, 1, :]))
        per[j] = (2 * pairs) / f.size
    return InfluenceProfile(per_variable=per)
