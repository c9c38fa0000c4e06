"""Correlated error operators and their quadratic forms.

Three operator families act on dense state vectors:

* controlled bit-flips: flip qubit i exactly when the other n-1 qubits,
  read as a string with qubit i deleted, lie in a control set S;
* controlled phases: multiply amplitudes on a set S by exp(i * theta);
* partitioned phases: assign every basis state one angle from a list.

Quadratic forms are the primary API.  ``bitflip_form`` evaluates
psi^* E phi through the pair-difference identity

    psi^* E phi = psi^* phi - sum_{y in S} (psi(y,0)-psi(y,1))^* (phi(y,0)-phi(y,1))

without materializing E phi; it is conjugate-linear in psi.  (Note the
conjugate sits on the psi-difference: for a singleton set {q} the cross
form is -(psi(q)-psi(q'))^* (phi(q)-phi(q')) plus psi^*phi.)
``structured_bitflip_form`` evaluates phi^* E phi for codewords of the
block-product code by factorizing every basis cross term into per-block
sums, so its cost is independent of 2**n.

Control sets too large to tabulate are represented by predicates: seeded
pseudo-random membership or a predicate on one block's content.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

from .boolfn import BooleanFunctionTable
from .codespace import CodeParams, CodewordCoeffs, qubit_count
from .seeding import mix_bits

TWO_PI = 2.0 * math.pi


class UnsupportedControls(ValueError):
    """Control shape outside what the structured fast path factorizes."""


# ---------------------------------------------------------------------------
# Membership specifications


@dataclass(frozen=True)
class AllSet:
    """Every string is a member."""


@dataclass(frozen=True)
class EmptySet:
    """No string is a member."""


@dataclass(frozen=True)
class SingletonSet:
    """Exactly one string is a member."""

    value: int


@dataclass
class ExplicitSet:
    """Membership tabulated as a bitset (dense widths only)."""

    members: np.ndarray  # bool, length 2**width

    def __post_init__(self) -> None:
        self.members = np.asarray(self.members, dtype=bool)
        self.members.setflags(write=False)


@dataclass(frozen=True)
class SeededSet:
    """Pseudo-random membership with the given density.

    Membership of string v is the deterministic predicate
    mix_bits(v, seed) < density * 2**64, so sets never need storage.
    """

    density: float
    seed: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.density <= 1.0:
            raise ValueError(f"density must be in [0, 1], got {self.density}")


@dataclass
class BlockSet:
    """Membership decided by the content of one bit block.

    The block occupies bits [offset, offset+width) of the full string, and
    a string is a member when the block content indexes True in ``members``.
    """

    offset: int
    width: int
    members: np.ndarray  # bool, length 2**width

    def __post_init__(self) -> None:
        self.members = np.asarray(self.members, dtype=bool)
        if self.members.shape != (1 << self.width,):
            raise ValueError(
                f"block member table needs 2**{self.width} entries, got {self.members.shape}"
            )
        self.members.setflags(write=False)


SetSpec = Union[AllSet, EmptySet, SingletonSet, ExplicitSet, SeededSet, BlockSet]


def block_control(params: CodeParams, pair: int, bit: int, members: np.ndarray) -> BlockSet:
    """Predicate on block ``bit`` of pair ``pair`` (pair in [1, B])."""
    if not 1 <= pair <= params.B:
        raise ValueError(f"pair index {pair} out of range [1, {params.B}]")
    if bit not in (0, 1):
        raise ValueError(f"block bit must be 0 or 1, got {bit}")
    offset = (2 * (pair - 1) + bit) * params.n_prime
    return BlockSet(offset=offset, width=params.n_prime, members=members)


def set_mask(spec: SetSpec, width_bits: int) -> np.ndarray:
    """Dense membership mask over all 2**width_bits strings."""
    size = 1 << width_bits
    if isinstance(spec, AllSet):
        return np.ones(size, dtype=bool)
    if isinstance(spec, EmptySet):
        return np.zeros(size, dtype=bool)
    if isinstance(spec, SingletonSet):
        if not 0 <= spec.value < size:
            raise ValueError(f"singleton {spec.value} out of range for width {width_bits}")
        mask = np.zeros(size, dtype=bool)
        mask[spec.value] = True
        return mask
    if isinstance(spec, ExplicitSet):
        if spec.members.shape != (size,):
            raise ValueError(
                f"explicit set has {spec.members.shape[0]} entries, expected {size}"
            )
        return spec.members
    if isinstance(spec, SeededSet):
        if spec.density >= 1.0:
            return np.ones(size, dtype=bool)
        threshold = np.uint64(int(spec.density * 2.0**64))
        return mix_bits(np.arange(size, dtype=np.uint64), spec.seed) < threshold
    if isinstance(spec, BlockSet):
        if spec.offset + spec.width > width_bits:
            raise ValueError("block lies outside the string")
        content = (np.arange(size) >> spec.offset) & ((1 << spec.width) - 1)
        return spec.members[content]
    raise TypeError(f"unknown set spec {spec!r}")


# ---------------------------------------------------------------------------
# Operators


@dataclass
class ControlledBitFlip:
    """Flip qubit ``target`` (1-based) when the other qubits lie in ``controls``."""

    target: int
    controls: SetSpec


@dataclass
class ControlledPhase:
    """Multiply amplitudes on ``members`` by exp(i * theta)."""

    members: SetSpec
    theta: float

    def __post_init__(self) -> None:
        self.theta = float(self.theta) % TWO_PI


@dataclass
class PhasePartition:
    """Diagonal phase operator: basis state x gets angle angles[assignment[x]]."""

    assignment: np.ndarray  # int, length 2**n
    angles: np.ndarray  # strictly increasing, in [0, 2*pi)
    level: int | None = None  # grid level when built from a dyadic angle grid

    def __post_init__(self) -> None:
        self.assignment = np.asarray(self.assignment, dtype=np.int64)
        self.angles = np.asarray(self.angles, dtype=float)
        if len(self.angles) == 0:
            raise ValueError("angle list must be non-empty")
        if np.any(self.angles < 0) or np.any(self.angles >= TWO_PI):
            raise ValueError("angles must lie in [0, 2*pi)")
        if np.any(np.diff(self.angles) <= 0):
            raise ValueError("angles must be strictly increasing")
        if self.assignment.min() < 0 or self.assignment.max() >= len(self.angles):
            raise ValueError("assignment indexes outside the angle list")

    def angle_of(self) -> np.ndarray:
        """Per-basis-state angle table."""
        return self.angles[self.assignment]


def _control_geometry(flip: ControlledBitFlip, n: int) -> int:
    if not 1 <= flip.target <= n:
        raise ValueError(f"target {flip.target} out of range [1, {n}]")
    return flip.target - 1


def bitflip_control_mask(flip: ControlledBitFlip, n: int) -> np.ndarray:
    """Control mask over the 2**(n-1) strings with the target bit deleted."""
    bit = _control_geometry(flip, n)
    spec = flip.controls
    if isinstance(spec, BlockSet):
        # Blocks never straddle the target; shift block offsets above it down.
        if spec.offset <= bit < spec.offset + spec.width:
            raise ValueError("control block must not contain the target qubit")
        offset = spec.offset - 1 if spec.offset > bit else spec.offset
        spec = BlockSet(offset=offset, width=spec.width, members=spec.members)
    return set_mask(spec, n - 1)


def insert_target_bit(y: int, bit: int, value: int) -> int:
    """Rebuild the full string from deleted-bit string y and the target bit."""
    low = y & ((1 << bit) - 1)
    high = y >> bit
    return low | (value << bit) | (high << (bit + 1))


def apply_bitflip(flip: ControlledBitFlip, amp: np.ndarray) -> np.ndarray:
    """Apply a controlled bit-flip; returns a new state vector."""
    n = qubit_count(amp)
    bit = _control_geometry(flip, n)
    if isinstance(flip.controls, EmptySet):
        return amp.copy()
    if isinstance(flip.controls, SingletonSet):
        out = amp.copy()
        x0 = insert_target_bit(flip.controls.value, bit, 0)
        x1 = x0 | (1 << bit)
        out[x0], out[x1] = amp[x1], amp[x0]
        return out
    mask = bitflip_control_mask(flip, n).reshape(-1, 1 << bit)
    a3 = amp.reshape(-1, 2, 1 << bit)
    out = np.empty_like(a3)
    out[:, 0, :] = np.where(mask, a3[:, 1, :], a3[:, 0, :])
    out[:, 1, :] = np.where(mask, a3[:, 0, :], a3[:, 1, :])
    return out.reshape(-1)


def apply_phase(phase: ControlledPhase, amp: np.ndarray) -> np.ndarray:
    """Apply a controlled phase; returns a new state vector."""
    n = qubit_count(amp)
    out = amp.astype(complex, copy=True)
    mask = set_mask(phase.members, n)
    out[mask] *= np.exp(1j * phase.theta)
    return out


def apply_partitioned_phase(partition: PhasePartition, amp: np.ndarray) -> np.ndarray:
    """Apply a partitioned phase; returns a new state vector."""
    if len(partition.assignment) != len(amp):
        raise ValueError("partition and state dimensions differ")
    return amp * np.exp(1j * partition.angle_of())


def apply_error(error, amp: np.ndarray) -> np.ndarray:
    """Apply any supported operator variant to a state vector."""
    if isinstance(error, ControlledBitFlip):
        return apply_bitflip(error, amp)
    if isinstance(error, ControlledPhase):
        return apply_phase(error, amp)
    if isinstance(error, PhasePartition):
        return apply_partitioned_phase(error, amp)
    raise TypeError(f"unknown error operator {error!r}")


def _pair_differences(amp: np.ndarray, bit: int) -> np.ndarray:
    """phi(y,0) - phi(y,1) for every deleted-bit string y, indexed by y."""
    a3 = amp.reshape(-1, 2, 1 << bit)
    return (a3[:, 0, :] - a3[:, 1, :]).reshape(-1)


def bitflip_form(phi: np.ndarray, psi: np.ndarray, flip: ControlledBitFlip) -> complex:
    """psi^* E phi via the pair-difference identity (no E phi materialized)."""
    if len(phi) != len(psi):
        raise ValueError("state dimensions differ")
    n = qubit_count(phi)
    bit = _control_geometry(flip, n)
    base = complex(np.vdot(psi, phi))
    if isinstance(flip.controls, EmptySet):
        return base
    if isinstance(flip.controls, SingletonSet):
        x0 = insert_target_bit(flip.controls.value, bit, 0)
        x1 = x0 | (1 << bit)
        return base - complex(np.conj(psi[x0] - psi[x1]) * (phi[x0] - phi[x1]))
    mask = bitflip_control_mask(flip, n)
    dphi = _pair_differences(phi, bit)
    dpsi = _pair_differences(psi, bit)
    return base - complex(np.sum(np.conj(dpsi[mask]) * dphi[mask]))


def _restricted_sums(f: BooleanFunctionTable, members: np.ndarray | None):
    vals = f.values()
    if members is not None:
        vals = np.where(members, vals, 0.0)
        size = float(np.count_nonzero(members))
    else:
        size = float(f.size)
    return float(vals.sum()), float((vals * vals).sum()), size


def _pivot_count(f: BooleanFunctionTable, j: int) -> float:
    """sum over pairs (w:0, w:1) at local bit j of (f difference)^2."""
    paired = f.values().reshape(-1, 2, 1 << j)
    d = paired[:, 0, :] - paired[:, 1, :]
    return float((d * d).sum())


class StructuredBitflipEvaluator:
    """Precomputed quadratic form phi^* E phi over codeword coefficients.

    Building the evaluator factorizes every basis cross term of one flip
    into per-block sums, an O(n' * 2**n') step; each subsequent codeword
    costs a 2**B x 2**B matrix quadratic form, independent of 2**n.
    """

    def __init__(
        self, f: BooleanFunctionTable, params: CodeParams, flip: ControlledBitFlip
    ) -> None:
        if f.width != params.n_prime:
            raise ValueError(
                f"building block width {f.width} != block length {params.n_prime}"
            )
        n, B, n_prime = params.n, params.B, params.n_prime
        bit = _control_geometry(flip, n)
        target_block, local_bit = divmod(bit, n_prime)
        k0, b0 = divmod(target_block, 2)

        controls = flip.controls
        restricted_block = None
        restricted = (0.0, 0.0, 0.0)
        if isinstance(controls, BlockSet):
            if controls.width != n_prime or controls.offset % n_prime != 0:
                raise UnsupportedControls("control block is not aligned to a code block")
            restricted_block = controls.offset // n_prime
            if restricted_block == target_block:
                raise ValueError("control block must not contain the target qubit")
            restricted = _restricted_sums(f, controls.members)
        elif not isinstance(controls, (AllSet, EmptySet)):
            raise UnsupportedControls(
                f"structured path cannot factorize {type(controls).__name__} controls"
            )

        full = _restricted_sums(f, None)
        pivot = _pivot_count(f, local_bit)

        def block_factor(block: int, used_l: bool, used_r: bool, restrict: bool) -> float:
            # The control-set restriction applies only inside the correction
            # sum, never to the plain inner-product (Gram) part.
            t, q, size = restricted if restrict and restricted_block == block else full
            if used_l and used_r:
                return q
            if used_l or used_r:
                return t
            return size

        def pair_factor(k: int, zk: int, zpk: int, restrict: bool) -> float:
            if zk == zpk:
                return block_factor(2 * k + zk, True, True, restrict) * block_factor(
                    2 * k + 1 - zk, False, False, restrict
                )
            return block_factor(2 * k + zk, True, False, restrict) * block_factor(
                2 * k + zpk, False, True, restrict
            )

        dim = params.dim
        matrix = np.empty((dim, dim))
        for z in range(dim):
            for zp in range(dim):
                gram = 1.0
                for k in range(B):
                    gram *= pair_factor(k, (z >> k) & 1, (zp >> k) & 1, restrict=False)
                delta = 0.0
                # Only selectors that place the building block on the
                # target's own block are sensitive to the flip.
                if (
                    not isinstance(controls, EmptySet)
                    and ((z >> k0) & 1) == b0
                    and ((zp >> k0) & 1) == b0
                ):
                    delta = pivot * block_factor(2 * k0 + 1 - b0, False, False, restrict=True)
                    for k in range(B):
                        if k != k0:
                            delta *= pair_factor(k, (z >> k) & 1, (zp >> k) & 1, restrict=True)
                matrix[z, zp] = gram - delta
        self.params = params
        self.matrix = matrix

    def form(self, coeffs: CodewordCoeffs) -> complex:
        if coeffs.params != self.params:
            raise ValueError("codeword geometry does not match the evaluator")
        return complex(np.vdot(coeffs.alpha, self.matrix @ coeffs.alpha))


def structured_bitflip_form(
    f: BooleanFunctionTable, coeffs: CodewordCoeffs, flip: ControlledBitFlip
) -> complex:
    """phi^* E phi for a codeword, via per-block factorization.

    Supports All, Empty, and single-block-predicate control sets; see
    StructuredBitflipEvaluator for amortizing the setup across codewords.
    """
    return StructuredBitflipEvaluator(f, coeffs.params, flip).form(coeffs)


def enumerate_singletons(n: int) -> Iterator[ControlledBitFlip]:
    """All n * 2**(n-1) bit-flips controlled on one specific configuration."""
    if n - 1 > 26:
        raise ValueError(f"cannot enumerate 2**{n - 1} control strings")
    for target in range(1, n + 1):
        for j in range(1 << (n - 1)):
            yield ControlledBitFlip(target=target, controls=SingletonSet(j))


def phase_angle_table(phase: ControlledPhase, n: int) -> np.ndarray:
    """Per-basis-state angle of a controlled phase."""
    return np.where(set_mask(phase.members, n), phase.theta, 0.0)


def compose_phases(x_phase: ControlledPhase, y_phase: ControlledPhase, n: int) -> PhasePartition:
    """Partition/angle form of X^* Y: basis state x gets theta_Y(x) - theta_X(x)."""
    diff = np.mod(phase_angle_table(y_phase, n) - phase_angle_table(x_phase, n), TWO_PI)
    angles, assignment = np.unique(diff, return_inverse=True)
    return PhasePartition(assignment=assignment, angles=angles, level=None)
