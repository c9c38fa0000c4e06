"""Adversarial constructions against the correlated-noise families.

Three attacks, each effective against *any* code of dimension two or more:

* ``boost_overlap`` rotates an orthonormal pair so the absolute-value
  overlap sum_x |phi(x)| |psi(x)| is at least 1/2;
* ``build_phase_partition`` picks, per basis state, the grid angle that
  best aligns psi's phase with phi's, yielding a partitioned phase whose
  cross form |phi^* E psi| nearly attains that overlap;
* ``find_impossibility_witness`` scans single-configuration controlled
  bit-flips for a violation of the scalar-consistency condition that any
  exactly-correcting code must satisfy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codespace import DENSE_CAP, check_dense_cap, qubit_count
from .noise import (
    TWO_PI,
    ControlledBitFlip,
    ControlledPhase,
    ExplicitSet,
    PhasePartition,
    SingletonSet,
    bitflip_form,
    phase_angle_table,
)

# Angles a single phase layer may apply.
LAYER_ANGLES = (0.0, math.pi / 4, math.pi / 2)

MAX_GRID_LEVEL = 12


@dataclass
class Polar:
    """Magnitude/angle split of a state; zero amplitudes carry angle 0."""

    r: np.ndarray
    theta: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.r * np.exp(1j * self.theta)


def polar_decompose(amp: np.ndarray) -> Polar:
    r = np.abs(amp)
    theta = np.where(r > 0, np.mod(np.angle(amp), TWO_PI), 0.0)
    return Polar(r=r, theta=theta)


def random_orthonormal_pair(n: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """A seeded orthonormal pair spanning a random plane of the full space."""
    rng = np.random.default_rng(seed)
    dim = 1 << n
    phi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    phi /= np.linalg.norm(phi)
    psi -= np.vdot(phi, psi) * phi
    psi /= np.linalg.norm(psi)
    return phi, psi


def abs_overlap(phi: np.ndarray, psi: np.ndarray) -> float:
    """sum_x |phi(x)| * |psi(x)|."""
    return float(np.sum(np.abs(phi) * np.abs(psi)))


def _require_orthonormal(phi: np.ndarray, psi: np.ndarray, tol: float) -> None:
    if abs(np.linalg.norm(phi) - 1.0) > tol or abs(np.linalg.norm(psi) - 1.0) > tol:
        raise ValueError("states must be unit vectors")
    if abs(np.vdot(phi, psi)) > tol:
        raise ValueError("states must be orthogonal")


def boost_overlap(
    phi: np.ndarray, psi: np.ndarray, tol: float = 1e-9
) -> tuple[np.ndarray, np.ndarray, float]:
    """Orthonormal pair spanning the same plane with absolute overlap >= 1/2.

    Returns whichever of (phi, psi) and ((phi+psi)/sqrt2, (phi-psi)/sqrt2)
    has the larger absolute-value overlap; the two overlaps sum to at least
    one, so the winner clears 1/2.
    """
    _require_orthonormal(phi, psi, tol)
    rotated = ((phi + psi) / math.sqrt(2), (phi - psi) / math.sqrt(2))
    original_overlap = abs_overlap(phi, psi)
    rotated_overlap = abs_overlap(*rotated)
    if rotated_overlap > original_overlap:
        return rotated[0], rotated[1], rotated_overlap
    return phi, psi, original_overlap


def phase_grid(k: int, grid_mode: str) -> np.ndarray:
    """Angle list for grid level k.

    Mode "full" spaces 2**(k+1) angles over the whole circle; mode "paper"
    is the historical variant with 2**k angles over the half circle [0, pi).
    """
    if grid_mode == "full":
        count = 1 << (k + 1)
        return TWO_PI * np.arange(count) / count
    if grid_mode == "paper":
        count = 1 << k
        return math.pi * np.arange(count) / count
    raise ValueError(f"unknown grid mode {grid_mode!r}")


def circular_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance on the circle, always in [0, pi]."""
    d = np.mod(np.asarray(a) - np.asarray(b), TWO_PI)
    return np.minimum(d, TWO_PI - d)


def build_phase_partition(
    phi: np.ndarray,
    psi: np.ndarray,
    k: int,
    grid_mode: str = "full",
    dense_cap: int = DENSE_CAP,
) -> PhasePartition:
    """Assign each basis state the grid angle aligning psi's phase to phi's.

    Basis state x wants the correction theta(x) - theta'(x); it joins the
    part whose grid angle minimizes the circular residual.  On the full
    grid the residual is at most pi / 2**(k+1); on the half-circle grid
    residuals are unbounded below pi/2 and are only reported.  States with
    no mass in either vector join part 0.
    """
    if not 1 <= k <= MAX_GRID_LEVEL:
        raise ValueError(f"grid level must be in [1, {MAX_GRID_LEVEL}], got {k}")
    if len(phi) != len(psi):
        raise ValueError("state dimensions differ")
    check_dense_cap(qubit_count(phi), dense_cap)
    angles = phase_grid(k, grid_mode)
    p, q = polar_decompose(phi), polar_decompose(psi)
    wanted = np.mod(p.theta - q.theta, TWO_PI)
    dist = circular_distance(wanted[:, None], angles[None, :])
    assignment = np.argmin(dist, axis=1)
    assignment[p.r * q.r == 0] = 0
    return PhasePartition(assignment=assignment, angles=angles, level=k)


def alignment_residuals(
    phi: np.ndarray, psi: np.ndarray, partition: PhasePartition
) -> np.ndarray:
    """Circular residual per basis state carrying mass in both vectors."""
    p, q = polar_decompose(phi), polar_decompose(psi)
    wanted = np.mod(p.theta - q.theta, TWO_PI)
    applied = partition.angle_of()
    return circular_distance(wanted, applied)[p.r * q.r > 0]


@dataclass
class PhasePairRealization:
    """A partitioned phase expressed, up to a global phase, as X^* Y.

    Each of X and Y is a product of phase layers with pairwise disjoint
    explicit sets and angles drawn from LAYER_ANGLES.
    """

    x_layers: list[ControlledPhase]
    y_layers: list[ControlledPhase]
    global_phase: float

    def angle_table(self, n: int) -> np.ndarray:
        """Per-basis-state angle of exp(i*global) X^* Y."""
        total = np.full(1 << n, self.global_phase)
        for layer in self.y_layers:
            total += phase_angle_table(layer, n)
        for layer in self.x_layers:
            total -= phase_angle_table(layer, n)
        return np.mod(total, TWO_PI)


def realize_as_phase_pair(
    partition: PhasePartition, tol: float = 1e-12
) -> PhasePairRealization | None:
    """Express a partitioned phase (at most 4 parts) as exp(i*g) X^* Y.

    Per-state differences theta_Y - theta_X span multiples of pi/4 in
    [-pi/2, pi/2], so the part angles must fit that window after a global
    rotation; returns None when they cannot (possible for full-circle
    grids).
    """
    if len(partition.angles) > 4:
        raise ValueError("realization handles at most 4 parts")
    # Zero first, so exact matches produce the smallest global rotation.
    diffs = (0.0, math.pi / 4, math.pi / 2, -math.pi / 4, -math.pi / 2)
    part_angles = partition.angles
    candidates: list[float] = []
    for a in part_angles:
        for d in diffs:
            candidates.append(float(np.mod(a - d, TWO_PI)))
    for g in candidates:
        offsets = []
        for a in part_angles:
            matched = None
            for d in diffs:
                if circular_distance(np.mod(g + d, TWO_PI), a) <= tol:
                    matched = d
                    break
            if matched is None:
                break
            offsets.append(matched)
        else:
            x_angle = [-d if d < 0 else 0.0 for d in offsets]
            y_angle = [d if d > 0 else 0.0 for d in offsets]
            x_layers = _layers_from_part_angles(partition, x_angle)
            y_layers = _layers_from_part_angles(partition, y_angle)
            return PhasePairRealization(x_layers, y_layers, global_phase=g)
    return None


def _layers_from_part_angles(
    partition: PhasePartition, per_part: list[float]
) -> list[ControlledPhase]:
    layers = []
    for angle in sorted({a for a in per_part if a != 0.0}):
        parts = [p for p, a in enumerate(per_part) if a == angle]
        members = np.isin(partition.assignment, parts)
        layers.append(ControlledPhase(members=ExplicitSet(members), theta=angle))
    return layers


@dataclass
class ImpossibilityWitness:
    """A singleton bit-flip on which no decode-consistency scalar exists."""

    flip: ControlledBitFlip
    q: int
    phi_form: complex
    psi_form: complex
    cross_form: complex
    residual: float


def find_impossibility_witness(
    phi: np.ndarray, psi: np.ndarray, tol: float
) -> ImpossibilityWitness | None:
    """First singleton flip violating scalar consistency beyond tol.

    Scans targets i ascending and configurations q ascending.  For exact
    correction some scalar c(E) must satisfy psi^* E phi = 0 and
    phi^* E phi = c = psi^* E psi simultaneously; the residual is how far
    the measured triple is from admitting such a c.  Only a pair of
    constant-amplitude states (which cannot be orthogonal) evades every
    singleton, so a witness is always found on genuine inputs.
    """
    _require_orthonormal(phi, psi, tol)
    n = qubit_count(phi)
    for target in range(1, n + 1):
        bit = target - 1
        for q in range(1 << n):
            low = q & ((1 << bit) - 1)
            deleted = low | ((q >> (bit + 1)) << bit)
            flip = ControlledBitFlip(target=target, controls=SingletonSet(deleted))
            phi_form = bitflip_form(phi, phi, flip)
            psi_form = bitflip_form(psi, psi, flip)
            cross_form = bitflip_form(phi, psi, flip)
            residual = max(abs(cross_form), abs(phi_form - psi_form))
            if residual > tol:
                return ImpossibilityWitness(
                    flip=flip,
                    q=q,
                    phi_form=phi_form,
                    psi_form=psi_form,
                    cross_form=cross_form,
                    residual=residual,
                )
    return None
