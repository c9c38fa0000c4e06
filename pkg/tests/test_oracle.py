import math

import numpy as np
import pytest
from util import random_state

from qeclab.boolfn import BooleanFunctionTable
from qeclab.noise import (
    AllSet,
    ControlledBitFlip,
    ControlledPhase,
    EmptySet,
    ExplicitSet,
    PhasePartition,
    SingletonSet,
    apply_error,
)
from qeclab.oracle import (
    bits_of,
    exhaustive_bitflip_scan,
    from_bits,
    naive_influence,
    naive_inner,
    operator_matrix,
)


def test_bit_strings_round_trip():
    for width in (1, 3, 5):
        for x in range(1 << width):
            assert from_bits(bits_of(x, width)) == x
    assert bits_of(0b0011, 4) == "1100"  # x1 x2 x3 x4


def test_naive_inner_basics():
    rng = np.random.default_rng(0)
    phi = random_state(3, rng)
    psi = random_state(3, rng)
    assert abs(naive_inner(phi, phi).imag) <= 1e-12
    assert abs(naive_inner(phi, phi) - 1.0) <= 1e-12
    e0 = np.eye(8)[0].astype(complex)
    e1 = np.eye(8)[1].astype(complex)
    assert naive_inner(e0, e1) == 0
    assert abs(naive_inner(phi, psi) - np.vdot(phi, psi)) <= 1e-12
    with pytest.raises(ValueError):
        naive_inner(phi, psi[:4])


def test_operator_matrix_identity_and_pauli():
    ident = operator_matrix(ControlledBitFlip(1, EmptySet()), 2)
    assert np.array_equal(ident, np.eye(4))
    x1 = operator_matrix(ControlledBitFlip(1, AllSet()), 2)
    # flips bit 0 of the index
    expected = np.zeros((4, 4))
    for x in range(4):
        expected[x ^ 1, x] = 1.0
    assert np.array_equal(x1, expected)


def test_operator_matrix_phase_diagonal():
    members = ExplicitSet(np.array([False, True, False, True]))
    mat = operator_matrix(ControlledPhase(members, math.pi / 2), 2)
    assert mat[1, 1] == pytest.approx(1j)
    assert mat[0, 0] == 1.0
    assert np.count_nonzero(mat - np.diag(np.diag(mat))) == 0


def test_operator_matrices_are_unitary():
    rng = np.random.default_rng(1)
    ops = [
        ControlledBitFlip(2, SingletonSet(3)),
        ControlledBitFlip(3, ExplicitSet(rng.random(8) < 0.5)),
        ControlledPhase(ExplicitSet(rng.random(16) < 0.5), 0.77),
        PhasePartition(assignment=rng.integers(0, 3, 16), angles=np.array([0.0, 0.9, 2.2])),
    ]
    for op in ops:
        n = 4 if not isinstance(op, ControlledBitFlip) else (2 if isinstance(op.controls, SingletonSet) else 4)
        mat = operator_matrix(op, n)
        assert np.max(np.abs(mat.conj().T @ mat - np.eye(2**n))) <= 1e-10


def test_operator_matrix_agrees_with_apply():
    rng = np.random.default_rng(2)
    phi = random_state(4, rng)
    ops = [
        ControlledBitFlip(2, ExplicitSet(rng.random(8) < 0.5)),
        ControlledPhase(ExplicitSet(rng.random(16) < 0.5), 1.1),
    ]
    for op in ops:
        assert np.max(np.abs(operator_matrix(op, 4) @ phi - apply_error(op, phi))) <= 1e-12


def test_operator_matrix_cap():
    with pytest.raises(ValueError):
        operator_matrix(ControlledBitFlip(1, AllSet()), 11)


def test_exhaustive_scan_uniform_state():
    n = 3
    uniform = np.full(2**n, 2.0 ** (-n / 2), dtype=complex)
    drop, subset, target = exhaustive_bitflip_scan(uniform)
    assert drop <= 1e-12
    assert subset == 2 ** (2 ** (n - 1)) - 1  # ties break toward All


def test_exhaustive_scan_argmax_is_all():
    rng = np.random.default_rng(3)
    for n in (2, 3, 4):
        phi = random_state(n, rng)
        drop, subset, target = exhaustive_bitflip_scan(phi)
        assert subset == 2 ** (2 ** (n - 1)) - 1


def test_exhaustive_scan_matches_main_path():
    from qeclab.noise import bitflip_form

    rng = np.random.default_rng(4)
    for n in (2, 3, 4):
        phi = random_state(n, rng)
        drop, subset, target = exhaustive_bitflip_scan(phi)
        main = max(
            abs(
                bitflip_form(phi, phi, ControlledBitFlip(i, AllSet()))
                - np.vdot(phi, phi)
            )
            for i in range(1, n + 1)
        )
        assert abs(drop - main) <= 1e-10
    with pytest.raises(ValueError):
        exhaustive_bitflip_scan(random_state(6, rng))


def test_naive_influence_known_functions():
    xor = BooleanFunctionTable(2, np.array([False, True, True, False]))
    assert list(naive_influence(xor.values())) == [1.0, 1.0]
    uniform = np.full(16, 0.25 + 0.1j)
    assert list(naive_influence(uniform)) == [0.0, 0.0, 0.0, 0.0]
    with pytest.raises(ValueError):
        naive_influence(np.zeros(3))
    with pytest.raises(ValueError):
        naive_influence(np.zeros(2**13))
