import json

import numpy as np
import pytest
from util import random_state

from qeclab.attacks import random_orthonormal_pair
from qeclab.boolfn import balance, tribes
from qeclab.codespace import (
    CodewordCoeffs,
    basis_vector,
    codeword_vector,
    make_params,
    sample_codeword_pair,
)
from qeclab.fileio import error_from_dict
from qeclab.noise import (
    AllSet,
    ControlledBitFlip,
    ControlledPhase,
    EmptySet,
    SeededSet,
    SingletonSet,
    apply_error,
    bitflip_form,
    structured_bitflip_form,
)
from qeclab.verify import (
    VerificationConfig,
    check_codeword_influence_bound,
    check_exactness,
    check_immunity,
    check_sensitivity_bound,
    check_separation,
    corner_coeffs,
    pair_diff_power,
    state_influence,
)


def small_cfg(**overrides):
    defaults = dict(seed=1, codeword_samples=8, error_samples=12)
    defaults.update(overrides)
    return VerificationConfig(**defaults)


def test_config_validation():
    with pytest.raises(ValueError):
        VerificationConfig(codeword_samples=0)
    with pytest.raises(ValueError):
        VerificationConfig(tol=0.0)


def test_state_influence_matches_definition():
    rng = np.random.default_rng(0)
    phi = random_state(4, rng)
    for target in range(1, 5):
        acc = 0.0
        for x in range(16):
            acc += abs(phi[x] - phi[x ^ (1 << (target - 1))]) ** 2
        assert abs(state_influence(phi, target) - acc / 16) <= 1e-12
        assert abs(pair_diff_power(phi, target) - 8 * state_influence(phi, target)) <= 1e-12


def test_immunity_dense_passes_and_witness_reevaluates():
    params = make_params(16, 2)
    f = balance(tribes(params.n_prime))
    report = check_immunity(f, params, small_cfg())
    assert report.passed
    assert report.measured <= report.epsilon_bound + 1e-9
    coeffs = CodewordCoeffs(
        params, np.array([complex(re, im) for re, im in report.witness["alpha"]])
    )
    flip = error_from_dict(report.witness["error"])
    phi = codeword_vector(f, coeffs)
    eps = 1.0 - abs(bitflip_form(phi, phi, flip))
    assert abs(eps - report.witness["value"]) <= 1e-9
    assert report.witness["value"] == report.measured


def test_immunity_structured_passes_and_witness_reevaluates():
    params = make_params(32, 2)
    f = balance(tribes(params.n_prime))
    report = check_immunity(f, params, small_cfg(), structured=True)
    assert report.passed
    coeffs = CodewordCoeffs(
        params, np.array([complex(re, im) for re, im in report.witness["alpha"]])
    )
    flip = error_from_dict(report.witness["error"])
    eps = 1.0 - abs(structured_bitflip_form(f, coeffs, flip))
    assert abs(eps - report.witness["value"]) <= 1e-9


def test_immunity_rejects_unbalanced_block():
    params = make_params(8, 2)
    f = tribes(params.n_prime)  # 3 positives of 4: unbalanced
    assert not f.is_balanced
    with pytest.raises(ValueError):
        check_immunity(f, params, small_cfg())


def test_immunity_exhaustive_small_n_equals_full_flip_value():
    params = make_params(4, 1)
    f = balance(tribes(params.n_prime))
    cfg = small_cfg(codeword_samples=4, error_samples=5)
    report = check_immunity(f, params, cfg)
    # recompute the worst epsilon restricted to uncontrolled flips
    labeled = corner_coeffs(params)
    rng_labeled = []
    from qeclab.codespace import sample_codeword
    from qeclab.seeding import named_rng

    rng = named_rng(cfg.seed, "codewords")
    for i in range(cfg.codeword_samples):
        rng_labeled.append((f"sample[{i}]", sample_codeword(params, rng)))
    worst_full = -1.0
    for _, coeffs in labeled + rng_labeled:
        phi = codeword_vector(f, coeffs)
        for target in range(1, 5):
            form = bitflip_form(phi, phi, ControlledBitFlip(target, AllSet()))
            worst_full = max(worst_full, 1.0 - abs(form))
    assert abs(report.measured - worst_full) <= 1e-12


def test_basis_codeword_with_empty_controls_contributes_zero():
    params = make_params(8, 2)
    f = balance(tribes(params.n_prime))
    phi = basis_vector(f, params, 1) / 2.0 ** ((params.n - 2 * params.B) / 2)
    form = bitflip_form(phi, phi, ControlledBitFlip(3, EmptySet()))
    assert abs(1.0 - abs(form)) <= 1e-12


def test_separation_same_operator_vanishes():
    phi, psi = random_orthonormal_pair(5, 3)
    flip = ControlledBitFlip(2, SeededSet(0.5, 9))
    value = abs(np.vdot(apply_error(flip, phi), apply_error(flip, psi)))
    assert value <= 1e-9


def test_separation_phaseflip_adversarial_beats_claim():
    params = make_params(8, 1)
    f = balance(tribes(params.n_prime))
    pairs = []
    for seed in range(4):
        ca, cb = sample_codeword_pair(params, seed)
        pairs.append((codeword_vector(f, ca), codeword_vector(f, cb)))
    cfg = small_cfg(alpha_claim=0.1, error_samples=20)
    report = check_separation(pairs, "phaseflip", cfg)
    assert report.measured > 0.1
    assert not report.passed
    assert report.witness["mode"] == "boost+align"


def test_separation_bitflip_informational():
    params = make_params(8, 1)
    f = balance(tribes(params.n_prime))
    ca, cb = sample_codeword_pair(params, 5)
    pairs = [(codeword_vector(f, ca), codeword_vector(f, cb))]
    report = check_separation(pairs, "bitflip", small_cfg(error_samples=30))
    assert report.passed  # no claim given
    assert 0.0 <= report.measured <= 1.0 + 1e-9


def test_separation_rejects_unknown_family_and_bad_pairs():
    phi, psi = random_orthonormal_pair(4, 0)
    with pytest.raises(ValueError):
        check_separation([(phi, psi)], "depolarizing", small_cfg())
    with pytest.raises(ValueError):
        check_separation([(phi, phi)], "bitflip", small_cfg())


def test_exactness_residuals():
    phi, psi = random_orthonormal_pair(4, 7)
    assert check_exactness(phi, psi, ControlledPhase(EmptySet(), 0.0), 1e-9) <= 1e-12
    assert check_exactness(phi, psi, ControlledPhase(AllSet(), 1.2), 1e-9) <= 1e-12
    # a singleton where phi's pair amplitudes differ gives positive residual
    witness_flip = ControlledBitFlip(1, SingletonSet(0))
    residual = check_exactness(phi, psi, witness_flip, 1e-9)
    assert residual > 0


def test_sensitivity_bound_cases():
    rng = np.random.default_rng(8)
    phi = random_state(6, rng)
    lhs, rhs, ok = check_sensitivity_bound(phi, 3, AllSet())
    assert ok and abs(lhs - rhs) <= 1e-9
    lhs, rhs, ok = check_sensitivity_bound(phi, 3, EmptySet())
    assert ok and lhs == 0.0
    for _ in range(50):
        target = int(rng.integers(1, 7))
        controls = SeededSet(float(rng.uniform()), int(rng.integers(2**62)))
        lhs, rhs, ok = check_sensitivity_bound(phi, target, controls)
        assert ok


def test_codeword_influence_bound_passes():
    params = make_params(16, 2)
    f = balance(tribes(params.n_prime))
    report = check_codeword_influence_bound(f, params, small_cfg())
    assert report.passed
    assert report.witness["lhs"] <= report.witness["rhs"] + 1e-9
    with pytest.raises(ValueError):
        check_codeword_influence_bound(tribes(4), params, small_cfg())


def test_corner_coeffs_cover_documented_patterns():
    params = make_params(8, 2)
    labels = [label for label, _ in corner_coeffs(params)]
    assert labels == ["basis[0]", "basis[1]", "basis[2]", "basis[3]", "uniform", "alternating"]
    f = balance(tribes(params.n_prime))
    for _, coeffs in corner_coeffs(params):
        phi = codeword_vector(f, coeffs)
        assert abs(np.linalg.norm(phi) - 1.0) <= 1e-9


def test_reports_are_json_serializable():
    params = make_params(8, 2)
    f = balance(tribes(params.n_prime))
    report = check_immunity(f, params, small_cfg(codeword_samples=2, error_samples=2))
    payload = report.to_dict()
    text = json.dumps(payload)
    round_trip = json.loads(text)
    assert round_trip["kind"] == "immunity"
    assert set(round_trip) >= {
        "kind",
        "n",
        "B",
        "s",
        "epsilon_measured",
        "epsilon_bound",
        "alpha_measured",
        "pass",
        "witness",
        "seed",
        "runtime_ms",
    }


def test_reports_deterministic_given_seed():
    params = make_params(8, 2)
    f = balance(tribes(params.n_prime))
    r1 = check_immunity(f, params, small_cfg())
    r2 = check_immunity(f, params, small_cfg())
    d1, d2 = r1.to_dict(), r2.to_dict()
    d1.pop("runtime_ms"), d2.pop("runtime_ms")
    assert d1 == d2
