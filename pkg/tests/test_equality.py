"""Fingerprint equality testing: amplitudes, simulators, set search, entropy."""

import math

import numpy as np
import pytest

from qsk.equality import (
    BranchState,
    FingerprintSearchError,
    FingerprintSet,
    PerturbationMatrix,
    _reduced_weights,
    acceptance_amplitude,
    bits_value,
    find_fingerprint_set,
    fingerprint_size,
    max_cos_residual,
    next_pow2,
    parse_fingerprint_set,
    run_streaming,
    serialize_fingerprint_set,
    set_entropy,
    simulate_statevector,
    verify_fingerprint_set,
    verify_perturbed,
    worst_perturbed_accept,
)


def _random_set(rng, n, t, eps=0.25) -> FingerprintSet:
    values = tuple(int(m) for m in rng.integers(0, 1 << n, size=t))
    return FingerprintSet(n, values, eps)


def _random_bits(rng, n):
    return tuple(int(b) for b in rng.integers(0, 2, size=n))


# ---------------------------------------------------------------- amplitudes


def test_amplitude_equal_inputs_is_one():
    fs = FingerprintSet(4, (3, 7, 11, 2), 0.25)
    assert acceptance_amplitude(9, 9, fs) == 1.0


def test_amplitude_small_cases_term_by_term():
    fs = FingerprintSet(2, (0, 1, 2, 3), 0.25)
    # g = 2: (1/4)(cos 0 + cos pi/2 + cos pi + cos 3pi/2) = 0.
    assert abs(acceptance_amplitude(3, 1, fs)) < 1e-15
    # g = 1: (1/4)(1 + cos pi/4 + cos pi/2 + cos 3pi/4) = 1/4.
    expected = (1 + math.cos(math.pi / 4) + 0 + math.cos(3 * math.pi / 4)) / 4
    assert abs(acceptance_amplitude(2, 1, fs) - expected) < 1e-15
    assert abs(acceptance_amplitude(2, 1, fs) - 0.25) < 1e-15


def test_amplitude_range_check():
    fs = FingerprintSet(2, (0, 1), 0.25)
    with pytest.raises(ValueError):
        acceptance_amplitude(4, 0, fs)


# ---------------------------------------------------------------- streaming sim


def test_streaming_equal_inputs_accepts_certainly():
    rng = np.random.default_rng(0)
    for n in (1, 3, 6, 12):
        fs = _random_set(rng, n, 16)
        x = _random_bits(rng, n)
        assert run_streaming(x, x, fs) == 1.0


def test_streaming_matches_closed_form():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        n = int(rng.integers(1, 13))
        fs = _random_set(rng, n, int(rng.integers(1, 24)))
        x, y = _random_bits(rng, n), _random_bits(rng, n)
        expected = acceptance_amplitude(bits_value(x), bits_value(y), fs) ** 2
        assert abs(run_streaming(x, y, fs) - expected) < 1e-12


def test_streaming_length_mismatch():
    fs = FingerprintSet(3, (1, 2), 0.25)
    with pytest.raises(ValueError):
        run_streaming("101", "10", fs)


def test_streaming_update_order_is_irrelevant_bitwise():
    # The per-branch phase is an integer residue, so any processing order of
    # the same updates lands on identical floats.
    rng = np.random.default_rng(2)
    fs = _random_set(rng, 10, 12)
    weights = _reduced_weights(fs)
    modulus = 1 << (fs.n + 1)
    ones = [0, 3, 4, 7, 9]
    forward = np.zeros(fs.t, dtype=np.int64)
    for i in ones:
        forward = (forward + weights[i]) % modulus
    backward = np.zeros(fs.t, dtype=np.int64)
    for i in reversed(ones):
        backward = (backward + weights[i]) % modulus
    assert np.array_equal(forward, backward)
    a = BranchState(fs.n, tuple(int(r) for r in forward)).angles
    b = BranchState(fs.n, tuple(int(r) for r in backward)).angles
    assert a == b


def test_branch_state_angles():
    state = BranchState(2, (0, 2, 4))
    assert state.angles == (0.0, math.pi / 2, math.pi)


def test_msb_first_flag_reverses_bit_weights():
    rng = np.random.default_rng(12)
    for _ in range(100):
        n = int(rng.integers(1, 9))
        fs = _random_set(rng, n, int(rng.integers(1, 12)))
        x, y = _random_bits(rng, n), _random_bits(rng, n)
        flagged = run_streaming(x, y, fs, msb_first=True)
        reversed_inputs = run_streaming(x[::-1], y[::-1], fs)
        assert abs(flagged - reversed_inputs) < 1e-15
    fs = _random_set(rng, 4, 4)
    x, y = (1, 0, 0, 0), (0, 0, 0, 1)
    assert abs(
        simulate_statevector(x, y, fs, msb_first=True) - run_streaming(x, y, fs, msb_first=True)
    ) < 1e-12


# ---------------------------------------------------------------- statevector oracle


def test_statevector_equal_inputs():
    rng = np.random.default_rng(3)
    fs = _random_set(rng, 5, 8)
    x = _random_bits(rng, 5)
    assert abs(simulate_statevector(x, x, fs) - 1.0) < 1e-12


def test_statevector_requires_power_of_two():
    fs = FingerprintSet(3, (1, 2, 3), 0.25)
    with pytest.raises(ValueError):
        simulate_statevector("101", "011", fs)


def test_statevector_matches_streaming():
    rng = np.random.default_rng(4)
    for _ in range(200):
        n = int(rng.integers(1, 7))
        t = int(rng.choice([1, 2, 4, 8]))
        fs = _random_set(rng, n, t)
        x, y = _random_bits(rng, n), _random_bits(rng, n)
        assert abs(simulate_statevector(x, y, fs) - run_streaming(x, y, fs)) < 1e-10


# ---------------------------------------------------------------- verification


def test_verify_rejects_constant_branch():
    fs = FingerprintSet(2, (0,), 0.5)
    assert not verify_fingerprint_set(fs)


def test_verify_accepts_full_small_set():
    fs = FingerprintSet(2, (0, 1, 2, 3), 0.25)
    # Brute-force oracle over g in {1, 2, 3} (cosine is even in g).
    worst = 0.0
    for g in (1, 2, 3):
        total = sum(math.cos(math.pi * m * g / 4) for m in fs.m_values)
        worst = max(worst, abs(total) / fs.t)
    assert abs(max_cos_residual(fs) - worst) < 1e-12
    assert worst == pytest.approx(0.25, abs=1e-12)
    assert verify_fingerprint_set(fs)


def test_verified_set_bounds_false_accepts():
    search = find_fingerprint_set(8, 0.25, seed=11, max_attempts=50)
    fs = search.fingerprint_set
    rng = np.random.default_rng(5)
    for _ in range(50):
        x, y = _random_bits(rng, 8), _random_bits(rng, 8)
        if x == y:
            continue
        assert run_streaming(x, y, fs) <= fs.epsilon + 1e-12


def test_completeness_brute_force_over_all_pairs():
    # Independent oracle: stream every (x, y) pair outright rather than
    # trusting the difference-based residual bound.
    search = find_fingerprint_set(6, 0.25, seed=21, max_attempts=200, t=64)
    fs = search.fingerprint_set
    worst = 0.0
    for xv in range(64):
        x = tuple((xv >> i) & 1 for i in range(6))
        for yv in range(64):
            if xv == yv:
                continue
            y = tuple((yv >> i) & 1 for i in range(6))
            worst = max(worst, run_streaming(x, y, fs))
    assert worst <= fs.epsilon + 1e-12
    assert abs(worst - max_cos_residual(fs) ** 2) < 1e-12


def test_full_period_set_residual_is_not_zero():
    # With every integer 0..2^n-1 in the set, even differences cancel exactly
    # but odd ones leave a residue of exactly 1/t.
    n = 3
    fs = FingerprintSet(n, tuple(range(8)), 0.25)
    residuals = {}
    for g in range(1, 8):
        total = sum(math.cos(math.pi * m * g / 8) for m in fs.m_values)
        residuals[g] = abs(total) / fs.t
    for g, r in residuals.items():
        expected = 1.0 / fs.t if g % 2 == 1 else 0.0
        assert abs(r - expected) < 1e-12
    assert abs(max_cos_residual(fs) - 1.0 / fs.t) < 1e-12


def test_verify_perturbed_zero_matches_plain():
    rng = np.random.default_rng(6)
    for _ in range(10):
        n = int(rng.integers(2, 7))
        fs = _random_set(rng, n, int(rng.integers(1, 20)))
        zero = PerturbationMatrix(tuple((0.0,) * fs.t for _ in range(n)), 1.0 / n)
        assert verify_perturbed(fs, zero) == verify_fingerprint_set(fs)


def test_verify_perturbed_can_reject():
    # Cosine condition holds with equality at eps = 1/16, but a same-sign
    # perturbation at the 1/n bound breaks the sine condition.
    fs = FingerprintSet(2, (0, 1, 2, 3), 0.0625)
    assert verify_fingerprint_set(fs)
    adversarial = PerturbationMatrix(tuple((0.5,) * 4 for _ in range(2)), 0.5)
    assert not verify_perturbed(fs, adversarial)


def test_perturbation_matrix_bound_enforced():
    with pytest.raises(ValueError):
        PerturbationMatrix(((0.5, 0.1),), 0.25)
    pert = PerturbationMatrix.random(4, 8, seed=7)
    assert np.abs(pert.as_array()).max() <= 0.25


def test_worst_perturbed_accept_zero_perturbation():
    rng = np.random.default_rng(8)
    fs = _random_set(rng, 6, 16)
    zero = PerturbationMatrix(tuple((0.0,) * fs.t for _ in range(fs.n)), 1.0)
    assert abs(worst_perturbed_accept(fs, zero) - max_cos_residual(fs)) < 1e-12


# ---------------------------------------------------------------- set search


def test_find_fingerprint_set_succeeds_and_replays():
    search = find_fingerprint_set(8, 0.25, seed=1, max_attempts=100)
    fs = search.fingerprint_set
    assert verify_fingerprint_set(fs)
    assert fs.t == next_pow2(fingerprint_size(8, 0.25)) == 128
    assert search.attempts >= 1
    assert search.max_residual <= 0.5


def test_find_fingerprint_set_deterministic():
    a = find_fingerprint_set(8, 0.25, seed=3, max_attempts=100)
    b = find_fingerprint_set(8, 0.25, seed=3, max_attempts=100)
    assert a == b


def test_find_fingerprint_set_explicit_t():
    search = find_fingerprint_set(8, 0.25, seed=2, max_attempts=100, t=88)
    assert search.fingerprint_set.t == 88


def test_find_fingerprint_set_exhaustion():
    # For n=2 the uniform expectation of the cosine at odd differences is
    # 0.25, far above sqrt(0.001), so every attempt fails.
    with pytest.raises(FingerprintSearchError) as info:
        find_fingerprint_set(2, 0.001, seed=4, max_attempts=3)
    assert info.value.attempts == 3
    assert info.value.best_deviation > 0.1


# ---------------------------------------------------------------- entropy


def test_entropy_edge_cases():
    assert set_entropy(10, 0) == (0.0, 0.0)
    exact, _ = set_entropy(10, 1)
    assert abs(exact - 10 * math.log(2.0)) < 1e-9


def test_entropy_expansion_accuracy():
    exact, approx = set_entropy(12, 60)
    assert abs(exact - approx) / exact <= 0.05


def test_entropy_monotone_in_t():
    previous = -1.0
    for t in range(0, 33):
        exact, _ = set_entropy(6, t)
        assert exact > previous or t == 0
        previous = exact


def test_entropy_domain():
    with pytest.raises(ValueError):
        set_entropy(4, 17)
    with pytest.raises(ValueError):
        set_entropy(4, -1)


# ---------------------------------------------------------------- text format


def test_fingerprint_text_round_trip():
    fs = FingerprintSet(5, (0, 31, 7, 7, 12), 0.125)
    again = parse_fingerprint_set(serialize_fingerprint_set(fs))
    assert again == fs


def test_fingerprint_text_validation():
    with pytest.raises(ValueError):
        parse_fingerprint_set("3 2 0.5\n1\n")
    with pytest.raises(ValueError):
        parse_fingerprint_set("")
