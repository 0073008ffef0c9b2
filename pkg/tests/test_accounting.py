"""Program-bit pricing, streaming baselines, storage entropy, space reports."""

import math

import pytest

from qsk.accounting import (
    OPERATOR_STORAGE_BITS_PER_N2,
    bits_per_slot,
    build_report,
    classical_baseline,
    equality_storage_bits,
    program_bits,
)
from qsk.equality import FingerprintSet, find_fingerprint_set, set_entropy
from qsk.partialmod import required_accuracy
from qsk.su2 import rotation_y
from qsk.synthesis import DEFAULT_GATE_SET, GateWord, SynthesisResult, synth_to_accuracy


def test_program_bits_empty_word():
    assert program_bits(GateWord("h-t-tdg", ()), 3) == 0


def test_program_bits_three_gate_set():
    word = GateWord("h-t-tdg", (0, 1, 2, 0, 1, 2, 0, 1, 2, 0))
    assert program_bits(word, 3) == 20


@pytest.mark.parametrize("c", [1, 2, 3, 4])
def test_program_bits_exactly_c_per_slot(c):
    size = 2**c - 1
    word = GateWord("x", tuple(0 for _ in range(7)))
    assert program_bits(word, size) == 7 * c
    assert bits_per_slot(size) == c


def test_program_bits_linear_in_length():
    slope = bits_per_slot(3)
    for length in (0, 1, 5, 64, 1000):
        word = GateWord("h-t-tdg", (0,) * length)
        assert program_bits(word, 3) == slope * length


def test_classical_baseline_partialmod():
    assert classical_baseline("partialmod", {"p": 1024}) == 10
    assert classical_baseline("partialmod", {"p": 1025}) == 11
    assert classical_baseline("partialmod", {"p": 1}) == 0


def test_classical_baseline_equality():
    assert classical_baseline("equality", {"n": 64}) == 64
    assert classical_baseline("equality", {"n": 64, "randomized": True, "k": 3}) == 18
    with pytest.raises(ValueError):
        classical_baseline("nope", {})


def test_equality_storage_bits_regime():
    bits = equality_storage_bits(12, 0.5)
    exact, _ = set_entropy(12, 60)
    assert bits == math.ceil(exact / math.log(2.0))
    assert bits >= 12 * 12 / 2


def test_equality_storage_bits_zero_edge():
    assert equality_storage_bits(12, math.inf) == 0


def test_equality_storage_grows_superlinearly():
    for n in (8, 12, 16):
        assert equality_storage_bits(2 * n, 0.5) / equality_storage_bits(n, 0.5) >= 3.0


def test_build_report_partialmod(default_net):
    p, v, delta = 1024, 4, 0.1
    eps = required_accuracy(v, p, delta)
    result = synth_to_accuracy(default_net, rotation_y(math.pi / (2 * p)), eps)
    report = build_report("partialmod", {"p": p, "v": v, "delta": delta}, result)
    assert report.classical_bits == 10
    assert report.quantum_qubits == 1
    assert report.quantum_program_bits >= report.classical_bits
    assert report.quantum_program_bits == 2 * len(result.word)
    assert any("ceil(log2 p)" in note for note in report.notes)
    assert "classical bits" in report.to_text()


def test_build_report_partialmod_zero_word():
    empty = SynthesisResult(GateWord("h-t-tdg", ()), 0.9, 0)
    report = build_report("partialmod", {"p": 4, "v": 1, "delta": 0.5}, empty)
    assert report.quantum_program_bits == 0
    assert report.classical_bits == 2
    assert report.to_text()


def test_build_report_equality():
    search = find_fingerprint_set(16, 0.25, seed=5, max_attempts=50)
    report = build_report("equality", {"n": 16, "eps": 0.25}, search.fingerprint_set)
    assert report.classical_bits == 16
    assert report.quantum_program_bits >= max(16, OPERATOR_STORAGE_BITS_PER_N2 * 16 * 16)
    assert report.quantum_qubits == 9  # ceil(log2 256) + 1
    assert len(report.notes) == 4


def test_build_report_validates_inputs():
    with pytest.raises(ValueError):
        build_report("partialmod", {"p": 4, "v": 1, "delta": 0.5}, object())
    with pytest.raises(ValueError):
        build_report("partialmod", {"p": 4}, SynthesisResult(GateWord("h-t-tdg", ()), 0.9, 0))
    with pytest.raises(ValueError):
        build_report("equality", {"n": 8}, FingerprintSet(8, (1, 2), 0.25))
    with pytest.raises(ValueError):
        build_report("widgets", {}, None)


def test_reports_reproducible(default_net):
    def make():
        p, v, delta = 16, 2, 0.04
        eps = required_accuracy(v, p, delta)
        result = synth_to_accuracy(default_net, rotation_y(math.pi / (2 * p)), eps)
        return build_report("partialmod", {"p": p, "v": v, "delta": delta}, result)

    assert make() == make()


def test_program_bits_monotone_in_v(default_net):
    p, delta = 16, 0.04
    bits = []
    for v in (1, 2, 4, 8):
        eps = required_accuracy(v, p, delta)
        result = synth_to_accuracy(default_net, rotation_y(math.pi / (2 * p)), eps)
        bits.append(program_bits(result.word, len(DEFAULT_GATE_SET)))
    assert bits == sorted(bits)
