"""One-qubit simulator for the parity-of-multiplier streaming problem.

A stream of bits arrives one at a time; the count of ones is promised to be
v * p for a known p. Each arriving 1 rotates the qubit by the matrix angle
pi/(2p) about the y-axis, so after the whole stream the state sits at one of
the poles and a computational-basis measurement reads off v mod 2.

Three run modes: exact gates, a co-axial angle perturbation (each 1 applies a
rotation by pi/(2p) + eps_p), and an arbitrary gate word standing in for the
rotation. Measurements are reported as exact outcome distributions so tests
are deterministic; `sample_outcomes` exists for demos.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .su2 import dist_projective, rotation_y
from .synthesis import GateWord, GateSet, get_gate_set

Bits = tuple[int, ...]


def parse_bits(source) -> Bits:
    """Bits from a '0'/'1' string (whitespace ignored) or any iterable of 0/1."""
    if isinstance(source, str):
        source = (ch for ch in source if not ch.isspace())
    bits = tuple(int(b) for b in source)
    if any(b not in (0, 1) for b in bits):
        raise ValueError("stream may only contain 0 and 1")
    return bits


@dataclass(frozen=True)
class QubitState:
    amp0: complex
    amp1: complex

    def __post_init__(self):
        norm = abs(self.amp0) ** 2 + abs(self.amp1) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state norm^2 {norm} != 1")

    def probabilities(self) -> dict[int, float]:
        return {0: abs(self.amp0) ** 2, 1: abs(self.amp1) ** 2}


@dataclass(frozen=True)
class PartialModInstance:
    """A stream whose count of ones is promised to be an exact multiple of p."""

    p: int
    stream: Bits
    v: int

    @classmethod
    def from_stream(cls, p: int, stream) -> "PartialModInstance":
        if p < 1:
            raise ValueError("p must be a positive integer")
        bits = parse_bits(stream)
        ones = sum(bits)
        if ones % p != 0:
            raise ValueError(f"count of ones {ones} is not a multiple of p={p}")
        return cls(p, bits, ones // p)

    @classmethod
    def generate(cls, p: int, v: int, length: int, seed: int) -> "PartialModInstance":
        """Random placement of v*p ones in a stream of the given length."""
        if v < 0:
            raise ValueError("v must be nonnegative")
        ones = v * p
        if length < ones:
            raise ValueError(f"length {length} cannot hold {ones} ones")
        rng = np.random.default_rng(seed)
        positions = rng.choice(length, size=ones, replace=False)
        bits = np.zeros(length, dtype=int)
        bits[positions] = 1
        return cls.from_stream(p, bits.tolist())


# Rescale the state every this many gate applications: float drift random-walks
# past the 1e-12 norm invariant somewhere beyond ~4000 steps otherwise.
_STATE_RENORM_INTERVAL = 512


def _apply_rotation_stream(inst: PartialModInstance, cos_t: float, sin_t: float) -> QubitState:
    a0, a1 = 1.0 + 0.0j, 0.0j
    applied = 0
    for bit in inst.stream:
        if bit:
            a0, a1 = cos_t * a0 + sin_t * a1, -sin_t * a0 + cos_t * a1
            applied += 1
            if applied % _STATE_RENORM_INTERVAL == 0:
                scale = 1.0 / math.sqrt(abs(a0) ** 2 + abs(a1) ** 2)
                a0, a1 = a0 * scale, a1 * scale
    return QubitState(a0, a1)


def run_exact(inst: PartialModInstance) -> int:
    """Parity of the multiplier; the measurement outcome is deterministic."""
    theta = math.pi / (2 * inst.p)
    final = _apply_rotation_stream(inst, math.cos(theta), math.sin(theta))
    probs = final.probabilities()
    parity = inst.v % 2
    if abs(probs[parity] - 1.0) > 1e-12:
        raise AssertionError(f"outcome not deterministic: P({parity}) = {probs[parity]}")
    return parity


def required_accuracy(v: int, p: int, delta: float) -> float:
    """The 2 sqrt(delta) / (v p) per-gate accuracy budget.

    Values >= 2 exceed the operator diameter and constrain nothing.
    """
    if v < 1 or p < 1:
        raise ValueError("v and p must be positive (v = 0 streams are exact as-is)")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    return 2.0 * math.sqrt(delta) / (v * p)


def run_perturbed(inst: PartialModInstance, eps_p: float) -> float:
    """Wrong-parity probability when every 1 rotates by pi/(2p) + eps_p.

    Co-axial rotations compose by angle addition, so this equals
    sin^2(v p eps_p) up to rounding.
    """
    theta = math.pi / (2 * inst.p) + eps_p
    final = _apply_rotation_stream(inst, math.cos(theta), math.sin(theta))
    return final.probabilities()[1 - inst.v % 2]


def run_synthesized(
    inst: PartialModInstance, word: GateWord, gate_set: GateSet | None = None
) -> dict[int, float]:
    """Outcome distribution when the word's unitary stands in for the rotation.

    The word errs in an arbitrary direction, not just along the rotation axis,
    so the guarantee is the accumulation bound: wrong-outcome probability at
    most (v p eps_word)^2, eps_word being the word's projective distance to
    the exact rotation.
    """
    gs = gate_set if gate_set is not None else get_gate_set(word.gate_set_name)
    gate = gs.word_unitary(word)
    a0, a1 = 1.0 + 0.0j, 0.0j
    applied = 0
    for bit in inst.stream:
        if bit:
            a0, a1 = gate[0, 0] * a0 + gate[0, 1] * a1, gate[1, 0] * a0 + gate[1, 1] * a1
            applied += 1
            if applied % _STATE_RENORM_INTERVAL == 0:
                scale = 1.0 / math.sqrt(abs(a0) ** 2 + abs(a1) ** 2)
                a0, a1 = a0 * scale, a1 * scale
    final = QubitState(a0, a1)
    probs = final.probabilities()

    eps_word = dist_projective(gate, rotation_y(math.pi / (2 * inst.p)))
    bound = (inst.v * inst.p * eps_word) ** 2 + 1e-9
    wrong = probs[1 - inst.v % 2]
    if wrong > bound:
        raise AssertionError(f"accumulation bound violated: wrong {wrong} > {bound}")
    return probs


def sample_outcomes(probs: dict[int, float], shots: int, seed: int) -> dict[int, int]:
    """Seeded shot sampling from an outcome distribution (demo use)."""
    rng = np.random.default_rng(seed)
    ones = int(rng.binomial(shots, probs[1]))
    return {0: shots - ones, 1: ones}
