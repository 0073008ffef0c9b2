"""Fingerprint-based equality testing over two streamed bitstrings.

The two halves x and y arrive bit by bit, x entirely before y. A register of t
branches accumulates, per branch j, the rotation angle pi * m_j * (val(x) -
val(y)) / 2^n, where arrival index i carries bit weight 2^i (i = 0-based) and
the m_j are the fingerprint integers. Equal strings return every branch to
zero; for a good fingerprint set the branch cosines nearly cancel for every
nonzero difference, so a wrong accept happens with probability at most eps.

Angles are tracked as integer residues of m_j * 2^i modulo 2^(n+1) (the cosine
period), which keeps the simulation exact: results are independent of update
order to the bit, and match the closed form at full precision even for n = 16.
A full statevector simulator over the (2 t)-dimensional register serves as the
cross-checking oracle for small t.

Fingerprint sets are found by seeded uniform sampling and verified by brute
force over all nonzero differences, following the probabilistic existence
argument (Azuma-Hoeffding gives a positive success rate); the perturbed
variant additionally bounds the sine sums against per-gate angle errors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

Bits = tuple[int, ...]


class FingerprintSearchError(RuntimeError):
    """Sampling never produced a verified set; carries the best deviation seen."""

    def __init__(self, message: str, attempts: int, best_deviation: float):
        super().__init__(message)
        self.attempts = attempts
        self.best_deviation = best_deviation


@dataclass(frozen=True)
class FingerprintSet:
    """Fingerprint integers m_j in [0, 2^n - 1] with their target eps.

    t is not forced to a power of two here; the statevector simulator requires
    a power of two (exact Hadamard-layer state preparation), and the search
    rounds up by default for that reason.
    """

    n: int
    m_values: tuple[int, ...]
    epsilon: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError("epsilon must be in (0, 1]")
        if len(self.m_values) < 1:
            raise ValueError("need at least one fingerprint value")
        top = 1 << self.n
        if any(not 0 <= m < top for m in self.m_values):
            raise ValueError(f"m values must lie in [0, {top - 1}]")

    @property
    def t(self) -> int:
        return len(self.m_values)


@dataclass(frozen=True)
class FingerprintSearch:
    fingerprint_set: FingerprintSet
    attempts: int
    max_residual: float


@dataclass(frozen=True)
class PerturbationMatrix:
    """Per-(bit, branch) angle errors delta[i][j] with |delta_ij| <= bound."""

    delta: tuple[tuple[float, ...], ...]
    bound: float

    def __post_init__(self):
        worst = max((abs(d) for row in self.delta for d in row), default=0.0)
        if worst > self.bound + 1e-15:
            raise ValueError(f"|delta| up to {worst} exceeds bound {self.bound}")

    @classmethod
    def random(cls, n: int, t: int, seed: int, bound: float | None = None) -> "PerturbationMatrix":
        bound = 1.0 / n if bound is None else bound
        rng = np.random.default_rng(seed)
        delta = rng.uniform(-bound, bound, size=(n, t))
        return cls(tuple(tuple(row) for row in delta), bound)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.delta, dtype=float)


@dataclass(frozen=True)
class BranchState:
    """Accumulated per-branch phase as integer residues mod 2^(n+1)."""

    n: int
    residues: tuple[int, ...]

    @property
    def angles(self) -> tuple[float, ...]:
        """Accumulated rotation angles in radians, one per branch."""
        scale = math.pi / (1 << self.n)
        return tuple(scale * r for r in self.residues)


def next_pow2(k: int) -> int:
    if k < 1:
        raise ValueError("k must be >= 1")
    return 1 << (k - 1).bit_length()


def fingerprint_size(n: int, eps: float) -> int:
    """The (2/eps)(n+3) branch count, rounded up to an integer."""
    return math.ceil((2.0 / eps) * (n + 3))


def _parse_half(bits, n: int, half: str) -> Bits:
    if isinstance(bits, str):
        bits = (ch for ch in bits if not ch.isspace())
    out = tuple(int(b) for b in bits)
    if len(out) != n or any(b not in (0, 1) for b in out):
        raise ValueError(f"{half} must be exactly {n} bits of 0/1")
    return out


def bits_value(bits: Bits) -> int:
    """Integer encoded by arrival order: index i carries weight 2^i."""
    return sum(b << i for i, b in enumerate(bits))


def _reduced_weights(fs: FingerprintSet) -> np.ndarray:
    """(n, t) integer residues of m_j * 2^i modulo the cosine period 2^(n+1)."""
    modulus = 1 << (fs.n + 1)
    m = np.asarray(fs.m_values, dtype=np.int64)
    return np.stack([(m << i) % modulus for i in range(fs.n)])


def acceptance_amplitude(x: int, y: int, fs: FingerprintSet) -> float:
    """(1/t) sum_j cos(pi m_j (x - y) / 2^n); accept probability is its square."""
    top = 1 << fs.n
    if not (0 <= x < top and 0 <= y < top):
        raise ValueError(f"x and y must lie in [0, {top - 1}]")
    modulus = top << 1
    scale = math.pi / top
    total = 0.0
    for m in fs.m_values:
        total += math.cos(scale * ((m * (x - y)) % modulus))
    return total / fs.t


def run_streaming(x_bits, y_bits, fs: FingerprintSet, msb_first: bool = False) -> float:
    """Accept probability from the branch-angle simulation of the full stream.

    All bits of x are consumed before any bit of y; a 1 for x_i adds the branch
    angles pi m_j 2^i / 2^n, a 1 for y_i subtracts them. With `msb_first` the
    arrival order carries the weights in reverse (the first bit is the most
    significant), for comparison between the two published weightings; the
    default is the convention the verification sums are stated in.
    """
    x = _parse_half(x_bits, fs.n, "x")
    y = _parse_half(y_bits, fs.n, "y")
    weights = _reduced_weights(fs)
    if msb_first:
        weights = weights[::-1]
    modulus = 1 << (fs.n + 1)
    residues = np.zeros(fs.t, dtype=np.int64)
    for i, bit in enumerate(x):
        if bit:
            residues = (residues + weights[i]) % modulus
    for i, bit in enumerate(y):
        if bit:
            residues = (residues - weights[i]) % modulus
    state = BranchState(fs.n, tuple(int(r) for r in residues))
    amplitude = float(np.mean(np.cos(state.angles)))
    return amplitude * amplitude


def _hadamard_layer(register: np.ndarray, qubits: int) -> np.ndarray:
    """Apply H to every qubit of the t-dimensional register axis."""
    state = register.reshape((2,) + (2,) * qubits)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    for axis in range(1, qubits + 1):
        lo = np.take(state, 0, axis=axis)
        hi = np.take(state, 1, axis=axis)
        state = np.stack(((lo + hi) * inv_sqrt2, (lo - hi) * inv_sqrt2), axis=axis)
    return state.reshape(2, -1)


def simulate_statevector(x_bits, y_bits, fs: FingerprintSet, msb_first: bool = False) -> float:
    """Accept probability from the explicit (2 t)-dimensional state simulation.

    Hadamard layer on the branch register, controlled rotations per arriving 1,
    inverse Hadamard layer, then the probability of the all-zeros outcome.
    Requires t to be a power of two (at most 64) so the layers are exact.
    """
    t = fs.t
    if t > 64 or (t & (t - 1)) != 0:
        raise ValueError("statevector oracle needs t a power of two, at most 64")
    x = _parse_half(x_bits, fs.n, "x")
    y = _parse_half(y_bits, fs.n, "y")
    qubits = t.bit_length() - 1

    scale = math.pi / (1 << fs.n)
    weights = _reduced_weights(fs)
    if msb_first:
        weights = weights[::-1]
    angles = weights.astype(float) * scale

    state = np.zeros((2, t), dtype=complex)
    state[0, 0] = 1.0
    state = _hadamard_layer(state, qubits)
    for bits, sign in ((x, 1.0), (y, -1.0)):
        for i, bit in enumerate(bits):
            if bit:
                c = np.cos(sign * angles[i])
                s = np.sin(sign * angles[i])
                a0, a1 = state[0].copy(), state[1].copy()
                state[0] = c * a0 + s * a1
                state[1] = -s * a0 + c * a1
    state = _hadamard_layer(state, qubits)

    norm = float(np.sum(np.abs(state) ** 2))
    if abs(norm - 1.0) > 1e-12:
        raise AssertionError(f"statevector norm drifted to {norm}")
    return float(abs(state[0, 0]) ** 2)


def max_cos_residual(fs: FingerprintSet) -> float:
    """max over g != 0 of |sum_j cos(pi m_j g / 2^n)| / t, by brute force."""
    if fs.n > 16:
        raise ValueError("brute force over differences is capped at n = 16")
    top = 1 << fs.n
    modulus = top << 1
    m = np.asarray(fs.m_values, dtype=np.int64)
    worst = 0.0
    # cos is even in g, so positive differences cover the negative ones.
    for start in range(1, top, 4096):
        g = np.arange(start, min(start + 4096, top), dtype=np.int64)
        residues = (g[:, None] * m[None, :]) % modulus
        sums = np.abs(np.cos(residues * (math.pi / top)).sum(axis=1))
        worst = max(worst, float(sums.max()))
    return worst / fs.t


def verify_fingerprint_set(fs: FingerprintSet) -> bool:
    """True iff every nonzero difference keeps the cosine sum within sqrt(eps)."""
    return max_cos_residual(fs) <= math.sqrt(fs.epsilon)


def _signed_vectors(n: int) -> np.ndarray:
    """All sign patterns in {-1, 0, 1}^n except all-zero, shape (3^n - 1, n)."""
    if n > 10:
        raise ValueError("signed-difference enumeration is capped at n = 10")
    grid = np.array(list(itertools.product((-1, 0, 1), repeat=n)), dtype=float)
    return grid[np.any(grid != 0.0, axis=1)]


def _sine_rows(fs: FingerprintSet, pert: PerturbationMatrix) -> np.ndarray:
    """Row sums R_i = sum_j sin(pi m_j 2^i / 2^n) delta_ij, shape (n,)."""
    delta = pert.as_array()
    if delta.shape != (fs.n, fs.t):
        raise ValueError(f"perturbation shape {delta.shape} != ({fs.n}, {fs.t})")
    scale = math.pi / (1 << fs.n)
    sines = np.sin(_reduced_weights(fs).astype(float) * scale)
    return (sines * delta).sum(axis=1)


def verify_perturbed(fs: FingerprintSet, pert: PerturbationMatrix) -> bool:
    """Both conditions: cosine sums small for every integer difference, and the
    perturbation-weighted sine sums small for every signed bit-difference
    vector.

    The sine sum depends on the per-bit signs g_i, not just the integer
    difference, so the second condition enumerates g in {-1, 0, 1}^n \\ {0}.
    """
    if not verify_fingerprint_set(fs):
        return False
    rows = _sine_rows(fs, pert)
    worst = float(np.abs(_signed_vectors(fs.n) @ rows).max())
    return worst / fs.t <= math.sqrt(fs.epsilon)


def worst_perturbed_accept(fs: FingerprintSet, pert: PerturbationMatrix) -> float:
    """max over x != y of the accept amplitude when gate i on branch j over- or
    under-rotates by delta_ij, maximised over all signed difference patterns."""
    signs = _signed_vectors(fs.n)
    m = np.asarray(fs.m_values, dtype=np.int64)
    top = 1 << fs.n
    modulus = top << 1
    weights = np.asarray([1 << i for i in range(fs.n)], dtype=np.int64)
    delta = pert.as_array()
    worst = 0.0
    for start in range(0, len(signs), 2048):
        block = signs[start : start + 2048]
        g_int = (block.astype(np.int64) @ weights)
        base = ((g_int[:, None] * m[None, :]) % modulus) * (math.pi / top)
        shift = block @ delta
        amps = np.abs(np.cos(base + shift).mean(axis=1))
        worst = max(worst, float(amps.max()))
    return worst


def find_fingerprint_set(
    n: int, eps: float, seed: int, max_attempts: int, t: int | None = None
) -> FingerprintSearch:
    """Sample fingerprint integers uniformly (with replacement) until a set
    verifies, deriving one generator per attempt from the seed.

    The default branch count is (2/eps)(n+3) rounded up to the next power of
    two; the whole padded set is verified.
    """
    if max_attempts < 1:
        raise ValueError("max_attempts must be >= 1")
    count = next_pow2(fingerprint_size(n, eps)) if t is None else t
    threshold = math.sqrt(eps)
    best = math.inf
    for attempt in range(1, max_attempts + 1):
        rng = np.random.default_rng([seed, attempt])
        values = rng.integers(0, 1 << n, size=count)
        candidate = FingerprintSet(n, tuple(int(m) for m in values), eps)
        residual = max_cos_residual(candidate)
        if residual <= threshold:
            return FingerprintSearch(candidate, attempt, residual)
        best = min(best, residual)
    raise FingerprintSearchError(
        f"no verified set for n={n}, eps={eps} in {max_attempts} attempts "
        f"(best max residual {best:.6f} > {threshold:.6f})",
        max_attempts,
        best,
    )


def set_entropy(n: int, t: int) -> tuple[float, float]:
    """Entropy in nats of choosing t of the 2^n integers: exact log-binomial
    via log-gamma, and the expansion n t ln 2 - t^2/2^n - t ln t + t."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    top = 1 << n
    if t > top:
        raise ValueError(f"t={t} exceeds 2^n={top}")
    if t == 0:
        return 0.0, 0.0
    exact = math.lgamma(top + 1) - math.lgamma(t + 1) - math.lgamma(top - t + 1)
    approx = t * n * math.log(2.0) - (t * t) / top - t * math.log(t) + t
    return exact, approx


def serialize_fingerprint_set(fs: FingerprintSet) -> str:
    """Text format: first line "n t epsilon", then one m value per line."""
    lines = [f"{fs.n} {fs.t} {fs.epsilon:.17g}"]
    lines.extend(str(m) for m in fs.m_values)
    return "\n".join(lines) + "\n"


def parse_fingerprint_set(text: str) -> FingerprintSet:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty fingerprint text")
    head = lines[0].split()
    if len(head) != 3:
        raise ValueError("header must be: n t epsilon")
    n, t, eps = int(head[0]), int(head[1]), float(head[2])
    values = tuple(int(ln) for ln in lines[1:])
    if len(values) != t:
        raise ValueError(f"expected {t} values, found {len(values)}")
    return FingerprintSet(n, values, eps)
