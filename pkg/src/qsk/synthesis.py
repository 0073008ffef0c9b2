"""Compiling single-qubit unitaries into words over a finite universal gate set.

The compiler has two stages. An epsilon-net enumerates every word up to a
bounded length over the gate set, deduplicates the realised unitaries in
projective distance, and measures its own covering radius on a fixed Haar probe
sample. On top of that base, a group-commutator recursion squeezes the error of
the nearest net entry by decomposing the residual into a balanced commutator
V W V^dag W^dag of two rotations, each of which is again approximated one level
shallower. Word length multiplies by five per level while the error drops with
an exponent of roughly 3/2.

Also provided: the multiplicative segment-covering count for tiling an angle
interval [1, p0] with relative-accuracy-eps segments.
"""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .su2 import (
    IDENTITY,
    RENORM_INTERVAL,
    assert_unitary,
    dist_projective,
    haar_sample,
    renormalize,
    rotation_about,
    to_axis_angle,
)

# The probe sample used for all covering-radius measurements is fixed, so a net
# built twice from the same gate set and length bound is identical, resolution
# included. Never reseed from user configuration.
PROBE_SEED = 20614
PROBE_COUNT = 10_000
PREPROBE_COUNT = 2_048

MAX_WORD_LENGTH = 16
MAX_NET_WORDS = 2_000_000
GC_MAX_DIST = 0.5

# Word-length law: every depth-n result has length <= 5**n * (l0 + LENGTH_SLACK).
# Plain concatenation adds nothing beyond the recursion itself, so the slack is 0.
LENGTH_SLACK = 0

CACHE_ENV_VAR = "QSK_CACHE_DIR"
_CACHE_MAGIC = b"QSKNET01"


class ResourceLimitError(RuntimeError):
    """An enumeration or recursion cap was exceeded."""


class AccuracyError(RuntimeError):
    """Requested accuracy proved unreachable; carries the best result seen."""

    def __init__(self, message: str, best: "SynthesisResult"):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class GateWord:
    """A sequence of generator indices over a named gate set."""

    gate_set_name: str
    symbols: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True)
class SynthesisResult:
    word: GateWord
    achieved_error: float
    recursion_depth: int


class GateSet:
    """Named, ordered collection of single-qubit generators."""

    def __init__(self, name: str, generators):
        labels = [lab for lab, _ in generators]
        if len(set(labels)) != len(labels):
            raise ValueError("generator labels must be unique")
        if not 1 <= len(labels) <= 255:
            raise ValueError("gate set must have between 1 and 255 generators")
        self.name = name
        self.labels = tuple(labels)
        self.matrices = np.stack([assert_unitary(m, f"generator {lab}") for lab, m in generators])
        self._inverse = self._inverse_table()

    def __len__(self) -> int:
        return len(self.labels)

    def _inverse_table(self):
        table = []
        for i in range(len(self.labels)):
            inv = None
            for j in range(len(self.labels)):
                if dist_projective(self.matrices[i] @ self.matrices[j], IDENTITY) <= 1e-9:
                    inv = j
                    break
            table.append(inv)
        return tuple(table)

    def adjoint_symbols(self, symbols: tuple[int, ...]) -> tuple[int, ...]:
        """Symbol sequence realising the adjoint: reversed order, each inverted."""
        out = []
        for s in reversed(symbols):
            inv = self._inverse[s]
            if inv is None:
                raise ValueError(
                    f"gate set {self.name!r}: generator {self.labels[s]!r} has no inverse in the set"
                )
            out.append(inv)
        return tuple(out)

    def word(self, symbols) -> GateWord:
        symbols = tuple(int(s) for s in symbols)
        if any(not 0 <= s < len(self.labels) for s in symbols):
            raise ValueError(f"symbol out of range for gate set {self.name!r}")
        return GateWord(self.name, symbols)

    def word_unitary(self, word: GateWord) -> np.ndarray:
        if word.gate_set_name != self.name:
            raise ValueError(f"word targets gate set {word.gate_set_name!r}, not {self.name!r}")
        if any(not 0 <= s < len(self.labels) for s in word.symbols):
            raise ValueError(f"symbol out of range for gate set {self.name!r}")
        acc = IDENTITY
        for k, s in enumerate(word.symbols, start=1):
            acc = acc @ self.matrices[s]
            if k % RENORM_INTERVAL == 0:
                acc = renormalize(acc)
        return renormalize(acc) if word.symbols else IDENTITY

    def word_adjoint(self, word: GateWord) -> GateWord:
        return GateWord(self.name, self.adjoint_symbols(word.symbols))


def _standard_generators():
    h = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
    t = np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex)
    return [("h", h), ("t", t), ("tdg", t.conj().T)]


# Default synthesis basis: the single-qubit members of the standard universal
# set, with the redundant phase gate (= t squared) dropped and tdg added so word
# adjoints stay inside the set.
DEFAULT_GATE_SET = GateSet("h-t-tdg", _standard_generators())

_REGISTRY: dict[str, GateSet] = {}


def register_gate_set(gs: GateSet, overwrite: bool = False) -> GateSet:
    if not overwrite and gs.name in _REGISTRY and _REGISTRY[gs.name] is not gs:
        raise ValueError(f"gate set {gs.name!r} already registered")
    _REGISTRY[gs.name] = gs
    return gs


def get_gate_set(name: str) -> GateSet:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown gate set {name!r}") from None


register_gate_set(DEFAULT_GATE_SET)


def word_unitary(word: GateWord, gate_set: GateSet | None = None) -> np.ndarray:
    """Multiply out a word; the gate set is looked up by name when not given."""
    gs = gate_set if gate_set is not None else get_gate_set(word.gate_set_name)
    return gs.word_unitary(word)


def probe_targets(count: int) -> np.ndarray:
    """Leading `count` targets of the fixed Haar probe sample, shape (count, 2, 2).

    Shared by net resolution measurements and the scaling sweep, so results
    keyed to the probe sample are comparable across seeds and runs.
    """
    if not 1 <= count <= PROBE_COUNT:
        raise ValueError(f"count must be in [1, {PROBE_COUNT}]")
    return haar_sample(PROBE_COUNT, np.random.default_rng(PROBE_SEED))[:count]


_PROBE_CACHE: dict[int, np.ndarray] = {}


def _probe_flat(count: int) -> np.ndarray:
    # Generator streams fill in C order, so a shorter draw from the same seed
    # is a prefix of a longer one; any `count` stays inside the fixed sample.
    if count not in _PROBE_CACHE:
        sample = haar_sample(count, np.random.default_rng(PROBE_SEED))
        _PROBE_CACHE[count] = sample.reshape(count, 4)
    return _PROBE_CACHE[count]


def _covering_radius(entries_flat: np.ndarray, probes_flat: np.ndarray, chunk: int = 256) -> float:
    """max over probes of the projective distance to the nearest entry."""
    entries_ct = entries_flat.conj().T
    worst_score = 2.0
    for start in range(0, len(probes_flat), chunk):
        scores = np.abs(probes_flat[start : start + chunk] @ entries_ct)
        worst_score = min(worst_score, float(scores.max(axis=1).min()))
    return math.sqrt(max(2.0 - worst_score, 0.0))


def _greedy_dedup(flat: np.ndarray, score_cut: float, block: int = 1024) -> list[int]:
    """Indices of entries pairwise farther apart than the threshold.

    Processed in input order, so earlier (shorter, lexicographically smaller)
    words win their cell.
    """
    n = len(flat)
    kept_rows = np.empty((n, 4), dtype=complex)
    kept_rows[0] = flat[0]
    kept: list[int] = [0]
    for start in range(1, n, block):
        cand = flat[start : start + block]
        cand_conj = cand.conj()
        vs_kept = np.abs(cand_conj @ kept_rows[: len(kept)].T)
        ok = (vs_kept < score_cut).all(axis=1)
        vs_self = np.abs(cand_conj @ cand.T)
        local: list[int] = []
        for bi in np.flatnonzero(ok):
            if local and vs_self[bi, local].max() >= score_cut:
                continue
            kept_rows[len(kept)] = cand[bi]
            kept.append(start + int(bi))
            local.append(int(bi))
    return kept


class EpsilonNet:
    """All words up to a length bound, deduplicated, with measured resolution.

    `words[k]`/`mats[k]` are parallel; `eps0` is the covering radius over the
    fixed PROBE_COUNT-target Haar sample, measured after deduplication. The
    dedup threshold is a quarter of the pre-dedup covering radius, measured on
    the fly over the first PREPROBE_COUNT probes of the same fixed sample.
    """

    def __init__(self, gate_set: GateSet, max_word_length: int, words, mats, eps0: float, dedup_threshold: float):
        self.gate_set = gate_set
        self.max_word_length = max_word_length
        self.words = words
        self.mats = np.asarray(mats, dtype=complex)
        self.eps0 = eps0
        self.dedup_threshold = dedup_threshold
        self._flat_conj = self.mats.reshape(len(words), 4).conj()

    def __len__(self) -> int:
        return len(self.words)

    @property
    def entries(self):
        return [(self.gate_set.word(w), self.mats[i]) for i, w in enumerate(self.words)]

    def nearest(self, u) -> tuple[int, float]:
        """Index of the entry closest to `u` in projective distance, and that distance."""
        u4 = np.asarray(u, dtype=complex).reshape(4)
        scores = np.abs(self._flat_conj @ u4)
        idx = int(np.argmax(scores))
        # The score screen is exact enough to pick the winner; recompute its
        # distance precisely (the sqrt(2 - score) form bottoms out near 1e-8).
        return idx, dist_projective(np.asarray(u, dtype=complex), self.mats[idx])


def build_net(gate_set: GateSet, max_word_length: int, word_cap: int = MAX_NET_WORDS) -> EpsilonNet:
    """Breadth-first enumeration of all words of length <= `max_word_length`.

    Dedup keeps the shortest word per projective-distance cell, ties broken
    lexicographically by symbol sequence (both implied by enumeration order).
    """
    if not 1 <= max_word_length <= MAX_WORD_LENGTH:
        raise ValueError(f"max_word_length must be in [1, {MAX_WORD_LENGTH}]")
    g = len(gate_set)
    total = sum(g**k for k in range(max_word_length + 1))
    if total > word_cap:
        raise ResourceLimitError(
            f"net over {g} generators at length {max_word_length} needs {total} words (cap {word_cap})"
        )

    words: list[tuple[int, ...]] = [()]
    level_words: list[tuple[int, ...]] = [()]
    mats = [IDENTITY[None, :, :]]
    level_mats = IDENTITY[None, :, :]
    for _ in range(max_word_length):
        level_words = [w + (i,) for w in level_words for i in range(g)]
        level_mats = np.einsum("mij,gjk->mgik", level_mats, gate_set.matrices).reshape(-1, 2, 2)
        words.extend(level_words)
        mats.append(level_mats)
    all_mats = np.concatenate(mats, axis=0)

    flat = all_mats.reshape(len(words), 4)
    eps_pre = _covering_radius(flat, _probe_flat(PREPROBE_COUNT))
    tau = eps_pre / 4.0
    kept = _greedy_dedup(flat, score_cut=2.0 - tau * tau)

    kept_words = [words[i] for i in kept]
    kept_mats = np.ascontiguousarray(all_mats[kept])
    eps0 = _covering_radius(kept_mats.reshape(len(kept), 4), _probe_flat(PROBE_COUNT))
    return EpsilonNet(gate_set, max_word_length, kept_words, kept_mats, eps0, tau)


def basic_approx(net: EpsilonNet, u) -> SynthesisResult:
    """Depth-0 approximation: the net entry nearest to `u`."""
    if len(net) == 0:
        raise ValueError("empty net")
    u = assert_unitary(u, "target")
    idx, dist = net.nearest(u)
    return SynthesisResult(net.gate_set.word(net.words[idx]), dist, 0)


def _align_axes(source, target) -> np.ndarray:
    """Unitary S with S (source.sigma) S^dag = target.sigma for unit 3-vectors.

    Conjugation by rotation_about(a, w) turns Bloch vectors by -w about a, so
    the aligner rotates by minus the angle between the axes.
    """
    a = np.asarray(source, dtype=float)
    b = np.asarray(target, dtype=float)
    cross = np.cross(a, b)
    dot = float(np.clip(np.dot(a, b), -1.0, 1.0))
    norm = float(np.linalg.norm(cross))
    if norm < 1e-14:
        if dot > 0.0:
            return IDENTITY
        # Antiparallel: half-turn about any axis perpendicular to `a`.
        pivot = np.zeros(3)
        pivot[int(np.argmin(np.abs(a)))] = 1.0
        perp = np.cross(a, pivot)
        perp /= np.linalg.norm(perp)
        return rotation_about(perp, -math.pi)
    omega = math.atan2(norm, dot)
    return rotation_about(cross / norm, -omega)


def gc_decompose(delta) -> tuple[np.ndarray, np.ndarray]:
    """Balanced group-commutator factors: V W V^dag W^dag = delta up to phase.

    For a residual rotation by angle phi, both factors are rotations by the
    angle theta solving sin(phi/2) = 2 sin^2(theta/2) sqrt(1 - sin^4(theta/2)),
    about the x- and y-axes, then conjugated onto delta's axis. The solution is
    exact: sin^2(theta/2) = sin(phi/4).
    """
    delta = assert_unitary(delta, "delta")
    d = dist_projective(delta, IDENTITY)
    if d > GC_MAX_DIST + 1e-12:
        raise ValueError(f"delta is {d:.4f} from identity; group commutator needs <= {GC_MAX_DIST}")
    aa = to_axis_angle(delta)
    phi = aa.angle
    if phi < 1e-14:
        return IDENTITY.copy(), IDENTITY.copy()
    theta = 2.0 * math.asin(math.sqrt(math.sin(phi / 4.0)))
    v0 = rotation_about((1.0, 0.0, 0.0), theta)
    w0 = rotation_about((0.0, 1.0, 0.0), theta)
    comm = v0 @ w0 @ v0.conj().T @ w0.conj().T
    s = _align_axes(to_axis_angle(comm).axis, aa.axis)
    s_dag = s.conj().T
    return s @ v0 @ s_dag, s @ w0 @ s_dag


def _sk_recurse(net: EpsilonNet, u, depth: int) -> tuple[tuple[int, ...], np.ndarray]:
    if depth == 0:
        idx, _ = net.nearest(u)
        return net.words[idx], net.mats[idx]
    prev_word, prev_mat = _sk_recurse(net, u, depth - 1)
    v, w = gc_decompose(u @ prev_mat.conj().T)
    v_word, v_mat = _sk_recurse(net, v, depth - 1)
    w_word, w_mat = _sk_recurse(net, w, depth - 1)
    gs = net.gate_set
    symbols = (
        v_word + w_word + gs.adjoint_symbols(v_word) + gs.adjoint_symbols(w_word) + prev_word
    )
    mat = v_mat @ w_mat @ v_mat.conj().T @ w_mat.conj().T @ prev_mat
    return symbols, renormalize(mat)


def solovay_kitaev(net: EpsilonNet, u, depth: int) -> SynthesisResult:
    """Depth-`depth` group-commutator recursion on top of the net's base approximation.

    The achieved error is recomputed by multiplying the returned word back out.
    """
    if not 0 <= depth <= 6:
        raise ValueError("recursion depth must be in [0, 6]")
    u = assert_unitary(u, "target")
    symbols, _ = _sk_recurse(net, u, depth)
    word = net.gate_set.word(symbols)
    realized = net.gate_set.word_unitary(word)
    return SynthesisResult(word, dist_projective(u, realized), depth)


def synth_to_accuracy(net: EpsilonNet, u, eps: float, max_depth: int = 6) -> SynthesisResult:
    """Shallowest recursion depth whose achieved error is <= eps."""
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if not 0 <= max_depth <= 6:
        raise ValueError("max_depth must be in [0, 6]")
    best: SynthesisResult | None = None
    for depth in range(max_depth + 1):
        result = solovay_kitaev(net, u, depth)
        if result.achieved_error <= eps:
            return result
        if best is None or result.achieved_error < best.achieved_error:
            best = result
    raise AccuracyError(
        f"accuracy {eps:g} unreachable by depth {max_depth} (best {best.achieved_error:g})", best
    )


def count_covering_segments(p0: int, eps: float) -> int:
    """Number of segments tiling [1, p0] when each iterate grows by (1+eps)/(1-eps).

    Pure iteration of q_{i+1} = ((1+eps)/(1-eps)) q_i from q_1 = 1; counts the
    iterates strictly below p0, with a minimum of one segment.
    """
    if p0 < 1:
        raise ValueError("p0 must be >= 1")
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must be in (0, 1)")
    ratio = (1.0 + eps) / (1.0 - eps)
    q = 1.0
    count = 0
    while q < p0:
        count += 1
        q *= ratio
    return max(count, 1)


def net_cache_path(gate_set_name: str, max_word_length: int, cache_dir) -> Path:
    return Path(cache_dir) / f"net_{gate_set_name}_l{max_word_length}.qsknet"


def save_net(net: EpsilonNet, path) -> None:
    """Write the net cache: header (gate-set name, length bound, entry count),
    then per entry the word length, its symbol bytes, and 8 float64 matrix
    components (re/im, row-major)."""
    name_bytes = net.gate_set.name.encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<HHI", len(name_bytes), net.max_word_length, len(net)))
        fh.write(name_bytes)
        for word, mat in zip(net.words, net.mats):
            fh.write(struct.pack("<I", len(word)))
            fh.write(bytes(word))
            comps = [x for entry in mat.reshape(4) for x in (entry.real, entry.imag)]
            fh.write(struct.pack("<8d", *comps))


def load_net(path) -> EpsilonNet:
    """Read a net cache; the named gate set must be registered.

    The resolution is re-measured over the fixed probe sample instead of being
    stored, which keeps the file schema minimal and is deterministic.
    """
    with open(path, "rb") as fh:
        if fh.read(len(_CACHE_MAGIC)) != _CACHE_MAGIC:
            raise ValueError(f"{path}: not a net cache file")
        name_len, max_word_length, count = struct.unpack("<HHI", fh.read(8))
        name = fh.read(name_len).decode("utf-8")
        gate_set = get_gate_set(name)
        words = []
        mats = np.empty((count, 2, 2), dtype=complex)
        for k in range(count):
            (word_len,) = struct.unpack("<I", fh.read(4))
            words.append(tuple(fh.read(word_len)))
            comps = struct.unpack("<8d", fh.read(64))
            mats[k] = np.array(
                [complex(comps[2 * j], comps[2 * j + 1]) for j in range(4)]
            ).reshape(2, 2)
    eps0 = _covering_radius(mats.reshape(count, 4), _probe_flat(PROBE_COUNT))
    # The file schema does not carry the build-time dedup threshold; 0.0 is a
    # sound lower bound on the pairwise separation of the stored entries.
    return EpsilonNet(gate_set, max_word_length, words, mats, eps0, 0.0)


def cached_build_net(gate_set: GateSet, max_word_length: int, cache_dir=None) -> EpsilonNet:
    """Build the net, or reuse a cache file keyed by gate-set name and length bound."""
    directory = cache_dir if cache_dir is not None else os.environ.get(CACHE_ENV_VAR)
    if directory is None:
        return build_net(gate_set, max_word_length)
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = net_cache_path(gate_set.name, max_word_length, directory)
    if path.exists():
        return load_net(path)
    net = build_net(gate_set, max_word_length)
    save_net(net, path)
    return net
