"""qsk: single-qubit gate-word compiler, streaming-algorithm simulators, and
classical-bit space accounting."""

__version__ = "0.1.0"

from .su2 import (
    AxisAngle,
    BlochPoint,
    dist_projective,
    dist_spectral,
    haar_sample,
    haar_unitary,
    rotation_about,
    rotation_y,
    to_axis_angle,
)
from .synthesis import (
    DEFAULT_GATE_SET,
    AccuracyError,
    EpsilonNet,
    GateSet,
    GateWord,
    ResourceLimitError,
    SynthesisResult,
    basic_approx,
    build_net,
    cached_build_net,
    count_covering_segments,
    gc_decompose,
    get_gate_set,
    load_net,
    probe_targets,
    register_gate_set,
    save_net,
    solovay_kitaev,
    synth_to_accuracy,
    word_unitary,
)
from .partialmod import (
    PartialModInstance,
    QubitState,
    parse_bits,
    required_accuracy,
    run_exact,
    run_perturbed,
    run_synthesized,
)
from .equality import (
    BranchState,
    FingerprintSearch,
    FingerprintSearchError,
    FingerprintSet,
    PerturbationMatrix,
    acceptance_amplitude,
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
from .accounting import (
    SpaceReport,
    bits_per_slot,
    build_report,
    classical_baseline,
    equality_storage_bits,
    program_bits,
)

__all__ = [
    "AxisAngle",
    "BlochPoint",
    "dist_projective",
    "dist_spectral",
    "haar_sample",
    "haar_unitary",
    "rotation_about",
    "rotation_y",
    "to_axis_angle",
    "DEFAULT_GATE_SET",
    "AccuracyError",
    "EpsilonNet",
    "GateSet",
    "GateWord",
    "ResourceLimitError",
    "SynthesisResult",
    "basic_approx",
    "build_net",
    "cached_build_net",
    "count_covering_segments",
    "gc_decompose",
    "get_gate_set",
    "probe_targets",
    "register_gate_set",
    "load_net",
    "save_net",
    "solovay_kitaev",
    "synth_to_accuracy",
    "word_unitary",
    "PartialModInstance",
    "QubitState",
    "parse_bits",
    "required_accuracy",
    "run_exact",
    "run_perturbed",
    "run_synthesized",
    "BranchState",
    "FingerprintSearch",
    "FingerprintSearchError",
    "FingerprintSet",
    "PerturbationMatrix",
    "acceptance_amplitude",
    "find_fingerprint_set",
    "fingerprint_size",
    "max_cos_residual",
    "next_pow2",
    "parse_fingerprint_set",
    "run_streaming",
    "serialize_fingerprint_set",
    "set_entropy",
    "simulate_statevector",
    "verify_fingerprint_set",
    "verify_perturbed",
    "worst_perturbed_accept",
    "SpaceReport",
    "bits_per_slot",
    "build_report",
    "classical_baseline",
    "equality_storage_bits",
    "program_bits",
    "__version__",
]
