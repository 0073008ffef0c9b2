"""Command-line harness: parameter sweeps emitting deterministic CSV.

Every run writes a CSV whose '#'-prefixed header records the tool version, the
full resolved configuration, and the seed; floats are printed with 17
significant digits, so identical configuration and seed give byte-identical
files.

Randomness policy: all draws derive from the single --seed through seed
sequences [seed, command_code, row_index]; the fingerprint search further
splits per attempt as [row_seed, attempt]. The scaling command draws nothing:
its targets are the leading entries of the fixed net probe sample, so its fit
depends only on the net (which is deterministic per gate set and length bound).

Exit codes: 0 success, 2 configuration error, 3 resource cap or unreachable
accuracy, 4 scaling-fit band violation.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .accounting import classical_baseline, equality_storage_bits, program_bits
from .equality import (
    FingerprintSearchError,
    find_fingerprint_set,
    max_cos_residual,
    parse_fingerprint_set,
    serialize_fingerprint_set,
)
from .partialmod import PartialModInstance, required_accuracy, run_synthesized
from .su2 import rotation_y
from .synthesis import (
    AccuracyError,
    ResourceLimitError,
    cached_build_net,
    count_covering_segments,
    get_gate_set,
    probe_targets,
    solovay_kitaev,
    synth_to_accuracy,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_ACCEPTANCE = 4

COMMAND_CODES = {"synth": 1, "scaling": 2, "partialmod": 3, "equality": 4, "segments": 5}

FIT_C_LOW, FIT_C_HIGH = 1.0, 5.0
FIT_R2_MIN = 0.9

_GLOBAL_DEFAULTS = {
    "seed": 1,
    "gate_set": "h-t-tdg",
    "l0": 10,
    "depth_max": 6,
    "out": "-",
}

_COMMAND_DEFAULTS = {
    "synth": {"angle": 0.3, "eps_list": [1e-1, 1e-2, 1e-3]},
    "scaling": {"targets": 100, "depth_max": 5},
    "partialmod": {
        "p_list": [2, 3, 4, 8, 16],
        "v_list": [0, 1, 2, 4, 8],
        "delta_list": [0.01, 0.04, 0.1],
    },
    "equality": {"n_list": [8, 12], "eps_list": [0.25], "max_attempts": 100},
    "segments": {"p0_list": [100, 10_000, 1_000_000], "eps_list": [0.1, 0.01, 0.001]},
}

_CONVERTERS = {
    "seed": int,
    "gate_set": str,
    "l0": int,
    "depth_max": int,
    "out": str,
    "angle": float,
    "targets": int,
    "max_attempts": int,
    "import_set": str,
    "export_set": str,
    "stream": str,
    "stream_length": int,
    "placement_seed": int,
    "eps_list": lambda s: [float(x) for x in str(s).split(",")],
    "p_list": lambda s: [int(x) for x in str(s).split(",")],
    "v_list": lambda s: [int(x) for x in str(s).split(",")],
    "delta_list": lambda s: [float(x) for x in str(s).split(",")],
    "n_list": lambda s: [int(x) for x in str(s).split(",")],
    "p0_list": lambda s: [int(x) for x in str(s).split(",")],
}


class ConfigError(ValueError):
    pass


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (list, tuple)):
        return ",".join(_fmt(v) for v in value)
    return str(value)


def _write_csv(out_path: str, comments: list[str], columns: list[str], rows) -> None:
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(columns))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if out_path == "-":
        sys.stdout.write(text)
    else:
        with open(out_path, "w", newline="\n") as fh:
            fh.write(text)


def _read_config_file(path: str) -> dict:
    values = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"config line without '=': {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _CONVERTERS:
            raise ConfigError(f"unknown config key {key!r}")
        values[key] = _CONVERTERS[key](val.strip())
    return values


def _resolve(args: argparse.Namespace) -> dict:
    """Merge CLI > config file > defaults into one plain dict."""
    command = args.command
    merged = dict(_GLOBAL_DEFAULTS)
    merged.update(_COMMAND_DEFAULTS[command])
    if getattr(args, "config", None):
        for key, value in _read_config_file(args.config).items():
            # Keys belonging to other commands are tolerated and ignored.
            if key in merged or hasattr(args, key):
                merged[key] = value
    for key, cli_value in vars(args).items():
        if key in ("command", "config"):
            continue
        if cli_value is not None:
            merged[key] = cli_value
        else:
            merged.setdefault(key, None)
    merged["command"] = command
    return merged


def _header(cfg: dict, extra: list[str] | None = None) -> list[str]:
    comments = [f"qsk {__version__}", f"command={cfg['command']}", f"seed={cfg['seed']}"]
    for key in sorted(cfg):
        # Output destination and config-file path are execution plumbing, not
        # experiment parameters; identical config+seed must give identical bytes.
        if key in ("command", "seed", "out", "config", "export_set", "import_set"):
            continue
        value = cfg[key]
        if value is None:
            continue
        comments.append(f"config {key}={_fmt(value)}")
    if extra:
        comments.extend(extra)
    return comments


def _net_for(cfg: dict):
    gate_set = get_gate_set(cfg["gate_set"])
    net = cached_build_net(gate_set, cfg["l0"])
    line = (
        f"net gate_set={gate_set.name} l0={cfg['l0']} entries={len(net)} "
        f"eps0={net.eps0:.17g}"
    )
    return net, line


def _row_seed(cfg: dict, index: int) -> int:
    seq = np.random.SeedSequence([cfg["seed"], COMMAND_CODES[cfg["command"]], index])
    return int(seq.generate_state(1)[0])


def fit_power_law(xs, ys) -> tuple[float, float, float]:
    """Least squares of y = a * x^c on the raw values: golden-section search on
    c with the closed-form optimal a per candidate. Returns (a, c, r2)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 4:
        raise ConfigError("power-law fit needs at least 4 sweep points")
    if np.any(xs <= 0.0):
        raise ConfigError("power-law fit needs positive ln(1/eps) values")

    def sse(c: float) -> tuple[float, float]:
        xc = xs**c
        a = float(ys @ xc) / float(xc @ xc)
        resid = ys - a * xc
        return float(resid @ resid), a

    lo, hi = 0.25, 8.0
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    mid_lo = hi - golden * (hi - lo)
    mid_hi = lo + golden * (hi - lo)
    f_lo, f_hi = sse(mid_lo)[0], sse(mid_hi)[0]
    for _ in range(200):
        if f_lo < f_hi:
            hi, mid_hi, f_hi = mid_hi, mid_lo, f_lo
            mid_lo = hi - golden * (hi - lo)
            f_lo = sse(mid_lo)[0]
        else:
            lo, mid_lo, f_lo = mid_lo, mid_hi, f_hi
            mid_hi = lo + golden * (hi - lo)
            f_hi = sse(mid_hi)[0]
    c = 0.5 * (lo + hi)
    resid, a = sse(c)
    ss_tot = float(((ys - ys.mean()) ** 2).sum())
    r2 = 1.0 - resid / ss_tot if ss_tot > 0.0 else 1.0
    return a, c, r2


def fit_band_ok(c: float, r2: float) -> bool:
    return FIT_C_LOW <= c <= FIT_C_HIGH and r2 >= FIT_R2_MIN


def _cmd_synth(cfg: dict) -> int:
    net, net_line = _net_for(cfg)
    columns = ["angle", "eps_requested", "eps_achieved", "length", "depth", "program_bits"]
    rows = []
    g = len(net.gate_set)
    target = rotation_y(cfg["angle"])
    for eps in cfg["eps_list"]:
        result = synth_to_accuracy(net, target, eps, cfg["depth_max"])
        rows.append(
            (
                cfg["angle"],
                eps,
                result.achieved_error,
                len(result.word),
                result.recursion_depth,
                program_bits(result.word, g),
            )
        )
    _write_csv(cfg["out"], _header(cfg, [net_line]), columns, rows)
    return EXIT_OK


def _cmd_scaling(cfg: dict) -> int:
    depths = list(range(cfg["depth_max"] + 1))
    if len(depths) < 4:
        raise ConfigError("scaling needs at least 4 depths (depth_max >= 3)")
    if cfg["targets"] < 1:
        raise ConfigError("targets must be >= 1")
    net, net_line = _net_for(cfg)
    targets = probe_targets(cfg["targets"])
    columns = ["depth", "median_error", "median_length"]
    med_err, med_len = [], []
    for depth in depths:
        errors, lengths = [], []
        for u in targets:
            result = solovay_kitaev(net, u, depth)
            errors.append(result.achieved_error)
            lengths.append(len(result.word))
        med_err.append(float(np.median(errors)))
        med_len.append(float(np.median(lengths)))
    xs = [math.log(1.0 / e) for e in med_err]
    a, c, r2 = fit_power_law(xs, med_len)
    ok = fit_band_ok(c, r2)
    fit_lines = [
        f"fit model=length~a*(ln(1/eps))^c a={a:.17g} c={c:.17g} r2={r2:.17g}",
        f"fit_band {FIT_C_LOW:g}<=c<={FIT_C_HIGH:g} r2>={FIT_R2_MIN:g} "
        f"status={'ok' if ok else 'fail'}",
    ]
    rows = list(zip(depths, med_err, med_len))
    _write_csv(cfg["out"], _header(cfg, [net_line] + fit_lines), columns, rows)
    if not ok:
        print(f"scaling fit outside acceptance band: c={c:.3f} r2={r2:.4f}", file=sys.stderr)
        return EXIT_ACCEPTANCE
    return EXIT_OK


def _instance_for(cfg: dict, p: int, v: int) -> PartialModInstance:
    if cfg.get("stream"):
        inst = PartialModInstance.from_stream(p, cfg["stream"])
        if inst.v != v:
            raise ConfigError(
                f"stream carries {inst.v}*{p} ones; restrict --v to {inst.v} to use it"
            )
        return inst
    if cfg.get("stream_length") is not None:
        seed = cfg.get("placement_seed")
        seed = cfg["seed"] if seed is None else seed
        return PartialModInstance.generate(p, v, cfg["stream_length"], seed)
    # Placement never affects the outcome, so the default sweep streams are all ones.
    return PartialModInstance.from_stream(p, (1,) * (v * p))


def _cmd_partialmod(cfg: dict) -> int:
    net, net_line = _net_for(cfg)
    g = len(net.gate_set)
    columns = [
        "p",
        "v",
        "delta",
        "eps_required",
        "word_length",
        "program_bits",
        "classical_bits",
        "wrong_prob_analytic",
        "wrong_prob_simulated",
    ]
    rows = []
    synth_cache: dict[tuple[int, float], object] = {}
    for p in cfg["p_list"]:
        baseline = classical_baseline("partialmod", {"p": p})
        for v in cfg["v_list"]:
            inst = _instance_for(cfg, p, v)
            for delta in cfg["delta_list"]:
                if v == 0:
                    rows.append((p, v, delta, math.inf, 0, 0, baseline, 0.0, 0.0))
                    continue
                eps_req = required_accuracy(v, p, delta)
                key = (p, eps_req)
                if key not in synth_cache:
                    synth_cache[key] = synth_to_accuracy(
                        net, rotation_y(math.pi / (2 * p)), eps_req, cfg["depth_max"]
                    )
                result = synth_cache[key]
                probs = run_synthesized(inst, result.word, net.gate_set)
                wrong_sim = probs[1 - v % 2]
                wrong_analytic = math.sin(v * p * eps_req) ** 2
                rows.append(
                    (
                        p,
                        v,
                        delta,
                        eps_req,
                        len(result.word),
                        program_bits(result.word, g),
                        baseline,
                        wrong_analytic,
                        wrong_sim,
                    )
                )
    _write_csv(cfg["out"], _header(cfg, [net_line]), columns, rows)
    return EXIT_OK


def _cmd_equality(cfg: dict) -> int:
    columns = [
        "n",
        "eps",
        "t",
        "attempts",
        "max_residual_g",
        "storage_bits_entropy",
        "baseline_bits",
        "worst_false_accept",
    ]
    rows = []
    exported = []
    if cfg.get("import_set"):
        sets = [(parse_fingerprint_set(Path(cfg["import_set"]).read_text()), 0)]
    else:
        sets = []
        pairs = [(n, eps) for n in cfg["n_list"] for eps in cfg["eps_list"]]
        for index, (n, eps) in enumerate(pairs):
            if n > 16:
                raise ConfigError("equality sweep is capped at n = 16 (brute-force verify)")
            search = find_fingerprint_set(n, eps, _row_seed(cfg, index), cfg["max_attempts"])
            sets.append((search.fingerprint_set, search.attempts))
    for fs, attempts in sets:
        residual = max_cos_residual(fs)
        rows.append(
            (
                fs.n,
                fs.epsilon,
                fs.t,
                attempts,
                residual,
                equality_storage_bits(fs.n, fs.epsilon),
                classical_baseline("equality", {"n": fs.n}),
                residual * residual,
            )
        )
        exported.append(fs)
    if cfg.get("export_set"):
        base = Path(cfg["export_set"])
        for fs in exported:
            path = base if len(exported) == 1 else base.with_name(
                f"{base.stem}_n{fs.n}_t{fs.t}{base.suffix}"
            )
            path.write_text(serialize_fingerprint_set(fs))
    _write_csv(cfg["out"], _header(cfg), columns, rows)
    return EXIT_OK


def _cmd_segments(cfg: dict) -> int:
    columns = ["p0", "eps", "segments_iterated", "segments_closed_form"]
    rows = []
    for p0 in cfg["p0_list"]:
        for eps in cfg["eps_list"]:
            iterated = count_covering_segments(p0, eps)
            closed = math.log(p0) / math.log((1.0 + eps) / (1.0 - eps)) if p0 > 1 else 0.0
            rows.append((p0, eps, iterated, closed))
    _write_csv(cfg["out"], _header(cfg), columns, rows)
    return EXIT_OK


_RUNNERS = {
    "synth": _cmd_synth,
    "scaling": _cmd_scaling,
    "partialmod": _cmd_partialmod,
    "equality": _cmd_equality,
    "segments": _cmd_segments,
}


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=None, help="master seed (default 1)")
    sub.add_argument("--gate-set", dest="gate_set", default=None, help="registered gate set name")
    sub.add_argument("--l0", type=int, default=None, help="net word-length bound (default 10)")
    sub.add_argument("--depth-max", dest="depth_max", type=int, default=None)
    sub.add_argument("--out", default=None, help="output CSV path, '-' for stdout")
    sub.add_argument("--config", default=None, help="key=value file overriding defaults")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsk",
        description="Gate-word synthesis sweeps and streaming-space experiments",
    )
    parser.add_argument("--version", action="version", version=f"qsk {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("synth", help="compile one rotation at requested accuracies")
    _add_common(sp)
    sp.add_argument("--angle", type=float, default=None, help="target rotation matrix angle")
    sp.add_argument("--eps", dest="eps_list", type=_CONVERTERS["eps_list"], default=None)

    sp = subs.add_parser("scaling", help="word length vs accuracy across recursion depths")
    _add_common(sp)
    sp.add_argument("--targets", type=int, default=None, help="targets from the fixed probe sample")

    sp = subs.add_parser("partialmod", help="parity-problem grid with synthesized words")
    _add_common(sp)
    sp.add_argument("--p", dest="p_list", type=_CONVERTERS["p_list"], default=None)
    sp.add_argument("--v", dest="v_list", type=_CONVERTERS["v_list"], default=None)
    sp.add_argument("--delta", dest="delta_list", type=_CONVERTERS["delta_list"], default=None)
    sp.add_argument("--stream", default=None, help="explicit '0'/'1' input stream")
    sp.add_argument(
        "--stream-length", dest="stream_length", type=int, default=None,
        help="generate random-placement streams of this length",
    )
    sp.add_argument("--placement-seed", dest="placement_seed", type=int, default=None)

    sp = subs.add_parser("equality", help="fingerprint search, verification, storage accounting")
    _add_common(sp)
    sp.add_argument("--n", dest="n_list", type=_CONVERTERS["n_list"], default=None)
    sp.add_argument("--eps", dest="eps_list", type=_CONVERTERS["eps_list"], default=None)
    sp.add_argument("--max-attempts", dest="max_attempts", type=int, default=None)
    sp.add_argument("--import-set", dest="import_set", default=None)
    sp.add_argument("--export-set", dest="export_set", default=None)

    sp = subs.add_parser("segments", help="covering-segment counts vs the closed form")
    _add_common(sp)
    sp.add_argument("--p0", dest="p0_list", type=_CONVERTERS["p0_list"], default=None)
    sp.add_argument("--eps", dest="eps_list", type=_CONVERTERS["eps_list"], default=None)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args)
        if not 0 <= cfg["depth_max"] <= 6:
            raise ConfigError("depth-max must be in [0, 6]")
        return _RUNNERS[args.command](cfg)
    except ValueError as exc:  # ConfigError included
        print(f"qsk: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ResourceLimitError, AccuracyError, FingerprintSearchError) as exc:
        print(f"qsk: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
