"""Command-line front end: ``qecwork <command> [options]``.

Exit codes are 0 on success, 1 on a runtime failure and 2 when inputs fail
validation. JSON output carries ``schema_version``; CSV output starts with a
``# schema_version: N`` comment line.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analytic, montecarlo
from .circuit import CircuitError, CliffordCircuit
from .codes import (
    CodeError,
    builtin_code,
    format_stabilizer_text,
    load_stabilizer_file,
    min_distance_bruteforce,
)
from .correct import DecoderError, default_decoder, encode, extraction_circuit, run_pipeline
from .fttrack import TrackError, count_failure_paths
from .noise import CHANNEL_NAMES, NoiseError, effective_p, effective_p_squared, model_from_dict, model_to_dict
from .pauli import PauliError
from .statevec import StateError

SCHEMA_VERSION = montecarlo.SCHEMA_VERSION

# keys a --config file may set; each maps to an argparse dest
CONFIG_KEYS = {
    "code",
    "code_file",
    "noise",
    "p",
    "epsilon",
    "trials",
    "seed",
    "workers",
    "format",
    "out",
    "hadamard_trick",
    "grid",
    "state",
    "branch_average",
    "circuit",
    "max_faults",
    "paulis",
}
DEFAULTS = {
    "code": "repetition3",
    "noise": "bitflip",
    "trials": 1000,
    "workers": 1,
    "format": "json",
    "hadamard_trick": False,
    "state": "0",
    "branch_average": False,
    "max_faults": 2,
    "paulis": "XYZ",
}
COMMAND_DEFAULTS = {"code": {"format": "text"}, "track": {"format": "text"}}


class ConfigError(ValueError):
    pass


VALIDATION_ERRORS = (
    ConfigError,
    CodeError,
    NoiseError,
    PauliError,
    CircuitError,
    StateError,
    TrackError,
    analytic.AnalyticError,
    montecarlo.MonteCarloError,
    FileNotFoundError,
    json.JSONDecodeError,
)


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, *, code=True, noise=False, mc=False) -> None:
    # defaults are None so that config values can fill unset flags
    if code:
        p.add_argument("--code", help="built-in code name")
        p.add_argument("--code-file", help="stabilizer text file")
    if noise:
        p.add_argument("--noise", help=f"channel name ({', '.join(CHANNEL_NAMES)}) or JSON object")
        p.add_argument("--p", type=float)
        p.add_argument("--epsilon", type=float)
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--hadamard-trick", action="store_true", default=None)
    if mc:
        p.add_argument("--workers", type=int)
    p.add_argument("--format", choices=("json", "csv", "text"))
    p.add_argument("--out", help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qecwork", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file of option defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("code", help="show, measure or export a code")
    p.add_argument("action", choices=("show", "distance", "export"))
    p.add_argument("name", nargs="?", help="built-in code name (same as --code)")
    _common(p)

    p = sub.add_parser("simulate", help="exact state-vector pipeline runs")
    _common(p, noise=True)
    p.add_argument("--state", help="logical input: 0, 1, +, - or 'a,b' amplitudes")
    p.add_argument("--branch-average", action="store_true", default=None)

    p = sub.add_parser("montecarlo", help="Pauli-frame failure estimate")
    _common(p, noise=True, mc=True)

    p = sub.add_parser("sweep", help="Pauli-frame estimates over a parameter grid")
    _common(p, noise=True, mc=True)
    p.add_argument("--grid", help="comma-separated parameter values")

    p = sub.add_parser("analytic", help="evaluate a closed-form estimate")
    p.add_argument(
        "formula",
        choices=("three-bit", "phase", "uncorrectable", "large-code", "concatenation", "coupling"),
    )
    p.add_argument("--p", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--mode", choices=("coherent", "incoherent", "both"), default="both")
    p.add_argument("--p-threshold", type=float)
    p.add_argument("--levels", type=int)
    p.add_argument("--format", choices=("json", "text"))
    p.add_argument("--out")

    p = sub.add_parser("track", help="count fault paths through an extraction circuit")
    _common(p)
    p.add_argument("--circuit", help="circuit text file (default: the code's extraction circuit)")
    p.add_argument("--max-faults", type=int, choices=(0, 1, 2))
    p.add_argument("--paulis", help="fault alphabet, subset of XYZ")
    return parser


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    cfg = {}
    if args.config:
        cfg = json.loads(Path(args.config).read_text())
        if not isinstance(cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(cfg) - CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    defaults = {**DEFAULTS, **COMMAND_DEFAULTS.get(args.command, {})}
    for key in CONFIG_KEYS | set(defaults):
        if not hasattr(args, key):
            continue
        if getattr(args, key) is None:
            setattr(args, key, cfg.get(key, defaults.get(key)))
    return args


def _code(args):
    if getattr(args, "name", None):
        if args.code_file:
            raise ConfigError("give a code name or --code-file, not both")
        return builtin_code(args.name)
    if args.code_file:
        return load_stabilizer_file(args.code_file)
    return builtin_code(args.code)


def _noise(args):
    spec = args.noise
    if isinstance(spec, str) and spec.lstrip().startswith("{"):
        spec = json.loads(spec)
    if isinstance(spec, dict):
        return model_from_dict(spec)
    if spec not in CHANNEL_NAMES:
        raise ConfigError(f"--noise must be one of {sorted(CHANNEL_NAMES)}")
    if spec in ("phase_rotation", "projective"):
        if args.epsilon is None:
            raise ConfigError(f"{spec} needs --epsilon")
        return model_from_dict({"channel": spec, "epsilon": args.epsilon})
    if spec == "iid_pauli":
        raise ConfigError("iid_pauli needs a JSON --noise object with px, py, pz")
    if args.p is None:
        raise ConfigError(f"{spec} needs --p")
    return model_from_dict({"channel": spec, "p": args.p})


def _seed(args) -> int:
    if args.seed is None:
        seed = montecarlo.fresh_seed()
        print(f"seed: {seed}", file=sys.stderr)
        return seed
    if not 0 <= args.seed < 1 << 64:
        raise ConfigError("--seed must be a non-negative 64-bit integer")
    return args.seed


def _trials(args) -> int:
    if args.trials < 1:
        raise ConfigError("--trials must be at least 1")
    return args.trials


def _state(text: str, k: int) -> np.ndarray:
    if k != 1:
        raise ConfigError("simulate supports codes with one logical qubit")
    named = {"0": (1, 0), "1": (0, 1), "+": (1, 1), "-": (1, -1)}
    if str(text) in named:
        amps = np.array(named[str(text)], dtype=complex)
    else:
        try:
            amps = np.array([complex(x.replace(" ", "")) for x in str(text).split(",")])
        except ValueError:
            raise ConfigError(f"cannot parse --state {text!r}") from None
        if amps.size != 2:
            raise ConfigError("--state needs two amplitudes")
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ConfigError("--state amplitudes are all zero")
    return amps / norm


def _emit(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(doc: dict) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, **doc}, indent=2)


def _csv(body: str) -> str:
    return f"# schema_version: {SCHEMA_VERSION}\n{body}"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _code_info(code) -> dict:
    info = {
        "name": code.name,
        "n": code.n,
        "k": code.k,
        "d": code.d,
        "stabilizers": [s.format() for s in code.stabilizers],
        "logical_x": [p.format() for p in code.logical_x],
        "logical_z": [p.format() for p in code.logical_z],
    }
    if code.k == 1 and code.n <= 12:
        for label, amps in (("zero", (1, 0)), ("one", (0, 1))):
            kets = encode(code, amps).kets()
            info[f"codeword_{label}"] = {b: round(a.real, 12) for b, a in sorted(kets.items())}
    return info


def cmd_code(args) -> int:
    code = _code(args)
    if args.action == "export":
        _emit(args, format_stabilizer_text(code))
        return 0
    if args.action == "distance":
        rows = {kind: min_distance_bruteforce(code, paulis=alpha) for kind, alpha in (("all", "XYZ"), ("x", "X"), ("z", "Z"))}
        if args.format == "text":
            _emit(args, "\n".join(f"{kind}: {d}" for kind, d in rows.items()))
        else:
            doc = {"command": "code distance", "code": code.name, "n": code.n, "k": code.k}
            doc["distance"] = {kind: d.value for kind, d in rows.items()}
            _emit(args, _json(doc))
        return 0
    info = _code_info(code)
    if args.format == "text":
        d = info["d"] if info["d"] is not None else "?"
        lines = [f"{code.name or 'code'} [[{code.n},{code.k},{d}]]", "stabilizers:"]
        lines += [f"  {s}" for s in info["stabilizers"]]
        lines += ["logical X:"] + [f"  {s}" for s in info["logical_x"]]
        lines += ["logical Z:"] + [f"  {s}" for s in info["logical_z"]]
        for label in ("zero", "one"):
            if f"codeword_{label}" in info:
                lines.append(f"|{0 if label == 'zero' else 1}>_L:")
                lines += [f"  {b} {a:+.6f}" for b, a in info[f"codeword_{label}"].items()]
        _emit(args, "\n".join(lines))
    else:
        _emit(args, _json({"command": "code show", **info}))
    return 0


def cmd_simulate(args) -> int:
    code = _code(args)
    model = _noise(args)
    trials = _trials(args)
    seed = _seed(args)
    amps = _state(args.state, code.k)
    table = default_decoder(code)
    records = []
    for i in range(trials):
        trial_seed = montecarlo.derive_seed(seed, i)
        res = run_pipeline(
            code,
            model,
            amps,
            np.random.default_rng(trial_seed),
            hadamard_trick=bool(args.hadamard_trick),
            branch_average=bool(args.branch_average),
            table=table,
        )
        records.append({"trial": i, "seed": trial_seed, "syndrome": res.syndrome, "fidelity": res.fidelity})
    fids = np.array([r["fidelity"] for r in records])
    summary = {
        "command": "simulate",
        "code": code.name,
        "noise": model_to_dict(model),
        "hadamard_trick": bool(args.hadamard_trick),
        "trials": trials,
        "seed": seed,
        "mean_fidelity": float(fids.mean()),
        "std_error": float(fids.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0,
    }
    if args.format == "csv":
        lines = ["trial,seed,syndrome,fidelity"]
        lines += [f"{r['trial']},{r['seed']},{r['syndrome'] or ''},{r['fidelity']!r}" for r in records]
        _emit(args, _csv("\n".join(lines)))
    elif args.format == "text":
        _emit(args, "\n".join(f"{k}: {v}" for k, v in summary.items()))
    else:
        _emit(args, _json({**summary, "records": records}))
    return 0


def _param(model) -> float:
    d = model_to_dict(model)
    return d.get("p", d.get("epsilon", 0.0))


def cmd_montecarlo(args) -> int:
    code = _code(args)
    model = _noise(args)
    cfg = montecarlo.TrialConfig(
        code, model, _trials(args), _seed(args), args.workers, bool(args.hadamard_trick)
    )
    est = montecarlo.estimate_failure(cfg)
    rows = [(_param(model), est)]
    if args.format == "csv":
        _emit(args, _csv(montecarlo.to_csv(rows)))
    elif args.format == "text":
        _emit(args, f"p_hat {est.p_hat!r} ci95 {est.ci95[0]!r} {est.ci95[1]!r} ({est.failures}/{est.trials})")
    else:
        meta = {"command": "montecarlo", "code": code.name, "noise": model_to_dict(model)}
        _emit(args, montecarlo.to_json(rows, **meta))
    return 0


def _grid(text) -> list[float]:
    if isinstance(text, list):
        return [float(x) for x in text]
    if not text:
        raise montecarlo.MonteCarloError("parameter grid is empty")
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse --grid {text!r}") from None


def cmd_sweep(args) -> int:
    code = _code(args)
    if not isinstance(args.noise, str) or args.noise not in CHANNEL_NAMES:
        raise ConfigError("sweep needs --noise set to a channel name")
    grid = _grid(args.grid)
    rows = montecarlo.sweep(
        code, args.noise, grid, _trials(args), _seed(args), args.workers, bool(args.hadamard_trick)
    )
    if args.format == "csv":
        _emit(args, _csv(montecarlo.to_csv(rows)))
    elif args.format == "text":
        _emit(args, "\n".join(f"{x!r} {e.p_hat!r} {e.ci95[0]!r} {e.ci95[1]!r}" for x, e in rows))
    else:
        _emit(args, montecarlo.to_json(rows, command="sweep", code=code.name, channel=args.noise))
    return 0


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise ConfigError(f"{args.formula} needs {', '.join(missing)}")


def cmd_analytic(args) -> int:
    f = args.formula
    inputs = {}
    if f == "three-bit":
        _need(args, "p")
        inputs = {"p": args.p}
        result = {"value": analytic.three_bit_failure(args.p), "unencoded": args.p}
    elif f == "phase":
        _need(args, "epsilon")
        inputs = {"epsilon": args.epsilon}
        result = {
            "p": analytic.phase_channel_p(args.epsilon),
            "p_small_angle": analytic.phase_channel_p_small(args.epsilon),
            "fidelity": analytic.phase_fidelity(args.epsilon),
        }
    elif f == "uncorrectable":
        _need(args, "n", "t", "epsilon")
        inputs = {"n": args.n, "t": args.t, "epsilon": args.epsilon, "mode": args.mode}
        modes = ("coherent", "incoherent") if args.mode == "both" else (args.mode,)
        result = {}
        for m in modes:
            u = analytic.p_uncorrectable(args.n, args.t, args.epsilon, m)
            result[m] = {"value": u.value, "clamped": u.clamped, "raw": u.raw}
        if len(modes) == 2 and result["incoherent"]["raw"] > 0:
            result["ratio"] = result["coherent"]["raw"] / result["incoherent"]["raw"]
    elif f == "large-code":
        _need(args, "n", "p", "t")
        inputs = {"n": args.n, "p": args.p, "t": args.t}
        result = {
            "value": analytic.large_code_example(args.n, args.p, args.t),
            "regime_ok": analytic.large_code_regime_ok(args.n, args.p, args.t),
        }
    elif f == "concatenation":
        _need(args, "p", "p_threshold", "levels")
        inputs = {"p": args.p, "p_threshold": args.p_threshold, "levels": args.levels}
        result = {"value": analytic.concatenation_failure(args.p, args.p_threshold, args.levels)}
    else:
        _need(args, "epsilon")
        model = model_from_dict({"channel": "projective", "epsilon": args.epsilon})
        inputs = {"epsilon": args.epsilon}
        result = {
            "branch_weight": effective_p(model),
            "squared_formula": effective_p_squared(model),
            "divergent": abs(effective_p(model) - effective_p_squared(model)) > 1e-12,
        }
    if args.format == "text":
        _emit(args, json.dumps(result))
    else:
        _emit(args, _json({"command": "analytic", "formula": f, "inputs": inputs, "result": result}))
    return 0


def cmd_track(args) -> int:
    code = _code(args)
    if args.circuit:
        circuit = CliffordCircuit.from_text(Path(args.circuit).read_text())
    else:
        circuit = extraction_circuit(code)
    counts = count_failure_paths(circuit, code, args.max_faults, args.paulis)
    if args.format == "csv":
        _emit(args, _csv(counts.to_csv()))
    elif args.format == "text":
        _emit(args, counts.summary_csv())
    else:
        doc = {
            "command": "track",
            "code": code.name,
            "gates": len(circuit),
            "counts": {str(w): row for w, row in sorted(counts.counts.items())},
        }
        _emit(args, _json(doc))
    return 0


COMMANDS = {
    "code": cmd_code,
    "simulate": cmd_simulate,
    "montecarlo": cmd_montecarlo,
    "sweep": cmd_sweep,
    "analytic": cmd_analytic,
    "track": cmd_track,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args = _merge_config(args)
        return COMMANDS[args.command](args)
    except DecoderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
