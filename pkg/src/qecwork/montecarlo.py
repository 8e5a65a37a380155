"""Pauli-frame Monte Carlo estimates of the uncorrectable-error probability."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.stats import binomtest

from .codes import StabilizerCode
from .correct import SyndromeTable, default_decoder
from .noise import CHANNEL_NAMES, NoiseModel, model_from_dict, sample_error_bits

BLOCK_SIZE = 1 << 16
CSV_COLUMNS = ("param", "p_hat", "ci_low", "ci_high", "failures", "trials", "seed")
SCHEMA_VERSION = 1


class MonteCarloError(ValueError):
    pass


def fresh_seed() -> int:
    """A 64-bit seed drawn from OS entropy."""
    return int(np.random.SeedSequence().generate_state(1, np.uint64)[0])


def derive_seed(master_seed: int, *path: int) -> int:
    """Deterministic 64-bit child seed of ``master_seed`` along ``path``."""
    ss = np.random.SeedSequence(master_seed, spawn_key=tuple(path))
    return int(ss.generate_state(1, np.uint64)[0])


def wilson(failures: int, trials: int) -> tuple[float, float]:
    """Wilson score 95% interval for a binomial proportion."""
    ci = binomtest(failures, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass(frozen=True)
class TrialConfig:
    code: StabilizerCode
    model: NoiseModel
    trials: int
    master_seed: int
    workers: int = 1
    hadamard_trick: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise MonteCarloError("trials must be at least 1")
        if self.workers < 1:
            raise MonteCarloError("workers must be at least 1")
        if not 0 <= self.master_seed < 1 << 64:
            raise MonteCarloError("master_seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class FailureEstimate:
    failures: int
    trials: int
    p_hat: float
    ci95: tuple[float, float]
    seed: int

    @classmethod
    def from_counts(cls, failures: int, trials: int, seed: int) -> FailureEstimate:
        return cls(failures, trials, failures / trials, wilson(failures, trials), seed)

    def contains(self, value: float) -> bool:
        return self.ci95[0] <= value <= self.ci95[1]


class FrameSimulator:
    """Vectorized sample-decode-classify loop for one code and decoder table."""

    def __init__(self, code: StabilizerCode, table: SyndromeTable | None = None):
        self.code = code
        self.table = table or default_decoder(code)
        stab = code.stabilizer_matrix.astype(np.uint8)
        n = code.n
        # the syndrome of (u, v) is u . s_v + v . s_u
        self._syn_u = stab[:, n:].T.copy()
        self._syn_v = stab[:, :n].T.copy()
        self._weights = (1 << np.arange(code.r, dtype=np.int64)).astype(np.int64)
        self._corr_u, self._corr_v = self.table.correction_bits
        logicals = list(code.logical_x) + list(code.logical_z)
        self._log_u = np.array([p.u_bits() for p in logicals], dtype=np.uint8).reshape(-1, n).T
        self._log_v = np.array([p.v_bits() for p in logicals], dtype=np.uint8).reshape(-1, n).T

    def syndromes(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        bits = (u @ self._syn_u + v @ self._syn_v) & 1
        return bits.astype(np.int64) @ self._weights

    def failures(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Boolean mask of trials whose residual is a nontrivial logical."""
        syn = self.syndromes(u, v)
        ru = u ^ self._corr_u[syn]
        rv = v ^ self._corr_v[syn]
        anti = (ru @ self._log_v + rv @ self._log_u) & 1
        return anti.any(axis=1)

    def run_block(self, model: NoiseModel, trials: int, seed: int, hadamard: bool = False) -> int:
        rng = np.random.default_rng(seed)
        u, v = sample_error_bits(model, self.code.n, trials, rng)
        if hadamard:
            # H on every data qubit before and after the channel swaps X and Z
            u, v = v, u
        return int(self.failures(u, v).sum())


def _blocks(trials: int) -> list[int]:
    full, rest = divmod(trials, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])


def estimate_failure(cfg: TrialConfig, table: SyndromeTable | None = None) -> FailureEstimate:
    """Estimate P_u by sampling ``cfg.trials`` Pauli errors.

    Trials are split into fixed-size blocks; block ``i`` draws from a stream
    seeded by ``derive_seed(master_seed, i)``. The block layout does not
    depend on ``workers``, so the count is identical for any worker number.
    """
    sim = FrameSimulator(cfg.code, table)
    sizes = _blocks(cfg.trials)
    seeds = [derive_seed(cfg.master_seed, i) for i in range(len(sizes))]
    if cfg.workers == 1 or len(sizes) == 1:
        counts = [sim.run_block(cfg.model, t, s, cfg.hadamard_trick) for t, s in zip(sizes, seeds)]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            counts = list(
                pool.map(lambda ts: sim.run_block(cfg.model, *ts, cfg.hadamard_trick), zip(sizes, seeds))
            )
    return FailureEstimate.from_counts(sum(counts), cfg.trials, cfg.master_seed)


def model_family(channel: str) -> Callable[[float], NoiseModel]:
    """Map a channel name to ``param -> model`` (``p`` or ``epsilon``)."""
    if channel not in CHANNEL_NAMES:
        raise MonteCarloError(f"unknown channel {channel!r}")
    if channel == "iid_pauli":
        raise MonteCarloError("iid_pauli has three parameters; pass a callable family")
    key = "epsilon" if channel in ("phase_rotation", "projective") else "p"
    return lambda x: model_from_dict({"channel": channel, key: float(x)})


def sweep(
    code: StabilizerCode,
    family: str | Callable[[float], NoiseModel],
    grid: Sequence[float],
    trials: int,
    seed: int,
    workers: int = 1,
    hadamard_trick: bool = False,
) -> list[tuple[float, FailureEstimate]]:
    """One estimate per grid point; point ``j`` uses ``derive_seed(seed, j)``."""
    grid = list(grid)
    if not grid:
        raise MonteCarloError("parameter grid is empty")
    make = model_family(family) if isinstance(family, str) else family
    table = default_decoder(code)
    rows = []
    for j, x in enumerate(grid):
        cfg = TrialConfig(code, make(x), trials, derive_seed(seed, j), workers, hadamard_trick)
        rows.append((float(x), estimate_failure(cfg, table)))
    return rows


def _row(param, est: FailureEstimate) -> dict:
    return {
        "param": param,
        "p_hat": est.p_hat,
        "ci_low": est.ci95[0],
        "ci_high": est.ci95[1],
        "failures": est.failures,
        "trials": est.trials,
        "seed": est.seed,
    }


def to_csv(rows: Sequence[tuple[float | str, FailureEstimate]]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for param, est in rows:
        writer.writerow({k: repr(x) if isinstance(x, float) else x for k, x in _row(param, est).items()})
    return buf.getvalue()


def to_json(rows: Sequence[tuple[float | str, FailureEstimate]], **meta) -> str:
    doc = {"schema_version": SCHEMA_VERSION, **meta, "rows": [_row(p, e) for p, e in rows]}
    return json.dumps(doc, indent=2)
