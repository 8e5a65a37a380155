"""Syndrome extraction, lookup decoding and the exact encode/correct pipeline."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from .circuit import CNOT, MEASZ, PREP0, CircuitError, CliffordCircuit, H
from .codes import StabilizerCode
from .noise import NoiseModel, apply_channel, pauli_marginals
from .pauli import PauliError, PauliOp
from .statevec import StateVector

MAX_TABLE_BITS = 20


class DecoderError(ValueError):
    pass


class Residual(str, enum.Enum):
    STABILIZER = "stabilizer"
    LOGICAL = "logical"


# ---------------------------------------------------------------------------
# syndromes
# ---------------------------------------------------------------------------


def syndrome_to_str(value: int, r: int) -> str:
    return "".join(str(value >> i & 1) for i in range(r))


def syndrome_from_str(text: str) -> int:
    if set(text) - {"0", "1"}:
        raise DecoderError(f"syndrome {text!r} must be a bit string")
    return sum(1 << i for i, c in enumerate(text) if c == "1")


def syndrome_of(error: PauliOp, code: StabilizerCode) -> str:
    """Bit i is 1 iff ``error`` anticommutes with generator i."""
    return syndrome_to_str(code.syndrome_int(error), code.r)


# ---------------------------------------------------------------------------
# decoder table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SyndromeTable:
    """Minimum-weight correction for every syndrome of ``code``."""

    code: StabilizerCode
    corrections: tuple[PauliOp, ...]

    def lookup(self, syndrome: str | int) -> PauliOp:
        if isinstance(syndrome, str):
            if len(syndrome) != self.code.r:
                raise DecoderError(f"syndrome must have {self.code.r} bits")
            syndrome = syndrome_from_str(syndrome)
        return self.corrections[syndrome]

    def __len__(self) -> int:
        return len(self.corrections)

    def items(self):
        for s, c in enumerate(self.corrections):
            yield syndrome_to_str(s, self.code.r), c

    def to_csv(self) -> str:
        lines = ["syndrome,correction"]
        lines.extend(f"{s},{c.format()}" for s, c in self.items())
        return "\n".join(lines) + "\n"

    @cached_property
    def correction_bits(self) -> tuple[np.ndarray, np.ndarray]:
        """``(u, v)`` arrays of shape (2**r, n) for vectorized lookup."""
        u = np.array([c.u_bits() for c in self.corrections], dtype=np.uint8)
        v = np.array([c.v_bits() for c in self.corrections], dtype=np.uint8)
        return u.reshape(len(self), self.code.n), v.reshape(len(self), self.code.n)


def _tie_key(n: int, q: int, letter: str) -> int:
    # lexicographic order of the string u_0..u_{n-1} v_0..v_{n-1}
    key = 0
    if letter in "XY":
        key |= 1 << (2 * n - 1 - q)
    if letter in "ZY":
        key |= 1 << (n - 1 - q)
    return key


def build_decoder(
    code: StabilizerCode, max_bits: int = MAX_TABLE_BITS, max_candidates: int = 20_000_000
) -> SyndromeTable:
    """Exhaustive minimum-weight coset-leader table.

    Errors are enumerated by increasing weight; a syndrome keeps the first
    weight at which it appears, and among equal-weight candidates the
    lexicographically smallest concatenated ``(u, v)`` bit string.
    """
    n, r = code.n, code.r
    if r > max_bits:
        raise DecoderError(f"table needs 2^{r} entries, limit is 2^{max_bits}")
    size = 1 << r
    atoms = [
        [
            (code.syndrome_int(PauliOp.single(n, q, letter)), _tie_key(n, q, letter), letter)
            for letter in "XYZ"
        ]
        for q in range(n)
    ]
    best: dict[int, PauliOp] = {0: PauliOp.identity(n)}
    examined = 0
    for w in range(1, n + 1):
        if len(best) == size:
            break
        found: dict[int, tuple[int, tuple]] = {}
        for qubits in itertools.combinations(range(n), w):
            for choice in itertools.product(*(atoms[q] for q in qubits)):
                examined += 1
                syn = key = 0
                for s, k, _ in choice:
                    syn ^= s
                    key |= k
                if syn in best:
                    continue
                prev = found.get(syn)
                if prev is None or key < prev[0]:
                    found[syn] = (key, tuple(zip(qubits, (c[2] for c in choice))))
            if examined > max_candidates:
                raise DecoderError(f"decoder search exceeded {max_candidates} candidates")
        for syn, (_, terms) in found.items():
            op = PauliOp.identity(n)
            for q, letter in terms:
                op = op * PauliOp.single(n, q, letter)
            best[syn] = op.without_phase()
    if len(best) != size:
        raise DecoderError("some syndromes are unreachable; generators may be dependent")
    return SyndromeTable(code, tuple(best[s] for s in range(size)))


@lru_cache(maxsize=32)
def default_decoder(code: StabilizerCode) -> SyndromeTable:
    """:func:`build_decoder` with default limits, cached per code."""
    return build_decoder(code)


def residual_class(error: PauliOp, correction: PauliOp, code: StabilizerCode) -> Residual:
    """Whether ``error * correction`` is a stabilizer (success) or a logical fault."""
    if code.syndrome_int(error) != code.syndrome_int(correction):
        raise DecoderError(
            f"error {error} and correction {correction} have different syndromes"
        )
    residual = error * correction
    return Residual.STABILIZER if code.in_stabilizer_group(residual) else Residual.LOGICAL


def logical_flips(residual: PauliOp, code: StabilizerCode) -> tuple[bool, bool]:
    """``(bit_flip, phase_flip)``: does the residual flip some logical Z / logical X value."""
    bit = any(not residual.commutes(z) for z in code.logical_z)
    phase = any(not residual.commutes(x) for x in code.logical_x)
    return bit, phase


# ---------------------------------------------------------------------------
# extraction circuits
# ---------------------------------------------------------------------------


def _check_order(code: StabilizerCode) -> list[int]:
    z = list(code.z_checks)
    x = list(code.x_checks)
    rest = [i for i in range(code.r) if i not in z and i not in x]
    return z + x + rest


def extraction_circuit(code: StabilizerCode) -> CliffordCircuit:
    """Ancilla-based extraction on ``n + r`` wires (ancilla ``n + i`` holds bit i).

    Z checks first, then X checks, then mixed checks. A Z check copies
    parities with CNOTs from the data into its ancilla; an X check uses phase
    kickback, ``H`` on the ancilla, CNOTs from the ancilla onto the data,
    ``H`` again. All ancillas are measured at the end. Generators mixing X
    and Z, or with a Y factor, are not expressible this way.
    """
    n = code.n
    gates = []
    for i in _check_order(code):
        s = code.stabilizers[i]
        if s.u and s.v:
            raise CircuitError(f"generator {s} mixes X and Z; not expressible with H/CNOT")
        a = n + i
        gates.append(PREP0(a))
        if s.u:
            gates.append(H(a))
            gates.extend(CNOT(a, q) for q in s.support)
            gates.append(H(a))
        else:
            gates.extend(CNOT(q, a) for q in s.support)
    gates.extend(MEASZ(n + i) for i in range(code.r))
    return CliffordCircuit(n + code.r, tuple(gates))


def _couple_ancillas(s: StateVector, code: StabilizerCode) -> tuple[StateVector, list[int]]:
    """Append r ancillas and copy every check into its ancilla."""
    base = s.n
    s = s.append_zeros(code.r)
    for i in _check_order(code):
        gen = code.stabilizers[i]
        a = base + i
        if gen.v and not gen.u:
            for q in gen.support:
                s = s.apply_cnot(q, a)
            continue
        # phase kickback: leaves P+|psi>|0> + P-|psi>|1> on (data, ancilla)
        s = s.apply_hadamard(a)
        if gen.u and not gen.v:
            for q in gen.support:
                s = s.apply_cnot(a, q)
        else:
            s = s.apply_controlled_pauli(a, gen.hermitian().embed(s.n, range(code.n)))
        s = s.apply_hadamard(a)
    return s, list(range(base, base + code.r))


def extract_syndrome_exact(
    s: StateVector, code: StabilizerCode, rng: np.random.Generator
) -> tuple[str, StateVector]:
    """Couple a fresh ancilla register to the data and measure it.

    ``s`` holds the n data qubits first, then any environment qubits. The
    returned state keeps the measured ancillas appended at the end.
    """
    coupled, anc = _couple_ancillas(s, code)
    outcome, post, _ = coupled.measure(anc, rng)
    return outcome, post


def extract_syndrome_branches(
    s: StateVector, code: StabilizerCode, tol: float = 1e-15
) -> list[tuple[str, float, StateVector]]:
    """Every syndrome outcome with its Born probability and collapsed state."""
    coupled, anc = _couple_ancillas(s, code)
    probs = coupled.outcome_probabilities(anc)
    out = []
    for k in np.nonzero(probs > tol)[0]:
        outcome = format(int(k), f"0{code.r}b") if code.r else ""
        post, prob = coupled.measure_postselect(anc, outcome)
        out.append((outcome, prob, post))
    return out


# ---------------------------------------------------------------------------
# encoding and the exact pipeline
# ---------------------------------------------------------------------------


def _logical_amplitudes(code: StabilizerCode, amplitudes) -> np.ndarray:
    amps = np.asarray(amplitudes, dtype=complex).ravel()
    if amps.size != 1 << code.k:
        raise ValueError(f"need {1 << code.k} logical amplitudes for k={code.k}")
    if abs(np.linalg.norm(amps) - 1) > 1e-9:
        raise ValueError("logical amplitudes must be normalized")
    return amps


def _project(amp: np.ndarray, n: int, p: PauliOp) -> np.ndarray:
    flipped = StateVector(amp / np.linalg.norm(amp)).apply_pauli(p).amp * np.linalg.norm(amp)
    return (amp + flipped) / 2


def encode(code: StabilizerCode, amplitudes) -> StateVector:
    """Logical state ``sum_c amplitudes[c] |c>_L`` on the n data qubits.

    Uses the code's encoder circuit when it has one, otherwise projects a
    basis state onto the code space and builds the logical basis from it.
    """
    amps = _logical_amplitudes(code, amplitudes)
    return _encode_cached(code, tuple(complex(a) for a in amps))


@lru_cache(maxsize=64)
def _encode_cached(code: StabilizerCode, amps: tuple[complex, ...]) -> StateVector:
    n = code.n
    if code.encoder is not None:
        state = np.zeros(1 << n, dtype=complex)
        for c, a in enumerate(amps):
            idx = 0
            for i, q in enumerate(code.encoder_inputs):
                if c >> (code.k - 1 - i) & 1:
                    idx |= 1 << (n - 1 - q)
            state[idx] = a
        s = StateVector(state)
        for g in code.encoder:
            s = s.apply_hadamard(g.qubits[0]) if g.name == "H" else s.apply_cnot(*g.qubits)
        return s
    projectors = [p.hermitian() for p in code.stabilizers] + [p.hermitian() for p in code.logical_z]
    zero = None
    for start in range(1 << n):
        amp = np.zeros(1 << n, dtype=complex)
        amp[start] = 1
        for p in projectors:
            if np.linalg.norm(amp) < 1e-12:
                break
            amp = _project(amp, n, p)
        if np.linalg.norm(amp) > 1e-9:
            zero = StateVector(amp, normalize=True)
            break
    if zero is None:
        raise ValueError("code space is empty; generators may include -I")
    total = np.zeros(1 << n, dtype=complex)
    for c, a in enumerate(amps):
        s = zero
        for i, lx in enumerate(code.logical_x):
            if c >> (code.k - 1 - i) & 1:
                s = s.apply_pauli(lx.hermitian())
        total += a * s.amp
    return StateVector(total, normalize=True)


def decode_fidelity(state: StateVector, code: StabilizerCode, amplitudes) -> float:
    """Fidelity of the logical information held by data qubits ``0..n-1``.

    With an encoder, the inverse circuit is run and the input qubits are
    compared against ``amplitudes``; everything else is traced out.
    """
    amps = _logical_amplitudes(code, amplitudes)
    if code.encoder is not None:
        for g in reversed(code.encoder.gates):
            state = state.apply_hadamard(g.qubits[0]) if g.name == "H" else state.apply_cnot(*g.qubits)
        return state.partial_trace_fidelity(list(code.encoder_inputs), StateVector(amps))
    return state.partial_trace_fidelity(list(range(code.n)), encode(code, amps))


@dataclass(frozen=True)
class PipelineResult:
    fidelity: float
    syndrome: str | None
    corrected: bool
    branches: tuple[tuple[str, float, float], ...] = ()


def _finish(post: StateVector, syndrome: str, code, table, amps) -> float:
    fix = table.lookup(syndrome)
    return decode_fidelity(post.apply_pauli(fix, range(code.n)), code, amps)


def run_pipeline(
    code: StabilizerCode,
    noise,
    amplitudes=(1.0, 0.0),
    rng: np.random.Generator | None = None,
    *,
    hadamard_trick: bool = False,
    branch_average: bool = False,
    table: SyndromeTable | None = None,
) -> PipelineResult:
    """Encode, apply ``noise``, extract, correct, decode, report fidelity.

    ``noise`` is either a :data:`NoiseModel` (applied once per data qubit)
    or a callable ``noise(state, rng) -> state``. With ``branch_average``
    the syndrome measurement is not sampled; the returned fidelity is the
    Born-weighted mean over every outcome.
    """
    if rng is None:
        rng = np.random.default_rng()
    table = table or default_decoder(code)
    amps = _logical_amplitudes(code, amplitudes)
    s = encode(code, amps)
    data = range(code.n)
    if hadamard_trick:
        s = s.apply_hadamard_all(data)
    s = noise(s, rng) if callable(noise) else apply_channel(noise, s, data, rng)
    if hadamard_trick:
        s = s.apply_hadamard_all(data)
    if branch_average:
        branches = tuple(
            (syn, prob, _finish(post, syn, code, table, amps))
            for syn, prob, post in extract_syndrome_branches(s, code)
        )
        f = float(sum(p * fb for _, p, fb in branches))
        return PipelineResult(f, None, f > 1 - 1e-9, branches)
    syndrome, post = extract_syndrome_exact(s, code, rng)
    f = _finish(post, syndrome, code, table, amps)
    return PipelineResult(f, syndrome, f > 1 - 1e-9)


def run_pipeline_exact(
    code: StabilizerCode,
    model: NoiseModel,
    amplitudes=(1.0, 0.0),
    seed: int | None = None,
    **kwargs,
) -> PipelineResult:
    return run_pipeline(code, model, amplitudes, np.random.default_rng(seed), **kwargs)


def run_pipeline_with_error(
    code: StabilizerCode, error: PauliOp, amplitudes=(1.0, 0.0), table: SyndromeTable | None = None
) -> PipelineResult:
    """Deterministic pipeline run with a fixed Pauli error on the data."""
    if error.n != code.n:
        raise PauliError("error size does not match the code")
    return run_pipeline(
        code,
        lambda s, rng: s.apply_pauli(error, range(code.n)),
        amplitudes,
        np.random.default_rng(0),
        table=table,
    )


# ---------------------------------------------------------------------------
# exhaustive oracle
# ---------------------------------------------------------------------------


def pattern_probability(error: PauliOp, marginals) -> Fraction | float:
    px, py, pz = marginals
    p_id = 1 - px - py - pz
    prob = 1
    for q in range(error.n):
        prob *= {"I": p_id, "X": px, "Y": py, "Z": pz}[error.letter(q)]
    return prob


def enumerate_patterns(code: StabilizerCode, marginals, table: SyndromeTable | None = None, letters="IXYZ"):
    """Yield ``(error, probability, residual_class)`` over every Pauli pattern.

    Probabilities keep the numeric type of ``marginals`` (use ``Fraction``
    for exact arithmetic). Only feasible for small n.
    """
    table = table or default_decoder(code)
    px, py, pz = marginals
    active = [c for c in letters if c == "I" or {"X": px, "Y": py, "Z": pz}[c] != 0]
    for word in itertools.product(active, repeat=code.n):
        error = PauliOp.parse("".join(word))
        fix = table.lookup(code.syndrome_int(error))
        yield error, pattern_probability(error, marginals), residual_class(error, fix, code)


def exact_failure_probability(code: StabilizerCode, model_or_marginals, table=None):
    """Total probability that decoding leaves a logical residual."""
    marg = model_or_marginals
    if not isinstance(marg, tuple):
        marg = pauli_marginals(marg)
    return sum(
        (p for _, p, cls in enumerate_patterns(code, marg, table) if cls is Residual.LOGICAL),
        start=type(marg[0])(0) if isinstance(marg[0], Fraction) else 0.0,
    )
