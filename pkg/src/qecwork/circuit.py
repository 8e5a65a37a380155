"""Clifford networks built from H, CNOT, PREP0 and MEASZ."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .pauli import PauliOp
from .statevec import StateVector

GATE_ARITY = {"H": 1, "CNOT": 2, "PREP0": 1, "MEASZ": 1}


class CircuitError(ValueError):
    pass


class Gate(NamedTuple):
    name: str
    qubits: tuple[int, ...]

    def __str__(self) -> str:
        return " ".join([self.name, *map(str, self.qubits)])


def H(q: int) -> Gate:
    return Gate("H", (q,))


def CNOT(c: int, t: int) -> Gate:
    return Gate("CNOT", (c, t))


def PREP0(q: int) -> Gate:
    return Gate("PREP0", (q,))


def MEASZ(q: int) -> Gate:
    return Gate("MEASZ", (q,))


@dataclass(frozen=True)
class CliffordCircuit:
    """Ordered gate list on ``n_qubits`` wires.

    Fault locations are addressed by gate index: a fault at location ``i``
    acts on the qubits of gate ``i`` immediately after it. Location ``-1``
    is the circuit input, before the first gate.
    """

    n_qubits: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        gates = tuple(Gate(g[0], tuple(int(q) for q in g[1])) for g in self.gates)
        object.__setattr__(self, "gates", gates)
        for i, g in enumerate(gates):
            if g.name not in GATE_ARITY:
                raise CircuitError(f"gate {i}: unknown gate {g.name!r}")
            if len(g.qubits) != GATE_ARITY[g.name]:
                raise CircuitError(f"gate {i}: {g.name} takes {GATE_ARITY[g.name]} qubit(s)")
            if any(not 0 <= q < self.n_qubits for q in g.qubits):
                raise CircuitError(f"gate {i}: qubit index out of range")
            if len(set(g.qubits)) != len(g.qubits):
                raise CircuitError(f"gate {i}: repeated qubit")

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    @property
    def is_unitary(self) -> bool:
        return all(g.name in ("H", "CNOT") for g in self.gates)

    def inverse(self) -> CliffordCircuit:
        if not self.is_unitary:
            raise CircuitError("only H/CNOT circuits can be inverted")
        return CliffordCircuit(self.n_qubits, tuple(reversed(self.gates)))

    def remap(self, mapping, n_qubits: int) -> CliffordCircuit:
        """Relabel wires through ``mapping[old] -> new`` on a wider register."""
        return CliffordCircuit(
            n_qubits, tuple(Gate(g.name, tuple(mapping[q] for q in g.qubits)) for g in self.gates)
        )

    def locations(self, include_inputs: bool = True, input_qubits=None) -> list[tuple[int, tuple[int, ...]]]:
        """All fault locations as ``(index, qubits)`` pairs."""
        locs = []
        if include_inputs:
            qs = range(self.n_qubits) if input_qubits is None else input_qubits
            locs.extend((-1, (q,)) for q in qs)
        locs.extend((i, g.qubits) for i, g in enumerate(self.gates))
        return locs

    def to_text(self) -> str:
        return "\n".join(str(g) for g in self.gates) + ("\n" if self.gates else "")

    @classmethod
    def from_text(cls, text: str, n_qubits: int | None = None) -> CliffordCircuit:
        """Parse one gate per line (``"CNOT 0 4"``); ``#`` starts a comment.

        A leading ``QUBITS n`` line fixes the register size; otherwise it is
        inferred from the largest index used.
        """
        gates = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            name = parts[0].upper()
            if name == "QUBITS":
                n_qubits = int(parts[1])
                continue
            if name not in GATE_ARITY:
                raise CircuitError(f"line {lineno}: unknown gate {parts[0]!r}")
            try:
                qubits = tuple(int(x) for x in parts[1:])
            except ValueError:
                raise CircuitError(f"line {lineno}: qubit indices must be integers") from None
            if len(qubits) != GATE_ARITY[name]:
                raise CircuitError(f"line {lineno}: {name} takes {GATE_ARITY[name]} qubit(s)")
            gates.append(Gate(name, qubits))
        if n_qubits is None:
            n_qubits = 1 + max((q for g in gates for q in g.qubits), default=-1)
        return cls(n_qubits, tuple(gates))


def run_on_state(
    circuit: CliffordCircuit,
    state: StateVector,
    rng: np.random.Generator | None = None,
    offset: int = 0,
) -> tuple[StateVector, list[int]]:
    """Simulate ``circuit`` on wires ``offset ...`` of ``state``.

    MEASZ samples from ``rng`` and collapses; PREP0 resets by measuring and
    flipping to ``|0>``. Returns the final state and the measurement record.
    """
    record = []
    for g in circuit.gates:
        qs = [q + offset for q in g.qubits]
        if g.name == "H":
            state = state.apply_hadamard(qs[0])
        elif g.name == "CNOT":
            state = state.apply_cnot(qs[0], qs[1])
        else:
            if rng is None:
                raise CircuitError(f"{g.name} needs an rng")
            bit, state, _ = state.measure(qs, rng)
            if g.name == "MEASZ":
                record.append(int(bit))
            elif bit == "1":
                state = state.apply_pauli(PauliOp.single(state.n, qs[0], "X"))
    return state, record
