"""Pauli error tracking through Clifford networks and fault-path counting."""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field

from .circuit import CliffordCircuit, Gate
from .codes import StabilizerCode
from .correct import SyndromeTable, default_decoder
from .pauli import PauliOp

__all__ = [
    "CliffordCircuit",
    "FaultCounts",
    "FaultRecord",
    "TrackError",
    "conjugate",
    "count_failure_paths",
    "propagate",
    "track",
]

RESIDUAL_CLASSES = ("stabilizer", "logical", "detectable")


class TrackError(ValueError):
    pass


def conjugate(gate: Gate, p: PauliOp) -> PauliOp:
    """``g P g^dagger`` for a unitary gate; PREP0 discards the qubit, MEASZ is identity.

    Signs follow the ``X_u Z_v`` convention: H maps ``XZ`` to ``ZX = -XZ``,
    while CNOT maps every ``X_u Z_v`` to another ``X_u' Z_v'`` with no sign.
    """
    name, qubits = gate
    if any(not 0 <= q < p.n for q in qubits):
        raise TrackError(f"gate {gate} does not fit a {p.n}-qubit operator")
    u, v, phase = p.u, p.v, p.phase
    if name == "H":
        (q,) = qubits
        bu, bv = u >> q & 1, v >> q & 1
        u = (u & ~(1 << q)) | (bv << q)
        v = (v & ~(1 << q)) | (bu << q)
        if bu and bv:
            phase = (phase + 2) % 4
    elif name == "CNOT":
        c, t = qubits
        u ^= (u >> c & 1) << t
        v ^= (v >> t & 1) << c
    elif name == "PREP0":
        (q,) = qubits
        u &= ~(1 << q)
        v &= ~(1 << q)
    elif name != "MEASZ":
        raise TrackError(f"unknown gate {name!r}")
    return PauliOp(p.n, u, v, phase)


def _sorted_faults(circuit: CliffordCircuit, faults) -> list[tuple[int, PauliOp]]:
    out = []
    for loc, p in faults:
        loc = int(loc)
        if not -1 <= loc < len(circuit):
            raise TrackError(f"fault location {loc} outside [-1, {len(circuit) - 1}]")
        if p.n != circuit.n_qubits:
            if loc < 0 or p.n != len(circuit.gates[loc].qubits):
                raise TrackError(f"fault at {loc} must act on {circuit.n_qubits} qubits")
            p = p.embed(circuit.n_qubits, circuit.gates[loc].qubits)
        out.append((loc, p))
    return sorted(out, key=lambda f: f[0])


def track(circuit: CliffordCircuit, faults=()) -> tuple[PauliOp, list[int]]:
    """Propagate ``faults`` and record which measurements they flip.

    A fault at location ``i`` acts right after gate ``i`` (``-1`` is the
    input); faults sharing a location apply in list order. Returns the
    final frame and one flip bit per MEASZ, in gate order.
    """
    faults = _sorted_faults(circuit, faults)
    frame = PauliOp.identity(circuit.n_qubits)
    flips = []
    j = 0

    def inject(loc):
        nonlocal frame, j
        while j < len(faults) and faults[j][0] == loc:
            frame = faults[j][1] * frame
            j += 1

    inject(-1)
    for i, g in enumerate(circuit.gates):
        if g.name == "MEASZ":
            flips.append(frame.u >> g.qubits[0] & 1)
        frame = conjugate(g, frame)
        inject(i)
    return frame, flips


def propagate(circuit: CliffordCircuit, faults=()) -> PauliOp:
    """Final Pauli on all wires produced by ``faults``; see :func:`track`."""
    return track(circuit, faults)[0]


# ---------------------------------------------------------------------------
# fault-path counting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FaultRecord:
    """``locations`` are gate indices (``-1`` for the input); ``qubits`` the wires each fault hits."""

    weight: int
    locations: tuple[int, ...]
    qubits: tuple[tuple[int, ...], ...]
    paulis: tuple[str, ...]
    residual: str

    def location_text(self) -> str:
        return " ".join(f"{loc}:{','.join(map(str, qs))}" for loc, qs in zip(self.locations, self.qubits))


@dataclass
class FaultCounts:
    """Per fault weight, how many fault combinations end in each residual class."""

    counts: dict[int, dict[str, int]] = field(default_factory=dict)
    records: list[FaultRecord] = field(default_factory=list)

    def add(self, weight: int, cls: str) -> None:
        row = self.counts.setdefault(weight, {c: 0 for c in RESIDUAL_CLASSES})
        row[cls] += 1

    def logical(self, weight: int) -> int:
        return self.counts.get(weight, {}).get("logical", 0)

    def total(self, weight: int) -> int:
        return sum(self.counts.get(weight, {}).values())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["weight", "locations", "paulis", "residual"])
        for r in self.records:
            w.writerow([r.weight, r.location_text(), " ".join(r.paulis), r.residual])
        return buf.getvalue()

    def summary_csv(self) -> str:
        lines = ["weight,combinations," + ",".join(RESIDUAL_CLASSES)]
        for wt in sorted(self.counts):
            row = self.counts[wt]
            lines.append(f"{wt},{self.total(wt)}," + ",".join(str(row[c]) for c in RESIDUAL_CLASSES))
        return "\n".join(lines) + "\n"


def _location_faults(circuit, locs, letters):
    """Every nontrivial Pauli over ``letters`` on the qubits of each location."""
    out = []
    for loc, qubits in locs:
        choices = []
        for combo in itertools.product("I" + letters, repeat=len(qubits)):
            if set(combo) == {"I"}:
                continue
            p = PauliOp.identity(circuit.n_qubits)
            for q, letter in zip(qubits, combo):
                if letter != "I":
                    p = p * PauliOp.single(circuit.n_qubits, q, letter)
            choices.append(("".join(combo), p))
        out.append((loc, tuple(qubits), choices))
    return out


def count_failure_paths(
    circuit: CliffordCircuit,
    code: StabilizerCode,
    max_faults: int = 2,
    paulis: str = "XYZ",
    include_inputs: bool = True,
    budget: int = 10_000_000,
    table: SyndromeTable | None = None,
    keep_records: bool = True,
) -> FaultCounts:
    """Exhaustively inject 1..``max_faults`` faults and classify the outcome.

    ``circuit`` is an extraction network on ``n + r`` wires whose MEASZ on
    wire ``n + i`` reads syndrome bit ``i`` (as built by
    :func:`qecwork.correct.extraction_circuit`). Input faults are placed on
    the data wires. Each combination is decoded with the ideal table and the
    data residual is classed as ``stabilizer`` (success), ``logical`` (an
    undetectable logical error) or ``detectable`` (a wrong syndrome left an
    error that the next ideal round would see). Only non-stabilizer outcomes
    are kept in ``records``.
    """
    if not 0 <= max_faults <= 2:
        raise TrackError("max_faults must be 0, 1 or 2")
    if set(paulis) - set("XYZ") or not paulis:
        raise TrackError("paulis must be a nonempty subset of 'XYZ'")
    n, r = code.n, code.r
    if circuit.n_qubits != n + r:
        raise TrackError(f"circuit has {circuit.n_qubits} wires, expected n + r = {n + r}")
    table = table or default_decoder(code)
    meas_bit = []
    for g in circuit.gates:
        if g.name == "MEASZ":
            a = g.qubits[0] - n
            if not 0 <= a < r:
                raise TrackError(f"MEASZ on wire {g.qubits[0]} is not an ancilla")
            meas_bit.append(a)

    locs = circuit.locations(include_inputs, input_qubits=range(n))
    faults = _location_faults(circuit, locs, paulis)
    n_single = sum(len(f[2]) for f in faults)
    combos = n_single if max_faults >= 1 else 0
    if max_faults == 2:
        combos += sum(len(a[2]) * len(b[2]) for a, b in itertools.combinations(faults, 2))
    if combos > budget:
        raise TrackError(f"{combos} fault combinations exceed the budget of {budget}")

    data_mask = (1 << n) - 1

    # propagation is linear in the symplectic bits, so each single fault is
    # reduced to (data u, data v, syndrome) masks that combine by XOR
    def effect(loc, p):
        frame, flips = track(circuit, [(loc, p)])
        syn = 0
        for bit, f in zip(meas_bit, flips):
            syn ^= f << bit
        return frame.u & data_mask, frame.v & data_mask, syn

    effects = [[(label, effect(loc, p)) for label, p in choices] for loc, _, choices in faults]
    logicals = list(code.logical_x) + list(code.logical_z)

    def classify(u, v, syn):
        corr = table.corrections[syn]
        res = PauliOp(n, u ^ corr.u, v ^ corr.v)
        if code.syndrome_int(res):
            return "detectable"
        if any(not res.commutes(lg) for lg in logicals):
            return "logical"
        return "stabilizer"

    result = FaultCounts()
    if max_faults >= 1:
        for (loc, qs, _), opts in zip(faults, effects):
            for label, (u, v, syn) in opts:
                cls = classify(u, v, syn)
                result.add(1, cls)
                if keep_records and cls != "stabilizer":
                    result.records.append(FaultRecord(1, (loc,), (qs,), (label,), cls))
    if max_faults == 2:
        for (i, a), (j, b) in itertools.combinations(enumerate(effects), 2):
            for la, (ua, va, sa) in a:
                for lb, (ub, vb, sb) in b:
                    cls = classify(ua ^ ub, va ^ vb, sa ^ sb)
                    result.add(2, cls)
                    if keep_records and cls != "stabilizer":
                        fi, fj = faults[i], faults[j]
                        result.records.append(
                            FaultRecord(2, (fi[0], fj[0]), (fi[1], fj[1]), (la, lb), cls)
                        )
    return result
