"""Dense state-vector simulation for small registers.

Qubit 0 is the leftmost label of a ket, ``|q0 q1 ... q_{n-1}>``, which makes
it the most significant bit of the amplitude index. Every operation returns a
new :class:`StateVector`; the amplitude arrays are never mutated in place.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .pauli import PauliOp

MAX_QUBITS = 24
_INV_SQRT2 = 1 / np.sqrt(2)


class StateError(ValueError):
    pass


@lru_cache(maxsize=None)
def _indices(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


@lru_cache(maxsize=4096)
def _cnot_perm(n: int, control: int, target: int) -> np.ndarray:
    idx = _indices(n)
    cbit = 1 << (n - 1 - control)
    tbit = 1 << (n - 1 - target)
    return np.where(idx & cbit, idx ^ tbit, idx)


@lru_cache(maxsize=4096)
def _parity_signs(n: int, mask: int) -> np.ndarray:
    idx = _indices(n) & mask
    parity = np.zeros_like(idx)
    while mask:
        low = mask & -mask
        parity ^= (idx & low) != 0
        mask ^= low
    return 1 - 2 * parity.astype(np.int8)


def _index_mask(n: int, bits: int) -> int:
    """Convert a qubit-indexed mask (bit q = qubit q) to an amplitude-index mask."""
    out = 0
    for q in range(n):
        if bits >> q & 1:
            out |= 1 << (n - 1 - q)
    return out


class StateVector:
    """State of ``n`` qubits as ``2**n`` complex amplitudes."""

    __slots__ = ("n", "amp")

    def __init__(self, amp, normalize: bool = False):
        amp = np.asarray(amp, dtype=complex).ravel()
        n = int(round(np.log2(amp.size))) if amp.size else -1
        if n < 0 or 1 << n != amp.size:
            raise StateError(f"amplitude count {amp.size} is not a power of two")
        if n > MAX_QUBITS:
            raise StateError(f"{n} qubits exceeds the dense limit of {MAX_QUBITS}")
        norm = np.linalg.norm(amp)
        if normalize:
            if norm == 0:
                raise StateError("cannot normalize the zero vector")
            amp = amp / norm
        elif abs(norm - 1) > 1e-9:
            raise StateError(f"state is not normalized (norm {norm:.12g})")
        self.n = n
        self.amp = amp

    # construction ---------------------------------------------------------

    @classmethod
    def zeros(cls, n: int) -> StateVector:
        amp = np.zeros(1 << n, dtype=complex)
        amp[0] = 1
        return cls(amp)

    @classmethod
    def basis(cls, bits: str) -> StateVector:
        """Computational basis state from a label such as ``"0110"``."""
        amp = np.zeros(1 << len(bits), dtype=complex)
        amp[int(bits, 2) if bits else 0] = 1
        return cls(amp)

    @classmethod
    def qubit(cls, a: complex, b: complex) -> StateVector:
        return cls([a, b])

    @classmethod
    def from_kets(cls, kets: dict[str, complex]) -> StateVector:
        """Superposition from ``{"000": a, "111": b}``, normalized."""
        n = len(next(iter(kets)))
        amp = np.zeros(1 << n, dtype=complex)
        for label, c in kets.items():
            amp[int(label, 2)] += c
        return cls(amp, normalize=True)

    def copy(self) -> StateVector:
        return StateVector(self.amp.copy())

    def _new(self, amp: np.ndarray) -> StateVector:
        out = object.__new__(StateVector)
        out.n = self.n if amp.size == self.amp.size else int(np.log2(amp.size))
        out.amp = amp
        return out

    def _check_qubit(self, q: int) -> None:
        if not 0 <= q < self.n:
            raise StateError(f"qubit {q} out of range for {self.n}-qubit state")

    def tensor(self, other: StateVector) -> StateVector:
        """``self (x) other``; the other register's qubits are appended."""
        return StateVector(np.kron(self.amp, other.amp))

    def append_zeros(self, count: int) -> StateVector:
        if count == 0:
            return self
        amp = np.zeros(self.amp.size << count, dtype=complex)
        amp[:: 1 << count] = self.amp
        return self._new(amp)

    # gates ----------------------------------------------------------------

    def apply_pauli(self, p: PauliOp, qubits=None) -> StateVector:
        """Apply ``p`` (on all qubits, or embedded on ``qubits``)."""
        if qubits is not None:
            p = p.embed(self.n, qubits)
        if p.n != self.n:
            raise StateError(f"operator on {p.n} qubits, state has {self.n}")
        mx = _index_mask(self.n, p.u)
        mz = _index_mask(self.n, p.v)
        amp = self.amp
        if mz:
            amp = amp * _parity_signs(self.n, mz)
        if mx:
            amp = amp[_indices(self.n) ^ mx]
        if p.phase:
            amp = amp * p.sign
        return self._new(amp if amp is not self.amp else amp.copy())

    def apply_hadamard(self, q: int) -> StateVector:
        self._check_qubit(q)
        psi = self.amp.reshape(1 << q, 2, -1)
        out = np.empty_like(psi)
        np.add(psi[:, 0, :], psi[:, 1, :], out=out[:, 0, :])
        np.subtract(psi[:, 0, :], psi[:, 1, :], out=out[:, 1, :])
        out *= _INV_SQRT2
        return self._new(out.reshape(-1))

    def _apply_1q(self, q: int, u: np.ndarray) -> StateVector:
        psi = self.amp.reshape(1 << q, 2, -1)
        a, b = psi[:, 0, :], psi[:, 1, :]
        out = np.empty_like(psi)
        if u[0, 1] == 0 and u[1, 0] == 0:
            out[:, 0, :] = u[0, 0] * a
            out[:, 1, :] = u[1, 1] * b
        else:
            out[:, 0, :] = u[0, 0] * a + u[0, 1] * b
            out[:, 1, :] = u[1, 0] * a + u[1, 1] * b
        return self._new(out.reshape(-1))

    def apply_hadamard_all(self, qubits=None) -> StateVector:
        s = self
        for q in range(self.n) if qubits is None else qubits:
            s = s.apply_hadamard(q)
        return s

    def apply_cnot(self, control: int, target: int) -> StateVector:
        self._check_qubit(control)
        self._check_qubit(target)
        if control == target:
            raise StateError("control and target must differ")
        return self._new(self.amp[_cnot_perm(self.n, control, target)])

    def apply_controlled_pauli(self, control: int, p: PauliOp) -> StateVector:
        """Apply ``p`` to the branch where ``control`` is 1."""
        self._check_qubit(control)
        if (p.u | p.v) >> control & 1:
            raise StateError("controlled Pauli may not act on its control")
        flipped = self.apply_pauli(p).amp
        cbit = 1 << (self.n - 1 - control)
        return self._new(np.where(_indices(self.n) & cbit, flipped, self.amp))

    def apply_unitary(self, qubits, u, check: bool = True) -> StateVector:
        """Apply a ``2**m x 2**m`` unitary to ``qubits`` (m <= 2).

        The first listed qubit is the most significant index of ``u``.
        """
        qubits = list(qubits)
        m = len(qubits)
        u = np.asarray(u, dtype=complex)
        if not 1 <= m <= 2 or u.shape != (1 << m, 1 << m):
            raise StateError("unitary must be 2x2 or 4x4 and match the qubit list")
        if len(set(qubits)) != m:
            raise StateError("qubits must be distinct")
        for q in qubits:
            self._check_qubit(q)
        if check and not np.allclose(u.conj().T @ u, np.eye(1 << m), atol=1e-10):
            raise StateError("matrix is not unitary")
        if m == 1:
            return self._apply_1q(qubits[0], u)
        psi = self.amp.reshape((2,) * self.n)
        op = u.reshape((2,) * (2 * m))
        out = np.tensordot(op, psi, axes=(list(range(m, 2 * m)), qubits))
        out = np.moveaxis(out, list(range(m)), qubits)
        return self._new(np.ascontiguousarray(out).reshape(-1))

    # measurement ----------------------------------------------------------

    def outcome_probabilities(self, qubits) -> np.ndarray:
        """Born distribution over outcomes of ``qubits`` (first listed = MSB)."""
        qubits = list(qubits)
        for q in qubits:
            self._check_qubit(q)
        if len(set(qubits)) != len(qubits):
            raise StateError("qubits must be distinct")
        probs = np.abs(self.amp.reshape((2,) * self.n)) ** 2
        probs = np.moveaxis(probs, qubits, list(range(len(qubits))))
        return probs.reshape(1 << len(qubits), -1).sum(axis=1)

    def measure_postselect(self, qubits, outcome) -> tuple[StateVector, float]:
        """Project ``qubits`` onto ``outcome`` (bit string or tuple of bits).

        Returns the renormalized state and the Born probability of the branch.
        Raises :class:`StateError` if the branch has zero probability.
        """
        qubits = list(qubits)
        bits = [int(b) for b in outcome]
        if len(bits) != len(qubits):
            raise StateError("outcome length does not match qubit list")
        idx = _indices(self.n)
        keep = np.ones(idx.size, dtype=bool)
        for q, b in zip(qubits, bits):
            keep &= ((idx >> (self.n - 1 - q)) & 1) == b
        amp = np.where(keep, self.amp, 0)
        prob = float(np.vdot(amp, amp).real)
        if prob <= 1e-300:
            raise StateError(f"outcome {''.join(map(str, bits))} has zero probability")
        return self._new(amp / np.sqrt(prob)), prob

    def measure(self, qubits, rng: np.random.Generator) -> tuple[str, StateVector, float]:
        """Projective Z measurement of ``qubits`` with outcome drawn from ``rng``."""
        qubits = list(qubits)
        probs = self.outcome_probabilities(qubits)
        k = int(rng.choice(probs.size, p=probs / probs.sum()))
        outcome = format(k, f"0{len(qubits)}b") if qubits else ""
        state, prob = self.measure_postselect(qubits, outcome)
        return outcome, state, prob

    # comparison -----------------------------------------------------------

    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))

    def fidelity(self, other: StateVector) -> float:
        if other.n != self.n:
            raise StateError(f"dimension mismatch: {self.n} vs {other.n} qubits")
        return float(min(1.0, abs(np.vdot(self.amp, other.amp)) ** 2))

    def reduced_density_matrix(self, keep) -> np.ndarray:
        keep = list(keep)
        rest = [q for q in range(self.n) if q not in keep]
        psi = np.moveaxis(self.amp.reshape((2,) * self.n), keep + rest, range(self.n))
        psi = psi.reshape(1 << len(keep), -1)
        return psi @ psi.conj().T

    def partial_trace_fidelity(self, keep, reference: StateVector) -> float:
        """``<ref| rho_keep |ref>`` with everything outside ``keep`` traced out."""
        keep = list(keep)
        if reference.n != len(keep):
            raise StateError("reference size does not match kept qubits")
        for q in keep:
            self._check_qubit(q)
        rest = [q for q in range(self.n) if q not in keep]
        psi = np.moveaxis(self.amp.reshape((2,) * self.n), keep + rest, range(self.n))
        psi = psi.reshape(1 << len(keep), -1)
        overlap = reference.amp.conj() @ psi
        return float(min(1.0, np.vdot(overlap, overlap).real))

    def kets(self, tol: float = 1e-12) -> dict[str, complex]:
        return {
            format(i, f"0{self.n}b"): complex(a)
            for i, a in enumerate(self.amp)
            if abs(a) > tol
        }

    def dump(self, tol: float = 1e-12) -> str:
        """One ``"bitstring re im"`` line per nonzero amplitude, sorted."""
        return "\n".join(
            f"{label} {a.real:.12f} {a.imag:.12f}" for label, a in sorted(self.kets(tol).items())
        )

    def __repr__(self) -> str:
        return f"StateVector(n={self.n})"


def fidelity(a: StateVector, b: StateVector) -> float:
    return a.fidelity(b)


def pauli_expansion(u: np.ndarray) -> dict[str, complex]:
    """Coefficients of a 2x2 matrix in the basis I, X, XZ, Z.

    ``XZ`` is the real ``Y`` of the ``X_u Z_v`` convention, so
    ``u = c_I I + c_X X + c_Y XZ + c_Z Z``.
    """
    u = np.asarray(u, dtype=complex)
    basis = {
        "I": np.eye(2, dtype=complex),
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "Y": np.array([[0, -1], [1, 0]], dtype=complex),
        "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    }
    # the basis is orthogonal under the trace inner product, each with norm^2 = 2
    return {k: np.trace(b.conj().T @ u) / 2 for k, b in basis.items()}
