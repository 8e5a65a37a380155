"""Binary-symplectic n-qubit Pauli operators.

An operator is stored as ``i**phase * X_u Z_v``: ``u`` and ``v`` are n-bit
masks packed into Python ints (bit ``q`` is qubit ``q``), and the X string
stands to the left of the Z string. With that ordering ``Y`` is simply
``u_q = v_q = 1`` with phase 0, i.e. ``Y = XZ = -i*sigma_y``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

_SIGNS = {0: 1, 1: 1j, 2: -1, 3: -1j}
_SIGN_TEXT = {0: "", 1: "i", 2: "-", 3: "-i"}
_SIGN_PARSE = {"": 0, "+": 0, "i": 1, "+i": 1, "-": 2, "-i": 3}
_LETTERS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}

_SIGN_RE = re.compile(r"^\s*([+-]?i?)\s*(.*?)\s*$", re.S)
_SUBSCRIPT_RE = re.compile(r"^(?:X_([01]+))?\s*\*?\s*(?:Z_([01]+))?$")


class PauliError(ValueError):
    """Malformed Pauli text or mismatched operator sizes."""


def popcount(x: int) -> int:
    return bin(x).count("1")


def _mask_from_bits(bits) -> int:
    out = 0
    for q, b in enumerate(bits):
        if int(b) & 1:
            out |= 1 << q
    return out


@dataclass(frozen=True)
class PauliOp:
    """An n-qubit Pauli error operator ``i**phase X_u Z_v``."""

    n: int
    u: int = 0
    v: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise PauliError("qubit count must be non-negative")
        limit = 1 << self.n
        if not (0 <= self.u < limit and 0 <= self.v < limit):
            raise PauliError(f"u/v masks exceed {self.n} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    # construction ---------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> PauliOp:
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> PauliOp:
        """One Pauli ``letter`` in ``"XYZI"`` on ``qubit``, identity elsewhere."""
        if not 0 <= qubit < n:
            raise PauliError(f"qubit {qubit} out of range for n={n}")
        letter = letter.upper()
        if letter not in "IXYZ":
            raise PauliError(f"unknown Pauli letter {letter!r}")
        bit = 1 << qubit
        return cls(n, bit if letter in "XY" else 0, bit if letter in "ZY" else 0)

    @classmethod
    def from_bits(cls, u_bits, v_bits, phase: int = 0) -> PauliOp:
        """Build from two 0/1 sequences indexed by qubit."""
        u_bits = list(u_bits)
        v_bits = list(v_bits)
        if len(u_bits) != len(v_bits):
            raise PauliError("u and v have different lengths")
        return cls(len(u_bits), _mask_from_bits(u_bits), _mask_from_bits(v_bits), phase)

    @classmethod
    def from_symplectic(cls, vec, phase: int = 0) -> PauliOp:
        """Inverse of :meth:`to_symplectic`; ``vec`` is ``[u | v]`` of length 2n."""
        vec = np.asarray(vec).ravel()
        if vec.size % 2:
            raise PauliError("symplectic vector must have even length")
        n = vec.size // 2
        return cls.from_bits(vec[:n], vec[n:], phase)

    @classmethod
    def parse(cls, text: str) -> PauliOp:
        """Parse letter form (``"-iXIZYX"``) or subscript form (``"X_10011 Z_00110"``).

        Bit strings and letters are read left to right as qubit 0, 1, ...
        ``_`` is accepted as a synonym for ``I``.
        """
        m = _SIGN_RE.match(text)
        sign, body = m.group(1), m.group(2)
        if sign not in _SIGN_PARSE:
            raise PauliError(f"bad sign prefix in {text!r}")
        phase = _SIGN_PARSE[sign]
        if "_" in body and re.search(r"[XZ]_", body):
            sm = _SUBSCRIPT_RE.match(body)
            if not sm or not (sm.group(1) or sm.group(2)):
                raise PauliError(f"malformed subscript form {text!r}")
            xs, zs = sm.group(1), sm.group(2)
            if xs and zs and len(xs) != len(zs):
                raise PauliError(f"inconsistent lengths in {text!r}")
            xs = xs or "0" * len(zs)
            zs = zs or "0" * len(xs)
            return cls.from_bits(xs, zs, phase)
        u = v = 0
        for q, ch in enumerate(body):
            if ch in "I_":
                continue
            if ch not in "XYZ":
                raise PauliError(f"unexpected character {ch!r} in {text!r}")
            if ch in "XY":
                u |= 1 << q
            if ch in "ZY":
                v |= 1 << q
        return cls(len(body), u, v, phase)

    # views ----------------------------------------------------------------

    @property
    def sign(self) -> complex:
        return _SIGNS[self.phase]

    @property
    def weight(self) -> int:
        return popcount(self.u | self.v)

    @property
    def support(self) -> list[int]:
        mask = self.u | self.v
        return [q for q in range(self.n) if mask >> q & 1]

    def letter(self, qubit: int) -> str:
        return _LETTERS[(self.u >> qubit & 1, self.v >> qubit & 1)]

    def u_bits(self) -> np.ndarray:
        return np.array([self.u >> q & 1 for q in range(self.n)], dtype=np.uint8)

    def v_bits(self) -> np.ndarray:
        return np.array([self.v >> q & 1 for q in range(self.n)], dtype=np.uint8)

    def to_symplectic(self) -> np.ndarray:
        return np.concatenate([self.u_bits(), self.v_bits()])

    def to_bytes(self) -> bytes:
        """2n-bit serialization: u then v, little-endian bit order."""
        return (self.u | self.v << self.n).to_bytes((2 * self.n + 7) // 8, "little")

    @classmethod
    def from_bytes(cls, data: bytes, n: int) -> PauliOp:
        value = int.from_bytes(data, "little")
        mask = (1 << n) - 1
        if value >> 2 * n:
            raise PauliError("serialized value has bits beyond 2n")
        return cls(n, value & mask, value >> n & mask)

    def format(self, style: str = "letters") -> str:
        prefix = _SIGN_TEXT[self.phase]
        if style == "letters":
            return prefix + "".join(self.letter(q) for q in range(self.n))
        if style == "subscript":
            us = "".join(str(self.u >> q & 1) for q in range(self.n))
            vs = "".join(str(self.v >> q & 1) for q in range(self.n))
            return f"{prefix}X_{us} Z_{vs}"
        raise ValueError(f"unknown style {style!r}")

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"PauliOp({self.format()!r})"

    # algebra --------------------------------------------------------------

    def _check(self, other: PauliOp) -> None:
        if not isinstance(other, PauliOp):
            raise TypeError(f"expected PauliOp, got {type(other).__name__}")
        if other.n != self.n:
            raise PauliError(f"dimension mismatch: {self.n} vs {other.n} qubits")

    def __mul__(self, other: PauliOp) -> PauliOp:
        self._check(other)
        # Z_v1 X_u2 = (-1)^{v1.u2} X_u2 Z_v1
        swaps = popcount(self.v & other.u)
        return PauliOp(
            self.n,
            self.u ^ other.u,
            self.v ^ other.v,
            self.phase + other.phase + 2 * swaps,
        )

    def commutes(self, other: PauliOp) -> bool:
        self._check(other)
        return (popcount(self.u & other.v) + popcount(self.v & other.u)) % 2 == 0

    def anticommutes(self, other: PauliOp) -> bool:
        return not self.commutes(other)

    def inverse(self) -> PauliOp:
        # (X_u Z_v)^-1 = Z_v X_u = (-1)^{u.v} X_u Z_v
        return PauliOp(self.n, self.u, self.v, -self.phase + 2 * popcount(self.u & self.v))

    def hermitian(self) -> PauliOp:
        """The Hermitian representative of this operator's class.

        ``X_u Z_v`` is Hermitian up to the factor ``i**(u.v)``; e.g. the letter
        ``Y`` becomes ``sigma_y``. Used wherever an operator is treated as an
        observable (stabilizer measurement, code-space projection).
        """
        return PauliOp(self.n, self.u, self.v, popcount(self.u & self.v))

    def without_phase(self) -> PauliOp:
        return PauliOp(self.n, self.u, self.v)

    def equal_up_to_phase(self, other: PauliOp) -> bool:
        return self.n == other.n and self.u == other.u and self.v == other.v

    def restrict(self, qubits) -> PauliOp:
        """Sub-operator on ``qubits`` (in the given order), phase dropped."""
        qubits = list(qubits)
        return PauliOp.from_bits(
            [self.u >> q & 1 for q in qubits], [self.v >> q & 1 for q in qubits]
        )

    def embed(self, n: int, qubits) -> PauliOp:
        """Place this operator on ``qubits`` of a larger ``n``-qubit register."""
        qubits = list(qubits)
        if len(qubits) != self.n:
            raise PauliError("qubit list does not match operator size")
        u = v = 0
        for i, q in enumerate(qubits):
            u |= (self.u >> i & 1) << q
            v |= (self.v >> i & 1) << q
        return PauliOp(n, u, v, self.phase)

    def matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix (qubit 0 most significant). Small n only."""
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        z = np.array([[1, 0], [0, -1]], dtype=complex)
        eye = np.eye(2, dtype=complex)
        out = np.array([[1]], dtype=complex)
        for q in range(self.n):
            f = (x if self.u >> q & 1 else eye) @ (z if self.v >> q & 1 else eye)
            out = np.kron(out, f)
        return self.sign * out


def weight(p: PauliOp) -> int:
    return p.weight


def multiply(p: PauliOp, q: PauliOp) -> PauliOp:
    return p * q


def commutes(p: PauliOp, q: PauliOp) -> bool:
    return p.commutes(q)


def parse(text: str) -> PauliOp:
    return PauliOp.parse(text)


def format_pauli(p: PauliOp, style: str = "letters") -> str:
    return p.format(style)
