"""Classical and stabilizer codes: construction, validation, distance, files."""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import gf2
from .circuit import CNOT, CliffordCircuit, H
from .pauli import PauliError, PauliOp


class CodeError(ValueError):
    """A code failed validation."""


class StabilizerFileError(CodeError):
    def __init__(self, message: str, lineno: int | None = None, path=None):
        self.lineno = lineno
        self.path = path
        where = f"{path}:" if path else ""
        where += f"line {lineno}: " if lineno is not None else ""
        super().__init__(where + message)


# ---------------------------------------------------------------------------
# classical codes
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ClassicalCode:
    """Binary linear [n, k] code with generator and parity-check matrices."""

    gen: np.ndarray
    chk: np.ndarray
    d: int | None = None

    def __post_init__(self):
        gen = gf2.as_bits(self.gen)
        chk = gf2.as_bits(self.chk, gen.shape[1])
        if gen.shape[1] != chk.shape[1]:
            raise CodeError("generator and check matrices have different lengths")
        if gf2.rank(gen) != gen.shape[0]:
            raise CodeError("generator matrix is rank deficient")
        if gf2.rank(chk) != chk.shape[0]:
            raise CodeError("parity-check matrix is rank deficient")
        if gen.shape[0] + chk.shape[0] != gen.shape[1]:
            raise CodeError("rank(gen) + rank(chk) must equal n")
        if gf2.matmul(gen, chk.T).any():
            raise CodeError("gen @ chk.T is not zero over GF(2)")
        object.__setattr__(self, "gen", gen)
        object.__setattr__(self, "chk", chk)

    @property
    def n(self) -> int:
        return self.gen.shape[1]

    @property
    def k(self) -> int:
        return self.gen.shape[0]

    @classmethod
    def from_parity_check(cls, chk) -> ClassicalCode:
        chk, _ = gf2.rref(chk) if gf2.as_bits(chk).size else (gf2.as_bits(chk), [])
        return cls(gf2.nullspace(chk), chk)

    @classmethod
    def from_generator(cls, gen) -> ClassicalCode:
        gen, _ = gf2.rref(gen)
        return cls(gen, gf2.nullspace(gen))

    def dual(self) -> ClassicalCode:
        return ClassicalCode(self.chk, self.gen)

    def contains_dual(self) -> bool:
        return not gf2.matmul(self.chk, self.chk.T).any()

    def codewords(self) -> np.ndarray:
        msgs = np.array(list(itertools.product([0, 1], repeat=self.k)), dtype=np.uint8)
        return gf2.matmul(msgs, self.gen).reshape(-1, self.n)

    def min_distance(self) -> int:
        """Minimum Hamming weight of a nonzero codeword (exhaustive, k <= 20)."""
        if self.k > 20:
            raise CodeError("exhaustive distance limited to k <= 20")
        w = self.codewords().sum(axis=1)
        w = w[w > 0]
        return int(w.min()) if w.size else 0


def hamming_code(r: int = 3) -> ClassicalCode:
    """[2^r - 1, 2^r - 1 - r, 3] Hamming code; column j holds binary(j + 1)."""
    n = (1 << r) - 1
    chk = np.array([[(j + 1) >> (r - 1 - i) & 1 for j in range(n)] for i in range(r)], dtype=np.uint8)
    return ClassicalCode(gf2.nullspace(chk), chk, d=3)


def classical_repetition(n: int = 3) -> ClassicalCode:
    chk = np.zeros((n - 1, n), dtype=np.uint8)
    chk[:, 0] = 1
    chk[np.arange(n - 1), np.arange(1, n)] = 1
    return ClassicalCode(np.ones((1, n), dtype=np.uint8), chk, d=n)


def load_matrix_file(path) -> np.ndarray:
    """Read a 0/1 matrix, one row per line; blank lines and ``#`` comments skipped."""
    rows = []
    width = None
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].replace(" ", "").strip()
        if not line:
            continue
        if set(line) - {"0", "1"}:
            raise StabilizerFileError("matrix rows must contain only 0 and 1", lineno, path)
        if width is not None and len(line) != width:
            raise StabilizerFileError(f"row length {len(line)} differs from {width}", lineno, path)
        width = len(line)
        rows.append([int(c) for c in line])
    if not rows:
        raise StabilizerFileError("empty matrix file", None, path)
    return np.array(rows, dtype=np.uint8)


# ---------------------------------------------------------------------------
# stabilizer codes
# ---------------------------------------------------------------------------


def _symplectic_rows(ops) -> np.ndarray:
    ops = list(ops)
    if not ops:
        return np.zeros((0, 0), dtype=np.uint8)
    return np.array([p.to_symplectic() for p in ops], dtype=np.uint8)


def _omega(a: np.ndarray, b: np.ndarray) -> int:
    n = a.size // 2
    return int(a[:n] @ b[n:] + a[n:] @ b[:n]) % 2


def _extend_basis(base: np.ndarray, candidates: np.ndarray) -> list[np.ndarray]:
    """Candidate rows that are independent of ``base`` and of each other."""
    chosen = []
    current = base
    r = gf2.rank(current) if current.size else 0
    for c in candidates:
        trial = np.vstack([current, c]) if current.size else c.reshape(1, -1)
        if gf2.rank(trial) > r:
            chosen.append(c.copy())
            current = trial
            r += 1
    return chosen


def _derive_logicals(stabs: np.ndarray, n: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Symplectic Gram-Schmidt on the normalizer modulo the stabilizer."""
    if stabs.size:
        normalizer = gf2.nullspace(np.hstack([stabs[:, n:], stabs[:, :n]]))
    else:
        normalizer = np.eye(2 * n, dtype=np.uint8)
    pool = _extend_basis(stabs if stabs.size else np.zeros((0, 2 * n), np.uint8), normalizer)
    xs, zs = [], []
    while pool:
        a = pool.pop(0)
        j = next(i for i, b in enumerate(pool) if _omega(a, b))
        b = pool.pop(j)
        pool = [c ^ (_omega(c, b) * a) ^ (_omega(c, a) * b) for c in pool]
        xs.append(a)
        zs.append(b)
    return xs, zs


def _derive_css_logicals(hx: np.ndarray, hz: np.ndarray, n: int):
    """X-type and Z-type logical bases, paired so that Lx @ Lz.T = I."""
    empty = np.zeros((0, n), dtype=np.uint8)
    lx = _extend_basis(hx if hx.size else empty, gf2.nullspace(hz) if hz.size else np.eye(n, dtype=np.uint8))
    lz = _extend_basis(hz if hz.size else empty, gf2.nullspace(hx) if hx.size else np.eye(n, dtype=np.uint8))
    if not lx:
        return empty, empty
    lx = np.array(lx)
    lz = np.array(lz)
    pairing = gf2.matmul(lx, lz.T)
    lz = gf2.matmul(gf2.inverse(pairing).T, lz)
    return lx, lz


class MinDistance(NamedTuple):
    """Result of a bounded distance search; ``value`` is None when over budget."""

    value: int | None
    budget: int

    @property
    def found(self) -> bool:
        return self.value is not None

    def __str__(self) -> str:
        return str(self.value) if self.found else f"greater than {self.budget}"


@dataclass(frozen=True)
class StabilizerCode:
    """An [[n, k, d]] stabilizer code.

    ``d`` is ``None`` until computed. If logical operators are omitted they
    are derived (CSS-typed when the stabilizer is CSS). ``encoder`` maps
    ``|psi>`` on ``encoder_inputs`` (all other qubits ``|0>``) to the encoded
    state; it is available for CSS codes only.
    """

    n: int
    stabilizers: tuple[PauliOp, ...]
    logical_x: tuple[PauliOp, ...] = ()
    logical_z: tuple[PauliOp, ...] = ()
    d: int | None = None
    name: str = ""
    encoder: CliffordCircuit | None = field(default=None, compare=False)
    encoder_inputs: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        stabs = tuple(self.stabilizers)
        object.__setattr__(self, "stabilizers", stabs)
        for i, s in enumerate(stabs):
            if s.n != self.n:
                raise CodeError(f"generator {i} acts on {s.n} qubits, code has {self.n}")
        for i, j in itertools.combinations(range(len(stabs)), 2):
            if not stabs[i].commutes(stabs[j]):
                raise CodeError(f"generators {i} ({stabs[i]}) and {j} ({stabs[j]}) anticommute")
        if stabs and gf2.rank(_symplectic_rows(stabs)) != len(stabs):
            raise CodeError("stabilizer generators are not independent")
        k = self.n - len(stabs)
        lx, lz = tuple(self.logical_x), tuple(self.logical_z)
        if not lx and not lz and k > 0:
            lx, lz = self._derive_logicals()
        if self.is_css and self.encoder is None and k > 0 and all(self._pure(p, "X") for p in lx):
            enc, inputs, lx, lz = _css_encoder(self.x_check_matrix, lx, lz, self.n)
            object.__setattr__(self, "encoder", enc)
            object.__setattr__(self, "encoder_inputs", inputs)
        object.__setattr__(self, "logical_x", tuple(lx))
        object.__setattr__(self, "logical_z", tuple(lz))
        self._validate_logicals()

    # structure ------------------------------------------------------------

    @property
    def k(self) -> int:
        return self.n - len(self.stabilizers)

    @property
    def r(self) -> int:
        """Number of stabilizer generators (syndrome length)."""
        return len(self.stabilizers)

    @property
    def params(self) -> str:
        return f"[[{self.n},{self.k},{self.d if self.d is not None else '?'}]]"

    @staticmethod
    def _pure(p: PauliOp, kind: str) -> bool:
        return p.v == 0 if kind == "X" else p.u == 0

    @cached_property
    def is_css(self) -> bool:
        return all(self._pure(s, "X") or self._pure(s, "Z") for s in self.stabilizers)

    @cached_property
    def z_checks(self) -> tuple[int, ...]:
        """Indices of Z-type generators."""
        return tuple(i for i, s in enumerate(self.stabilizers) if s.u == 0 and s.v)

    @cached_property
    def x_checks(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.stabilizers) if s.v == 0 and s.u)

    @property
    def x_check_matrix(self) -> np.ndarray:
        rows = [self.stabilizers[i].u_bits() for i in self.x_checks]
        return np.array(rows, dtype=np.uint8).reshape(len(rows), self.n)

    @property
    def z_check_matrix(self) -> np.ndarray:
        rows = [self.stabilizers[i].v_bits() for i in self.z_checks]
        return np.array(rows, dtype=np.uint8).reshape(len(rows), self.n)

    @cached_property
    def stabilizer_matrix(self) -> np.ndarray:
        """Symplectic ``[u | v]`` rows of the generators."""
        return _symplectic_rows(self.stabilizers).reshape(self.r, 2 * self.n)

    def _derive_logicals(self):
        if self.is_css:
            lx, lz = _derive_css_logicals(self.x_check_matrix, self.z_check_matrix, self.n)
            zero = np.zeros(self.n, dtype=np.uint8)
            return (
                [PauliOp.from_bits(r, zero) for r in lx],
                [PauliOp.from_bits(zero, r) for r in lz],
            )
        xs, zs = _derive_logicals(self.stabilizer_matrix, self.n)
        return [PauliOp.from_symplectic(a) for a in xs], [PauliOp.from_symplectic(b) for b in zs]

    def _validate_logicals(self):
        lx, lz = self.logical_x, self.logical_z
        if len(lx) != self.k or len(lz) != self.k:
            raise CodeError(f"expected {self.k} logical X/Z operators, got {len(lx)}/{len(lz)}")
        for kind, ops in (("X", lx), ("Z", lz)):
            for i, p in enumerate(ops):
                if p.n != self.n:
                    raise CodeError(f"logical {kind}{i} has wrong size")
                for j, s in enumerate(self.stabilizers):
                    if not p.commutes(s):
                        raise CodeError(f"logical {kind}{i} anticommutes with generator {j}")
        for i in range(self.k):
            for j in range(self.k):
                if lx[i].commutes(lz[j]) != (i != j):
                    raise CodeError(f"logical X{i} / Z{j} have the wrong commutation")
                if j > i and not (lx[i].commutes(lx[j]) and lz[i].commutes(lz[j])):
                    raise CodeError(f"logical operators {i} and {j} interfere")

    def syndrome_int(self, p: PauliOp) -> int:
        """Syndrome packed into an int: bit i set iff ``p`` anticommutes with generator i."""
        if p.n != self.n:
            raise PauliError(f"dimension mismatch: {p.n} vs {self.n} qubits")
        out = 0
        for i, s in enumerate(self.stabilizers):
            if not s.commutes(p):
                out |= 1 << i
        return out

    def in_stabilizer_group(self, p: PauliOp) -> bool:
        """Membership (up to phase) by a GF(2) rank test."""
        if self.r == 0:
            return p.u == 0 and p.v == 0
        return gf2.in_rowspace(self.stabilizer_matrix, p.to_symplectic())

    def with_distance(self, budget: int | None = None) -> StabilizerCode:
        result = min_distance_bruteforce(self, budget)
        if not result.found:
            raise CodeError(f"distance {result}")
        return dataclasses.replace(self, d=result.value, encoder=self.encoder, encoder_inputs=self.encoder_inputs)


def _css_encoder(hx: np.ndarray, lx, lz, n: int):
    """Standard-form encoder for a CSS code from its X checks and X logicals.

    Logical X rows are first reduced so they vanish on the pivot columns of
    ``rref(hx)``; their own reduced echelon pivots become the input qubits.
    The circuit spreads each input over its logical X support, then puts every
    X-check pivot in ``|+>`` and fans it out over the rest of its row.
    """
    k = len(lx)
    lx_rows = np.array([p.u_bits() for p in lx], dtype=np.uint8)
    lz_rows = np.array([p.v_bits() for p in lz], dtype=np.uint8)
    if hx.size:
        hx_r, hx_piv = gf2.rref(hx)
    else:
        hx_r, hx_piv = np.zeros((0, n), np.uint8), []
    reduced = lx_rows.copy()
    for row, p in zip(hx_r, hx_piv):
        reduced[reduced[:, p] == 1] ^= row
    aug, piv = gf2.rref(np.hstack([reduced, np.eye(k, dtype=np.uint8)]))
    if any(p >= n for p in piv[:k]) or len(piv) < k:
        raise CodeError("logical X operators are not independent of the X checks")
    lx_ech, transform = aug[:k, :n], aug[:k, n:]
    inputs = tuple(piv[:k])
    gates = []
    for row, q in zip(lx_ech, inputs):
        gates.extend(CNOT(q, t) for t in np.nonzero(row)[0] if t != q)
    gates.extend(H(p) for p in hx_piv)
    for row, p in zip(hx_r, hx_piv):
        gates.extend(CNOT(p, t) for t in np.nonzero(row)[0] if t != p)
    # keep logical X_i aligned with input qubit i; re-pair Z to match
    new_lx = gf2.matmul(transform, lx_rows)
    new_lz = gf2.matmul(gf2.inverse(transform).T, lz_rows)
    zero = np.zeros(n, dtype=np.uint8)
    return (
        CliffordCircuit(n, tuple(gates)),
        inputs,
        [PauliOp.from_bits(r, zero) for r in new_lx],
        [PauliOp.from_bits(zero, r) for r in new_lz],
    )


def css_code(hx, hz, name: str = "", logical_x=None, logical_z=None) -> StabilizerCode:
    """CSS code with X checks ``hx`` and Z checks ``hz`` (Z-type generators first)."""
    hx = gf2.as_bits(hx)
    hz = gf2.as_bits(hz)
    n = hx.shape[1] if hx.size else hz.shape[1]
    if hx.size and hz.size and gf2.matmul(hx, hz.T).any():
        i, j = map(int, np.argwhere(gf2.matmul(hx, hz.T))[0])
        raise CodeError(f"X check {i} and Z check {j} overlap on an odd number of qubits")
    zero = np.zeros(n, dtype=np.uint8)
    stabs = [PauliOp.from_bits(zero, row) for row in hz] + [PauliOp.from_bits(row, zero) for row in hx]
    return StabilizerCode(
        n, tuple(stabs), tuple(logical_x or ()), tuple(logical_z or ()), name=name
    )


def css_from_classical(code: ClassicalCode, x_side: bool = True, name: str = "") -> StabilizerCode:
    """CSS code from a dual-containing classical code.

    Both Z checks and X checks are the parity checks of ``code`` (i.e. the
    generators of its dual), giving ``k = 2 k_C - n``. With ``x_side=False``
    only the Z checks are used, which yields the bit-flip code of ``code``
    and needs no dual-containing condition.
    """
    chk = code.chk
    if x_side:
        overlap = gf2.matmul(chk, chk.T)
        if overlap.any():
            i, j = map(int, np.argwhere(overlap)[0])
            raise CodeError(
                f"code does not contain its dual: checks {i} and {j} "
                f"({''.join(map(str, chk[i]))}, {''.join(map(str, chk[j]))}) have odd overlap"
            )
        return css_code(chk, chk, name=name)
    return css_code(np.zeros((0, code.n), np.uint8), chk, name=name)


def repetition_code() -> StabilizerCode:
    """The three-qubit bit-flip code: checks ZZI and ZIZ, encoder CNOT(0,1), CNOT(0,2)."""
    stabs = (PauliOp.parse("ZZI"), PauliOp.parse("ZIZ"))
    return StabilizerCode(
        3, stabs, (PauliOp.parse("XXX"),), (PauliOp.parse("ZII"),), d=1, name="repetition3"
    )


def steane_code() -> StabilizerCode:
    base = css_from_classical(hamming_code(3))
    return StabilizerCode(
        7,
        base.stabilizers,
        (PauliOp.parse("XXXXXXX"),),
        (PauliOp.parse("ZZZZZZZ"),),
        d=3,
        name="steane",
    )


def unencoded(n: int = 1) -> StabilizerCode:
    """Bare qubits: no checks, every non-identity error is a logical fault."""
    return StabilizerCode(n, (), name="unencoded", d=1)


BUILTIN_CODES = {
    "repetition3": repetition_code,
    "three-bit": repetition_code,
    "steane": steane_code,
    "unencoded": unencoded,
}


def builtin_code(name: str) -> StabilizerCode:
    try:
        return BUILTIN_CODES[name.lower()]()
    except KeyError:
        raise CodeError(f"unknown code {name!r}; choose from {sorted(BUILTIN_CODES)}") from None


# ---------------------------------------------------------------------------
# distance
# ---------------------------------------------------------------------------


def min_distance_bruteforce(
    code: StabilizerCode, budget: int | None = None, paulis: str = "XYZ"
) -> MinDistance:
    """Minimum weight of an operator that commutes with every generator but
    acts nontrivially on the logical qubits.

    Searches weights ``1..budget`` over the alphabet ``paulis`` (restrict to
    ``"X"`` or ``"Z"`` for the per-type distances of a CSS code). With no
    budget the search is exhaustive, which is allowed for ``n <= 16``.
    """
    if budget is None:
        if code.n > 16:
            raise CodeError("exhaustive search needs n <= 16; pass a budget")
        budget = code.n
    budget = min(budget, code.n)
    logicals = list(code.logical_x) + list(code.logical_z)
    atoms = []
    for q in range(code.n):
        row = []
        for letter in paulis:
            p = PauliOp.single(code.n, q, letter)
            lmask = sum(1 << j for j, lop in enumerate(logicals) if not lop.commutes(p))
            row.append((code.syndrome_int(p), lmask))
        atoms.append(row)
    for w in range(1, budget + 1):
        for qubits in itertools.combinations(range(code.n), w):
            for choice in itertools.product(*(atoms[q] for q in qubits)):
                syn = lmask = 0
                for s, m in choice:
                    syn ^= s
                    lmask ^= m
                if syn == 0 and lmask:
                    return MinDistance(w, budget)
    return MinDistance(None, budget)


# ---------------------------------------------------------------------------
# stabilizer text files
# ---------------------------------------------------------------------------


def _parse_op(text: str, n: int, lineno: int, path) -> PauliOp:
    try:
        p = PauliOp.parse(text)
    except PauliError as exc:
        raise StabilizerFileError(str(exc), lineno, path) from None
    if p.n != n:
        raise StabilizerFileError(f"operator has {p.n} qubits, header says {n}", lineno, path)
    return p


def parse_stabilizer_text(text: str, trust_d: bool = False, path=None) -> StabilizerCode:
    """Parse the ``n k [d]`` / generators / ``LX`` / ``LZ`` text format."""
    header = None
    section = "S"
    ops: dict[str, list[tuple[int, PauliOp]]] = {"S": [], "LX": [], "LZ": []}
    name = ""
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if stripped.startswith("#"):
            if stripped.lower().startswith("# name:"):
                name = stripped.split(":", 1)[1].strip()
            continue
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            parts = line.split()
            if len(parts) not in (2, 3) or not all(p.isdigit() for p in parts):
                raise StabilizerFileError("header must be 'n k' or 'n k d'", lineno, path)
            header = tuple(int(p) for p in parts)
            continue
        if line.upper() in ("LX", "LZ"):
            section = line.upper()
            continue
        ops[section].append((lineno, _parse_op(line, header[0], lineno, path)))
    if header is None:
        raise StabilizerFileError("missing 'n k' header", None, path)
    n, k = header[:2]
    gens = ops["S"]
    if len(gens) != n - k:
        raise StabilizerFileError(f"expected {n - k} generators for n={n}, k={k}, found {len(gens)}", None, path)
    for (la, a), (lb, b) in itertools.combinations(gens, 2):
        if not a.commutes(b):
            raise StabilizerFileError(f"generators on lines {la} and {lb} ({a}, {b}) anticommute", la, path)
    for sec in ("LX", "LZ"):
        for lineno, p in ops[sec]:
            for lg, g in gens:
                if not p.commutes(g):
                    raise StabilizerFileError(f"{sec} operator {p} anticommutes with generator on line {lg}", lineno, path)
    d = header[2] if trust_d and len(header) == 3 else None
    try:
        return StabilizerCode(
            n,
            tuple(p for _, p in gens),
            tuple(p for _, p in ops["LX"]),
            tuple(p for _, p in ops["LZ"]),
            d=d,
            name=name,
        )
    except CodeError as exc:
        raise StabilizerFileError(str(exc), None, path) from None


def load_stabilizer_file(path, trust_d: bool = False) -> StabilizerCode:
    return parse_stabilizer_text(Path(path).read_text(), trust_d=trust_d, path=str(path))


def format_stabilizer_text(code: StabilizerCode) -> str:
    lines = []
    if code.name:
        lines.append(f"# name: {code.name}")
    lines.append(f"{code.n} {code.k}" + (f" {code.d}" if code.d is not None else ""))
    lines.extend(s.format() for s in code.stabilizers)
    if code.k:
        lines.append("LX")
        lines.extend(p.format() for p in code.logical_x)
        lines.append("LZ")
        lines.extend(p.format() for p in code.logical_z)
    return "\n".join(lines) + "\n"


def save_stabilizer_file(code: StabilizerCode, path) -> None:
    Path(path).write_text(format_stabilizer_text(code))
