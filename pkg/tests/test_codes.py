import itertools

import numpy as np
import pytest

from qecwork.codes import (
    BUILTIN_CODES,
    ClassicalCode,
    CodeError,
    StabilizerFileError,
    builtin_code,
    classical_repetition,
    css_from_classical,
    format_stabilizer_text,
    hamming_code,
    load_stabilizer_file,
    min_distance_bruteforce,
    parse_stabilizer_text,
    repetition_code,
    save_stabilizer_file,
    steane_code,
)
from qecwork.correct import encode, syndrome_of
from qecwork.pauli import PauliOp
from qecwork.statevec import StateVector

STEANE_ZERO = {
    "0000000", "1010101", "0110011", "1100110",
    "0001111", "1011010", "0111100", "1101001",
}
FIVE_QUBIT = """\
# name: five-qubit
5 1
XZZXI
IXZZX
XIXZZ
ZXIXZ
"""


def test_repetition_encoder():
    a, b = 0.6, 0.8
    s = encode(repetition_code(), (a, b))
    assert np.allclose(s.amp, StateVector.from_kets({"000": a, "111": b}).amp)


def test_repetition_syndrome_of_middle_flip():
    assert syndrome_of(PauliOp.parse("IXI"), repetition_code()) == "10"


def test_repetition_stabilizers_fix_codewords():
    code = repetition_code()
    for label in ("000", "111"):
        s = StateVector.basis(label)
        for g in code.stabilizers:
            assert np.allclose(s.apply_pauli(g).amp, s.amp)


def test_steane_zero_expansion():
    kets = encode(steane_code(), (1, 0)).kets(tol=1e-10)
    assert set(kets) == STEANE_ZERO
    assert np.allclose(list(kets.values()), 1 / np.sqrt(8), atol=1e-10)


def test_steane_one_is_flipped_zero():
    code = steane_code()
    one = encode(code, (0, 1))
    flipped = encode(code, (1, 0)).apply_pauli(PauliOp.parse("XXXXXXX"))
    assert np.max(np.abs(one.amp - flipped.amp)) < 1e-10


def test_steane_parameters():
    code = steane_code()
    assert (code.n, code.k) == (7, 1)
    assert min_distance_bruteforce(code).value == 3
    assert code.params == "[[7,1,3]]"


def test_hamming_distances():
    c = hamming_code(3)
    assert c.min_distance() == 3
    assert c.dual().min_distance() == 4
    assert c.contains_dual()


def test_css_from_hamming_matches_steane():
    code = css_from_classical(hamming_code(3))
    assert (code.n, code.k) == (7, 1)
    assert set(encode(code, (1, 0)).kets(tol=1e-10)) == STEANE_ZERO


def test_css_from_repetition_without_x_side():
    code = css_from_classical(classical_repetition(3), x_side=False)
    assert code.x_checks == ()
    assert code.k == 1
    assert all(set(s.format()) <= {"Z", "I"} for s in code.stabilizers)
    assert min_distance_bruteforce(code, paulis="X").value == 3


def test_css_rejects_non_dual_containing():
    parity = ClassicalCode.from_parity_check([[1, 1, 1]])
    with pytest.raises(CodeError, match="does not contain its dual"):
        css_from_classical(parity)


def test_css_generators_z_first():
    code = steane_code()
    kinds = ["Z" if s.u == 0 else "X" for s in code.stabilizers]
    assert kinds == ["Z"] * 3 + ["X"] * 3


def test_distance_of_repetition_code():
    code = repetition_code()
    assert min_distance_bruteforce(code).value == 1
    assert min_distance_bruteforce(code, paulis="Z").value == 1
    assert min_distance_bruteforce(code, paulis="X").value == 3


def test_distance_budget_zero():
    res = min_distance_bruteforce(steane_code(), budget=0)
    assert not res.found
    assert str(res) == "greater than 0"


def test_distance_monotone_in_budget():
    code = steane_code()
    assert not min_distance_bruteforce(code, budget=2).found
    assert min_distance_bruteforce(code, budget=3).value == 3


def _distance_oracle(code, max_w=3):
    # independent enumeration: normalizer membership by matrix commutation
    for w in range(1, max_w + 1):
        for qubits in itertools.combinations(range(code.n), w):
            for letters in itertools.product("XYZ", repeat=w):
                p = PauliOp.identity(code.n)
                for q, l in zip(qubits, letters):
                    p = p * PauliOp.single(code.n, q, l)
                if all(p.commutes(s) for s in code.stabilizers) and not code.in_stabilizer_group(p):
                    return w
    return None


@pytest.mark.parametrize("name", ["repetition3", "steane"])
def test_distance_matches_oracle(name):
    code = builtin_code(name)
    assert min_distance_bruteforce(code, budget=3).value == _distance_oracle(code)


@pytest.mark.parametrize("name", sorted(BUILTIN_CODES))
def test_encoder_outputs_are_stabilized(name):
    code = builtin_code(name)
    for c in range(1 << code.k):
        amps = np.zeros(1 << code.k)
        amps[c] = 1
        s = encode(code, amps)
        for g in code.stabilizers:
            assert np.max(np.abs(s.apply_pauli(g.hermitian()).amp - s.amp)) < 1e-10


@pytest.mark.parametrize("name", sorted(BUILTIN_CODES))
def test_logical_operator_relations(name):
    code = builtin_code(name)
    for i, (x, z) in enumerate(zip(code.logical_x, code.logical_z)):
        assert not x.commutes(z)
        assert all(x.commutes(s) and z.commutes(s) for s in code.stabilizers)
        for j in range(code.k):
            if j != i:
                assert x.commutes(code.logical_z[j])


def test_save_load_round_trip(tmp_path):
    code = steane_code()
    path = tmp_path / "steane.txt"
    save_stabilizer_file(code, path)
    loaded = load_stabilizer_file(path)
    assert set(loaded.stabilizers) == set(code.stabilizers)
    assert loaded.d is None
    assert load_stabilizer_file(path, trust_d=True).d == 3


def test_anticommuting_file_names_lines():
    with pytest.raises(StabilizerFileError, match="lines 2 and 3"):
        parse_stabilizer_text("2 0\nXI\nZI\n")


def test_bad_character_reports_line():
    with pytest.raises(StabilizerFileError) as info:
        parse_stabilizer_text("3 1\nZZI\nZIQ\n")
    assert info.value.lineno == 3


def test_five_qubit_file(tmp_path):
    path = tmp_path / "five.txt"
    path.write_text(FIVE_QUBIT)
    code = load_stabilizer_file(path)
    assert (code.n, code.k, code.name) == (5, 1, "five-qubit")
    assert min_distance_bruteforce(code).value == 3
    assert parse_stabilizer_text(format_stabilizer_text(code)).stabilizers == code.stabilizers
    assert code.encoder is None


def test_unknown_builtin():
    with pytest.raises(CodeError):
        builtin_code("golay")
