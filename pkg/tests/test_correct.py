import itertools
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import unitary_group

from qecwork.codes import repetition_code, steane_code
from qecwork.correct import (
    DecoderError,
    Residual,
    build_decoder,
    encode,
    enumerate_patterns,
    exact_failure_probability,
    extract_syndrome_exact,
    residual_class,
    run_pipeline,
    run_pipeline_exact,
    run_pipeline_with_error,
    syndrome_of,
)
from qecwork.noise import BitFlip, PhaseRotation, ProjectiveCoupling, apply_exact, effective_p
from qecwork.pauli import PauliOp
from qecwork.statevec import pauli_expansion

AMPS = (0.6, 0.64 + 0.48j)


def paulis_up_to_weight(n, w):
    yield PauliOp.identity(n)
    for k in range(1, w + 1):
        for qubits in itertools.combinations(range(n), k):
            for letters in itertools.product("XYZ", repeat=k):
                p = PauliOp.identity(n)
                for q, l in zip(qubits, letters):
                    p = p * PauliOp.single(n, q, l)
                yield p


def test_syndrome_examples():
    rep = repetition_code()
    assert syndrome_of(PauliOp.identity(3), rep) == "00"
    assert syndrome_of(PauliOp.parse("IXI"), rep) == "10"
    steane = steane_code()
    z3 = PauliOp.single(7, 2, "Z")
    syn = syndrome_of(z3, steane)
    assert len(syn) == 6 and "1" in syn
    assert build_decoder(steane).lookup(syn) == z3


def test_three_bit_table():
    table = build_decoder(repetition_code())
    assert {s: c.format() for s, c in table.items()} == {
        "00": "III",
        "01": "IIX",
        "10": "IXI",
        "11": "XII",
    }
    assert table.to_csv().splitlines()[0] == "syndrome,correction"


def test_steane_table():
    code = steane_code()
    table = build_decoder(code)
    assert len(table) == 64
    assert table.lookup("000000") == PauliOp.identity(7)
    singles = [PauliOp.single(7, q, l) for q in range(7) for l in "XYZ"]
    syndromes = {syndrome_of(p, code) for p in singles}
    assert len(syndromes) == 21
    for p in singles:
        assert table.lookup(syndrome_of(p, code)) == p


def test_table_entries_are_minimum_weight():
    code = steane_code()
    table = build_decoder(code)
    # oracle: brute-force smallest weight per syndrome over all weight <= 3 errors
    best = {}
    for p in paulis_up_to_weight(7, 3):
        s = code.syndrome_int(p)
        best[s] = min(best.get(s, 99), p.weight)
    for s, corr in enumerate(table.corrections):
        assert code.syndrome_int(corr) == s
        assert corr.weight == best[s]


def test_decoder_size_limit():
    with pytest.raises(DecoderError):
        build_decoder(steane_code(), max_bits=5)


def test_residual_class_examples():
    rep = repetition_code()
    e = PauliOp.parse("IXI")
    assert residual_class(e, e, rep) is Residual.STABILIZER
    assert residual_class(PauliOp.parse("XXI"), PauliOp.parse("IIX"), rep) is Residual.LOGICAL
    with pytest.raises(DecoderError):
        residual_class(PauliOp.parse("XII"), PauliOp.parse("IIX"), rep)


def test_steane_failures_start_at_weight_two():
    code = steane_code()
    table = build_decoder(code)
    zz = PauliOp.parse("ZZIIIII")
    assert residual_class(zz, table.lookup(code.syndrome_int(zz)), code) is Residual.LOGICAL
    marg = (1 / 300, 1 / 300, 1 / 300)
    by_weight = Counter()
    mass = Counter()
    for e, prob, cls in enumerate_patterns(code, marg):
        if cls is Residual.LOGICAL:
            by_weight[e.weight] += 1
            mass[e.weight] += prob
    assert by_weight[0] == by_weight[1] == 0
    assert by_weight[2] > 0
    assert sum(mass.values()) == pytest.approx(exact_failure_probability(code, marg))
    assert mass[2] / sum(mass.values()) > 0.95


def test_exact_bitflip_enumeration():
    code = repetition_code()
    p = Fraction(1, 10)
    rows = list(enumerate_patterns(code, (p, 0, 0)))
    assert len(rows) == 8
    for error, prob, cls in rows:
        assert prob == p**error.weight * (1 - p) ** (3 - error.weight)
        assert (cls is Residual.STABILIZER) == (error.weight <= 1)
    assert exact_failure_probability(code, (p, 0, 0)) == 3 * p**2 * (1 - p) + p**3


def test_extraction_noise_free():
    for code in (repetition_code(), steane_code()):
        s = encode(code, AMPS)
        syn, post = extract_syndrome_exact(s, code, np.random.default_rng(0))
        assert syn == "0" * code.r
        assert post.partial_trace_fidelity(range(code.n), s) == pytest.approx(1.0)


def test_extraction_of_middle_flip():
    code = repetition_code()
    s = encode(code, AMPS).apply_pauli(PauliOp.parse("IXI"))
    for seed in range(5):
        assert extract_syndrome_exact(s, code, np.random.default_rng(seed))[0] == "10"


def test_extraction_frequencies_match_branch_weights():
    code = steane_code()
    rng = np.random.default_rng(11)
    u = unitary_group.rvs(2, random_state=rng)
    s = encode(code, (0.6, 0.8)).apply_unitary([3], u)
    # oracle: Born weight of each Pauli term is |c_P|^2
    expected = {
        syndrome_of(PauliOp.single(7, 3, l), code): abs(c) ** 2 for l, c in pauli_expansion(u).items()
    }
    trials = 10_000
    counts = Counter(extract_syndrome_exact(s, code, np.random.default_rng(i))[0] for i in range(trials))
    assert set(counts) <= set(expected)
    for syn, w in expected.items():
        sigma = np.sqrt(w * (1 - w) / trials)
        assert abs(counts[syn] / trials - w) < 4 * sigma + 1e-12


@pytest.mark.parametrize("code", [repetition_code(), steane_code()], ids=["three-bit", "steane"])
def test_frame_and_exact_agree(code):
    table = build_decoder(code)
    for e in paulis_up_to_weight(code.n, 2):
        res = run_pipeline_with_error(code, e, AMPS, table)
        assert res.syndrome == syndrome_of(e, code)
        ok = residual_class(e, table.lookup(res.syndrome), code) is Residual.STABILIZER
        assert ok == (res.fidelity > 1 - 1e-9), e


def test_no_noise_pipeline():
    res = run_pipeline(steane_code(), BitFlip(0.0), AMPS, np.random.default_rng(0))
    assert res.fidelity == pytest.approx(1.0, abs=1e-12)
    assert res.syndrome == "000000"


def test_steane_corrects_arbitrary_single_qubit_errors():
    code = steane_code()
    rng = np.random.default_rng(5)
    for _ in range(20):
        q = int(rng.integers(7))
        u = unitary_group.rvs(2, random_state=rng)
        res = run_pipeline(code, lambda s, g: s.apply_unitary([q], u), AMPS, rng)
        assert res.fidelity == pytest.approx(1.0, abs=1e-9)
        res = run_pipeline(code, lambda s, g: apply_exact(ProjectiveCoupling(0.3), s, q, g), AMPS, rng)
        assert res.fidelity == pytest.approx(1.0, abs=1e-9)


def test_pipeline_deterministic():
    code = steane_code()
    a = run_pipeline_exact(code, PhaseRotation(0.1), AMPS, seed=3)
    b = run_pipeline_exact(code, PhaseRotation(0.1), AMPS, seed=3)
    assert a == b


def test_phase_rotation_matches_bitflip_with_effective_p():
    code = repetition_code()
    model = PhaseRotation(0.0276)
    p = effective_p(model)
    assert p <= 0.01
    infid = np.mean([
        1 - run_pipeline_exact(code, model, (1, 0), seed=i, hadamard_trick=True, branch_average=True).fidelity
        for i in range(10_000)
    ])
    bitflip = float(exact_failure_probability(code, BitFlip(p)))
    assert infid == pytest.approx(bitflip, rel=0.1)


def test_worst_case_input_is_a_basis_state():
    # after the Hadamard trick the residual logical error is X, which leaves
    # |+>_L invariant and maps |0>_L to an orthogonal state
    code = repetition_code()
    model = PhaseRotation(0.05)
    def mean_fid(amps):
        return np.mean([
            run_pipeline_exact(code, model, amps, seed=i, hadamard_trick=True, branch_average=True).fidelity
            for i in range(500)
        ])
    assert mean_fid((1, 0)) < mean_fid((2**-0.5, 2**-0.5))
