import csv
import io
import json

import numpy as np
import pytest

from qecwork.codes import repetition_code, steane_code, unencoded
from qecwork.correct import exact_failure_probability
from qecwork.montecarlo import (
    CSV_COLUMNS,
    FailureEstimate,
    MonteCarloError,
    TrialConfig,
    derive_seed,
    estimate_failure,
    model_family,
    sweep,
    to_csv,
    to_json,
    wilson,
)
from qecwork.noise import BitFlip, Depolarizing, PhaseRotation, effective_p


def three_bit(p):
    return 3 * p**2 - 2 * p**3


def test_three_bit_canonical_row():
    est = estimate_failure(TrialConfig(repetition_code(), BitFlip(0.1), 1_000_000, 1))
    assert est.contains(0.028)
    assert est.trials == 1_000_000


@pytest.mark.parametrize("code", [repetition_code(), steane_code()], ids=["three-bit", "steane"])
def test_zero_noise_never_fails(code):
    est = estimate_failure(TrialConfig(code, Depolarizing(0.0), 10_000, 2))
    assert est.failures == 0
    assert est.ci95[0] == 0


def test_three_bit_sweep():
    rows = sweep(repetition_code(), "bitflip", [0.05, 0.1, 0.2], 200_000, seed=3)
    assert [p for p, _ in rows] == [0.05, 0.1, 0.2]
    hits = sum(est.contains(three_bit(p)) for p, est in rows)
    assert hits >= 2


def test_empty_grid():
    with pytest.raises(MonteCarloError):
        sweep(repetition_code(), "bitflip", [], 10, seed=0)


def test_steane_scaling_slope():
    grid = [0.003, 0.01, 0.03]
    rows = sweep(steane_code(), "depolarizing", grid, 1_000_000, seed=5)
    slope = np.polyfit(np.log(grid), np.log([e.p_hat for _, e in rows]), 1)[0]
    assert 1.8 <= slope <= 2.2


def test_matches_exhaustive_oracle():
    code = steane_code()
    model = Depolarizing(0.05)
    est = estimate_failure(TrialConfig(code, model, 300_000, 9))
    assert est.contains(exact_failure_probability(code, model))


def test_worker_count_does_not_change_result():
    code = steane_code()
    results = {
        w: estimate_failure(TrialConfig(code, Depolarizing(0.05), 300_000, 11, workers=w)) for w in (1, 2, 4)
    }
    assert len({(r.failures, r.trials) for r in results.values()}) == 1


def test_same_seed_same_count_different_seed_differs():
    cfg = TrialConfig(repetition_code(), BitFlip(0.2), 100_000, 4)
    assert estimate_failure(cfg).failures == estimate_failure(cfg).failures
    other = TrialConfig(repetition_code(), BitFlip(0.2), 100_000, 5)
    assert estimate_failure(cfg).failures != estimate_failure(other).failures


def test_derive_seed():
    assert derive_seed(1, 0) == derive_seed(1, 0)
    assert len({derive_seed(1, i) for i in range(100)}) == 100
    assert derive_seed(1, 0) != derive_seed(2, 0)


def test_steane_beats_three_bit_under_depolarizing_but_not_bitflip():
    # the three-bit code leaves Z errors uncorrected; under pure bit flips it
    # has the smaller block and so fails less often
    dep = Depolarizing(0.03)
    three = estimate_failure(TrialConfig(repetition_code(), dep, 200_000, 6))
    seven = estimate_failure(TrialConfig(steane_code(), dep, 200_000, 6))
    assert seven.ci95[1] < three.ci95[0]
    flip = BitFlip(0.03)
    three = estimate_failure(TrialConfig(repetition_code(), flip, 200_000, 7))
    seven = estimate_failure(TrialConfig(steane_code(), flip, 200_000, 7))
    assert three.ci95[1] < seven.ci95[0]


def test_crossover_with_unencoded_qubit():
    grid = [0.02, 0.05, 0.11, 0.14, 0.17]
    enc = sweep(steane_code(), "depolarizing", grid, 100_000, seed=8)
    bare = sweep(unencoded(), "depolarizing", grid, 100_000, seed=8)
    helps = [e.p_hat < b.p_hat for (_, e), (_, b) in zip(enc, bare)]
    assert helps[0] and not helps[-1]
    i = helps.index(False)
    assert all(helps[:i]) and not any(helps[i:])
    # oracle: the exhaustively enumerated curve crosses p in the same bracket
    lo, hi = grid[i - 1], grid[i]
    assert exact_failure_probability(steane_code(), Depolarizing(lo)) < lo
    assert exact_failure_probability(steane_code(), Depolarizing(hi)) > hi


def test_hadamard_trick_turns_phase_noise_into_bitflips():
    model = PhaseRotation(0.05)
    cfg = TrialConfig(repetition_code(), model, 400_000, 12, hadamard_trick=True)
    est = estimate_failure(cfg)
    p = effective_p(model)
    assert est.contains(three_bit(p))
    plain = estimate_failure(TrialConfig(repetition_code(), model, 100_000, 12))
    # without it every odd number of Z errors is a logical Z
    assert plain.contains(3 * p * (1 - p) ** 2 + p**3)


def test_wilson_interval():
    lo, hi = wilson(28, 1000)
    assert lo < 0.028 < hi
    assert wilson(0, 100)[0] == 0
    est = FailureEstimate.from_counts(5, 10, seed=0)
    assert est.p_hat == 0.5


def test_config_validation():
    with pytest.raises(MonteCarloError):
        TrialConfig(repetition_code(), BitFlip(0.1), 0, 1)
    with pytest.raises(MonteCarloError):
        TrialConfig(repetition_code(), BitFlip(0.1), 10, 1, workers=0)
    with pytest.raises(MonteCarloError):
        model_family("iid_pauli")


def test_csv_and_json():
    rows = sweep(repetition_code(), "bitflip", [0.1, 0.2], 1000, seed=1)
    table = list(csv.DictReader(io.StringIO(to_csv(rows))))
    assert tuple(table[0]) == CSV_COLUMNS
    assert float(table[0]["param"]) == 0.1
    assert int(table[1]["trials"]) == 1000
    doc = json.loads(to_json(rows, code="repetition3"))
    assert doc["schema_version"] == 1
    assert doc["code"] == "repetition3"
    assert [r["failures"] for r in doc["rows"]] == [e.failures for _, e in rows]
