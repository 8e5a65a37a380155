"""Small stabilizer codes, noise channels and error-correction simulation."""

from .analytic import (
    concatenation_failure,
    large_code_example,
    p_uncorrectable,
    phase_channel_p,
    phase_fidelity,
    three_bit_failure,
)
from .circuit import CliffordCircuit, Gate
from .codes import (
    ClassicalCode,
    StabilizerCode,
    builtin_code,
    css_code,
    css_from_classical,
    hamming_code,
    load_stabilizer_file,
    min_distance_bruteforce,
    repetition_code,
    steane_code,
    unencoded,
)
from .correct import build_decoder, encode, extraction_circuit, run_pipeline, syndrome_of
from .fttrack import conjugate, count_failure_paths, propagate
from .montecarlo import FailureEstimate, TrialConfig, estimate_failure, sweep
from .noise import BitFlip, Depolarizing, IidPauli, PhaseRotation, ProjectiveCoupling
from .pauli import PauliOp
from .statevec import StateVector

__version__ = "0.1.0"

__all__ = [
    "BitFlip",
    "ClassicalCode",
    "CliffordCircuit",
    "Depolarizing",
    "FailureEstimate",
    "Gate",
    "IidPauli",
    "PauliOp",
    "PhaseRotation",
    "ProjectiveCoupling",
    "StabilizerCode",
    "StateVector",
    "TrialConfig",
    "build_decoder",
    "builtin_code",
    "concatenation_failure",
    "conjugate",
    "count_failure_paths",
    "css_code",
    "css_from_classical",
    "encode",
    "estimate_failure",
    "extraction_circuit",
    "hamming_code",
    "large_code_example",
    "load_stabilizer_file",
    "min_distance_bruteforce",
    "p_uncorrectable",
    "phase_channel_p",
    "phase_fidelity",
    "propagate",
    "repetition_code",
    "run_pipeline",
    "steane_code",
    "sweep",
    "syndrome_of",
    "three_bit_failure",
    "unencoded",
]
