"""Noise channels, both as exact state-vector maps and as Pauli samplers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pauli import PauliOp
from .statevec import StateVector


class NoiseError(ValueError):
    pass


def _check_prob(name: str, p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise NoiseError(f"{name}={p} is not a probability")


@dataclass(frozen=True)
class BitFlip:
    """X on each qubit with probability ``p``."""

    p: float

    def __post_init__(self):
        _check_prob("p", self.p)


@dataclass(frozen=True)
class PhaseRotation:
    """``diag(e^{i eps phi}, e^{-i eps phi})`` with ``phi ~ U(0, 2 pi)``.

    ``phi`` is drawn independently per qubit unless ``shared_phi`` is set, in
    which case one angle is used for every qubit of a channel use.
    """

    epsilon: float
    shared_phi: bool = False

    def __post_init__(self):
        if self.epsilon < 0:
            raise NoiseError("epsilon must be non-negative")


@dataclass(frozen=True)
class ProjectiveCoupling:
    """Entangle a qubit with a fresh environment qubit, ``<alpha|beta> = 1 - eps``.

    ``|alpha> = |0>`` and ``|beta> = (1 - eps)|0> + sqrt(2 eps - eps^2)|1>``.
    """

    epsilon: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 2.0:
            raise NoiseError("epsilon must lie in [0, 2] so that |<alpha|beta>| <= 1")


@dataclass(frozen=True)
class Depolarizing:
    """X, Y, Z each with probability ``p/3``."""

    p: float

    def __post_init__(self):
        _check_prob("p", self.p)


@dataclass(frozen=True)
class IidPauli:
    px: float = 0.0
    py: float = 0.0
    pz: float = 0.0

    def __post_init__(self):
        for name in ("px", "py", "pz"):
            _check_prob(name, getattr(self, name))
        if self.px + self.py + self.pz > 1.0 + 1e-15:
            raise NoiseError("px + py + pz exceeds 1")


NoiseModel = BitFlip | PhaseRotation | ProjectiveCoupling | Depolarizing | IidPauli


# ---------------------------------------------------------------------------
# effective error probabilities
# ---------------------------------------------------------------------------


def phase_rotation_p(epsilon: float) -> float:
    """Exact ``<sin^2(eps phi)>`` for ``phi ~ U(0, 2 pi)``."""
    x = 4 * math.pi * epsilon
    if abs(x) < 1e-4:
        # series of 1/2 - sin(x)/(2x), avoids cancellation
        return x * x / 12 - x**4 / 240
    return 0.5 - math.sin(x) / (2 * x)


def effective_p(model: NoiseModel) -> float:
    """Per-qubit probability of the single nontrivial Pauli the channel produces."""
    if isinstance(model, BitFlip):
        return model.p
    if isinstance(model, PhaseRotation):
        return phase_rotation_p(model.epsilon)
    if isinstance(model, ProjectiveCoupling):
        # weight of the sigma_z branch: || (|alpha> - |beta>) / 2 ||^2
        overlap = 1 - model.epsilon
        return (1 - overlap) / 2
    raise NoiseError(f"effective_p is not defined for {type(model).__name__}")


def effective_p_squared(model: ProjectiveCoupling) -> float:
    """The squared expression ``(1 - Re<alpha|beta>)^2 / 2 = eps^2 / 2``.

    Kept for comparison only; the state-vector branch weight is ``eps / 2``.
    """
    if not isinstance(model, ProjectiveCoupling):
        raise NoiseError("effective_p_squared only applies to ProjectiveCoupling")
    return model.epsilon**2 / 2


def pauli_marginals(model: NoiseModel) -> tuple[float, float, float]:
    """Per-qubit ``(px, py, pz)`` of the digitized channel."""
    if isinstance(model, BitFlip):
        return (model.p, 0.0, 0.0)
    if isinstance(model, Depolarizing):
        return (model.p / 3, model.p / 3, model.p / 3)
    if isinstance(model, IidPauli):
        return (model.px, model.py, model.pz)
    if isinstance(model, (PhaseRotation, ProjectiveCoupling)):
        return (0.0, 0.0, effective_p(model))
    raise NoiseError(f"unknown noise model {model!r}")


# ---------------------------------------------------------------------------
# Pauli sampling
# ---------------------------------------------------------------------------


def sample_error_bits(
    model: NoiseModel, n: int, trials: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized i.i.d. sampling: ``(u, v)`` uint8 arrays of shape (trials, n)."""
    px, py, pz = pauli_marginals(model)
    r = rng.random((trials, n))
    is_x = r < px
    is_y = (r >= px) & (r < px + py)
    is_z = (r >= px + py) & (r < px + py + pz)
    u = (is_x | is_y).astype(np.uint8)
    v = (is_z | is_y).astype(np.uint8)
    return u, v


def sample_error(model: NoiseModel, n: int, rng: np.random.Generator) -> PauliOp:
    u, v = sample_error_bits(model, n, 1, rng)
    return PauliOp.from_bits(u[0], v[0])


# ---------------------------------------------------------------------------
# exact action on state vectors
# ---------------------------------------------------------------------------


def phase_rotation_matrix(angle: float) -> np.ndarray:
    return np.diag([np.exp(1j * angle), np.exp(-1j * angle)])


def coupling_unitary(epsilon: float) -> np.ndarray:
    """Controlled rotation on (qubit, env): env ``|0> -> |beta>`` when the qubit is 1."""
    c = 1 - epsilon
    s = math.sqrt(max(0.0, 2 * epsilon - epsilon**2))
    u = np.eye(4, dtype=complex)
    u[2:, 2:] = [[c, -s], [s, c]]
    return u


def apply_exact(
    model: NoiseModel,
    s: StateVector,
    qubit: int,
    rng: np.random.Generator,
    angle: float | None = None,
) -> StateVector:
    """Apply one use of the channel to ``qubit``.

    ProjectiveCoupling appends one environment qubit at the end of the
    register. Pauli channels sample an operator and apply it. ``angle``
    overrides the random ``eps * phi`` of a PhaseRotation.
    """
    if isinstance(model, PhaseRotation):
        if angle is None:
            angle = model.epsilon * rng.uniform(0, 2 * math.pi)
        return s.apply_unitary([qubit], phase_rotation_matrix(angle), check=False)
    if isinstance(model, ProjectiveCoupling):
        s = s.append_zeros(1)
        return s.apply_unitary([qubit, s.n - 1], coupling_unitary(model.epsilon), check=False)
    p = sample_error(model, 1, rng)
    return s.apply_pauli(p, [qubit])


def apply_channel(
    model: NoiseModel, s: StateVector, qubits, rng: np.random.Generator
) -> StateVector:
    """One channel use on every qubit in ``qubits``."""
    qubits = list(qubits)
    angle = None
    if isinstance(model, PhaseRotation) and model.shared_phi:
        angle = model.epsilon * rng.uniform(0, 2 * math.pi)
    for q in qubits:
        s = apply_exact(model, s, q, rng, angle=angle)
    return s


# ---------------------------------------------------------------------------
# config round trip
# ---------------------------------------------------------------------------

CHANNEL_NAMES = {
    "bitflip": BitFlip,
    "phase_rotation": PhaseRotation,
    "projective": ProjectiveCoupling,
    "depolarizing": Depolarizing,
    "iid_pauli": IidPauli,
}
_KEYS = {
    BitFlip: {"p": "p"},
    PhaseRotation: {"epsilon": "epsilon", "shared_phi": "shared_phi"},
    ProjectiveCoupling: {"epsilon": "epsilon"},
    Depolarizing: {"p": "p"},
    IidPauli: {"px": "px", "py": "py", "pz": "pz"},
}


def model_from_dict(cfg: dict) -> NoiseModel:
    """``{"channel": "bitflip", "p": 0.1}`` -> ``BitFlip(0.1)``; unknown keys rejected."""
    cfg = dict(cfg)
    name = cfg.pop("channel", None)
    if name not in CHANNEL_NAMES:
        raise NoiseError(f"channel must be one of {sorted(CHANNEL_NAMES)}, got {name!r}")
    cls = CHANNEL_NAMES[name]
    allowed = _KEYS[cls]
    extra = set(cfg) - set(allowed)
    if extra:
        raise NoiseError(f"unknown keys for {name}: {sorted(extra)}")
    try:
        return cls(**cfg)
    except TypeError as exc:
        raise NoiseError(str(exc)) from None


def model_to_dict(model: NoiseModel) -> dict:
    name = next(k for k, v in CHANNEL_NAMES.items() if isinstance(model, v))
    out = {"channel": name}
    out.update({k: getattr(model, k) for k in _KEYS[type(model)]})
    return out
