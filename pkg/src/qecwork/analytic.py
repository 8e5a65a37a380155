"""Closed-form failure estimates used as oracles and as a calculator."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, NamedTuple

from .noise import phase_rotation_p


class AnalyticError(ValueError):
    pass


def _check_prob(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise AnalyticError(f"p={p} is not a probability")


@dataclass(frozen=True)
class CodeParams:
    """Block size ``n``, logical qubits ``k``, correctable weight ``t``, noise strength."""

    n: int
    k: int
    t: int
    noise: float = 0.0

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise AnalyticError("need 0 <= k <= n")
        if self.t < 0:
            raise AnalyticError("t must be non-negative")

    @classmethod
    def from_distance(cls, n: int, k: int, d: int, noise: float = 0.0) -> CodeParams:
        if d < 1:
            raise AnalyticError("distance must be at least 1")
        return cls(n, k, (d - 1) // 2, noise)

    @property
    def d(self) -> int:
        return 2 * self.t + 1


def three_bit_failure(p: float) -> float:
    """Probability that two or three of three bits flip: ``3p^2 - 2p^3``."""
    _check_prob(p)
    return 3 * p**2 - 2 * p**3


def phase_channel_p(epsilon: float) -> float:
    """``<sin^2(eps phi)>`` over ``phi ~ U(0, 2 pi)``, equal to ``1/2 - sin(4 pi eps)/(8 pi eps)``."""
    if epsilon < 0:
        raise AnalyticError("epsilon must be non-negative")
    return phase_rotation_p(epsilon)


def phase_channel_p_small(epsilon: float) -> float:
    """Leading small-angle term ``(2 pi eps)^2 / 3``."""
    return (2 * math.pi * epsilon) ** 2 / 3


def phase_fidelity(epsilon: float) -> float:
    """Corrected three-bit fidelity ``1 - 3p^2`` under the phase channel."""
    return 1 - 3 * phase_channel_p(epsilon) ** 2


class Uncorrectable(NamedTuple):
    value: float
    clamped: bool
    raw: float


def p_uncorrectable(
    n: int, t: int, epsilon: float, mode: Literal["coherent", "incoherent"] = "incoherent"
) -> Uncorrectable:
    """Leading-order probability of an error of weight ``t + 1``.

    ``coherent`` squares the summed amplitude ``3^(t+1) C(n, t+1) eps^(t+1)``;
    ``incoherent`` adds probabilities, ``3^(t+1) C(n, t+1) eps^(2(t+1))``.
    Values above 1 are clamped and flagged.
    """
    if t < 0 or t + 1 > n:
        raise AnalyticError("need 0 <= t and t + 1 <= n")
    if epsilon < 0:
        raise AnalyticError("epsilon must be non-negative")
    terms = 3 ** (t + 1) * math.comb(n, t + 1)
    if mode == "coherent":
        raw = (terms * epsilon ** (t + 1)) ** 2
    elif mode == "incoherent":
        raw = terms * epsilon ** (2 * (t + 1))
    else:
        raise AnalyticError(f"mode must be 'coherent' or 'incoherent', got {mode!r}")
    return Uncorrectable(min(raw, 1.0), raw > 1.0, raw)


def large_code_example(n: int, p: float, t: int) -> float:
    """``(3 n p)^(t+1) / (t+1)!``, the large-``n`` small-``p`` failure estimate.

    See :func:`large_code_regime_ok` for when the approximation is meaningful.
    """
    _check_prob(p)
    if t < 0 or t + 1 > n:
        raise AnalyticError("need 0 <= t and t + 1 <= n")
    return (3 * n * p) ** (t + 1) / math.factorial(t + 1)


def large_code_regime_ok(n: int, p: float, t: int) -> bool:
    """Heuristic validity check for :func:`large_code_example`.

    ``C(n, t+1) ~ n^(t+1)/(t+1)!`` needs ``(t+1)^2 <= n``, and the next
    weight must be suppressed, ``3np < (t+2)``.
    """
    return (t + 1) ** 2 <= n and 3 * n * p < t + 2


def concatenation_failure(p_phys: float, p_threshold: float, levels: int) -> float:
    """``p_th (p / p_th)^(2^L)`` for ``L`` levels of concatenation."""
    if levels < 0:
        raise AnalyticError("levels must be non-negative")
    if p_threshold <= 0:
        raise AnalyticError("threshold must be positive")
    _check_prob(p_phys)
    return p_threshold * (p_phys / p_threshold) ** (2**levels)
