"""Precision upper bounds and the Cramer-Rao conversion.

All bounds use the pseudo-norm ||H_S|| = lambda_max - lambda_min of the
signal operator. Evaluators are pure formula objects; the "never violated"
sweeps live in the test suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolationError
from .spin import HermitianOperator

ASYMPTOTIC_DEPHASING_CONSTANT = (3.0 + math.pi ** 2) / 3.0


@dataclass(frozen=True, eq=False)
class BoundReport:
    kind: str
    value: float
    inputs: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.value >= 0.0):
            raise ContractViolationError(f"bound value must be nonnegative, got {self.value}")


def _signal_range(H_S) -> float:
    if isinstance(H_S, HermitianOperator):
        return H_S.spectral_range()
    return float(H_S)


def dynamical_bound(H_S, t: float) -> BoundReport:
    """F <= t^2 ||H_S||^2 for any unitary encoding of duration t."""
    if t < 0:
        raise ContractViolationError("t must be nonnegative")
    r = _signal_range(H_S)
    return BoundReport("dynamical", t * t * r * r, {"hs_range": r, "t": t})


def harmonic_number_2(n: int) -> float:
    """Partial sum of 1/k^2 up to n."""
    return float(np.sum(1.0 / np.arange(1, n + 1, dtype=float) ** 2)) if n > 0 else 0.0


def dephasing_s_constant(d: int) -> float:
    """Worst-case squared inverse-gap sum for a d-level ladder with unit gaps.

    Odd d: 2 H2((d-1)/2); even d: H2(d/2) + H2(d/2 - 1). Increases with d
    and converges to pi^2/3.
    """
    if d < 2:
        raise ContractViolationError("need at least two levels")
    if d % 2 == 1:
        return 2.0 * harmonic_number_2((d - 1) // 2)
    return harmonic_number_2(d // 2) + harmonic_number_2(d // 2 - 1)


def dephasing_bound(H_S, E: float, d: int | None = None) -> BoundReport:
    """Upper bound on the QFI of the dephased (diagonal-ensemble) state.

    Asymptotic form (3 + pi^2)/3 * ||H_S||^2 / E^2 when d is None; for a
    known Hilbert-space dimension d the tighter 4 (1 + s_d) ||H_S||_inf^2 / E^2
    with ||H_S||_inf = ||H_S|| / 2 after the optimal traceless centering.
    """
    if E <= 0:
        raise ContractViolationError("minimal gap E must be positive")
    r = _signal_range(H_S)
    if d is None:
        value = ASYMPTOTIC_DEPHASING_CONSTANT * r * r / (E * E)
        return BoundReport("dephasing_asymptotic", value, {"hs_range": r, "E": E})
    s_d = dephasing_s_constant(d)
    hs_inf = r / 2.0
    value = 4.0 * (1.0 + s_d) * hs_inf ** 2 / (E * E)
    return BoundReport("dephasing_finite_d", value,
                       {"hs_range": r, "E": E, "d": d, "s_d": s_d})


def thermal_bound(H_S, beta: float) -> BoundReport:
    """F <= beta^2 ||H_S||^2 / 4 for Gibbs-state probes."""
    if beta <= 0:
        raise ContractViolationError("beta must be positive")
    r = _signal_range(H_S)
    return BoundReport("thermal", beta * beta * r * r / 4.0, {"hs_range": r, "beta": beta})


def low_temperature_bound(H_S, gap: float) -> BoundReport:
    """Gapped zero-temperature limit ||H_S||^2 / gap^2.

    The additional exponentially small finite-temperature correction has no
    explicit constant; it is flagged in the inputs as a caveat only.
    """
    if gap <= 0:
        raise ContractViolationError("spectral gap must be positive")
    r = _signal_range(H_S)
    return BoundReport("low_temperature", r * r / (gap * gap),
                       {"hs_range": r, "gap": gap,
                        "caveat": "omits an O(exp(-beta*gap)) additive correction"})


def cramer_rao(F: float, mu: int = 1) -> float:
    """(Delta theta)^2 >= 1 / (mu F) for mu independent repetitions."""
    if F <= 0:
        raise ContractViolationError("Fisher information must be positive")
    if mu < 1:
        raise ContractViolationError("mu must be at least 1")
    return 1.0 / (mu * F)
