"""Builders for the Hamiltonian families under study: collective spin
squeezing, the central-spin probe, the two-level optimal dynamical control,
the qutrit control that is optimal under dephasing, and Gibbs states.

Families are theta-linear: at(theta) = theta * signal + control.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolationError
from .spin import (FULL_HILBERT_MAX_SPINS, HermitianOperator, PAULI_X, PAULI_Z,
                   QuantumState, collective_ops, collective_sum, eig_hermitian,
                   mixed_state)


@dataclass(frozen=True, eq=False)
class HamiltonianFamily:
    """A parameterized Hamiltonian theta -> theta * signal + control."""

    signal: HermitianOperator
    control: HermitianOperator
    basis_kind: str  # "dicke" | "full_hilbert" | "abstract"
    n_spins: int | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.signal.dim != self.control.dim:
            raise ContractViolationError("signal and control dimensions differ")

    @property
    def dim(self) -> int:
        return self.signal.dim

    def at(self, theta: float) -> HermitianOperator:
        return HermitianOperator(theta * self.signal.mat + self.control.mat)

    def rescaled_control(self, lam: float) -> "HamiltonianFamily":
        """Same family with the control weakened by a factor lam."""
        return HamiltonianFamily(self.signal, HermitianOperator(self.control.mat / lam),
                                 self.basis_kind, self.n_spins,
                                 {**self.params, "lambda": lam})


def build_spin_squeezing(N: int, a: float, b: float, c: float) -> HamiltonianFamily:
    """Collective two-body control a*Sx^2 + b*Sy^2 + c*Sz^2 with signal Sz.

    Negative coefficients are allowed; c < 0 lowers the energy of the
    extremal-magnetization states (the regime where a Gibbs probe can hold a
    macroscopic superposition of |m| = S states).
    """
    if N < 1:
        raise ContractViolationError(f"need at least one spin, got N={N}")
    space = collective_ops(N)
    sx, sy, sz = space.sx.mat, space.sy.mat, space.sz.mat
    control = a * (sx @ sx) + b * (sy @ sy) + c * (sz @ sz)
    return HamiltonianFamily(space.sz, HermitianOperator(control, "a*Sx^2+b*Sy^2+c*Sz^2"),
                             "dicke", N, {"a": a, "b": b, "c": c})


def build_central_spin(N: int, alpha: float = math.sqrt(2), beta: float = 1.0) -> HamiltonianFamily:
    """One central spin coupled to N-1 bystanders, full 2^N Hilbert space.

    Control: alpha |0><0| (x) 1  +  beta |1><1| (x) Sx over the bystanders.
    Signal: the total magnetization (1/2) sum_i sigma_z^(i). The default
    alpha is irrational relative to the beta/2-spaced bystander ladder so the
    two control branches never collide in energy.
    """
    if not 2 <= N <= FULL_HILBERT_MAX_SPINS:
        raise ContractViolationError(
            f"central spin needs 2 <= N <= {FULL_HILBERT_MAX_SPINS}, got N={N}")
    dim_rest = 2 ** (N - 1)
    p0 = np.array([[1, 0], [0, 0]], dtype=complex)
    p1 = np.array([[0, 0], [0, 1]], dtype=complex)
    sx_rest = collective_sum(N - 1, PAULI_X / 2).mat
    control = alpha * np.kron(p0, np.eye(dim_rest)) + beta * np.kron(p1, sx_rest)
    signal = collective_sum(N, PAULI_Z / 2)
    return HamiltonianFamily(signal, HermitianOperator(control, "central-spin control"),
                             "full_hilbert", N, {"alpha": alpha, "beta": beta})


def build_result2_control(lam_min: float, lam_max: float, dim_perp: int = 0) -> HamiltonianFamily:
    """Two-level control that makes the extremal signal eigenstates maximally useful.

    The signal is diagonal: (lam_max, lam_min, then dim_perp levels equally
    spaced strictly inside the gap). The control has the rotated eigenvectors
    cos(pi/8)|top> + sin(pi/8)|bottom| (eigenvalue +1) and its orthogonal
    partner (eigenvalue -1); the perpendicular block gets distinct integer
    eigenvalues >= 2 so the full spectrum stays nondegenerate.
    """
    if lam_max <= lam_min:
        raise ContractViolationError("need lam_max > lam_min")
    if dim_perp < 0:
        raise ContractViolationError("dim_perp must be nonnegative")
    d = 2 + dim_perp
    interior = [lam_min + (lam_max - lam_min) * (j + 1) / (dim_perp + 1) for j in range(dim_perp)]
    signal = np.diag(np.array([lam_max, lam_min] + interior, dtype=complex))
    c, s = math.cos(math.pi / 8), math.sin(math.pi / 8)
    up = np.zeros(d, dtype=complex)
    dn = np.zeros(d, dtype=complex)
    up[0], dn[1] = 1.0, 1.0
    ne = c * up + s * dn   # |Phi_nearrow>
    nw = s * up - c * dn   # its orthogonal partner
    control = np.outer(ne, ne.conj()) - np.outer(nw, nw.conj())
    for j in range(dim_perp):
        control[2 + j, 2 + j] = 2 + j
    return HamiltonianFamily(HermitianOperator(signal, "signal"),
                             HermitianOperator(control, "rotated-extremes control"),
                             "abstract", None,
                             {"lam_min": lam_min, "lam_max": lam_max, "dim_perp": dim_perp})


def build_result2_control_for_signal(H_S: HermitianOperator) -> HamiltonianFamily:
    """Same construction, but for an arbitrary signal operator.

    Diagonalizes H_S, applies the rotated-extremes control in its eigenbasis
    and conjugates back, keeping the exact H_S as the family signal.
    """
    spec = eig_hermitian(H_S)
    vals, V = spec.eigenvalues, spec.eigenvectors
    d = H_S.dim
    if d < 2:
        raise ContractViolationError("signal must have at least two levels")
    order = [d - 1, 0] + list(range(1, d - 1))  # top, bottom, interior
    abstract = build_result2_control(float(vals[0]), float(vals[-1]), d - 2)
    P = V[:, order]
    control = P @ abstract.control.mat @ P.conj().T
    return HamiltonianFamily(H_S, HermitianOperator(control, "rotated-extremes control"),
                             "abstract", None,
                             {"lam_min": float(vals[0]), "lam_max": float(vals[-1]),
                              "dim_perp": d - 2})


def build_qutrit_dephasing_control(E: float, lam_abs: float) -> HamiltonianFamily:
    """Three-level family whose dephased state extracts the most from a gap-E control.

    Signal diag(lam_abs, 0, -lam_abs); control (E/sqrt2) * tridiagonal(1),
    whose spectrum is (E, 0, -E).
    """
    if E <= 0 or lam_abs <= 0:
        raise ContractViolationError("E and lam_abs must be positive")
    signal = np.diag(np.array([lam_abs, 0.0, -lam_abs], dtype=complex))
    control = (E / math.sqrt(2)) * np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex)
    return HamiltonianFamily(HermitianOperator(signal, "signal"),
                             HermitianOperator(control, "qutrit control"),
                             "abstract", None, {"E": E, "lam_abs": lam_abs})


def gibbs_state(H: HermitianOperator, beta: float) -> QuantumState:
    """Thermal state exp(-beta H)/Z, computed spectrally with a max-shift."""
    if beta < 0:
        raise ContractViolationError("beta must be nonnegative")
    spec = eig_hermitian(H)
    w = np.exp(-beta * (spec.eigenvalues - np.min(spec.eigenvalues)))
    w /= np.sum(w)
    V = spec.eigenvectors
    return mixed_state((V * w) @ V.conj().T)
