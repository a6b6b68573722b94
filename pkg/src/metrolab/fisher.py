"""Fisher-information engines: exact dynamical QFI for pure states, the
long-time pinched coefficient, spectral mixed-state QFI, thermal QFI,
diagonal-ensemble QFI with its external/internal split, projective-measurement
classical Fisher information, error-propagation precision, and the one-axis
twisting closed form.

Conventions: theta is always the estimated parameter of
H_theta = theta * H_S + H_C, values are per single shot (the repetition count
enters only through the Cramer-Rao conversion in ``metrolab.bounds``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (ContractViolationError, DegenerateEncodingError,
                     FlatSignalError)
from .evolve import phase_average_filter
from .models import HamiltonianFamily
from .spin import (HermitianOperator, QuantumState, eig_hermitian,
                   group_eigenspaces)

PAIR_WEIGHT_CUTOFF = 1e-12   # SLD pairs with p_i + p_j below this are dropped
OUTCOME_PROB_CUTOFF = 1e-10  # measurement outcomes below this are excluded


@dataclass(frozen=True, eq=False)
class FisherReport:
    """A Fisher value with its method tag, optional ext/int split and diagnostics."""

    value: float
    method: str
    components: dict | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.value < -1e-9:
            raise ContractViolationError(f"negative Fisher value {self.value}")
        object.__setattr__(self, "value", max(0.0, float(self.value)))
        if self.components is not None:
            total = sum(self.components.values())
            if abs(total - self.value) > 1e-9 * max(1.0, abs(self.value)):
                raise ContractViolationError("components do not sum to the Fisher value")


def fd_default_step(fam: HamiltonianFamily) -> float:
    """Default finite-difference step: 1e-5 * max(1, range(H_C)) / max(1, ||H_S||)."""
    return 1e-5 * max(1.0, fam.control.spectral_range()) / max(1.0, fam.signal.spectral_range())


def _variance(op_in_basis: np.ndarray, vec: np.ndarray) -> float:
    m1 = np.real(vec.conj() @ (op_in_basis @ vec))
    m2 = np.real(vec.conj() @ (op_in_basis @ (op_in_basis @ vec)))
    return float(m2 - m1 * m1)


def qfi_pure_dynamical(fam: HamiltonianFamily, theta: float, psi0: QuantumState,
                       t: float) -> FisherReport:
    """Exact QFI of exp(-i t H_theta)|psi0> at time t.

    The sensitivity generator is evaluated elementwise in the eigenbasis of
    H_theta: (H_eff)_jk = (H_S)_jk * filter(t (E_j - E_k)), and
    F = 4 t^2 Var(H_eff) on the evolved state. At large t the filter keeps
    only degenerate pairs and F approaches 4 t^2 Var(H_P).
    """
    if t < 0:
        raise ContractViolationError("evolution time must be nonnegative")
    spec = eig_hermitian(fam.at(theta))
    E, V = spec.eigenvalues, spec.eigenvectors
    Hs = V.conj().T @ fam.signal.mat @ V
    Heff = Hs * phase_average_filter(t * (E[:, None] - E[None, :]))
    psi_t = np.exp(-1j * t * E) * (V.conj().T @ psi0.vector)
    m1 = np.real(psi_t.conj() @ (Heff @ psi_t))
    m2 = float(np.real(psi_t.conj() @ (Heff.conj().T @ (Heff @ psi_t))))
    var = m2 - m1 * m1
    return FisherReport(4.0 * t * t * var, "pure_exact",
                        diagnostics={"t": t, "var_heff": var})


def qfi_pinched_asymptotic(fam: HamiltonianFamily, theta: float,
                           psi0: QuantumState) -> FisherReport:
    """Leading long-time coefficient Var(H_P) of the dynamical QFI.

    The returned value is the variance of the signal pinched over the grouped
    eigenspaces of H_theta; the caller multiplies by 4 t^2.
    """
    spec = eig_hermitian(fam.at(theta))
    part = group_eigenspaces(spec)
    Hs = spec.eigenvectors.conj().T @ fam.signal.mat @ spec.eigenvectors
    HP = np.zeros_like(Hs)
    for g in part.groups:
        ix = np.ix_(list(g), list(g))
        HP[ix] = Hs[ix]
    var = _variance(HP, spec.eigenvectors.conj().T @ psi0.vector)
    return FisherReport(var, "pinched_asymptotic",
                        diagnostics={"n_groups": part.n_groups})


def qfi_mixed(rho: QuantumState, drho: HermitianOperator,
              pair_cutoff: float = PAIR_WEIGHT_CUTOFF) -> FisherReport:
    """Spectral SLD formula F = 2 sum_{p_i+p_j>0} |<i|drho|j>|^2 / (p_i + p_j).

    Pairs with p_i + p_j below ``pair_cutoff`` are dropped; the squared
    Frobenius mass of drho living on those pairs is reported in diagnostics
    as ``dropped_weight`` so callers can bound the omission.
    """
    if abs(np.trace(drho.mat)) > 1e-9 * max(1.0, float(np.max(np.abs(drho.mat)))):
        raise ContractViolationError("drho must be traceless")
    p, U = np.linalg.eigh(rho.density_matrix())
    D = U.conj().T @ drho.mat @ U
    psum = p[:, None] + p[None, :]
    keep = psum > pair_cutoff
    absD2 = np.abs(D) ** 2
    F = 2.0 * float(np.sum(absD2[keep] / psum[keep]))
    dropped = float(np.sum(absD2[~keep]))
    return FisherReport(F, "mixed_spectral", diagnostics={"dropped_weight": dropped})


def _j_factor(p: np.ndarray, rel_tol: float = 1e-12) -> np.ndarray:
    """Elementwise thermal-variance kernel in the state eigenbasis.

    Populations equal to relative tolerance use the limit value p; pairs whose
    populations have both underflowed contribute nothing.
    """
    floor = 1e-280
    pi = p[:, None]
    pj = p[None, :]
    out = np.zeros((len(p), len(p)))
    dead = np.maximum(pi, pj) < floor
    close = (np.abs(pi - pj) <= rel_tol * np.maximum(pi, pj)) & ~dead
    out[close] = np.broadcast_to(pi, out.shape)[close]
    far = ~close & ~dead
    with np.errstate(divide="ignore", invalid="ignore"):
        num = 2.0 * (pi - pj) ** 2
        logs = np.log(np.maximum(pi, floor)) - np.log(np.maximum(pj, floor))
        vals = num / (logs ** 2 * (pi + pj))
    # smooth crossover where the log difference cancels
    mid = far & (np.abs(pi - pj) <= 1e-7 * np.maximum(pi, pj))
    vals[mid] = 0.5 * (pi + pj)[mid]
    out[far] = vals[far]
    return out


def qfi_thermal(fam: HamiltonianFamily, theta: float, beta: float) -> FisherReport:
    """QFI of the Gibbs state of H_theta as a generalized variance of the signal.

    F = beta^2 (Tr[H_S J_rho[H_S]] - Tr[rho H_S]^2) with J acting elementwise
    in the eigenbasis of rho; it reduces to beta^2 Var(H_S) whenever the
    control commutes with the signal.
    """
    if beta <= 0:
        raise ContractViolationError("beta must be positive")
    from .models import gibbs_state
    rho = gibbs_state(fam.at(theta), beta)
    p, U = np.linalg.eigh(rho.data)
    p = np.clip(p, 0.0, None)
    X = U.conj().T @ fam.signal.mat @ U
    J = _j_factor(p)
    gen_var = float(np.sum(J * np.abs(X) ** 2))
    mean = float(np.sum(p * np.real(np.diag(X))))
    return FisherReport(beta * beta * (gen_var - mean * mean), "thermal_variance",
                        diagnostics={"beta": beta})


def _rotation_generator(spec_values, groups, group_energies, Hs_in_basis):
    """i sum_{k != k'} Pi_k' H_S Pi_k / (E_k - E_k'), strictly cross-block."""
    S = np.zeros_like(Hs_in_basis)
    for ki, gi in enumerate(groups):
        for kj, gj in enumerate(groups):
            if ki == kj:
                continue
            ix = np.ix_(list(gj), list(gi))
            S[ix] = 1j * Hs_in_basis[ix] / (group_energies[ki] - group_energies[kj])
    return S


def qfi_diagonal_ensemble(fam: HamiltonianFamily, theta: float,
                          psi0: QuantumState) -> FisherReport:
    """QFI of the infinite-time dephased state, split into ext + int parts.

    The eigenspaces of H_theta are grouped, coherences between groups are
    removed (within-group coherences are kept), and the first-order response
    splits into a rotation -i[S, rho] (ext) and a population flow
    i * pinch([S, psi]) (int). Eigenspaces that carry no population at theta
    acquire weight only at second order; their Fisher contribution survives
    the limit as 4 <S psi|Pi_k|S psi> per empty group and is added to the
    internal part.
    """
    spec = eig_hermitian(fam.at(theta))
    part = group_eigenspaces(spec)
    if part.n_groups < 2:
        raise DegenerateEncodingError(
            "H_theta has a single eigenspace: the dephased family carries no signal")
    V = spec.eigenvectors
    Hs = V.conj().T @ fam.signal.mat @ V
    S = _rotation_generator(spec.eigenvalues, part.groups, part.group_energies, Hs)
    psi = V.conj().T @ psi0.vector
    Psi = np.outer(psi, psi.conj())
    rho = np.zeros_like(Psi)
    for g in part.groups:
        ix = np.ix_(list(g), list(g))
        rho[ix] = Psi[ix]
    comm = S @ Psi - Psi @ S
    dcomm = np.zeros_like(comm)
    for g in part.groups:
        ix = np.ix_(list(g), list(g))
        dcomm[ix] = comm[ix]
    drho_ext = -1j * (S @ rho - rho @ S)
    drho_int = 1j * dcomm
    rho_state = QuantumState("mixed", 0.5 * (rho + rho.conj().T))
    ext = qfi_mixed(rho_state, HermitianOperator(drho_ext))
    int_part = qfi_mixed(rho_state, HermitianOperator(drho_int))
    # second-order population growth of groups that are empty at theta
    Spsi = S @ psi
    edge = 0.0
    empty = 0
    for g in part.groups:
        g = list(g)
        if float(np.sum(np.abs(psi[g]) ** 2)) <= PAIR_WEIGHT_CUTOFF:
            empty += 1
            edge += 4.0 * float(np.sum(np.abs(Spsi[g]) ** 2))
    value = ext.value + int_part.value + edge
    return FisherReport(value, "diagonal_perturbative",
                        components={"ext": ext.value, "int": int_part.value + edge},
                        diagnostics={"empty_groups": empty, "empty_group_weight": edge,
                                     "dropped_weight": ext.diagnostics["dropped_weight"]
                                     + int_part.diagnostics["dropped_weight"],
                                     "n_groups": part.n_groups})


def cfi_projective(projectors, rho_family, theta: float,
                   fd_step: float | None = None,
                   outcome_cutoff: float = OUTCOME_PROB_CUTOFF) -> FisherReport:
    """Classical Fisher information of a projective measurement.

    ``projectors`` must form a complete orthogonal set; ``rho_family`` maps
    theta to a QuantumState. Probability derivatives use a central finite
    difference with an internal halving consistency check (reported in
    diagnostics, not enforced). Outcomes with probability below
    ``outcome_cutoff`` are excluded and their mass reported.
    """
    if fd_step is None or fd_step <= 0:
        raise ContractViolationError("cfi_projective needs a positive fd_step")
    mats = [p.mat if isinstance(p, HermitianOperator) else np.asarray(p, dtype=complex)
            for p in projectors]
    total = sum(mats)
    if np.max(np.abs(total - np.eye(total.shape[0]))) > 1e-9:
        raise ContractViolationError("projectors do not sum to the identity")

    def probabilities(th):
        rho = rho_family(th).density_matrix()
        return np.array([float(np.real(np.trace(m @ rho))) for m in mats])

    p0 = probabilities(theta)

    def estimate(h):
        dp = (probabilities(theta + h) - probabilities(theta - h)) / (2 * h)
        keep = p0 > outcome_cutoff
        return float(np.sum(dp[keep] ** 2 / p0[keep])), float(np.sum(p0[~keep]))

    val, excluded = estimate(fd_step)
    val_half, _ = estimate(fd_step / 2)
    rel = abs(val - val_half) / max(abs(val_half), 1e-300)
    return FisherReport(val_half, "cfi_projective",
                        diagnostics={"fd_step": fd_step, "halving_rel_diff": rel,
                                     "excluded_mass": excluded})


def error_propagation_precision(observable: HermitianOperator, rho_family,
                                theta: float, fd_step: float) -> float:
    """Inverse squared single-shot error (d<O>/dtheta)^2 / Var(O).

    Directly comparable to Fisher values through the Cramer-Rao bound.
    """
    if fd_step <= 0:
        raise ContractViolationError("error propagation needs a positive fd_step")
    O = observable.mat

    def mean(th):
        return float(np.real(np.trace(O @ rho_family(th).density_matrix())))

    slope = (mean(theta + fd_step) - mean(theta - fd_step)) / (2 * fd_step)
    if abs(slope) < 1e-14:
        raise FlatSignalError("observable mean is flat in theta at this point")
    rho0 = rho_family(theta).density_matrix()
    m1 = float(np.real(np.trace(O @ rho0)))
    m2 = float(np.real(np.trace(O @ O @ rho0)))
    var = m2 - m1 * m1
    return slope * slope / var


def oat_closed_form(N: int, t: float) -> FisherReport:
    """Closed-form long-time QFI of one-axis twisting on N (odd) spins
    prepared along +y: F = t^2 (k+1)^2 C(2k+1, k) / 4^k with N = 2k+1.

    The large-N asymptote t^2 N^{3/2} / sqrt(2 pi) is reported in
    diagnostics; the ratio value/asymptote decreases monotonically toward 1.
    """
    if N < 3 or N % 2 == 0:
        raise ContractViolationError("the closed form needs odd N >= 3")
    k = (N - 1) // 2
    coeff = (k + 1) ** 2 * math.comb(2 * k + 1, k) / 4 ** k
    asym = N ** 1.5 / math.sqrt(2 * math.pi)
    return FisherReport(t * t * coeff, "oat_closed_form",
                        diagnostics={"asymptote": t * t * asym, "coefficient": coeff})


def dephased_state_family(fam: HamiltonianFamily, psi0: QuantumState):
    """theta -> pinched (diagonal-ensemble) state, for finite-difference probes."""
    from .spin import pinch

    def family(theta):
        spec = eig_hermitian(fam.at(theta))
        part = group_eigenspaces(spec)
        return pinch(psi0, part)
    return family


def unitary_state_family(fam: HamiltonianFamily, psi0: QuantumState, t: float):
    """theta -> exp(-i t H_theta) psi0, for finite-difference probes."""
    from .evolve import evolve_unitary

    def family(theta):
        return evolve_unitary(fam, theta, psi0, t)
    return family
