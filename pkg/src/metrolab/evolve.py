"""Time evolution engines: exact unitary propagation, finite-horizon time
averaging, a dense Lindblad integrator, and the classical birth-death
thermalization chain with an exact spectral propagator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from mpmath import eigsy, mp, matrix as mp_matrix, mpf
from mpmath import exp as mp_exp, sqrt as mp_sqrt
from scipy.special import gammaln

from .errors import ContractViolationError, IntegrationAccuracyError
from .models import HamiltonianFamily
from .spin import HermitianOperator, QuantumState, eig_hermitian, mixed_state, pure_state

LINDBLAD_STEP_SAFETY = 0.01  # stays within the 0.05/scale ceiling
LINDBLAD_DRIFT_TOL = 1e-6
CHAIN_PROB_CUTOFF = 1e-12


def phase_average_filter(x):
    """(1 - exp(-i x)) / (i x), the average of exp(-i s x) over s in [0, 1].

    Smooth at x = 0 (value 1); a short series is used for |x| < 1e-6 where
    the direct quotient cancels catastrophically.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape, dtype=complex)
    small = np.abs(x) < 1e-6
    xs = x[small]
    out[small] = 1.0 - 0.5j * xs - xs * xs / 6.0
    xb = x[~small]
    out[~small] = (1.0 - np.exp(-1j * xb)) / (1j * xb)
    return out


def evolve_unitary(fam: HamiltonianFamily, theta: float, psi0: QuantumState,
                   t: float) -> QuantumState:
    """exp(-i t H_theta) applied spectrally; norm and trace are preserved."""
    spec = eig_hermitian(fam.at(theta))
    V = spec.eigenvectors
    phases = np.exp(-1j * t * spec.eigenvalues)
    if psi0.kind == "pure":
        return pure_state(V @ (phases * (V.conj().T @ psi0.vector)), normalize=True)
    inner = V.conj().T @ psi0.data @ V
    rho = V @ (np.outer(phases, phases.conj()) * inner) @ V.conj().T
    return mixed_state(rho)


def time_averaged_state(fam: HamiltonianFamily, theta: float, psi0: QuantumState,
                        T: float) -> QuantumState:
    """(1/T) integral of the evolved state over [0, T], evaluated exactly.

    In the eigenbasis of H_theta every matrix element (j, k) of the initial
    state is multiplied by phase_average_filter(T (E_j - E_k)); T -> infinity
    recovers the pinched (diagonal-ensemble) state.
    """
    if T <= 0:
        raise ContractViolationError("averaging horizon T must be positive")
    spec = eig_hermitian(fam.at(theta))
    V = spec.eigenvectors
    E = spec.eigenvalues
    inner = V.conj().T @ psi0.density_matrix() @ V
    filt = phase_average_filter(T * (E[:, None] - E[None, :]))
    return mixed_state(V @ (filt * inner) @ V.conj().T)


@dataclass(frozen=True, eq=False)
class LindbladModel:
    """Markovian master-equation model: Hamiltonian plus (rate, operator) dissipators."""

    hamiltonian: HermitianOperator
    dissipators: list  # of (gamma_i >= 0, L_i ndarray)

    def __post_init__(self):
        d = self.hamiltonian.dim
        for rate, op in self.dissipators:
            if rate < 0:
                raise ContractViolationError("dissipator rates must be nonnegative")
            if np.asarray(op).shape != (d, d):
                raise ContractViolationError("dissipator operator dimension mismatch")


def _lindblad_rhs_factory(model: LindbladModel):
    """Build the RHS closure; diagonal dissipators collapse to one elementwise
    mask and sparse Hamiltonians use sparse matmuls."""
    H = model.hamiltonian.mat
    nnz = np.count_nonzero(np.abs(H) > 1e-300)
    if H.shape[0] >= 32 and nnz < 0.1 * H.size:
        from scipy.sparse import csr_matrix
        H = csr_matrix(H)
    ops = [(g, np.asarray(L, dtype=complex)) for g, L in model.dissipators if g > 0]
    diag_only = all(np.count_nonzero(L - np.diag(np.diagonal(L))) == 0 for _, L in ops)
    if diag_only:
        W = np.zeros(H.shape, dtype=complex)
        for g, L in ops:
            d = np.diagonal(L)
            W += g * (np.outer(d, d.conj()) - 0.5 * (np.abs(d) ** 2)[:, None]
                      - 0.5 * (np.abs(d) ** 2)[None, :])

        def rhs(rho):
            return -1j * np.asarray(H @ rho - rho @ H) + W * rho
        return rhs

    K = sum(g * (L.conj().T @ L) for g, L in ops)

    def rhs(rho):
        out = -1j * np.asarray(H @ rho - rho @ H) - 0.5 * (K @ rho + rho @ K)
        for g, L in ops:
            out += g * (L @ rho @ L.conj().T)
        return out
    return rhs


def _max_step(model: LindbladModel) -> float:
    scale = np.max(np.abs(model.hamiltonian.mat)) if model.hamiltonian.dim else 0.0
    scale += sum(g * np.max(np.abs(L)) ** 2 for g, L in model.dissipators)
    return LINDBLAD_STEP_SAFETY / max(scale, 1e-300)


def _rk4_run(rhs, rho0, t_grid, h_max):
    """Fixed-step RK4 between grid points; returns raw density matrices."""
    rho = rho0.astype(complex).copy()
    out = []
    t_prev = 0.0
    for t in t_grid:
        span = t - t_prev
        if span > 0:
            n = max(1, int(math.ceil(span / h_max)))
            h = span / n
            for _ in range(n):
                k1 = rhs(rho)
                k2 = rhs(rho + 0.5 * h * k1)
                k3 = rhs(rho + 0.5 * h * k2)
                k4 = rhs(rho + h * k3)
                rho = rho + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(rho.copy())
        t_prev = t
    return out


def _trace_distance(a, b):
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(a - b))))


def lindblad_evolve(model: LindbladModel, rho0: QuantumState, t_grid,
                    corrections_log: dict | None = None):
    """Integrate the master equation on an ascending time grid.

    Fixed-step RK4 with step <= 0.05 / (max|H| + sum_i gamma_i max|L_i|^2);
    every output state is re-Hermitized and trace-renormalized, and a
    step-halving rerun of the final state must agree to 1e-6 in trace
    distance, otherwise IntegrationAccuracyError is raised.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if len(t_grid) == 0:
        return []
    if np.any(t_grid < 0) or np.any(np.diff(t_grid) < 0):
        raise ContractViolationError("t_grid must be nonnegative and ascending")
    rhs = _lindblad_rhs_factory(model)
    h = _max_step(model)
    raw = _rk4_run(rhs, rho0.density_matrix(), t_grid, h)
    check = _rk4_run(rhs, rho0.density_matrix(), t_grid[-1:], h / 2)
    a = raw[-1] / np.trace(raw[-1]).real
    b = check[0] / np.trace(check[0]).real
    drift = _trace_distance(a, b)
    if drift > LINDBLAD_DRIFT_TOL:
        raise IntegrationAccuracyError(
            f"step-halving drift {drift:.3e} exceeds {LINDBLAD_DRIFT_TOL}; "
            f"retry with step below {h / 2:.3e}")
    states = []
    max_herm = 0.0
    max_tr = 0.0
    worst_neg = 0.0
    for rho in raw:
        herm_dev = float(np.max(np.abs(rho - rho.conj().T)))
        rho = 0.5 * (rho + rho.conj().T)
        tr = float(np.trace(rho).real)
        max_herm = max(max_herm, herm_dev)
        max_tr = max(max_tr, abs(tr - 1.0))
        rho = rho / tr
        vals, vecs = np.linalg.eigh(rho)
        neg = float(min(vals[0], 0.0))
        worst_neg = min(worst_neg, neg)
        if neg < -1e-8:
            raise IntegrationAccuracyError(
                f"integrated state lost positivity (min eigenvalue {neg:.3e})")
        if neg < 0.0:
            vals = np.clip(vals, 0.0, None)
            vals /= vals.sum()
            rho = (vecs * vals) @ vecs.conj().T
        states.append(mixed_state(rho))
    if corrections_log is not None:
        corrections_log.update({"max_hermiticity_correction": max_herm,
                                "max_trace_correction": max_tr,
                                "worst_negative_eigenvalue": worst_neg,
                                "step": h, "halving_drift": drift})
    return states


@dataclass(frozen=True, eq=False)
class RateChain:
    """Birth-death chain over excitation number n = 0..N with detailed balance.

    The generator is column-stochastic (columns sum to zero); the stationary
    law is pi_n ~ C(N, n) exp(-beta U(n)).
    """

    n_levels: int
    generator: np.ndarray
    energies: np.ndarray
    beta: float
    gamma: float
    log_pi: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.generator.setflags(write=False)
        self.energies.setflags(write=False)
        self.log_pi.setflags(write=False)

    @property
    def stationary(self) -> np.ndarray:
        p = np.exp(self.log_pi - np.max(self.log_pi))
        return p / p.sum()


def build_rate_chain(N: int, theta: float, c: float, beta: float,
                     gamma: float) -> RateChain:
    """Thermalizing chain for the magnetization double well.

    With m = n - N/2 the level energies are U(n) = theta * m - c * m^2, so
    c > 0 carves two wells at the extremal magnetizations (the collective
    coupling regime that saturates the thermal precision bound) separated by
    a barrier of height ~ c N^2 / 4. Hop rates follow the Fermi factor
    f(x) = 1 / (1 + exp(beta x)) and satisfy detailed balance exactly.
    """
    if N < 1 or gamma <= 0 or beta <= 0:
        raise ContractViolationError("need N >= 1, gamma > 0, beta > 0")
    n = np.arange(N + 1)
    m = n - N / 2.0
    U = theta * m - c * m * m

    def fermi(x):
        # stable on both tails
        if x >= 0:
            return math.exp(-beta * x) / (1.0 + math.exp(-beta * x))
        return 1.0 / (1.0 + math.exp(beta * x))

    Q = np.zeros((N + 1, N + 1))
    for i in range(N + 1):
        if i < N:
            up = gamma * (N - i) * fermi(U[i + 1] - U[i])
            Q[i + 1, i] += up
            Q[i, i] -= up
        if i > 0:
            down = gamma * i * fermi(U[i - 1] - U[i])
            Q[i - 1, i] += down
            Q[i, i] -= down
    log_pi = gammaln(N + 1) - gammaln(n + 1) - gammaln(N - n + 1) - beta * U
    return RateChain(N + 1, Q, U, beta, gamma, log_pi)


def _chain_precision_digits(chain: RateChain) -> int:
    spread = float(np.max(chain.log_pi) - np.min(chain.log_pi))
    return max(30, int(spread / math.log(10.0)) + 30)


def rate_chain_evolve(chain: RateChain, p0, t_grid):
    """Propagate exp(Q t) p0 exactly via the detailed-balance symmetrization.

    The generator is conjugated by sqrt(pi) into a symmetric matrix and
    diagonalized in extended precision (the metastable escape rates scale
    like exp(-beta * barrier) and fall below float64 resolution for strong
    coupling); the stationary mode is split off analytically so late-time
    states converge to pi exactly. Valid at arbitrarily long times.
    """
    p0 = np.asarray(p0, dtype=float)
    K = chain.n_levels
    if p0.shape != (K,) or np.any(p0 < -1e-12) or abs(p0.sum() - 1.0) > 1e-9:
        raise ContractViolationError("p0 must be a probability vector over the chain levels")
    t_grid = np.asarray(t_grid, dtype=float)
    dps = _chain_precision_digits(chain)
    with mp.workdps(dps):
        # rebuild rates and stationary weights in working precision from the
        # (exact) float energies, so detailed balance holds to dps digits and
        # the sqrt(pi) similarity transform does not amplify float64 noise
        N = K - 1
        beta = mpf(chain.beta)
        gamma = mpf(chain.gamma)
        U = [mpf(float(u)) for u in chain.energies]

        def fermi(x):
            if x >= 0:
                e = mp_exp(-beta * x)
                return e / (1 + e)
            return 1 / (1 + mp_exp(beta * x))

        up = [gamma * (N - n) * fermi(U[n + 1] - U[n]) for n in range(N)]
        down = [gamma * (n + 1) * fermi(U[n] - U[n + 1]) for n in range(N)]
        # stationary weights telescoped from the rates themselves, so they are
        # consistent with A to working precision
        logpi_mp = [mpf(0)]
        for n in range(N):
            logpi_mp.append(logpi_mp[-1] + mp.log(up[n]) - mp.log(down[n]))
        shift = max(logpi_mp)
        sq = [mp_sqrt(mp_exp(lp - shift)) for lp in logpi_mp]
        Z = sum(s * s for s in sq)
        A = mp_matrix(K, K)
        for n in range(N):
            A[n + 1, n] = A[n, n + 1] = mp_sqrt(up[n] * down[n])
        for n in range(K):
            A[n, n] = -((up[n] if n < N else mpf(0)) + (down[n - 1] if n > 0 else mpf(0)))
        lam, V = eigsy(A)
        logpi = np.array([float(lp - shift) for lp in logpi_mp])
        i0 = max(range(K), key=lambda k: lam[k])
        u0 = mp_matrix([mpf(p0[i]) / sq[i] for i in range(K)])
        coef = V.T * u0
        pi = [sq[i] * sq[i] / Z for i in range(K)]
        spread = float(np.max(logpi) - np.min(logpi))
        cut = -(60.0 + spread)  # mode coefficients can carry exp(+spread/2)
        out = []
        drift = 0.0
        for t in t_grid:
            p = np.empty(K, dtype=float)
            for i in range(K):
                acc = pi[i]
                for nu in range(K):
                    if nu == i0:
                        continue
                    x = lam[nu] * t
                    if x < cut:
                        continue
                    acc += sq[i] * V[i, nu] * mp_exp(x) * coef[nu]
                p[i] = float(acc)
            p = np.clip(p, 0.0, None)
            s = p.sum()
            drift = max(drift, abs(s - 1.0))
            out.append(p / s)
    if drift > 1e-8:
        raise IntegrationAccuracyError(f"chain propagation lost probability mass: drift {drift:.3e}")
    return out


def chain_fisher_information(N: int, c: float, beta: float, gamma: float,
                             t_grid, theta: float = 0.0, fd_step: float = 3e-3,
                             prob_cutoff: float = 1e-8):
    """Classical Fisher information of p_n(t) with respect to theta.

    Central finite difference over two exactly-propagated chains; outcomes
    with pbar below ``prob_cutoff`` are excluded (their stationary Fisher
    weight is O(pbar) and would otherwise amplify roundoff).
    """
    p0 = np.full(N + 1, 1.0 / (N + 1))
    plus = rate_chain_evolve(build_rate_chain(N, theta + fd_step, c, beta, gamma), p0, t_grid)
    minus = rate_chain_evolve(build_rate_chain(N, theta - fd_step, c, beta, gamma), p0, t_grid)
    out = np.empty(len(plus))
    for k, (pp, pm) in enumerate(zip(plus, minus)):
        dp = (pp - pm) / (2 * fd_step)
        pbar = 0.5 * (pp + pm)
        mask = pbar > prob_cutoff
        out[k] = float(np.sum(dp[mask] ** 2 / pbar[mask]))
    return out
