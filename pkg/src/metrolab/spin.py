"""Dense spin-system linear algebra: Hermitian eigenproblems, eigenspace
grouping and pinching, Dicke-basis collective operators, spin coherent
states and full-Hilbert tensor operators.

Everything here is a pure function of its inputs; all returned objects are
immutable value types backed by numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolationError

HERMITICITY_RTOL = 1e-12
GROUP_TOL_ABS = 1e-12
GROUP_TOL_REL = 1e-10
FULL_HILBERT_MAX_SPINS = 14

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _as_complex_matrix(entries):
    mat = np.asarray(entries, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ContractViolationError(f"operator must be a square matrix, got shape {mat.shape}")
    return mat


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """A dense complex square matrix with an enforced Hermiticity contract."""

    entries: np.ndarray
    label: str = ""

    def __post_init__(self):
        mat = _as_complex_matrix(self.entries)
        scale = np.max(np.abs(mat)) if mat.size else 0.0
        dev = np.abs(mat - mat.conj().T)
        worst = np.unravel_index(np.argmax(dev), dev.shape) if mat.size else (0, 0)
        if mat.size and dev[worst] > HERMITICITY_RTOL * max(scale, 1e-300):
            i, j = worst
            raise ContractViolationError(
                f"operator {self.label or '<unnamed>'} is not Hermitian: "
                f"entry ({i},{j})={mat[i, j]:.6g} vs conj({j},{i})={np.conj(mat[j, i]):.6g}"
            )
        mat = 0.5 * (mat + mat.conj().T)
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def mat(self) -> np.ndarray:
        return self.entries

    def spectral_range(self) -> float:
        """lambda_max - lambda_min (the pseudo-norm used by the precision bounds)."""
        vals = np.linalg.eigvalsh(self.entries)
        return float(vals[-1] - vals[0])


def hermitian(entries, label: str = "") -> HermitianOperator:
    return HermitianOperator(np.asarray(entries, dtype=complex), label)


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Pure state vector or density matrix with normalization contracts."""

    kind: str  # "pure" | "mixed"
    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=complex)
        if self.kind == "pure":
            if arr.ndim != 1:
                raise ContractViolationError("pure state must be a vector")
            norm = np.linalg.norm(arr)
            if abs(norm - 1.0) > 1e-10:
                raise ContractViolationError(f"pure state norm {norm} != 1")
        elif self.kind == "mixed":
            arr = _as_complex_matrix(arr)
            tr = np.trace(arr).real
            if abs(tr - 1.0) > 1e-10:
                raise ContractViolationError(f"density matrix trace {tr} != 1")
            if np.max(np.abs(arr - arr.conj().T)) > 1e-10 * max(1.0, np.max(np.abs(arr))):
                raise ContractViolationError("density matrix is not Hermitian")
            arr = 0.5 * (arr + arr.conj().T)
            if np.min(np.linalg.eigvalsh(arr)) < -1e-10:
                raise ContractViolationError("density matrix has a negative eigenvalue")
        else:
            raise ContractViolationError(f"unknown state kind {self.kind!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def vector(self) -> np.ndarray:
        if self.kind != "pure":
            raise ContractViolationError("state is not pure")
        return self.data

    def density_matrix(self) -> np.ndarray:
        if self.kind == "pure":
            return np.outer(self.data, self.data.conj())
        return self.data


def pure_state(vector, normalize: bool = False) -> QuantumState:
    vec = np.asarray(vector, dtype=complex)
    if normalize:
        vec = vec / np.linalg.norm(vec)
    return QuantumState("pure", vec)


def mixed_state(matrix) -> QuantumState:
    return QuantumState("mixed", matrix)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Ascending eigenvalues and orthonormal eigenvector columns of a Hermitian matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source_dim: int

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.eigenvectors.setflags(write=False)


@dataclass(frozen=True, eq=False)
class EigenspacePartition:
    """Degeneracy-grouped eigenspaces: index groups, representative energies,
    and the diagonalizing basis the groups refer to.

    Projector matrices are built on demand (``projector``/``projectors``) so
    large sweeps never materialize them.
    """

    groups: tuple
    group_energies: np.ndarray
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.group_energies.setflags(write=False)
        self.basis.setflags(write=False)

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    def projector(self, k: int) -> HermitianOperator:
        cols = self.basis[:, list(self.groups[k])]
        return HermitianOperator(cols @ cols.conj().T, label=f"Pi_{k}")

    @property
    def projectors(self):
        return [self.projector(k) for k in range(self.n_groups)]


def eig_hermitian(H: HermitianOperator) -> SpectralDecomposition:
    """Full eigendecomposition with a deterministic phase convention.

    Each eigenvector is rotated so that its largest-magnitude component is
    real and positive (first such index on ties), which makes repeated runs
    reproducible; projectors are phase-invariant either way.
    """
    vals, vecs = np.linalg.eigh(H.mat)
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        i = int(np.argmax(np.abs(col)))
        phase = col[i] / abs(col[i]) if col[i] != 0 else 1.0
        vecs[:, j] = col / phase
    scale = max(1.0, float(np.max(np.abs(H.mat))))
    recon = (vecs * vals) @ vecs.conj().T
    if np.max(np.abs(recon - H.mat)) > 1e-10 * scale:
        raise ContractViolationError("eigendecomposition failed its reconstruction bound")
    return SpectralDecomposition(vals, vecs, H.dim)


def group_eigenspaces(spec: SpectralDecomposition,
                      tol_abs: float = GROUP_TOL_ABS,
                      tol_rel: float = GROUP_TOL_REL) -> EigenspacePartition:
    """Merge adjacent eigenvalues into degenerate groups.

    Adjacent levels closer than ``tol_abs + tol_rel * spectral_range`` are
    merged transitively (chain rule), so a near-degenerate ladder collapses
    into one group even when its endpoints are farther apart than the
    tolerance.
    """
    if tol_abs < 0 or tol_rel < 0:
        raise ContractViolationError("grouping tolerances must be nonnegative")
    vals = spec.eigenvalues
    spread = float(vals[-1] - vals[0]) if len(vals) > 1 else 0.0
    tol = tol_abs + tol_rel * spread
    groups = []
    cur = [0]
    for i in range(1, len(vals)):
        if vals[i] - vals[i - 1] <= tol:
            cur.append(i)
        else:
            groups.append(tuple(cur))
            cur = [i]
    groups.append(tuple(cur))
    energies = np.array([float(np.mean(vals[list(g)])) for g in groups])
    return EigenspacePartition(tuple(groups), energies, spec.eigenvectors)


def _pinch_in_basis(mat_in_basis: np.ndarray, groups) -> np.ndarray:
    out = np.zeros_like(mat_in_basis)
    for g in groups:
        ix = np.ix_(list(g), list(g))
        out[ix] = mat_in_basis[ix]
    return out


def pinch(X, part: EigenspacePartition):
    """Apply the dephasing map sum_k Pi_k X Pi_k over the partition's eigenspaces.

    Accepts a HermitianOperator or a QuantumState and returns the same kind
    (pure states come back as mixed states, since pinching destroys purity).
    """
    V = part.basis
    if isinstance(X, HermitianOperator):
        if X.dim != V.shape[0]:
            raise ContractViolationError("operator dimension does not match the partition")
        inner = V.conj().T @ X.mat @ V
        return HermitianOperator(V @ _pinch_in_basis(inner, part.groups) @ V.conj().T,
                                 label=f"pinched({X.label})" if X.label else "pinched")
    if isinstance(X, QuantumState):
        if X.dim != V.shape[0]:
            raise ContractViolationError("state dimension does not match the partition")
        rho = X.density_matrix()
        inner = V.conj().T @ rho @ V
        return mixed_state(V @ _pinch_in_basis(inner, part.groups) @ V.conj().T)
    raise ContractViolationError(f"cannot pinch object of type {type(X).__name__}")


def min_gap(spec: SpectralDecomposition, part: EigenspacePartition) -> float:
    """Minimum spacing between adjacent group energies; +inf for a single group."""
    e = part.group_energies
    if len(e) < 2:
        return math.inf
    return float(np.min(np.diff(e)))


@dataclass(frozen=True, eq=False)
class DickeSpace:
    """Collective spin operators on the maximal-spin block of N spin-1/2.

    Basis ordering is m = S, S-1, ..., -S. ``s_plus_x``/``s_minus_x`` ladder
    between eigenstates of Sx and are not Hermitian.
    """

    n_spins: int
    sx: HermitianOperator
    sy: HermitianOperator
    sz: HermitianOperator
    s_plus_x: np.ndarray
    s_minus_x: np.ndarray

    @property
    def dim(self) -> int:
        return self.n_spins + 1

    @property
    def total_spin(self) -> float:
        return self.n_spins / 2

    @property
    def ops(self) -> dict:
        return {"Sx": self.sx, "Sy": self.sy, "Sz": self.sz,
                "S_plus_x": self.s_plus_x, "S_minus_x": self.s_minus_x}


def collective_ops(N: int) -> DickeSpace:
    """Collective Sx, Sy, Sz (and x-basis ladders) in the Dicke basis."""
    if N < 1:
        raise ContractViolationError(f"need at least one spin, got N={N}")
    S = N / 2
    m = S - np.arange(N + 1)
    sz = np.diag(m.astype(complex))
    sp = np.zeros((N + 1, N + 1), dtype=complex)
    for row in range(N):
        mm = m[row + 1]  # S+ |m> -> |m+1>, ladder element sqrt(S(S+1)-m(m+1))
        sp[row, row + 1] = math.sqrt(S * (S + 1) - mm * (mm + 1))
    sm = sp.conj().T
    sx = (sp + sm) / 2
    sy = (sp - sm) / 2j
    # ladders for the x quantization axis: [Sx, Sy +- i Sz] = +-(Sy +- i Sz)
    s_plus_x = sy + 1j * sz
    s_minus_x = sy - 1j * sz
    return DickeSpace(N, HermitianOperator(sx, "Sx"), HermitianOperator(sy, "Sy"),
                      HermitianOperator(sz, "Sz"), s_plus_x, s_minus_x)


def spin_coherent_state(N: int, theta: float, phi: float, axis: str = "z") -> QuantumState:
    """Product of N identical Bloch vectors, expanded in the collective basis.

    Amplitude on |S, m> is sqrt(C(2S, S+m)) * eta^(S-m) / (1+|eta|^2)^S with
    eta = -tan(theta/2) exp(-i phi), so theta=0 is the stretch state |S, S>.
    With ``axis="x"`` the same amplitudes refer to the Dicke basis of the
    collective Sx (the expansion is axis-covariant).
    """
    if N < 1:
        raise ContractViolationError(f"need at least one spin, got N={N}")
    if axis not in ("z", "x"):
        raise ContractViolationError(f"unknown quantization axis {axis!r}")
    S = N / 2
    half = theta / 2
    t = math.tan(half) if abs(math.cos(half)) > 1e-300 else math.inf
    u = -np.exp(-1j * phi) * (1.0 if t >= 0 else -1.0)  # phase of eta
    r = abs(t)
    amps = np.empty(N + 1, dtype=complex)
    if r <= 1.0:
        norm = (1 + r * r) ** S
        for idx in range(N + 1):  # idx = S - m
            amps[idx] = math.sqrt(math.comb(N, idx)) * (r ** idx) * (u ** idx) / norm
    else:
        s = 1.0 / r  # evaluate from the m = -S end to avoid overflow
        norm = (1 + s * s) ** S
        for idx in range(N + 1):
            amps[idx] = math.sqrt(math.comb(N, idx)) * (s ** (N - idx)) * (u ** idx) / norm
    return pure_state(amps, normalize=True)


def tensor_operator(N: int, site_ops) -> HermitianOperator:
    """Kronecker product over N spin-1/2 sites with identities on unspecified sites.

    ``site_ops`` is a list of (site, 2x2 Hermitian matrix) pairs; site 0 is the
    leftmost tensor factor. Dimension is 2^N, capped at N=14 to keep the dense
    matrix within desk-scale memory.
    """
    if not 1 <= N <= FULL_HILBERT_MAX_SPINS:
        raise ContractViolationError(
            f"full-Hilbert builders support 1 <= N <= {FULL_HILBERT_MAX_SPINS}, got N={N}")
    by_site = {}
    for site, op in site_ops:
        if not 0 <= site < N:
            raise ContractViolationError(f"site index {site} out of range for N={N}")
        if site in by_site:
            raise ContractViolationError(f"site index {site} listed twice")
        mat = _as_complex_matrix(op.mat if isinstance(op, HermitianOperator) else op)
        if mat.shape != (2, 2):
            raise ContractViolationError("site operators must be 2x2")
        by_site[site] = mat
    out = np.ones((1, 1), dtype=complex)
    eye = np.eye(2, dtype=complex)
    for site in range(N):
        out = np.kron(out, by_site.get(site, eye))
    return HermitianOperator(out)


def collective_sum(N: int, local_op) -> HermitianOperator:
    """sum_i (local_op on site i), a full-Hilbert collective operator."""
    total = np.zeros((2 ** N, 2 ** N), dtype=complex)
    for site in range(N):
        total += tensor_operator(N, [(site, local_op)]).mat
    return HermitianOperator(total)
