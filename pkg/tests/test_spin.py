"""Spin-core contracts: eigendecomposition, grouping, pinching, Dicke algebra,
coherent states and tensor builders."""
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from metrolab import (ContractViolationError, collective_ops, collective_sum,
                      eig_hermitian, group_eigenspaces, hermitian, min_gap,
                      pinch, pure_state, spin_coherent_state, tensor_operator)
from metrolab.spin import PAULI_X, PAULI_Y, PAULI_Z


def test_eig_diagonal_input():
    spec = eig_hermitian(hermitian(np.diag([2.0, -1.0])))
    assert_allclose(spec.eigenvalues, [-1.0, 2.0])
    assert_allclose(np.abs(spec.eigenvectors), [[0, 1], [1, 0]], atol=1e-14)


def test_eig_pauli_x():
    spec = eig_hermitian(hermitian(PAULI_X))
    assert_allclose(spec.eigenvalues, [-1.0, 1.0])
    s = 1 / math.sqrt(2)
    # phase convention: largest-magnitude component (first on ties) real positive
    assert_allclose(spec.eigenvectors[:, 0], [s, -s], atol=1e-14)
    assert_allclose(spec.eigenvectors[:, 1], [s, s], atol=1e-14)


def test_eig_sx_squared_spectrum():
    space = collective_ops(4)
    spec = eig_hermitian(hermitian(space.sx.mat @ space.sx.mat))
    oracle = sorted(m * m for m in range(-2, 3))  # brute force over m
    assert_allclose(spec.eigenvalues, oracle, atol=1e-10)


def test_eig_rejects_non_hermitian():
    with pytest.raises(ContractViolationError, match=r"\(0,1\)"):
        hermitian([[0.0, 1.0], [0.0, 0.0]])


def test_eig_random_reconstruction_and_orthonormality():
    rng = np.random.default_rng(7)
    for _ in range(100):
        d = int(rng.integers(2, 13))
        raw = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        H = hermitian((raw + raw.conj().T) / 2)
        spec = eig_hermitian(H)
        recon = (spec.eigenvectors * spec.eigenvalues) @ spec.eigenvectors.conj().T
        scale = max(1.0, np.max(np.abs(H.mat)))
        assert np.max(np.abs(recon - H.mat)) <= 1e-10 * scale
        gram = spec.eigenvectors.conj().T @ spec.eigenvectors
        assert np.max(np.abs(gram - np.eye(d))) <= 1e-10
        assert np.all(np.diff(spec.eigenvalues) >= -1e-12)


def test_eig_deterministic_phases():
    rng = np.random.default_rng(3)
    raw = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    H = hermitian((raw + raw.conj().T) / 2)
    a = eig_hermitian(H)
    b = eig_hermitian(H)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)
    for j in range(6):
        col = a.eigenvectors[:, j]
        top = col[int(np.argmax(np.abs(col)))]
        assert abs(top.imag) <= 1e-12 and top.real > 0


def test_grouping_merges_near_degenerate():
    spec = eig_hermitian(hermitian(np.diag([0.0, 1e-13, 1.0, 1.0])))
    part = group_eigenspaces(spec)
    assert part.groups == ((0, 1), (2, 3))


def test_grouping_keeps_separated_levels():
    spec = eig_hermitian(hermitian(np.diag([0.0, 1.0, 4.0, 9.0])))
    part = group_eigenspaces(spec)
    assert part.groups == ((0,), (1,), (2,), (3,))
    assert min_gap(spec, part) == 1.0


def test_grouping_sx_squared_doublets():
    space = collective_ops(5)
    spec = eig_hermitian(hermitian(space.sx.mat @ space.sx.mat))
    part = group_eigenspaces(spec)
    assert [len(g) for g in part.groups] == [2, 2, 2]
    assert_allclose(part.group_energies, [0.25, 2.25, 6.25], atol=1e-9)
    assert min_gap(spec, part) == pytest.approx(2.0)


def test_partition_projector_algebra():
    space = collective_ops(5)
    spec = eig_hermitian(hermitian(space.sx.mat @ space.sx.mat))
    part = group_eigenspaces(spec)
    total = sum(p.mat for p in part.projectors)
    assert np.max(np.abs(total - np.eye(6))) <= 1e-10
    for i in range(part.n_groups):
        Pi = part.projector(i).mat
        assert np.max(np.abs(Pi @ Pi - Pi)) <= 1e-10
        for j in range(part.n_groups):
            if i != j:
                assert np.max(np.abs(Pi @ part.projector(j).mat)) <= 1e-10


def test_min_gap_single_group_sentinel():
    spec = eig_hermitian(hermitian(np.eye(3)))
    part = group_eigenspaces(spec)
    assert min_gap(spec, part) == math.inf


def test_min_gap_even_oat_gap_is_one():
    for N in (4, 6):
        space = collective_ops(N)
        spec = eig_hermitian(hermitian(space.sx.mat @ space.sx.mat))
        part = group_eigenspaces(spec)
        assert min_gap(spec, part) == pytest.approx(1.0, abs=1e-9)


def test_pinch_all_singletons_keeps_diagonal():
    rng = np.random.default_rng(0)
    raw = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    X = hermitian((raw + raw.conj().T) / 2)
    spec = eig_hermitian(hermitian(np.diag([0.0, 1.0, 2.0, 3.0])))
    part = group_eigenspaces(spec)
    out = pinch(X, part)
    assert_allclose(out.mat, np.diag(np.diagonal(X.mat)), atol=1e-12)


def test_pinch_fixed_point_and_idempotence():
    rng = np.random.default_rng(1)
    raw = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    H = hermitian((raw + raw.conj().T) / 2)
    part = group_eigenspaces(eig_hermitian(H))
    assert_allclose(pinch(H, part).mat, H.mat, atol=1e-10)  # commuting input
    X = hermitian(np.diag([3.0, 1.0, 4.0, 1.0, 5.0]))
    once = pinch(X, part)
    twice = pinch(once, part)
    assert_allclose(twice.mat, once.mat, atol=1e-10)


def test_pinch_state_trace_and_positivity():
    rng = np.random.default_rng(2)
    for _ in range(20):
        d = int(rng.integers(2, 8))
        raw = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        H = hermitian((raw + raw.conj().T) / 2)
        part = group_eigenspaces(eig_hermitian(H))
        vec = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        rho = pinch(pure_state(vec, normalize=True), part)
        assert abs(np.trace(rho.data).real - 1.0) <= 1e-10
        assert np.min(np.linalg.eigvalsh(rho.data)) >= -1e-10


def test_dicke_small_cases():
    one = collective_ops(1)
    assert_allclose(one.sx.mat, PAULI_X / 2, atol=1e-14)
    assert_allclose(one.sy.mat, PAULI_Y / 2, atol=1e-14)
    assert_allclose(one.sz.mat, PAULI_Z / 2, atol=1e-14)
    two = collective_ops(2)
    assert_allclose(np.diagonal(two.sz.mat).real, [1.0, 0.0, -1.0])


def test_dicke_ladder_formula_n3():
    # oracle: sqrt(S(S+1) - m(m+1)) / 2 for the Sx off-diagonals
    S = 1.5
    ms = [0.5, -0.5, -1.5]
    oracle = [math.sqrt(S * (S + 1) - m * (m + 1)) / 2 for m in ms]
    space = collective_ops(3)
    off = [space.sx.mat[i, i + 1].real for i in range(3)]
    assert_allclose(off, oracle, atol=1e-12)
    assert_allclose(oracle, [math.sqrt(3) / 2, 1.0, math.sqrt(3) / 2], atol=1e-12)


@pytest.mark.parametrize("N", [1, 2, 3, 5, 10, 25, 40])
def test_dicke_commutation_and_casimir(N):
    space = collective_ops(N)
    sx, sy, sz = space.sx.mat, space.sy.mat, space.sz.mat
    for A, B, C in ((sx, sy, sz), (sy, sz, sx), (sz, sx, sy)):
        assert np.max(np.abs(A @ B - B @ A - 1j * C)) <= 1e-10 * max(1, N)
    S = N / 2
    casimir = sx @ sx + sy @ sy + sz @ sz
    assert np.max(np.abs(casimir - S * (S + 1) * np.eye(N + 1))) <= 1e-10 * max(1, N * N)


def test_x_ladders_shift_sx_eigenstates():
    space = collective_ops(4)
    spec = np.linalg.eigh(space.sx.mat)
    vals, vecs = spec
    v = vecs[:, 1]  # m_x = -1
    up = space.s_plus_x @ v
    resid = space.sx.mat @ up - (vals[1] + 1) * up
    assert np.max(np.abs(resid)) <= 1e-10


def test_coherent_stretch_and_norm():
    st = spin_coherent_state(5, 0.0, 1.3)
    assert_allclose(np.abs(st.vector), [1, 0, 0, 0, 0, 0], atol=1e-14)
    st = spin_coherent_state(7, 2.1, -0.4)
    assert abs(np.linalg.norm(st.vector) - 1.0) <= 1e-12


def test_coherent_equatorial_amplitudes():
    st = spin_coherent_state(2, math.pi / 2, 0.0)
    # (|0> - |1>)^{x2} / 2 expanded in the Dicke basis
    assert_allclose(st.vector.real, [0.5, -1 / math.sqrt(2), 0.5], atol=1e-12)
    assert_allclose(st.vector.imag, [0, 0, 0], atol=1e-14)


def _dicke_basis_full(N):
    """Embed |S, m> Dicke vectors in the 2^N product space (z quantization)."""
    dim = 2 ** N
    basis = np.zeros((dim, N + 1), dtype=complex)
    for state in range(dim):
        ones = bin(state).count("1")
        basis[state, ones] = 1.0  # idx = S - m = number of down spins
    norms = np.sqrt((np.abs(basis) ** 2).sum(axis=0))
    return basis / norms


@pytest.mark.parametrize("N", [1, 2, 4, 8])
def test_coherent_matches_product_state(N):
    rng = np.random.default_rng(11 + N)
    basis = _dicke_basis_full(N)
    for _ in range(4):
        theta = float(rng.uniform(0, math.pi))
        phi = float(rng.uniform(-math.pi, math.pi))
        single = np.array([math.cos(theta / 2),
                           -np.exp(-1j * phi) * math.sin(theta / 2)], dtype=complex)
        prod = np.array([1.0], dtype=complex)
        for _ in range(N):
            prod = np.kron(prod, single)
        expected = basis.conj().T @ prod
        got = spin_coherent_state(N, theta, phi).vector
        overlap = abs(np.vdot(expected, got))
        assert overlap >= 1 - 1e-10


def test_coherent_y_states_polarization():
    for sign, phi in ((+1, math.pi / 2), (-1, -math.pi / 2)):
        st = spin_coherent_state(6, math.pi / 2, phi)
        sy = collective_ops(6).sy.mat
        assert np.vdot(st.vector, sy @ st.vector).real == pytest.approx(sign * 3.0, abs=1e-10)


def test_tensor_operator_examples():
    op = tensor_operator(2, [(0, PAULI_Z)])
    assert_allclose(np.diagonal(op.mat).real, [1, 1, -1, -1])
    assert_allclose(tensor_operator(1, [(0, PAULI_X)]).mat, PAULI_X)
    total = collective_sum(3, PAULI_Z / 2)
    # oracle: enumerate bitstrings
    oracle = sorted((3 - 2 * bin(s).count("1")) / 2 for s in range(8))
    assert_allclose(np.sort(np.diagonal(total.mat).real), oracle)


def test_tensor_operator_guards():
    with pytest.raises(ContractViolationError):
        tensor_operator(15, [(0, PAULI_X)])
    with pytest.raises(ContractViolationError):
        tensor_operator(3, [(3, PAULI_X)])
    with pytest.raises(ContractViolationError):
        tensor_operator(3, [(0, PAULI_X), (0, PAULI_Z)])
    with pytest.raises(ContractViolationError):
        collective_ops(0)


def test_coherent_axis_covariance():
    # the amplitude pattern is axis-covariant: the x-referenced expansion in
    # the Sx Dicke basis equals the z-referenced one in the Sz Dicke basis
    a = spin_coherent_state(5, 1.1, 0.7, axis="z").vector
    b = spin_coherent_state(5, 1.1, 0.7, axis="x").vector
    assert np.array_equal(a, b)
    # stretch state along +x, expressed through the x-frame operators
    st = spin_coherent_state(4, 0.0, 0.0, axis="x")
    space = collective_ops(4)
    spec = eig_hermitian(space.sx)
    sx_diag = np.diag(spec.eigenvalues.astype(complex))
    mean = np.vdot(st.vector, sx_diag[::-1, ::-1] @ st.vector).real
    assert mean == pytest.approx(2.0, abs=1e-12)
