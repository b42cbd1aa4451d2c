import math

import numpy as np
import pytest

from witkit import linalg, pauli, states, witnesses

INV_ROOT2 = 1.0 / math.sqrt(2.0)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2, dtype=complex)
PAULIS = (I2, SX, SY, SZ)


def random_hermitian(rng, dim):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / 2


def test_to_pauli_w0_support():
    c = pauli.to_pauli(witnesses.witness_w0().operator)
    expected = np.zeros((4, 4))
    expected[0, 0] = 0.25
    expected[1, 1] = expected[2, 2] = -0.25
    expected[3, 3] = 0.25
    assert np.abs(c.coeffs - expected).max() < 1e-14


def test_to_pauli_identity():
    c = pauli.to_pauli(np.eye(8) / 8, 3)
    assert abs(c.coeffs[0, 0, 0] - 0.125) < 1e-14
    rest = c.coeffs.copy()
    rest[0, 0, 0] = 0.0
    assert np.abs(rest).max() < 1e-14


def test_to_pauli_ghz_witness_support():
    lam = 8.0 * pauli.to_pauli(witnesses.witness_ghz().operator).coeffs
    assert abs(lam[0, 0, 0] - 5.0) < 1e-12
    for idx in ((0, 3, 3), (3, 0, 3), (3, 3, 0), (1, 1, 1)):
        assert abs(lam[idx] + 1.0) < 1e-12
    for idx in ((1, 2, 2), (2, 1, 2), (2, 2, 1)):
        assert abs(lam[idx] - 1.0) < 1e-12
    assert np.count_nonzero(np.abs(lam) > 1e-9) == 8


def test_round_trip_and_single_coefficient():
    w1 = witnesses.witness_w1().operator
    back = pauli.from_pauli(pauli.to_pauli(w1))
    assert np.linalg.norm(back - w1) < 1e-12
    c = pauli.PauliCoefficients(2, np.zeros((4, 4)))
    c.coeffs[3, 3] = 1.0
    assert np.abs(pauli.from_pauli(c) - linalg.kron(SZ, SZ)).max() < 1e-14


def test_from_pauli_matches_partial_transpose_projector():
    # oracle: the closed coefficient set versus an explicit transpose
    rng = np.random.default_rng(8)
    for _ in range(5):
        alpha = rng.uniform(-1.0, 1.0)
        beta = math.copysign(math.sqrt(1 - alpha ** 2), rng.uniform(-1, 1))
        phi = np.zeros(4, dtype=complex)
        phi[0], phi[3] = alpha, beta
        target = linalg.partial_transpose(np.outer(phi, phi.conj()), 1, [2, 2])
        coeffs = np.zeros((4, 4))
        coeffs[0, 0] = coeffs[3, 3] = 0.25
        coeffs[3, 0] = coeffs[0, 3] = (alpha ** 2 - beta ** 2) / 4
        coeffs[1, 1] = coeffs[2, 2] = alpha * beta / 2
        built = pauli.from_pauli(pauli.PauliCoefficients(2, coeffs))
        assert np.abs(built - target).max() < 1e-12


def test_to_pauli_linear_and_parseval():
    rng = np.random.default_rng(13)
    x = random_hermitian(rng, 8)
    y = random_hermitian(rng, 8)
    cx = pauli.to_pauli(x).coeffs
    cy = pauli.to_pauli(y).coeffs
    both = pauli.to_pauli(0.7 * x - 1.3 * y).coeffs
    assert np.abs(both - (0.7 * cx - 1.3 * cy)).max() < 1e-12
    # Frobenius consistency: Tr(M^2) = 2^n * sum of squared coefficients
    lhs = float(np.real(np.trace(x @ x)))
    assert abs(lhs - 8.0 * float(np.sum(cx ** 2))) < 1e-10


def test_to_pauli_rejects_bad_input():
    with pytest.raises(ValueError):
        pauli.to_pauli(np.eye(4), 3)
    with pytest.raises(ValueError):
        pauli.to_pauli(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_slice_family_ghz_witness():
    c = pauli.to_pauli(witnesses.witness_ghz().operator)
    fam = pauli.slice_family(c, "AB|C")
    m = [8.0 * mat for mat in fam.matrices]
    assert np.abs(m[0] - np.diag([0.0, 0.0, -1.0])).max() < 1e-12
    assert np.abs(m[1] - np.diag([-1.0, 1.0, 0.0])).max() < 1e-12
    expected2 = np.zeros((3, 3))
    expected2[0, 1] = expected2[1, 0] = 1.0
    assert np.abs(m[2] - expected2).max() < 1e-12
    assert np.abs(m[3]).max() < 1e-12


def test_slice_family_identity_and_errors():
    c = pauli.to_pauli(np.eye(8), 3)
    fam = pauli.slice_family(c, "BC|A")
    for mat in fam.matrices:
        assert np.abs(mat).max() == 0
    with pytest.raises(ValueError):
        pauli.slice_family(c, "A|BC")
    c2 = pauli.to_pauli(np.eye(4), 2)
    assert len(pauli.slice_family(c2, "A|B").matrices) == 1


def test_product_projector_slices_are_rank_one():
    rng = np.random.default_rng(21)
    for seed in range(20):
        psi = states.random_product_state(3, seed=seed)
        c = pauli.to_pauli(psi.projector())
        for pairing in pauli.PAIRINGS_3:
            for mat in pauli.slice_family(c, pairing).matrices:
                assert linalg.numerical_rank(list(mat)) <= 1


def test_bloch_vector_cases():
    zero = np.zeros((2, 2), dtype=complex)
    zero[0, 0] = 1.0
    assert np.allclose(pauli.bloch_vector(zero), [0.5, 0, 0, 0.5])
    xp = 0.5 * np.array([[1, 1], [1, 1]], dtype=complex)
    assert np.allclose(pauli.bloch_vector(xp), [0.5, 0.5, 0, 0])
    comp = np.eye(2) - xp
    assert np.allclose(pauli.bloch_vector(xp) + pauli.bloch_vector(comp),
                       [1, 0, 0, 0])
    with pytest.raises(ValueError):
        pauli.bloch_vector(np.eye(2))  # rank two


def test_sparse_map_letters():
    c = pauli.to_pauli(witnesses.witness_w0().operator)
    sparse = pauli.to_sparse_map(c)
    expected = {"11": 0.25, "xx": -0.25, "yy": -0.25, "zz": 0.25}
    assert set(sparse) == set(expected)
    for key, value in expected.items():
        assert abs(sparse[key] - value) < 1e-14
    c3 = pauli.to_pauli(witnesses.witness_ghz().operator)
    sparse3 = pauli.to_sparse_map(c3)
    assert abs(sparse3["111"] - 0.625) < 1e-14
    assert abs(sparse3["1zz"] + 0.125) < 1e-14
    assert abs(sparse3["xxx"] + 0.125) < 1e-14
