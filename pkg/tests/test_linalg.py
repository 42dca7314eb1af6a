import itertools

import numpy as np
import pytest

from conftest import eigenprojector, random_density
from switchlab.linalg import (
    KET0,
    KET1,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    LayoutError,
    SystemLayout,
    bloch_ket,
    ghz_ket,
    is_density_operator,
    ket,
    ketbra,
    partial_trace,
    projector,
    tensor_product,
)


def naive_partial_trace_last(rho, d_keep, d_drop):
    out = np.zeros((d_keep, d_keep), dtype=complex)
    for i, j, k in itertools.product(range(d_keep), range(d_keep), range(d_drop)):
        out[i, j] += rho[i * d_drop + k, j * d_drop + k]
    return out


def test_tensor_product_matches_kron():
    a, b, c = PAULI_X, PAULI_Y, np.eye(3)
    assert np.allclose(tensor_product(a, b, c), np.kron(np.kron(a, b), c))
    assert np.allclose(tensor_product(a), a)


def test_partial_trace_against_index_loop(rng):
    rho = random_density(rng, 6)
    assert np.allclose(partial_trace(rho, [2, 3], keep=[0]), naive_partial_trace_last(rho, 2, 3), atol=1e-12)


def test_partial_trace_labels_and_order(rng):
    ra, rb, rc = random_density(rng, 2), random_density(rng, 3), random_density(rng, 2)
    rho = tensor_product(ra, rb, rc)
    layout = SystemLayout.of(A=2, B=3, C=2)
    assert np.allclose(partial_trace(rho, layout, keep=["C", "A"]), np.kron(ra, rc))
    assert np.allclose(partial_trace(rho, layout, keep=["B"]), rb)
    assert np.allclose(partial_trace(rho, layout, keep=[]), [[1.0]])


def test_partial_trace_errors():
    with pytest.raises(LayoutError):
        partial_trace(np.eye(4), [2, 3], keep=[0])
    with pytest.raises(LayoutError):
        partial_trace(np.eye(4), SystemLayout.of(A=2, B=2), keep=["Z"])
    with pytest.raises(LayoutError):
        SystemLayout(("A", "A"), (2, 2))


def test_ketbra_and_projector():
    assert np.allclose(ketbra(KET1, KET0), [[0, 0], [1, 0]])
    p = projector(ket(1, 1j) / np.sqrt(2))
    assert np.allclose(p @ p, p)
    with pytest.raises(ValueError):
        projector(ket(1, 1))


@pytest.mark.parametrize("direction", [(0, 0, 1), (0, 0, -1), (1, 0, 0), (0, 1, 0), (0.6, 0, 0.8), (0.36, -0.48, 0.8)])
def test_bloch_ket_is_plus_one_eigenvector(direction):
    n = np.asarray(direction, dtype=float)
    op = n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z
    psi = bloch_ket(n)
    assert np.allclose(op @ psi, psi, atol=1e-12)
    assert np.allclose(projector(psi), eigenprojector(op, 1.0), atol=1e-12)


def test_bloch_ket_rejects_non_unit():
    with pytest.raises(ValueError):
        bloch_ket((1, 1, 0))


def test_density_operator_checks(rng):
    assert is_density_operator(random_density(rng, 4))
    assert not is_density_operator(np.diag([1.5, -0.5]))
    assert not is_density_operator(np.ones((2, 3)))
    ghz = projector(ghz_ket(3))
    assert is_density_operator(ghz)
    assert np.allclose(partial_trace(ghz, [2, 2, 2], keep=[0]), np.eye(2) / 2)
