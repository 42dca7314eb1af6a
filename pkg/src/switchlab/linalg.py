"""Small dense complex linear algebra on numpy arrays.

Matrices are plain ``numpy.ndarray`` objects of dtype complex128. Kets are
column vectors of shape ``(d, 1)``. Tensor factors are ordered with the most
significant factor first, so ``tensor_product(a, b)`` has ``a``'s indices
varying slowest.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

ALGEBRAIC_TOL = 1e-12
PHYSICAL_TOL = 1e-9


class LayoutError(ValueError):
    """Raised when a subsystem layout does not match a matrix."""


@dataclass(frozen=True)
class SystemLayout:
    """Ordered subsystem labels with their local dimensions."""

    labels: tuple[str, ...]
    dims: tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.dims):
            raise LayoutError("labels and dims must have equal length")
        if len(set(self.labels)) != len(self.labels):
            raise LayoutError(f"duplicate subsystem labels in {self.labels}")
        if any(d < 1 for d in self.dims):
            raise LayoutError("local dimensions must be positive")

    @classmethod
    def of(cls, **systems: int) -> "SystemLayout":
        return cls(tuple(systems), tuple(systems.values()))

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=int))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LayoutError(f"unknown subsystem {label!r}") from None


def ket(*amplitudes) -> np.ndarray:
    return np.asarray(amplitudes, dtype=complex).reshape(-1, 1)


KET0 = ket(1, 0)
KET1 = ket(0, 1)
KET_PLUS = ket(1, 1) / np.sqrt(2)
KET_MINUS = ket(1, -1) / np.sqrt(2)
KET_PLUS_I = ket(1, 1j) / np.sqrt(2)
KET_MINUS_I = ket(1, -1j) / np.sqrt(2)

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def tensor_product(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more matrices, first argument most significant."""
    if not mats:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, (np.asarray(m, dtype=complex) for m in mats))


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(a)).T


def ketbra(k: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``|k><b|``."""
    return np.asarray(k, dtype=complex) @ adjoint(b)


def projector(psi: np.ndarray, tol: float = PHYSICAL_TOL) -> np.ndarray:
    """Rank-one projector onto a unit column vector."""
    psi = np.asarray(psi, dtype=complex).reshape(-1, 1)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        raise ValueError(f"projector needs a unit vector, got norm {norm:.3g}")
    return psi @ adjoint(psi)


def _resolve_keep(layout: SystemLayout, keep: Iterable) -> list[int]:
    idx = []
    for k in keep:
        i = layout.index(k) if isinstance(k, str) else int(k)
        if not 0 <= i < len(layout.dims):
            raise LayoutError(f"subsystem index {i} out of range")
        idx.append(i)
    if len(set(idx)) != len(idx):
        raise LayoutError("repeated subsystem in keep")
    return sorted(idx)


def partial_trace(rho: np.ndarray, layout: SystemLayout | Sequence[int], keep: Iterable) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    ``keep`` holds labels or positional indices; kept factors come back in
    their original order. Keeping nothing returns a 1x1 matrix.
    """
    if not isinstance(layout, SystemLayout):
        dims = tuple(int(d) for d in layout)
        layout = SystemLayout(tuple(f"s{i}" for i in range(len(dims))), dims)
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise LayoutError(f"partial_trace needs a square matrix, got shape {rho.shape}")
    if rho.shape[0] != layout.dim:
        raise LayoutError(f"layout dimension {layout.dim} does not match matrix size {rho.shape[0]}")
    kept = _resolve_keep(layout, keep)
    n = len(layout.dims)
    t = rho.reshape(layout.dims + layout.dims)
    row = list(range(n))
    col = [i if i not in kept else n + i for i in range(n)]
    out = [i for i in kept] + [n + i for i in kept]
    reduced = np.einsum(t, row + col, out)
    d = int(np.prod([layout.dims[i] for i in kept], dtype=int))
    return reduced.reshape(d, d)


def is_density_operator(rho: np.ndarray, tol: float = ALGEBRAIC_TOL) -> bool:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    if np.abs(rho - adjoint(rho)).max() > tol or abs(np.trace(rho) - 1) > tol:
        return False
    return bool(np.linalg.eigvalsh((rho + adjoint(rho)) / 2).min() > -tol)


def bloch_ket(direction: Sequence[float]) -> np.ndarray:
    """The +1 eigenvector of ``n.sigma`` for a unit Bloch vector ``(nx, ny, nz)``."""
    nx, ny, nz = (float(v) for v in direction)
    norm = np.sqrt(nx * nx + ny * ny + nz * nz)
    if abs(norm - 1) > PHYSICAL_TOL:
        raise ValueError(f"Bloch direction must be a unit vector, got norm {norm:.3g}")
    polar = np.arccos(np.clip(nz, -1.0, 1.0))
    azimuth = np.arctan2(ny, nx)
    return ket(np.cos(polar / 2), np.exp(1j * azimuth) * np.sin(polar / 2))


def ghz_ket(n: int = 3) -> np.ndarray:
    psi = np.zeros((2**n, 1), dtype=complex)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    return psi


PHI_PLUS = ket(1, 0, 0, 1) / np.sqrt(2)
