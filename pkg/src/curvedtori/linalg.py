"""Dense complex matrix helpers.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; this module adds
the few operations everything downstream is phrased in (operator norm,
Kronecker product, Hermitian eigendecomposition) together with their
argument checks.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractError, DimensionError

DENSE_LIMIT = 512
HERMITIAN_RTOL = 1e-12


def as_cmatrix(M) -> np.ndarray:
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim != 2 or A.size == 0:
        raise DimensionError(f"expected a nonempty 2-d matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DimensionError("matrix has non-finite entries")
    return A


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def adjoint(M) -> np.ndarray:
    return as_cmatrix(M).conj().T


def _power_norm(A: np.ndarray, tol: float = 1e-13, maxiter: int = 10_000) -> float:
    # power iteration on A*A, seeded deterministically
    rng = np.random.default_rng(0)
    v = rng.normal(size=A.shape[1]) + 1j * rng.normal(size=A.shape[1])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(maxiter):
        w = A.conj().T @ (A @ v)
        new = float(np.linalg.norm(w))
        if new == 0.0:
            return 0.0
        v = w / new
        if abs(new - lam) <= tol * new:
            lam = new
            break
        lam = new
    return float(np.sqrt(lam))


def op_norm(M) -> float:
    """Largest singular value of ``M``."""
    A = as_cmatrix(M)
    if max(A.shape) <= DENSE_LIMIT:
        return float(np.linalg.norm(A, 2))
    return _power_norm(A)


def min_singular_value(M) -> float:
    return float(np.linalg.svd(as_cmatrix(M), compute_uv=False)[-1])


def kron(A, B) -> np.ndarray:
    return np.kron(as_cmatrix(A), as_cmatrix(B))


def hermitian_residual(M) -> float:
    A = as_cmatrix(M)
    return op_norm(A - A.conj().T)


def is_hermitian(M, rtol: float = HERMITIAN_RTOL) -> bool:
    A = as_cmatrix(M)
    if A.shape[0] != A.shape[1]:
        return False
    scale = max(op_norm(A), 1.0)
    return hermitian_residual(A) <= rtol * scale


def herm_eig(H) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, U)`` with eigenvalues in descending order and the
    matching eigenvectors as columns of ``U``. The input is symmetrized before
    the solve; anything further than ``1e-12 * ||H||`` from Hermitian is
    rejected.
    """
    A = as_cmatrix(H)
    if A.shape[0] != A.shape[1]:
        raise ContractError(f"herm_eig needs a square matrix, got {A.shape}")
    if not is_hermitian(A):
        raise ContractError("herm_eig: matrix is not Hermitian within tolerance")
    w, U = np.linalg.eigh((A + A.conj().T) / 2)
    return w[::-1].copy(), U[:, ::-1].copy()


def random_cmatrix(rng: np.random.Generator, rows: int, cols: int | None = None) -> np.ndarray:
    cols = rows if cols is None else cols
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    A = random_cmatrix(rng, n)
    return (A + A.conj().T) / 2


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    Q, R = np.linalg.qr(random_cmatrix(rng, n))
    return Q * (np.diag(R) / np.abs(np.diag(R)))
