"""The rational quantum torus M_q and the objects built on its trace.

At rotation parameter p/q the quantum torus is the full matrix algebra M_q,
generated by the clock ``U = diag(1, w, ..., w^(q-1))`` and the cyclic shift
``V`` with ``V U = w U V``, ``w = exp(2 pi i p / q)``.

The GNS space L^2(M_q, tau) is identified with C^(q^2) through the
orthonormal monomial basis ``U^m V^n``; index ``(m, n)`` maps to ``m * q + n``.
Operators on the GNS space (left/right multiplications, derivations) are
q^2 x q^2 matrices in that basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Mapping, Sequence

import numpy as np

from .errors import ParameterError
from .linalg import as_cmatrix, identity, op_norm

ROUNDTRIP_TOL = 1e-12


def symmetric_rep(s, q: int):
    """Representative of ``s mod q`` in (-q/2, q/2]."""
    r = np.mod(s, q)
    return np.where(r > q // 2, r - q, r) if np.ndim(r) else (r - q if r > q // 2 else r)


@dataclass(frozen=True, eq=False)
class TorusAlgebra:
    q: int
    p: int
    omega: complex
    clock: np.ndarray
    shift: np.ndarray
    theta: np.ndarray

    @property
    def dim(self) -> int:
        return self.q * self.q

    def index(self, m: int, n: int) -> int:
        return (m % self.q) * self.q + (n % self.q)

    def cocycle(self, xi: Sequence[int], eta: Sequence[int]) -> complex:
        return complex(np.exp(1j * np.pi * np.dot(xi, self.theta @ np.asarray(eta))))

    @cached_property
    def weyl_stack(self) -> np.ndarray:
        """All monomials ``U^m V^n`` stacked as an array of shape (q^2, q, q)."""
        q = self.q
        Upow = [np.linalg.matrix_power(self.clock, m) for m in range(q)]
        Vpow = [np.linalg.matrix_power(self.shift, n) for n in range(q)]
        return np.array([Upow[m] @ Vpow[n] for m in range(q) for n in range(q)])

    @cached_property
    def synthesis(self) -> np.ndarray:
        # columns: row-major vec of each monomial
        return self.weyl_stack.reshape(self.dim, -1).T.copy()

    @cached_property
    def analysis(self) -> np.ndarray:
        return self.synthesis.conj().T / self.q

    @cached_property
    def exponents(self) -> np.ndarray:
        """Symmetric exponent representatives, shape (2, q, q): [m]_q and [n]_q."""
        m, n = np.meshgrid(np.arange(self.q), np.arange(self.q), indexing="ij")
        return np.array([symmetric_rep(m, self.q), symmetric_rep(n, self.q)])

    @cached_property
    def star_matrix(self) -> np.ndarray:
        """``P`` with ``J x = P conj(x)`` in monomial coordinates, J(x) = x*."""
        cols = [self.analysis @ W.conj().T.reshape(-1) for W in self.weyl_stack]
        return np.array(cols).T

    def one(self) -> "AlgebraElement":
        return AlgebraElement(self, identity(self.q))

    def element(self, matrix) -> "AlgebraElement":
        return AlgebraElement(self, matrix)


def make_torus(q: int, p: int = 1) -> TorusAlgebra:
    if int(q) != q or q < 2:
        raise ParameterError(f"q must be an integer >= 2, got {q}")
    q, p = int(q), int(p)
    if gcd(p, q) != 1:
        raise ParameterError(
            f"gcd(p, q) = gcd({p}, {q}) = {gcd(p, q)} != 1; "
            "clock and shift would not generate the full matrix algebra"
        )
    omega = complex(np.exp(2j * np.pi * p / q))
    clock = np.diag(omega ** np.arange(q)).astype(np.complex128)
    shift = np.roll(np.eye(q, dtype=np.complex128), -1, axis=0)
    theta = np.array([[0.0, p / q], [-p / q, 0.0]])
    return TorusAlgebra(q, p, omega, clock, shift, theta)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """An element of M_q held both as a matrix and as monomial coefficients.

    ``coeffs[m, n]`` is the coefficient of ``U^m V^n``.
    """

    torus: TorusAlgebra
    matrix: np.ndarray
    coeffs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        A = as_cmatrix(self.matrix)
        q = self.torus.q
        if A.shape != (q, q):
            raise ParameterError(f"element of M_{q} needs shape ({q}, {q}), got {A.shape}")
        A = A.copy()
        A.setflags(write=False)
        c = (self.torus.analysis @ A.reshape(-1)).reshape(q, q)
        c.setflags(write=False)
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_coeffs(cls, torus: TorusAlgebra, coeffs) -> "AlgebraElement":
        c = np.asarray(coeffs, dtype=np.complex128).reshape(-1)
        return cls(torus, (torus.synthesis @ c).reshape(torus.q, torus.q))

    def _wrap(self, M) -> "AlgebraElement":
        return AlgebraElement(self.torus, M)

    def __add__(self, other):
        if isinstance(other, AlgebraElement):
            return self._wrap(self.matrix + other.matrix)
        return self._wrap(self.matrix + other * identity(self.torus.q))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1) * other

    def __rsub__(self, other):
        return (-1) * self + other

    def __neg__(self):
        return self._wrap(-self.matrix)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return self._wrap(self.matrix @ other.matrix)
        return self._wrap(self.matrix * other)

    def __rmul__(self, other):
        return self._wrap(other * self.matrix)

    def __truediv__(self, scalar):
        return self._wrap(self.matrix / scalar)

    def star(self) -> "AlgebraElement":
        return self._wrap(self.matrix.conj().T)

    def is_self_adjoint(self, tol: float = 1e-12) -> bool:
        return op_norm(self.matrix - self.matrix.conj().T) <= tol * max(1.0, self.norm())

    def norm(self) -> float:
        return op_norm(self.matrix)

    def degree(self, tol: float = 1e-12) -> tuple[int, int]:
        """Largest |[m]_q| and |[n]_q| over the monomial support."""
        support = np.abs(self.coeffs) > tol * max(1.0, float(np.abs(self.coeffs).max()))
        if not support.any():
            return (0, 0)
        ex = np.abs(self.torus.exponents)
        return int(ex[0][support].max()), int(ex[1][support].max())

    def roundtrip_residual(self) -> float:
        rebuilt = (self.torus.synthesis @ self.coeffs.reshape(-1)).reshape(self.matrix.shape)
        return op_norm(rebuilt - self.matrix)


def weyl(t: TorusAlgebra, m: int, n: int) -> AlgebraElement:
    """The monomial ``U^m V^n`` (exponents taken mod q)."""
    return AlgebraElement(t, t.weyl_stack[t.index(m, n)])


def fourier_decompose(a: AlgebraElement, tol: float = ROUNDTRIP_TOL) -> dict[tuple[int, int], complex]:
    q = a.torus.q
    return {
        (m, n): complex(a.coeffs[m, n])
        for m in range(q)
        for n in range(q)
        if abs(a.coeffs[m, n]) > tol
    }


def fourier_assemble(t: TorusAlgebra, coeffs: Mapping[tuple[int, int], complex]) -> AlgebraElement:
    c = np.zeros((t.q, t.q), dtype=np.complex128)
    for (m, n), v in coeffs.items():
        c[m % t.q, n % t.q] += v
    return AlgebraElement.from_coeffs(t, c)


def tau(a: AlgebraElement) -> complex:
    return complex(np.trace(a.matrix) / a.torus.q)


def is_band_limited_pair(a: AlgebraElement, b: AlgebraElement) -> bool:
    """True when multiplying a and b never wraps an exponent around mod q."""
    q = a.torus.q
    da, db = a.degree(), b.degree()
    return all(2 * (x + y) < q for x, y in zip(da, db))


# ---------------------------------------------------------------- GNS space


@dataclass(frozen=True, eq=False)
class GnsOperator:
    matrix: np.ndarray
    tag: str = "general"

    def __matmul__(self, other: "GnsOperator") -> "GnsOperator":
        tag = self.tag if self.tag == other.tag and self.tag in ("left", "right") else "general"
        return GnsOperator(self.matrix @ other.matrix, tag)


def left_regular(a: AlgebraElement) -> GnsOperator:
    """rho(a): x -> a x on L^2(M_q, tau)."""
    t = a.torus
    M = t.analysis @ np.kron(a.matrix, identity(t.q)) @ t.synthesis
    return GnsOperator(M, "left")


def commutant_right(b: AlgebraElement) -> GnsOperator:
    """x -> x b on L^2(M_q, tau); equals J rho(b*) J."""
    t = b.torus
    M = t.analysis @ np.kron(identity(t.q), b.matrix.T) @ t.synthesis
    return GnsOperator(M, "right")


def modular_conj(T, torus: TorusAlgebra) -> GnsOperator:
    """The linear map T -> J T J, with J the antilinear involution x -> x*."""
    tag = "general"
    if isinstance(T, GnsOperator):
        tag = {"left": "right", "right": "left"}.get(T.tag, T.tag)
        T = T.matrix
    P = torus.star_matrix
    return GnsOperator(P @ np.conj(T) @ np.conj(P), tag)


def dual_action(s: int, t: int, a: AlgebraElement) -> AlgebraElement:
    """Z_q x Z_q dual action: U^m V^n -> w^(m s + n t) U^m V^n."""
    tor = a.torus
    m, n = np.meshgrid(np.arange(tor.q), np.arange(tor.q), indexing="ij")
    phase = tor.omega ** np.mod(m * s + n * t, tor.q)
    return AlgebraElement.from_coeffs(tor, a.coeffs * phase)


# ---------------------------------------------------------------- derivations


@dataclass(frozen=True, eq=False)
class DerivationFamily:
    """Fourier-multiplier derivations on M_q.

    Derivation k multiplies the coefficient of ``U^m V^n`` by
    ``i * (c_k1 [m]_q + c_k2 [n]_q)``; the standard family has ``c = identity``.
    """

    torus: TorusAlgebra
    directions: np.ndarray

    @property
    def d(self) -> int:
        return self.directions.shape[0]

    @cached_property
    def multipliers(self) -> np.ndarray:
        ex = self.torus.exponents
        return 1j * np.einsum("kc,cmn->kmn", self.directions, ex)

    def operator(self, k: int) -> np.ndarray:
        """The diagonal GNS operator of derivation k (0-based)."""
        return np.diag(self.multipliers[k].reshape(-1))


def derivation_family(t: TorusAlgebra, directions=None) -> DerivationFamily:
    D = np.eye(2) if directions is None else np.asarray(directions, dtype=float)
    if D.ndim != 2 or D.shape[1] != 2 or D.shape[0] < 1:
        raise ParameterError(f"directions must have shape (d, 2), got {D.shape}")
    return DerivationFamily(t, D)


def derivation(fam: DerivationFamily, k: int, a: AlgebraElement) -> AlgebraElement:
    """Apply the k-th derivation, ``1 <= k <= d``."""
    if not 1 <= k <= fam.d:
        raise ParameterError(f"derivation index must be in 1..{fam.d}, got {k}")
    return AlgebraElement.from_coeffs(a.torus, a.coeffs * fam.multipliers[k - 1])


# ---------------------------------------------------------------- Clifford

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class CliffordRep:
    d: int
    gammas: tuple

    @property
    def spinor_dim(self) -> int:
        return self.gammas[0].shape[0]

    def projections(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """``((1 + c_j)/2, (1 - c_j)/2)`` for 0-based j."""
        one = identity(self.spinor_dim)
        return (one + self.gammas[j]) / 2, (one - self.gammas[j]) / 2

    def anticommutation_residual(self) -> float:
        one = identity(self.spinor_dim)
        worst = 0.0
        for j, a in enumerate(self.gammas):
            for k, b in enumerate(self.gammas):
                target = 2 * one if j == k else 0 * one
                worst = max(worst, op_norm(a @ b + b @ a - target))
        return worst


def clifford_rep(d: int) -> CliffordRep:
    """Anticommuting Hermitian involutions c_1..c_d of size 2^ceil(d/2).

    Built from Jordan-Wigner strings of Pauli matrices for the even dimension
    2*ceil(d/2), keeping the first d; d = 2 gives exactly (sigma_1, sigma_2).
    """
    if d < 1:
        raise ParameterError(f"Clifford dimension must be >= 1, got {d}")
    m = (d + 1) // 2
    gammas = []
    for k in range(m):
        for s in (SIGMA_1, SIGMA_2):
            g = np.ones((1, 1), dtype=np.complex128)
            for pos in range(m):
                g = np.kron(g, SIGMA_3 if pos < k else s if pos == k else identity(2))
            gammas.append(g)
    return CliffordRep(d, tuple(gammas[:d]))


# ---------------------------------------------------------------- sampling


def random_element(
    t: TorusAlgebra,
    rng: np.random.Generator,
    band: int | None = None,
    hermitian: bool = False,
    scale: float = 1.0,
) -> AlgebraElement:
    """Random element with Gaussian monomial coefficients.

    ``band`` restricts the support to |[m]_q|, |[n]_q| <= band; for even q the
    edge exponent q/2 is excluded whenever a band is given.
    """
    c = rng.normal(size=(t.q, t.q)) + 1j * rng.normal(size=(t.q, t.q))
    if band is not None:
        ex = np.abs(t.exponents)
        mask = (ex[0] <= band) & (ex[1] <= band) & (2 * ex[0] < t.q) & (2 * ex[1] < t.q)
        c = c * mask
    a = AlgebraElement.from_coeffs(t, scale * c)
    if hermitian:
        a = (a + a.star()) / 2
    return a
