"""Flat and curved Dirac operators on the fuzzy torus and their Lip-norms.

Hilbert space: L^2(M_q, tau) (x) C^S with S the spinor dimension, the
algebra acting by ``pi(a) = rho(a) (x) 1``.

Coefficient convention. ``H.blocks[j][k]`` is the commutant operator that
multiplies the k-th derivation inside the j-th Clifford direction, so the
curved commutator is

    [D_H, pi(a)] = sum_j ( sum_k H.blocks[j][k] rho(d_k a) ) (x) c_j

and ``H.assembled`` is the block operator on L^2^d whose (j, k) block is
``H.blocks[j][k]``. Writing h_kj for the coefficient of d_k along c_j, block
(j, k) holds h_kj. With this layout
``|L_H(a) - L_H'(a)| <= d ||1 - H' H^-1|| L_H(a)`` holds for every a.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import BandLimitError, ContractError, NonInvertibleError, ParameterError
from .linalg import identity, min_singular_value, op_norm
from .torus import (
    AlgebraElement,
    CliffordRep,
    DerivationFamily,
    TorusAlgebra,
    clifford_rep,
    commutant_right,
    derivation,
    derivation_family,
    left_regular,
    modular_conj,
    random_element,
    weyl,
)

INVERTIBILITY_THRESHOLD = 1e-8
COMMUTANT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CoefficientMatrix:
    torus: TorusAlgebra
    blocks: tuple
    assembled: np.ndarray
    min_sv: float

    @property
    def d(self) -> int:
        return len(self.blocks)

    @cached_property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.assembled)

    def scaled(self, c: float) -> "CoefficientMatrix":
        return _build_coefficients(self.torus, [[c * b for b in row] for row in self.blocks])


def _build_coefficients(torus: TorusAlgebra, blocks) -> CoefficientMatrix:
    blocks = tuple(tuple(np.asarray(b, dtype=np.complex128) for b in row) for row in blocks)
    d = len(blocks)
    if d == 0 or any(len(row) != d for row in blocks):
        raise ParameterError("coefficient array must be square and nonempty")
    assembled = np.block([list(row) for row in blocks])
    sv = min_singular_value(assembled)
    if sv <= INVERTIBILITY_THRESHOLD:
        raise NonInvertibleError(sv, INVERTIBILITY_THRESHOLD)
    return CoefficientMatrix(torus, blocks, assembled, sv)


def assemble_H(entries: Sequence[Sequence[AlgebraElement]]) -> CoefficientMatrix:
    """Coefficient matrix whose (j, k) block is right multiplication by ``entries[j][k]``."""
    torus = entries[0][0].torus
    blocks = [[commutant_right(b).matrix for b in row] for row in entries]
    return _build_coefficients(torus, blocks)


def assemble_H_raw(torus: TorusAlgebra, blocks, tol: float = COMMUTANT_TOL) -> CoefficientMatrix:
    """Coefficient matrix from arbitrary q^2 x q^2 blocks, each checked to lie in rho(M_q)'."""
    gens = [left_regular(weyl(torus, 1, 0)).matrix, left_regular(weyl(torus, 0, 1)).matrix]
    for row in blocks:
        for b in row:
            b = np.asarray(b)
            for g in gens:
                r = op_norm(b @ g - g @ b)
                if r > tol * max(1.0, op_norm(b)):
                    raise ContractError(f"coefficient block does not commute with rho(A): residual {r:.2e}")
    return _build_coefficients(torus, blocks)


def identity_entries(torus: TorusAlgebra, d: int, scale: complex = 1.0) -> list[list[AlgebraElement]]:
    one, zero = torus.one(), 0 * torus.one()
    return [[scale * one if j == k else zero for k in range(d)] for j in range(d)]


def random_entries(
    torus: TorusAlgebra,
    d: int,
    rng: np.random.Generator,
    magnitude: float = 0.3,
    band: int | None = None,
) -> list[list[AlgebraElement]]:
    """Identity plus a random perturbation with normalized entries of size ``magnitude``."""
    rows = []
    for j in range(d):
        row = []
        for k in range(d):
            x = random_element(torus, rng, band=band)
            x = x / max(x.norm(), 1e-300)
            row.append(magnitude * x + (torus.one() if j == k else 0))
        rows.append(row)
    return rows


@dataclass(frozen=True, eq=False)
class CurvedDirac:
    torus: TorusAlgebra
    fam: DerivationFamily
    cliff: CliffordRep
    H: CoefficientMatrix

    def __post_init__(self):
        if not (self.fam.d == self.cliff.d == self.H.d):
            raise ParameterError(
                f"dimension mismatch: {self.fam.d} derivations, Clifford d={self.cliff.d}, H is {self.H.d}x{self.H.d}"
            )

    @property
    def d(self) -> int:
        return self.fam.d

    @property
    def hilbert_dim(self) -> int:
        return self.torus.dim * self.cliff.spinor_dim

    def pi(self, a: AlgebraElement) -> np.ndarray:
        return np.kron(left_regular(a).matrix, identity(self.cliff.spinor_dim))

    def with_H(self, H: CoefficientMatrix) -> "CurvedDirac":
        return CurvedDirac(self.torus, self.fam, self.cliff, H)

    def direction_blocks(self, a: AlgebraElement) -> list[np.ndarray]:
        """``A_j = sum_k H.blocks[j][k] rho(d_k a)`` for each Clifford direction j."""
        rho_da = [left_regular(derivation(self.fam, k + 1, a)).matrix for k in range(self.d)]
        return [sum(self.H.blocks[j][k] @ rho_da[k] for k in range(self.d)) for j in range(self.d)]

    @cached_property
    def matrix(self) -> np.ndarray:
        """D_H materialized: sum_j sum_k H.blocks[j][k] d_k (x) c_j."""
        ops = [self.fam.operator(k) for k in range(self.d)]
        return sum(
            np.kron(sum(self.H.blocks[j][k] @ ops[k] for k in range(self.d)), self.cliff.gammas[j])
            for j in range(self.d)
        )


def make_dirac(
    torus: TorusAlgebra,
    H: CoefficientMatrix | None = None,
    fam: DerivationFamily | None = None,
    cliff: CliffordRep | None = None,
) -> CurvedDirac:
    fam = derivation_family(torus) if fam is None else fam
    cliff = clifford_rep(fam.d) if cliff is None else cliff
    H = assemble_H(identity_entries(torus, fam.d)) if H is None else H
    return CurvedDirac(torus, fam, cliff, H)


def flat_dirac(torus: TorusAlgebra, fam: DerivationFamily, cliff: CliffordRep) -> np.ndarray:
    """D = sum_k d_k (x) c_k. Skew-adjoint: the multipliers i[s]_q are imaginary."""
    if fam.d != cliff.d:
        raise ParameterError(f"{fam.d} derivations but Clifford d={cliff.d}")
    return sum(np.kron(fam.operator(k), cliff.gammas[k]) for k in range(fam.d))


def curved_commutator(Dc: CurvedDirac, a: AlgebraElement) -> np.ndarray:
    """[D_H, pi(a)] given by sum_j A_j (x) c_j; this formula is the definition used throughout."""
    return sum(np.kron(A, g) for A, g in zip(Dc.direction_blocks(a), Dc.cliff.gammas))


def literal_commutator(Dc: CurvedDirac, a: AlgebraElement) -> np.ndarray:
    """D_H pi(a) - pi(a) D_H with D_H materialized.

    Agrees with :func:`curved_commutator` only on vectors whose products with
    a do not wrap exponents mod q.
    """
    P = Dc.pi(a)
    return Dc.matrix @ P - P @ Dc.matrix


def non_wrapping_columns(Dc: CurvedDirac, a: AlgebraElement) -> np.ndarray:
    """Indices of Hilbert-space basis vectors U^mV^n (x) e_s that a cannot wrap.

    A monomial x qualifies when deg(a) + |[s(x)]_q| < q/2 in both exponent
    coordinates, so every product of a monomial of a with x stays in band.
    """
    q = Dc.torus.q
    deg = np.array(a.degree())
    ex = np.abs(Dc.torus.exponents).reshape(2, -1)
    ok = np.all(2 * (deg[:, None] + ex) < q, axis=0)
    S = Dc.cliff.spinor_dim
    return np.flatnonzero(np.repeat(ok, S))


def literal_formula_residual(Dc: CurvedDirac, a: AlgebraElement) -> float:
    """||(literal - formula) restricted to non-wrapping columns||; 0 when none qualify."""
    cols = non_wrapping_columns(Dc, a)
    if cols.size == 0:
        return 0.0
    diff = literal_commutator(Dc, a) - curved_commutator(Dc, a)
    return op_norm(diff[:, cols])


def lip_norm(Dc: CurvedDirac, a: AlgebraElement) -> float:
    if not a.is_self_adjoint():
        raise ContractError("lip_norm is defined on self-adjoint elements only")
    return op_norm(curved_commutator(Dc, a))


def compression_bound(Dc: CurvedDirac, a: AlgebraElement) -> float:
    """max_j ||A_j||, a lower bound for L_H(a)."""
    return max(op_norm(A) for A in Dc.direction_blocks(a))


def _check_band(x: AlgebraElement, what: str) -> None:
    q = x.torus.q
    if any(4 * deg >= q for deg in x.degree()):
        raise BandLimitError(f"{what} has degree {x.degree()}, needs < q/4 = {q / 4} in each coordinate")


def ds_dirac(
    entries: Sequence[Sequence[AlgebraElement]],
    fam: DerivationFamily | None = None,
    cliff: CliffordRep | None = None,
) -> np.ndarray:
    """Materialized D'_H = sum_j (sum_k h d_k + 1/2 d_k(h)) (x) c_j.

    The zero-order term is the derivative of the commutant coefficient,
    obtained as ``J rho(d_k(b*)) J`` for ``h = J rho(b*) J``.
    """
    torus = entries[0][0].torus
    fam = derivation_family(torus) if fam is None else fam
    cliff = clifford_rep(fam.d) if cliff is None else cliff
    d = fam.d
    ops = [fam.operator(k) for k in range(d)]
    total = 0
    for j in range(d):
        block = 0
        for k in range(d):
            b = entries[j][k]
            h = commutant_right(b).matrix
            dh = modular_conj(left_regular(derivation(fam, k + 1, b.star())), torus).matrix
            block = block + h @ ops[k] + 0.5 * dh
        total = total + np.kron(block, cliff.gammas[j])
    return total


def ds_commutator_residual(
    entries: Sequence[Sequence[AlgebraElement]],
    a: AlgebraElement,
    fam: DerivationFamily | None = None,
    cliff: CliffordRep | None = None,
) -> float:
    """||[D'_H, pi(a)] - [D_H, pi(a)]|| with both operators materialized."""
    for row in entries:
        for b in row:
            _check_band(b, "coefficient entry")
    _check_band(a, "a")
    torus = a.torus
    fam = derivation_family(torus) if fam is None else fam
    cliff = clifford_rep(fam.d) if cliff is None else cliff
    Dc = CurvedDirac(torus, fam, cliff, assemble_H(entries))
    Dp = ds_dirac(entries, fam, cliff)
    P = Dc.pi(a)
    return op_norm((Dp @ P - P @ Dp) - literal_commutator(Dc, a))


# ---------------------------------------------------------------- sandwich D_K = K D K


@dataclass(frozen=True, eq=False)
class SpinorCommutant:
    """Invertible operator on L^2 (x) C^S commuting with pi(M_q)."""

    torus: TorusAlgebra
    matrix: np.ndarray
    min_sv: float

    @cached_property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.matrix)


def make_spinor_commutant(torus: TorusAlgebra, K, tol: float = COMMUTANT_TOL) -> SpinorCommutant:
    K = np.asarray(K, dtype=np.complex128)
    S = K.shape[0] // torus.dim
    if K.shape != (torus.dim * S, torus.dim * S):
        raise ParameterError(f"K has shape {K.shape}, not a multiple of the GNS dimension {torus.dim}")
    for g in (weyl(torus, 1, 0), weyl(torus, 0, 1)):
        P = np.kron(left_regular(g).matrix, identity(S))
        r = op_norm(K @ P - P @ K)
        if r > tol * max(1.0, op_norm(K)):
            raise ContractError(f"K does not commute with pi(A): residual {r:.2e}")
    sv = min_singular_value(K)
    if sv <= INVERTIBILITY_THRESHOLD:
        raise NonInvertibleError(sv, INVERTIBILITY_THRESHOLD)
    return SpinorCommutant(torus, K, sv)


def random_spinor_commutant(
    torus: TorusAlgebra,
    spinor_dim: int,
    rng: np.random.Generator,
    scale: float = 0.3,
    terms: int = 2,
) -> SpinorCommutant:
    """``1 + scale * sum_r R_{b_r} (x) G_r`` with each term normalized to norm one."""
    K = identity(torus.dim * spinor_dim)
    for _ in range(terms):
        R = commutant_right(random_element(torus, rng)).matrix
        G = rng.normal(size=(spinor_dim, spinor_dim)) + 1j * rng.normal(size=(spinor_dim, spinor_dim))
        T = np.kron(R, G)
        K = K + scale * T / op_norm(T)
    return make_spinor_commutant(torus, K)


def _pi(torus: TorusAlgebra, a: AlgebraElement, S: int) -> np.ndarray:
    return np.kron(left_regular(a).matrix, identity(S))


def sandwich_commutator(K: SpinorCommutant, D: np.ndarray, a: AlgebraElement) -> np.ndarray:
    """[K D K, pi(a)] computed literally."""
    S = D.shape[0] // K.torus.dim
    P = _pi(K.torus, a, S)
    DK = K.matrix @ D @ K.matrix
    return DK @ P - P @ DK


def sandwich_identity_residual(K: SpinorCommutant, D: np.ndarray, a: AlgebraElement) -> float:
    """||[KDK, pi(a)] - K [D, pi(a)] K||."""
    S = D.shape[0] // K.torus.dim
    P = _pi(K.torus, a, S)
    inner = D @ P - P @ D
    return op_norm(sandwich_commutator(K, D, a) - K.matrix @ inner @ K.matrix)


def sandwich_lip(K: SpinorCommutant, D: np.ndarray, a: AlgebraElement) -> float:
    if not a.is_self_adjoint():
        raise ContractError("sandwich_lip is defined on self-adjoint elements only")
    return op_norm(sandwich_commutator(K, D, a))
