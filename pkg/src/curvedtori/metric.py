"""Monge-Kantorovich distances, diameters, Lip-norm axioms and propinquity bounds.

A :class:`LipSeminorm` is ``a -> scale * ||T(a)||`` for a linear map T on
q x q matrices with ``T(1) = 0``. All optimization runs in coordinates with
respect to a tau-orthonormal basis of the traceless Hermitian matrices
(generalized Gell-Mann matrices with ``tr(E_i E_j) = q delta_ij``).

Distances and diameters are lower bounds: each comes with a feasible witness
``a`` (``L(a) = 1``) realizing the reported value.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp, softmax

from .dirac import CoefficientMatrix, CurvedDirac, SpinorCommutant, curved_commutator, lip_norm, make_dirac
from .errors import BandLimitError, ContractError, DegenerateSeminormError, ParameterError
from .linalg import identity, op_norm
from .torus import AlgebraElement, is_band_limited_pair

log = logging.getLogger(__name__)

KERNEL_THRESHOLD = 1e-8
# temperatures for the smoothed local polish after the restart phase
RESTART_CHUNK = 8
POLISH_TEMPS = (1e-3, 1e-5, 1e-7, 1e-9)
STATE_TOL = 1e-12


def task_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for task ``index`` under master ``seed``; independent of scheduling."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def hermitian_basis(q: int) -> np.ndarray:
    """Traceless Hermitian basis, shape (q^2 - 1, q, q), with tr(E_i E_j) = q delta_ij."""
    out = []
    c = np.sqrt(q / 2)
    for j in range(q):
        for k in range(j + 1, q):
            E = np.zeros((q, q), dtype=np.complex128)
            E[j, k] = E[k, j] = c
            out.append(E)
            E = np.zeros((q, q), dtype=np.complex128)
            E[j, k], E[k, j] = -1j * c, 1j * c
            out.append(E)
    for l in range(1, q):
        diag = np.zeros(q)
        diag[:l] = 1.0
        diag[l] = -l
        out.append(np.diag(diag * np.sqrt(q / (l * (l + 1)))).astype(np.complex128))
    return np.array(out).reshape(-1, q, q)


class LipSeminorm:
    def __init__(self, q: int, apply: Callable[[np.ndarray], np.ndarray], scale: float = 1.0, name: str = ""):
        self.q = int(q)
        self._apply = apply
        self.scale = float(scale)
        self.name = name

    @classmethod
    def from_dirac(cls, Dc: CurvedDirac, name: str = "") -> "LipSeminorm":
        return cls(Dc.torus.q, lambda A: curved_commutator(Dc, Dc.torus.element(A)), name=name or "L_H")

    def scaled(self, c: float) -> "LipSeminorm":
        out = LipSeminorm(self.q, self._apply, self.scale * c, f"{c:g}*{self.name}")
        if "images" in self.__dict__:
            out.__dict__["images"] = self.images
        return out

    @cached_property
    def basis(self) -> np.ndarray:
        return hermitian_basis(self.q)

    @cached_property
    def images(self) -> np.ndarray:
        """T(E_i) for each basis element, unscaled."""
        if self.q == 1:
            return np.zeros((0, 1, 1), dtype=np.complex128)
        return np.array([np.asarray(self._apply(E), dtype=np.complex128) for E in self.basis])

    @property
    def rank(self) -> int:
        return self.q * self.q - 1

    def __call__(self, a) -> float:
        A = a.matrix if isinstance(a, AlgebraElement) else np.asarray(a, dtype=np.complex128)
        return self.scale * op_norm(self._apply(A))

    def to_coords(self, a) -> np.ndarray:
        A = a.matrix if isinstance(a, AlgebraElement) else np.asarray(a)
        return np.real(np.einsum("rij,ji->r", self.basis, A)) / self.q

    def from_coords(self, x: np.ndarray) -> np.ndarray:
        return np.tensordot(x, self.basis, axes=1)

    def value(self, x: np.ndarray) -> float:
        return self.scale * op_norm(np.tensordot(x, self.images, axes=1))

    def batch_value_and_grad(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """L and a supergradient (top singular pair) at every row of X."""
        T = np.einsum("pr,rij->pij", X, self.images)
        U, s, Vh = np.linalg.svd(T)
        u, v = U[:, :, 0], Vh[:, 0, :].conj()
        g = np.real(np.einsum("pij,rij->pr", u.conj()[:, :, None] * v[:, None, :], self.images, optimize=True))
        return self.scale * s[:, 0], self.scale * g

    def value_and_grad(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        T = np.tensordot(x, self.images, axes=1)
        U, s, Vh = np.linalg.svd(T)
        u, v = U[:, 0], Vh[0].conj()
        g = np.real(np.einsum("i,rij,j->r", u.conj(), self.images, v))
        return self.scale * float(s[0]), self.scale * g


@dataclass(frozen=True, eq=False)
class State:
    """phi(a) = tau(density a), with tau the normalized trace (so tau(density) = 1)."""

    density: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.density, dtype=np.complex128)
        q = rho.shape[0]
        if rho.shape != (q, q) or op_norm(rho - rho.conj().T) > 1e-12 * max(1.0, op_norm(rho)):
            raise ContractError("state density must be a Hermitian square matrix")
        rho = (rho + rho.conj().T) / 2
        w = np.linalg.eigvalsh(rho)
        if w.min() < -STATE_TOL * q:
            raise ContractError(f"state density is not positive: min eigenvalue {w.min():.3e}")
        if abs(np.trace(rho).real / q - 1) > STATE_TOL * q:
            raise ContractError(f"state density has tau = {np.trace(rho).real / q}, expected 1")
        object.__setattr__(self, "density", rho)

    @property
    def q(self) -> int:
        return self.density.shape[0]

    def __call__(self, a) -> complex:
        A = a.matrix if isinstance(a, AlgebraElement) else np.asarray(a)
        return complex(np.trace(self.density @ A) / self.q)


def pure_state(vec) -> State:
    u = np.asarray(vec, dtype=np.complex128)
    u = u / np.linalg.norm(u)
    return State(len(u) * np.outer(u, u.conj()))


def random_state(q: int, rng: np.random.Generator, pure: bool = False) -> State:
    if pure:
        return pure_state(rng.normal(size=q) + 1j * rng.normal(size=q))
    G = rng.normal(size=(q, q)) + 1j * rng.normal(size=(q, q))
    rho = G @ G.conj().T
    return State(q * rho / np.trace(rho).real)


def _functional(L: LipSeminorm, phi: State, psi: State) -> np.ndarray:
    diff = (phi.density - psi.density) / L.q
    return np.real(np.einsum("rij,ji->r", L.basis, diff))


# ---------------------------------------------------------------- solver


@dataclass
class SolverResult:
    value: float
    witness: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def _ratio_ascent(L: LipSeminorm, objective, X0: np.ndarray, iters: int, eta0: float):
    """Supergradient ascent of objective(x) / L(x) for a batch of starting rows.

    Iterates are renormalized to L(x) = 1. ``objective(X)`` returns per-row
    values and gradients; each step moves along the tangential part of the
    ratio gradient by ``eta0 / k * |x|``. Returns the best value and point
    seen for every row.
    """
    Lx, gL = L.batch_value_and_grad(X0)
    X = X0 / Lx[:, None]
    val, gnum = objective(X)
    best_val, best_X = val.copy(), X.copy()
    for k in range(1, iters + 1):
        G = gnum - val[:, None] * gL
        gnorm = np.linalg.norm(G, axis=1)
        step = np.where(gnorm > 0, (eta0 / k) * np.linalg.norm(X, axis=1) / np.where(gnorm > 0, gnorm, 1), 0.0)
        X = X + step[:, None] * G
        # the gradient of L is scale invariant, so it can be taken before renormalizing
        Lx, gL = L.batch_value_and_grad(X)
        X = X / Lx[:, None]
        val, gnum = objective(X)
        better = val > best_val
        best_val = np.where(better, val, best_val)
        best_X[better] = X[better]
    return best_val, best_X


def _run_restarts(L: LipSeminorm, objective, X0: np.ndarray, iters: int, eta0: float, workers: int):
    """Ascent from every row of X0, split into contiguous chunks over ``workers`` threads."""
    # fixed-size chunks: the arithmetic of each chunk does not depend on the worker count
    idx = np.arange(len(X0))
    chunks = [idx[s : s + RESTART_CHUNK] for s in range(0, len(idx), RESTART_CHUNK)]

    def task(idx):
        return _ratio_ascent(L, objective, X0[idx], iters, eta0)

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(task, chunks))
    else:
        parts = [task(c) for c in chunks]
    vals = np.concatenate([p[0] for p in parts])
    X = np.concatenate([p[1] for p in parts])
    # argmax returns the first maximal index, independent of chunking
    return int(np.argmax(vals)), vals, X


def _soft_max(vals: np.ndarray, t: float) -> tuple[float, np.ndarray]:
    """t log sum exp(vals / t) and its weights; within t log(len) of max(vals)."""
    return t * logsumexp(vals / t), softmax(vals / t)


def _smooth_polish(L: LipSeminorm, numerator, x0: np.ndarray, temps=POLISH_TEMPS) -> np.ndarray:
    """Refine a ratio maximizer by L-BFGS on log-sum-exp smoothings.

    ``numerator(x, t)`` returns a smoothed numerator and its gradient. The
    seminorm is smoothed the same way over the singular values of T(x); the
    temperature is lowered geometrically, which removes the slow tail of the
    1/k supergradient phase at kinks of the spectral norm.
    """
    A = L.images
    A_flat = A.reshape(len(A), -1)

    def f(x, t):
        U, s, Vh = np.linalg.svd(np.einsum("r,rij->ij", x, A))
        lv, p = _soft_max(s, t)
        gl = np.real(A_flat @ ((U.conj() * p) @ Vh.conj()).ravel())
        nv, gn = numerator(x, t)
        return -nv / lv, -(gn / lv - nv * gl / lv**2)

    # work with ||T(x)|| = 1 (scale removed) so the result is equivariant under L -> cL
    def unit(x):
        return x * (L.scale / L.value(x))

    x = unit(x0)
    for t in temps:
        res = minimize(f, x, args=(t,), jac=True, method="L-BFGS-B", options={"maxiter": 1000, "ftol": 1e-15, "gtol": 1e-13})
        x = unit(res.x)
    return x / L.value(x)


def _require_kernel(L: LipSeminorm) -> None:
    gap = kernel_gap(L)
    if gap <= KERNEL_THRESHOLD:
        raise DegenerateSeminormError(f"seminorm has a nontrivial kernel beyond scalars (gap {gap:.3e})")


def mk_distance(
    L: LipSeminorm,
    phi: State,
    psi: State,
    restarts: int = 64,
    iterations: int = 100,
    seed: int = 0,
    workers: int = 1,
    eta0: float = 1.0,
    polish: bool = True,
) -> SolverResult:
    """Lower bound on sup{|phi(a) - psi(a)| : L(a) <= 1} with a feasible witness.

    Restart 0 starts from the functional's own direction, the others from
    Gaussian directions drawn from ``task_rng(seed, r)``. The best restart is
    then polished (see :func:`_smooth_polish`) and kept if it improves.
    """
    w = _functional(L, phi, psi)
    if np.linalg.norm(w) <= 1e-15:
        return SolverResult(0.0, np.zeros((L.q, L.q), dtype=np.complex128), {"shortcut": "phi == psi"})
    _require_kernel(L)
    X0 = np.array([w] + [task_rng(seed, r).normal(size=L.rank) for r in range(1, restarts)])
    X0 *= np.where(X0 @ w < 0, -1.0, 1.0)[:, None]

    def objective(X):
        return X @ w, np.broadcast_to(w, X.shape)

    best, vals, X = _run_restarts(L, objective, X0, iterations, eta0, workers)
    x, value = X[best], float(vals[best])
    ascent_value = value
    if polish:
        xp = _smooth_polish(L, lambda x, t: (x @ w, w), x)
        if xp @ w > value:
            x, value = xp, float(xp @ w)
    witness = L.from_coords(x)
    return SolverResult(
        value,
        witness,
        {
            "restarts": restarts,
            "iterations": iterations,
            "best_restart": best,
            "ascent_value": ascent_value,
            "witness_lip": L(witness),
            "restart_values": vals.tolist(),
            "lower_bound": True,
        },
    )


def diameter(
    L: LipSeminorm,
    restarts: int = 64,
    iterations: int = 100,
    seed: int = 0,
    workers: int = 1,
    eta0: float = 1.0,
    polish: bool = True,
) -> SolverResult:
    """Lower bound on the state-space diameter for mk_L.

    The supremum over state pairs is attained at pure states, and for a fixed
    a the best pair is the top and bottom eigenvectors, so the search
    maximizes (lambda_max(a) - lambda_min(a)) / L(a). The first q^2 - 1
    restarts start on the basis directions, the rest at random. The witness
    pure states are reported in the diagnostics.
    """
    if L.q == 1:
        return SolverResult(0.0, np.zeros((1, 1), dtype=np.complex128), {"shortcut": "single state"})
    _require_kernel(L)
    basis = L.basis
    X0 = np.array(
        [np.eye(L.rank)[r] if r < L.rank else task_rng(seed, r).normal(size=L.rank) for r in range(restarts)]
    )

    def objective(X):
        w, V = np.linalg.eigh(np.einsum("pr,rij->pij", X, basis))
        u, v = V[:, :, -1], V[:, :, 0]
        g = np.real(
            np.einsum("pij,rij->pr", u.conj()[:, :, None] * u[:, None, :] - v.conj()[:, :, None] * v[:, None, :], basis, optimize=True)
        )
        return w[:, -1] - w[:, 0], g

    best, vals, X = _run_restarts(L, objective, X0, iterations, eta0, workers)
    x, value = X[best], float(vals[best])
    ascent_value = value

    def spread(x):
        ev = np.linalg.eigvalsh(np.einsum("r,rij->ij", x, basis))
        return ev[-1] - ev[0]

    basis_flat = basis.reshape(len(basis), -1)

    def soft_spread(x, t):
        ev, V = np.linalg.eigh(np.einsum("r,rij->ij", x, basis))
        top, pt = _soft_max(ev, t)
        bot, pb = _soft_max(-ev, t)
        M = (V.conj() * (pt - pb)) @ V.T
        return top + bot, np.real(basis_flat @ M.ravel())

    if polish:
        xp = _smooth_polish(L, soft_spread, x)
        if spread(xp) > value:
            x, value = xp, float(spread(xp))
    witness = L.from_coords(x)
    w, V = np.linalg.eigh(witness)
    return SolverResult(
        value,
        witness,
        {
            "restarts": restarts,
            "iterations": iterations,
            "best_restart": best,
            "ascent_value": ascent_value,
            "top_state": V[:, -1],
            "bottom_state": V[:, 0],
            "witness_lip": L(witness),
            "lower_bound": True,
        },
    )


# ---------------------------------------------------------------- q = 2 grid oracles


def fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    r = np.sqrt(1 - z * z)
    phi = np.pi * (3 - np.sqrt(5)) * i
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def _grid_norms(L: LipSeminorm, X: np.ndarray, chunk: int = 20_000) -> np.ndarray:
    out = np.empty(len(X))
    for s in range(0, len(X), chunk):
        T = np.einsum("pr,rij->pij", X[s : s + chunk], L.images)
        out[s : s + chunk] = np.linalg.norm(T, ord=2, axis=(1, 2))
    return L.scale * out


def _grid_maximize(L: LipSeminorm, f, n_points: int, refine: int):
    X = fibonacci_sphere(n_points)
    cache = L.__dict__.setdefault("_grid_cache", {})
    if n_points not in cache:
        cache[n_points] = _grid_norms(L, X)
    vals = f(X) / cache[n_points]
    i = int(np.argmax(vals))
    best_val, best_x = float(vals[i]), X[i]
    radius = 4 * np.sqrt(4 * np.pi / n_points)
    # zoom: dense local grids around the incumbent, shrinking each round
    for _ in range(refine):
        e1 = np.cross(best_x, [1.0, 0, 0] if abs(best_x[0]) < 0.9 else [0, 1.0, 0])
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(best_x, e1)
        s = np.linspace(-radius, radius, 61)
        A, B = np.meshgrid(s, s)
        Y = best_x + A.reshape(-1, 1) * e1 + B.reshape(-1, 1) * e2
        Y /= np.linalg.norm(Y, axis=1, keepdims=True)
        v = f(Y) / _grid_norms(L, Y)
        j = int(np.argmax(v))
        if v[j] > best_val:
            best_val, best_x = float(v[j]), Y[j]
        radius /= 10
    return best_val, best_x


def mk_oracle_grid(
    L: LipSeminorm,
    phi: State,
    psi: State,
    n_points: int = 200_000,
    refine: int = 3,
    return_witness: bool = False,
):
    """Brute-force mk for q = 2 over the sphere of traceless Hermitian directions."""
    if L.q != 2:
        raise ParameterError("mk_oracle_grid supports q = 2 only")
    w = _functional(L, phi, psi)
    if np.linalg.norm(w) <= 1e-15:
        return (0.0, np.zeros(3)) if return_witness else 0.0
    val, x = _grid_maximize(L, lambda X: np.abs(X @ w), n_points, refine)
    return (val, x) if return_witness else val


def diameter_oracle_grid(L: LipSeminorm, n_points: int = 200_000, refine: int = 3) -> float:
    """Brute-force diameter for q = 2: max of spread(a) / L(a) over the sphere."""
    if L.q != 2:
        raise ParameterError("diameter_oracle_grid supports q = 2 only")

    def spread(X):
        ev = np.linalg.eigvalsh(np.einsum("pr,rij->pij", X, L.basis))
        return ev[:, -1] - ev[:, 0]

    return _grid_maximize(L, spread, n_points, refine)[0]


# ---------------------------------------------------------------- axioms


def kernel_gap(L: LipSeminorm) -> float:
    """Smallest singular value of a -> T(a) on traceless Hermitian a (real-linearized)."""
    if L.rank == 0:
        return 0.0
    flat = L.images.reshape(L.rank, -1)
    M = np.concatenate([flat.real, flat.imag], axis=1).T
    return L.scale * float(np.linalg.svd(M, compute_uv=False)[-1])


def leibniz_residual(L: LipSeminorm, a: AlgebraElement, b: AlgebraElement, check_band: bool = True):
    """Slack of the Leibniz inequality for the Jordan and Lie products.

    Returns ``(L(a)||b|| + ||a||L(b) - L(a o b), same - L({a, b}))``; both are
    nonnegative for a Leibniz seminorm.
    """
    for x, name in ((a, "a"), (b, "b")):
        if not x.is_self_adjoint():
            raise ContractError(f"{name} must be self-adjoint")
    if check_band and not is_band_limited_pair(a, b):
        raise BandLimitError(f"degrees {a.degree()} + {b.degree()} wrap around mod q = {a.torus.q}")
    rhs = L(a) * b.norm() + a.norm() * L(b)
    jordan = (a * b + b * a) / 2
    lie = (a * b - b * a) / 2j
    return rhs - L(jordan), rhs - L(lie)


# ---------------------------------------------------------------- bounds


def pairing_delta(H: CoefficientMatrix, Hp: CoefficientMatrix) -> tuple[float, float]:
    """(d ||1 - H' H^-1||, d ||1 - H H'^-1||)."""
    n = H.d
    one = identity(H.assembled.shape[0])
    return (
        n * op_norm(one - Hp.assembled @ H.inverse),
        n * op_norm(one - H.assembled @ Hp.inverse),
    )


def _as_op(X):
    return X.matrix if isinstance(X, SpinorCommutant) else np.asarray(X)


def sandwich_delta(H, K) -> float:
    """delta(K, H) = (||H K^-1|| + 1) ||1 - K^-1 H||."""
    Hm, Km = _as_op(H), _as_op(K)
    Ki = np.linalg.inv(Km)
    one = identity(Km.shape[0])
    return (op_norm(Hm @ Ki) + 1) * op_norm(one - Ki @ Hm)


def sandwich_delta_rigorous(H, K) -> float:
    """||H K^-1|| ||1 - K^-1 H|| + ||1 - H K^-1||.

    The two triangle-inequality terms kept apart; unlike :func:`sandwich_delta`
    this bounds |L_H - L_K| / L_K for every invertible commutant pair.
    """
    Hm, Km = _as_op(H), _as_op(K)
    Ki = np.linalg.inv(Km)
    one = identity(Km.shape[0])
    return op_norm(Hm @ Ki) * op_norm(one - Ki @ Hm) + op_norm(one - Hm @ Ki)


@dataclass
class BoundReport:
    delta_fwd: float
    delta_bwd: float
    diam_flat: float
    diam_H: float
    diam_Hprime: float
    lemma_bound: float
    closed_form_corrected: float
    closed_form_paper_literal: float
    empirical_ratio: float
    height: float = 0.0

    @property
    def delta(self) -> float:
        return max(self.delta_fwd, self.delta_bwd)


def empirical_ratio(
    H: CoefficientMatrix,
    Hp: CoefficientMatrix,
    samples: Sequence[AlgebraElement],
    fam=None,
    cliff=None,
) -> float:
    """max over samples of |L_H(a) - L_H'(a)| / L_H(a)."""
    if not samples:
        return 0.0
    D1 = make_dirac(H.torus, H, fam, cliff)
    D2 = D1.with_H(Hp)
    worst = 0.0
    for a in samples:
        l1 = lip_norm(D1, a)
        if l1 > 0:
            worst = max(worst, abs(l1 - lip_norm(D2, a)) / l1)
    return worst


def propinquity_bound(
    H: CoefficientMatrix,
    Hp: CoefficientMatrix,
    diam_flat: float,
    samples: Sequence[AlgebraElement] = (),
    fam=None,
    cliff=None,
) -> BoundReport:
    """Propinquity upper bounds between (A, L_H) and (A, L_H') through the identity bridge.

    The bridge has unit pivot, so its height is 0 and only the Lip-norm
    comparison enters. ``diam_H`` / ``diam_Hprime`` are the comparison-lemma
    bounds ``(1 + d ||1 - H^-1||) diam_flat``. ``closed_form_paper_literal``
    uses the reciprocals of those coefficients instead.
    """
    if diam_flat < 0:
        raise ParameterError("diam_flat must be nonnegative")
    n = H.d
    d_fwd, d_bwd = pairing_delta(H, Hp)
    delta = max(d_fwd, d_bwd)
    one = identity(H.assembled.shape[0])
    coef_H = 1 + n * op_norm(one - H.inverse)
    coef_Hp = 1 + n * op_norm(one - Hp.inverse)
    diam_H, diam_Hp = coef_H * diam_flat, coef_Hp * diam_flat
    height = 0.0
    lemma = max(delta * (1 + 0.5 * max(diam_H, diam_Hp)), height)
    corrected = delta * (1 + 0.5 * max(coef_H, coef_Hp) * diam_flat)
    literal = delta * (1 + 0.5 * max(1 / coef_H, 1 / coef_Hp) * diam_flat)
    ratio = empirical_ratio(H, Hp, samples, fam, cliff)
    return BoundReport(d_fwd, d_bwd, diam_flat, diam_H, diam_Hp, lemma, corrected, literal, ratio, height)


@dataclass
class ComparisonReport:
    delta: float
    mk_S: list
    mk_L: list
    ratios: list
    corrected_holds: bool
    literal_holds: bool
    literal_violations: int


def comparison_lemma_check(
    L: LipSeminorm,
    S: LipSeminorm,
    state_pairs: Sequence[tuple[State, State]],
    delta: float | None = None,
    rtol: float = 1e-6,
    n_samples: int = 200,
    seed: int = 0,
    **solver,
) -> ComparisonReport:
    """Test mk_S <= delta mk_L (and the reciprocal form) given L <= delta S.

    ``delta`` defaults to the largest L/S ratio over random traceless
    Hermitian samples, which is exact when S is a multiple of L.
    """
    rng = task_rng(seed, 0)
    X = rng.normal(size=(n_samples, L.rank))
    ratios_LS = [L.value(x) / S.value(x) for x in X]
    if delta is None:
        delta = max(ratios_LS)
    elif max(ratios_LS) > delta * (1 + rtol):
        raise ContractError(f"hypothesis L <= {delta} S fails on samples (max ratio {max(ratios_LS)})")
    mk_S, mk_L = [], []
    for phi, psi in state_pairs:
        mk_S.append(mk_distance(S, phi, psi, seed=seed, **solver).value)
        mk_L.append(mk_distance(L, phi, psi, seed=seed, **solver).value)
    ratios = [s / l if l > 0 else 0.0 for s, l in zip(mk_S, mk_L)]
    corrected = all(s <= delta * l * (1 + rtol) + 1e-12 for s, l in zip(mk_S, mk_L))
    violations = sum(s > l / delta * (1 + rtol) + 1e-12 for s, l in zip(mk_S, mk_L))
    if violations:
        log.info("reciprocal comparison form violated on %d of %d pairs", violations, len(mk_S))
    return ComparisonReport(delta, mk_S, mk_L, ratios, corrected, violations == 0, violations)


def convergence_experiment(
    H: CoefficientMatrix,
    schedule: Sequence[CoefficientMatrix],
    diam_flat: float,
    samples: Sequence[AlgebraElement] = (),
    fam=None,
    cliff=None,
) -> tuple[list[dict], float]:
    """Bound table for H_n -> H. Returns (rows, C) with C the largest
    closed_form_corrected / length_fn over the second half of the schedule."""
    rows = []
    one = identity(H.assembled.shape[0])
    for n, Hn in enumerate(schedule):
        rep = propinquity_bound(H, Hn, diam_flat, samples, fam, cliff)
        rows.append(
            {
                "n": n,
                "length_fn": op_norm(one - Hn.assembled @ H.inverse),
                "delta_fwd": rep.delta_fwd,
                "delta_bwd": rep.delta_bwd,
                "lemma_bound": rep.lemma_bound,
                "closed_form_corrected": rep.closed_form_corrected,
                "closed_form_paper_literal": rep.closed_form_paper_literal,
                "empirical_ratio": rep.empirical_ratio,
                "diam_flat": diam_flat,
            }
        )
    tail = [r for r in rows[len(rows) // 2 :] if r["length_fn"] > 0]
    C = max((r["closed_form_corrected"] / r["length_fn"] for r in tail), default=0.0)
    return rows, C
