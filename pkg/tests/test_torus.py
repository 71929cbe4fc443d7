import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from curvedtori.errors import ParameterError
from curvedtori.linalg import identity, op_norm
from curvedtori.torus import (
    SIGMA_1,
    SIGMA_2,
    clifford_rep,
    commutant_right,
    derivation,
    derivation_family,
    dual_action,
    fourier_assemble,
    fourier_decompose,
    left_regular,
    make_torus,
    modular_conj,
    random_element,
    symmetric_rep,
    tau,
    weyl,
)

coprime_pairs = st.integers(2, 8).flatmap(
    lambda q: st.tuples(st.just(q), st.sampled_from([p for p in range(1, q) if math.gcd(p, q) == 1]))
)
seeds = st.integers(0, 2**32 - 1)


def test_make_torus_q4_relation():
    t = make_torus(4, 1)
    assert t.omega == pytest.approx(1j)
    assert op_norm(t.shift @ t.clock - 1j * t.clock @ t.shift) < 1e-15


def test_make_torus_q2_generators():
    t = make_torus(2, 1)
    np.testing.assert_allclose(t.clock, np.diag([1, -1]), atol=1e-15)
    np.testing.assert_allclose(t.shift, [[0, 1], [1, 0]])
    assert op_norm(t.clock @ t.shift + t.shift @ t.clock) < 1e-15


def test_make_torus_rejects_non_coprime():
    with pytest.raises(ParameterError):
        make_torus(4, 2)


@given(coprime_pairs)
def test_generators_unitary_and_periodic(qp):
    t = make_torus(*qp)
    q = t.q
    for G in (t.clock, t.shift):
        assert op_norm(G.conj().T @ G - identity(q)) < 1e-12
        assert op_norm(np.linalg.matrix_power(G, q) - identity(q)) < 1e-12
    assert op_norm(t.shift @ t.clock - t.omega * t.clock @ t.shift) < 1e-12


@pytest.mark.parametrize("q", range(2, 9))
def test_monomials_orthonormal(q):
    for p in range(1, q):
        if math.gcd(p, q) != 1:
            continue
        W = make_torus(q, p).synthesis
        assert op_norm(W.conj().T @ W / q - identity(q * q)) < 1e-12


def test_symmetric_representative():
    assert [int(symmetric_rep(s, 4)) for s in range(4)] == [0, 1, 2, -1]
    assert [int(symmetric_rep(s, 5)) for s in range(5)] == [0, 1, 2, -2, -1]


def test_weyl_examples(t4):
    np.testing.assert_allclose(weyl(t4, 0, 0).matrix, identity(4))
    x, y = weyl(t4, 1, 1), weyl(t4, 1, 0)
    # direct products of the matrices differ by a power of omega
    xy, yx = x.matrix @ y.matrix, y.matrix @ x.matrix
    phase = np.vdot(yx.ravel(), xy.ravel()) / np.vdot(yx.ravel(), yx.ravel())
    assert abs(abs(phase) - 1) < 1e-12 and abs(phase - 1) > 0.5
    assert op_norm(xy - phase * yx) < 1e-12
    for m in range(4):
        for n in range(4):
            if (m, n) != (0, 0):
                assert abs(tau(weyl(t4, m, n))) < 1e-15


def test_fourier_examples(t4):
    assert fourier_decompose(t4.one()) == pytest.approx({(0, 0): 1})
    U = weyl(t4, 1, 0)
    d = fourier_decompose(U + U.star())
    assert set(d) == {(1, 0), (3, 0)}
    assert d[(1, 0)] == pytest.approx(1) and d[(3, 0)] == pytest.approx(1)
    a = random_element(t4, np.random.default_rng(3))
    b = fourier_assemble(t4, fourier_decompose(a, tol=0))
    assert np.max(np.abs(a.matrix - b.matrix)) < 1e-12


@given(coprime_pairs, seeds)
def test_roundtrip_and_trace(qp, seed):
    t = make_torus(*qp)
    rng = np.random.default_rng(seed)
    a, b = random_element(t, rng), random_element(t, rng)
    assert a.roundtrip_residual() <= 1e-12 * max(1.0, a.norm())
    assert abs(tau(a * b) - tau(b * a)) < 1e-14 * max(1.0, a.norm() * b.norm())
    assert tau(t.one()) == pytest.approx(1)


def test_tau_examples(t4):
    assert tau(t4.one()) == pytest.approx(1)
    assert abs(tau(weyl(t4, 1, 0))) < 1e-16


def test_left_regular_examples(t4):
    np.testing.assert_allclose(left_regular(t4.one()).matrix, identity(16), atol=1e-15)
    U, V = weyl(t4, 1, 0), weyl(t4, 0, 1)
    lhs = left_regular(U).matrix @ left_regular(V).matrix
    assert op_norm(lhs - left_regular(U * V).matrix) < 1e-12
    a = random_element(t4, np.random.default_rng(9))
    assert op_norm(left_regular(a).matrix) == pytest.approx(op_norm(a.matrix), rel=1e-10)


@given(coprime_pairs, seeds)
def test_commutant_structure(qp, seed):
    t = make_torus(*qp)
    rng = np.random.default_rng(seed)
    a, b = random_element(t, rng), random_element(t, rng)
    Ra, Lb = commutant_right(a).matrix, left_regular(b).matrix
    scale = max(1.0, a.norm() * b.norm())
    assert op_norm(Ra @ Lb - Lb @ Ra) <= 1e-10 * scale
    Ja = modular_conj(left_regular(a), t).matrix
    assert op_norm(Ja - commutant_right(a.star()).matrix) <= 1e-12 * max(1.0, a.norm())
    assert op_norm(Ja @ Lb - Lb @ Ja) <= 1e-10 * scale


def test_modular_conj_examples(t3):
    I9 = identity(9)
    np.testing.assert_allclose(modular_conj(I9, t3).matrix, I9, atol=1e-15)
    T = np.random.default_rng(2).normal(size=(9, 9)) + 1j
    assert op_norm(modular_conj(modular_conj(T, t3), t3).matrix - T) < 1e-12
    U = weyl(t3, 1, 0)
    JUJ = modular_conj(left_regular(U), t3).matrix
    assert op_norm(JUJ - commutant_right(U.star()).matrix) < 1e-12


def test_commutant_right_identity(t3):
    np.testing.assert_allclose(commutant_right(t3.one()).matrix, identity(9), atol=1e-15)


def test_dual_action_examples(t4):
    a = random_element(t4, np.random.default_rng(4))
    assert op_norm((dual_action(0, 0, a) - a).matrix) < 1e-12 * a.norm()
    U = weyl(t4, 1, 0)
    assert op_norm((dual_action(1, 0, U) - t4.omega * U).matrix) < 1e-12
    assert abs(tau(dual_action(2, 3, a)) - tau(a)) < 1e-14


@given(coprime_pairs, seeds, st.integers(0, 7), st.integers(0, 7))
def test_dual_action_is_trace_preserving_automorphism(qp, seed, s, u):
    t = make_torus(*qp)
    rng = np.random.default_rng(seed)
    a, b = random_element(t, rng), random_element(t, rng)
    lhs = dual_action(s, u, a * b)
    rhs = dual_action(s, u, a) * dual_action(s, u, b)
    assert op_norm((lhs - rhs).matrix) < 1e-11 * max(1.0, a.norm() * b.norm())
    assert op_norm((dual_action(s, u, a.star()) - dual_action(s, u, a).star()).matrix) < 1e-12 * max(1, a.norm())
    inv = dual_action(1, 0, dual_action(t.q - 1, 0, a))
    assert op_norm((inv - a).matrix) < 1e-12 * max(1.0, a.norm())


def test_derivation_examples(t4):
    fam = derivation_family(t4)
    U = weyl(t4, 1, 0)
    assert op_norm((derivation(fam, 1, U) - 1j * U).matrix) < 1e-14
    assert op_norm(derivation(fam, 1, t4.one()).matrix) < 1e-14
    a = (U + U.star()) / 2
    expected = 1j * (U - U.star()) / 2
    assert op_norm((derivation(fam, 1, a) - expected).matrix) < 1e-14


@given(coprime_pairs, seeds)
def test_derivation_star_and_trace(qp, seed):
    t = make_torus(*qp)
    fam = derivation_family(t)
    a = random_element(t, np.random.default_rng(seed), band=(t.q - 1) // 2)
    for k in (1, 2):
        da = derivation(fam, k, a)
        assert op_norm((derivation(fam, k, a.star()) - da.star()).matrix) < 1e-12 * max(1, a.norm())
        assert abs(tau(da)) < 1e-12 * max(1, a.norm())


@pytest.mark.parametrize("q", [3, 4, 5, 8])
def test_leibniz_exact_on_non_wrapping_monomials(q):
    t = make_torus(q, 1)
    fam = derivation_family(t)
    ex = t.exponents
    for i in range(t.dim):
        for j in range(t.dim):
            (m1, n1), (m2, n2) = divmod(i, q), divmod(j, q)
            s = [ex[0][m1, n1], ex[1][m1, n1], ex[0][m2, n2], ex[1][m2, n2]]
            if 2 * (abs(s[0]) + abs(s[2])) >= q or 2 * (abs(s[1]) + abs(s[3])) >= q:
                continue
            x, y = weyl(t, m1, n1), weyl(t, m2, n2)
            for k in (1, 2):
                r = derivation(fam, k, x * y) - derivation(fam, k, x) * y - x * derivation(fam, k, y)
                assert op_norm(r.matrix) <= 1e-11


def test_leibniz_fails_on_a_wrapping_pair_q4(t4):
    fam = derivation_family(t4)
    x, y = weyl(t4, 1, 0), weyl(t4, 2, 0)
    r = derivation(fam, 1, x * y) - derivation(fam, 1, x) * y - x * derivation(fam, 1, y)
    # [3]_4 = -1 while [1]_4 + [2]_4 = 3: residual |(-1) - 3| = 4
    assert op_norm(r.matrix) == pytest.approx(4.0)


def test_clifford_d2_is_pauli():
    c = clifford_rep(2)
    np.testing.assert_array_equal(c.gammas[0], [[0, 1], [1, 0]])
    np.testing.assert_array_equal(c.gammas[1], [[0, -1j], [1j, 0]])
    np.testing.assert_array_equal(c.gammas[0], SIGMA_1)
    np.testing.assert_array_equal(c.gammas[1], SIGMA_2)


@pytest.mark.parametrize("d", range(1, 7))
def test_clifford_relations(d):
    c = clifford_rep(d)
    assert c.spinor_dim == 2 ** math.ceil(d / 2)
    assert c.anticommutation_residual() <= 1e-12
    for j, g in enumerate(c.gammas):
        assert op_norm(g @ g - identity(c.spinor_dim)) <= 1e-12
        assert op_norm(g - g.conj().T) <= 1e-12
        p, qj = c.projections(j)
        assert op_norm(p @ p - p) <= 1e-12 and op_norm(qj @ qj - qj) <= 1e-12
        for k, h in enumerate(c.gammas):
            target = p if j == k else 0 * p
            assert op_norm(p @ h @ p - target) <= 1e-12
