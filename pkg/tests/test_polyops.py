import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nftlab.core import PolyMatrix
from nftlab.forward import tr_transfer_matrix
from nftlab.polyops import (CROSSOVER, middle_product, poly_mul, polymat_mul,
                            series_exp, series_exp_naive, series_inverse,
                            series_log, stacked_tree_product, tree_product)


def _schoolbook(a, b):
    out = np.zeros(len(a) + len(b) - 1, complex)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _crandn(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def _rel(a, b):
    return np.linalg.norm(np.ravel(a - b)) / np.linalg.norm(np.ravel(b))


def test_poly_mul_small_cases():
    np.testing.assert_allclose(poly_mul([1], [2.5]), [2.5])
    np.testing.assert_allclose(poly_mul([1, 1], [1, -1]), [1, 0, -1])
    assert poly_mul([], [1, 2]).size == 0


@pytest.mark.parametrize("n", [8, CROSSOVER + 5, 300])
def test_poly_mul_matches_schoolbook(n):
    rng = np.random.default_rng(n)
    a, b = _crandn(rng, n), _crandn(rng, n - 1)
    assert _rel(poly_mul(a, b), _schoolbook(a, b)) <= 1e-13


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 80), st.integers(1, 80), st.integers(1, 80), st.integers(0, 2**31))
def test_poly_mul_commutative_associative(la, lb, lc, seed):
    rng = np.random.default_rng(seed)
    a, b, c = _crandn(rng, la), _crandn(rng, lb), _crandn(rng, lc)
    assert _rel(poly_mul(a, b), poly_mul(b, a)) <= 1e-12
    assert _rel(poly_mul(poly_mul(a, b), c), poly_mul(a, poly_mul(b, c))) <= 1e-12


def test_polymat_mul_identity_and_constants():
    rng = np.random.default_rng(0)
    M = PolyMatrix(_crandn(rng, 2, 2, 4), prefactor_power=1)
    out = polymat_mul(PolyMatrix.identity(2), M)
    np.testing.assert_allclose(out.coeffs, M.coeffs)
    assert out.prefactor_power == 1
    A, B = _crandn(rng, 2, 2), _crandn(rng, 2, 2)
    np.testing.assert_allclose((PolyMatrix(A) @ PolyMatrix(B)).coeffs[:, :, 0], A @ B)
    with pytest.raises(ValueError):
        polymat_mul(PolyMatrix(_crandn(rng, 2, 3, 1)), PolyMatrix(_crandn(rng, 2, 2, 1)))


@pytest.mark.parametrize("deg", [3, 40])
def test_polymat_mul_matches_entrywise_schoolbook(deg):
    rng = np.random.default_rng(deg)
    A = PolyMatrix(_crandn(rng, 2, 2, deg + 1), 1)
    B = PolyMatrix(_crandn(rng, 2, 2, deg + 1), 2)
    C = polymat_mul(A, B)
    assert C.prefactor_power == 3
    for i in range(2):
        for j in range(2):
            ref = sum(_schoolbook(A.coeffs[i, k], B.coeffs[k, j]) for k in range(2))
            assert _rel(C.coeffs[i, j], ref) <= 1e-13


def test_tree_product_small_cases():
    rng = np.random.default_rng(1)
    M = PolyMatrix(_crandn(rng, 2, 2, 2))
    np.testing.assert_allclose(tree_product([M]).coeffs, M.coeffs)
    np.testing.assert_array_equal(tree_product([], size=2).coeffs[:, :, 0], np.eye(2))
    with pytest.raises(ValueError):
        tree_product([])
    Ms = [PolyMatrix(_crandn(rng, 2, 2, 2), 1) for _ in range(4)]
    ref = Ms[3] @ (Ms[2] @ (Ms[1] @ Ms[0]))
    out = tree_product(Ms)
    assert out.prefactor_power == 4
    assert _rel(out.coeffs, ref.coeffs) <= 1e-12


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 256), st.integers(0, 2**31))
def test_tree_shape_independence(count, seed):
    rng = np.random.default_rng(seed)
    # free-space layer diag(1, z^2) plus a perturbation, like a transfer matrix
    free = np.zeros((2, 2, 2))
    free[0, 0, 0] = free[1, 1, 1] = 1
    Ms = [PolyMatrix(free + 0.3 * _crandn(rng, 2, 2, 2)) for _ in range(count)]
    assert _rel(tree_product(Ms).coeffs,
                tree_product(Ms, balanced=False).coeffs) <= 1e-10


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 256), st.integers(0, 2**31))
def test_det_multiplicative_on_transfer_matrices(count, seed):
    rng = np.random.default_rng(seed)
    Q = 0.3 * _crandn(rng, count + 1)
    Q[0] = 0
    R = -np.conj(Q)
    Ms = [tr_transfer_matrix(Q[n], R[n], Q[n + 1], R[n + 1]) for n in range(count)]
    z = np.exp(2j * np.pi * rng.uniform(size=8))
    v = tree_product(Ms).evaluate(z)
    det = v[0, 0] * v[1, 1] - v[0, 1] * v[1, 0]
    ref = np.ones(8, complex)
    for M in Ms:
        w = M.evaluate(z)
        ref *= w[0, 0] * w[1, 1] - w[0, 1] * w[1, 0]
    assert np.max(np.abs(det - ref) / np.abs(ref)) <= 1e-10


def test_stacked_tree_odd_count():
    rng = np.random.default_rng(5)
    stack = _crandn(rng, 7, 4, 4, 3) * 0.3
    ref = stack[0]
    for k in range(1, 7):
        ref = polymat_mul(PolyMatrix(stack[k]), PolyMatrix(ref)).coeffs
    assert _rel(stacked_tree_product(stack), ref) <= 1e-12


@pytest.mark.parametrize("na,nb", [(5, 9), (60, 130)])
def test_middle_product(na, nb):
    rng = np.random.default_rng(na)
    A, P = _crandn(rng, 2, 2, na), _crandn(rng, 2, nb)
    full = np.zeros((2, na + nb - 1), complex)
    for i in range(2):
        for k in range(2):
            full[i] += _schoolbook(A[i, k], P[k])
    lo, hi = na - 1, nb
    np.testing.assert_allclose(middle_product(A, P, lo, hi), full[:, lo:hi], atol=1e-11)


def test_series_inverse_log_exp():
    rng = np.random.default_rng(2)
    n = 200
    a = np.concatenate([[1.0], 0.1 * _crandn(rng, n - 1)])
    inv = series_inverse(a, n)
    prod = poly_mul(a, inv)[:n]
    np.testing.assert_allclose(prod, np.eye(1, n)[0], atol=1e-12)
    g = np.concatenate([[0.3 - 0.2j], 0.05 * _crandn(rng, n - 1)])
    e = series_exp(g, n)
    assert _rel(e, series_exp_naive(g, n)) <= 1e-12
    lg = series_log(e / e[0], n)
    np.testing.assert_allclose(lg[1:], g[1:], atol=1e-12)
    with pytest.raises(ZeroDivisionError):
        series_inverse([0, 1], 3)


def test_series_exp_constant():
    out = series_exp([np.log(0.5)], 6)
    np.testing.assert_allclose(out, [0.5, 0, 0, 0, 0, 0], atol=1e-16)
