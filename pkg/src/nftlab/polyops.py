"""FFT-based polynomial and polynomial-matrix arithmetic.

Polynomials are 1-D coefficient arrays in ascending powers (of ``z**2``
throughout this package).  Matrix polynomials are stored as arrays of shape
``(rows, cols, ncoef)``; stacks of them as ``(count, rows, cols, ncoef)``.
"""

from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np

from .core import PolyMatrix

__all__ = [
    "CROSSOVER",
    "poly_mul",
    "polymat_mul",
    "tree_product",
    "stacked_tree_product",
    "middle_product",
    "series_inverse",
    "series_log",
    "series_exp",
    "series_exp_naive",
]

#: below this degree products are computed by direct convolution
CROSSOVER = 32


def _fft_size(n: int) -> int:
    return 1 << max(0, int(n - 1).bit_length())


def poly_mul(a, b) -> np.ndarray:
    """Product of two coefficient vectors (exact convolution up to roundoff)."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size == 0 or b.size == 0:
        return np.zeros(0, complex)
    n = a.size + b.size - 1
    if min(a.size, b.size) - 1 < CROSSOVER:
        return np.convolve(a, b)
    L = _fft_size(n)
    return np.fft.ifft(np.fft.fft(a, L) * np.fft.fft(b, L))[:n]


def _matconv(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Matrix-polynomial product on raw arrays ``(..., r, k, na)``, ``(..., k, c, nb)``."""
    na, nb = A.shape[-1], B.shape[-1]
    n = na + nb - 1
    if min(na, nb) - 1 < CROSSOVER:
        # schoolbook: loop over the shorter operand
        shape = np.broadcast_shapes(A.shape[:-3], B.shape[:-3])
        out = np.zeros(shape + (A.shape[-3], B.shape[-2], n), complex)
        if na <= nb:
            for s in range(na):
                out[..., s:s + nb] += np.einsum("...ik,...kjl->...ijl",
                                                A[..., s], B)
        else:
            for s in range(nb):
                out[..., s:s + na] += np.einsum("...ikl,...kj->...ijl",
                                                A, B[..., s])
        return out
    L = _fft_size(n)
    fa = np.fft.fft(A, L, axis=-1)
    fb = np.fft.fft(B, L, axis=-1)
    fc = np.einsum("...ikl,...kjl->...ijl", fa, fb)
    return np.fft.ifft(fc, axis=-1)[..., :n]


def polymat_mul(A: PolyMatrix, B: PolyMatrix) -> PolyMatrix:
    """Matrix product with polynomial entries; prefactor powers add."""
    if A.cols != B.rows:
        raise ValueError(f"dimension mismatch: {A.rows}x{A.cols} @ "
                         f"{B.rows}x{B.cols}")
    return PolyMatrix(_matconv(A.coeffs, B.coeffs),
                      A.prefactor_power + B.prefactor_power)


def middle_product(A: np.ndarray, P: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Coefficients ``lo..hi-1`` of ``A @ P`` for raw arrays.

    ``A`` has shape ``(r, k, na)`` and ``P`` shape ``(k, nb)``; only
    ``P[:, :hi]`` can influence the result.
    """
    P = P[:, :hi]
    na, nb = A.shape[-1], P.shape[-1]
    n = na + nb - 1
    if min(na, nb) - 1 < CROSSOVER:
        full = np.zeros((A.shape[0], n), complex)
        for s in range(na):
            full[:, s:s + nb] += A[:, :, s] @ P
    else:
        L = _fft_size(n)
        fa = np.fft.fft(A, L, axis=-1)
        fp = np.fft.fft(P, L, axis=-1)
        full = np.fft.ifft(np.einsum("ikl,kl->il", fa, fp), axis=-1)
    out = np.zeros((A.shape[0], hi - lo), complex)
    top = min(hi, n)
    if top > lo:
        out[:, :top - lo] = full[:, lo:top]
    return out


def stacked_tree_product(stack: np.ndarray) -> np.ndarray:
    """Ordered product ``stack[-1] @ ... @ stack[0]`` by a balanced tree.

    ``stack`` has shape ``(count, r, r, ncoef)``.  Each level multiplies all
    neighbouring pairs in one batched call, so the cost is dominated by
    ``O(log count)`` batched FFT products.
    """
    stack = np.asarray(stack, dtype=complex)
    if stack.ndim != 4 or stack.shape[1] != stack.shape[2]:
        raise ValueError("expected a stack of square matrix polynomials")
    r = stack.shape[1]
    ncoef = stack.shape[0] * (stack.shape[3] - 1) + 1
    while stack.shape[0] > 1:
        if stack.shape[0] % 2:
            eye = np.zeros((1, r, r, stack.shape[3]), complex)
            eye[0, np.arange(r), np.arange(r), 0] = 1.0
            stack = np.concatenate([stack, eye])
        stack = _matconv(stack[1::2], stack[0::2])
    # identity padding leaves trailing zero coefficients
    return stack[0, :, :, :ncoef]


def tree_product(Ms: Sequence[PolyMatrix], size: int | None = None,
                 balanced: bool = True) -> PolyMatrix:
    """Ordered product ``Ms[-1] @ ... @ Ms[0]``.

    Parameters
    ----------
    Ms : sequence of PolyMatrix
        Factors in order of application to a right-hand vector.
    size : int, optional
        Dimension of the identity returned for an empty list.
    balanced : bool
        Multiply pairwise along a balanced binary tree (default).  With
        ``False`` the product is accumulated sequentially, which is the
        maximally skewed tree; both give the same result up to roundoff.
    """
    Ms = list(Ms)
    if not Ms:
        if size is None:
            raise ValueError("size is required for an empty product")
        return PolyMatrix.identity(size)
    if not balanced:
        return reduce(lambda acc, M: polymat_mul(M, acc), Ms[1:], Ms[0])
    power = sum(M.prefactor_power for M in Ms)
    if len({M.coeffs.shape for M in Ms}) == 1:
        return PolyMatrix(stacked_tree_product(np.stack([M.coeffs for M in Ms])),
                          power)

    def rec(lo, hi):
        if hi - lo == 1:
            return Ms[lo].coeffs
        mid = (lo + hi) // 2
        return _matconv(rec(mid, hi), rec(lo, mid))

    return PolyMatrix(rec(0, len(Ms)), power)


# ---------------------------------------------------------------------------
# Truncated power series (mod x^n)
# ---------------------------------------------------------------------------

def _mul_trunc(a, b, n):
    return poly_mul(a[:n], b[:n])[:n]


def series_inverse(a, n: int) -> np.ndarray:
    """``1/a mod x^n`` by Newton iteration; requires ``a[0] != 0``."""
    a = np.asarray(a, dtype=complex)
    if a.size == 0 or a[0] == 0:
        raise ZeroDivisionError("series with zero constant term")
    x = np.array([1.0 / a[0]])
    k = 1
    while k < n:
        k = min(2 * k, n)
        ax = _mul_trunc(a, x, k)
        corr = -ax
        corr[0] += 2.0
        x = _mul_trunc(x, corr, k)
    return np.pad(x, (0, max(0, n - x.size)))[:n]


def series_log(a, n: int) -> np.ndarray:
    """``log a mod x^n`` for ``a[0] == 1``."""
    a = np.asarray(a, dtype=complex)
    if abs(a[0] - 1) > 1e-12:
        raise ValueError("series_log expects a unit constant term")
    a = np.pad(a, (0, max(0, n - a.size)))[:n]
    da = a[1:] * np.arange(1, n)
    q = _mul_trunc(da, series_inverse(a, n), n - 1)
    out = np.zeros(n, complex)
    out[1:] = q / np.arange(1, n)
    return out


def series_exp(g, n: int) -> np.ndarray:
    """``exp(g) mod x^n`` by Newton iteration ``y <- y (1 + g - log y)``.

    Cost ``O(n log n)`` with FFT products.
    """
    g = np.asarray(g, dtype=complex)
    g = np.pad(g, (0, max(0, n - g.size)))[:n]
    c0 = np.exp(g[0])
    h = g.copy()
    h[0] = 0.0
    y = np.ones(1, complex)
    k = 1
    while k < n:
        k = min(2 * k, n)
        yk = np.pad(y, (0, k - y.size))
        corr = h[:k] - series_log(yk, k)
        corr[0] += 1.0
        y = _mul_trunc(yk, corr, k)
    return c0 * y[:n]


def series_exp_naive(g, n: int) -> np.ndarray:
    """Quadratic reference for :func:`series_exp` via ``y' = g' y``."""
    g = np.asarray(g, dtype=complex)
    g = np.pad(g, (0, max(0, n - g.size)))[:n]
    y = np.zeros(n, complex)
    y[0] = np.exp(g[0])
    kg = np.arange(n) * g
    for j in range(1, n):
        y[j] = np.dot(kg[1:j + 1], y[j - 1::-1][:j]) / j
    return y
