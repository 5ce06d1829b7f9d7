"""Layer peeling: recover potential samples from discrete scattering data.

Peeling inverts the TR recurrence one layer at a time.  Given ``P_{n+1}``,
the two lowest coefficients fix ``R_{n+1}`` and ``R_n``; the stripped
inverse ``S_{n+1} = z^2 M_{n+1}^{-1}`` then yields ``P_n = z^{-2} S P_{n+1}``
where the division by ``z^2`` is exact.

Peeling is invariant under multiplying ``P`` by any scalar power series, so
intermediate vectors and matrices are rescaled freely to stay in range.
"""

from __future__ import annotations

import numpy as np

from .core import JostPolynomialPair, PolyMatrix, SampledPotential, TimeGrid
from .forward import tr_weight
from .polyops import _matconv, middle_product

__all__ = [
    "DegeneratePivotError",
    "PIVOT_TOL",
    "lp_step",
    "lp_sequential",
    "lp_fast",
]

#: relative tolerance on the pivots of a peeling step
PIVOT_TOL = 1e-14


class DegeneratePivotError(ArithmeticError):
    """A peeling pivot vanished; the input is not admissible."""

    def __init__(self, layer: int, detail: str = ""):
        self.layer = layer
        msg = f"degenerate pivot while peeling layer {layer}"
        super().__init__(msg + (f": {detail}" if detail else ""))


def _step_samples(P: np.ndarray, layer: int):
    """``(R_{n+1}, R_n)`` from the two lowest coefficients of ``P_{n+1}``."""
    p10, p20 = P[0, 0], P[1, 0]
    p11 = P[0, 1] if P.shape[1] > 1 else 0.0
    p21 = P[1, 1] if P.shape[1] > 1 else 0.0
    scale = max(np.abs(P[:, :2]).max(), np.finfo(float).tiny)
    if abs(p10) <= PIVOT_TOL * scale:
        raise DegeneratePivotError(layer, "P1 has a vanishing constant term")
    R1 = p20 / p10
    Q1 = -np.conj(R1)
    den = p10 - Q1 * p20
    if abs(den) <= PIVOT_TOL * scale:
        raise DegeneratePivotError(layer, "second pivot vanishes")
    chi = (p21 - R1 * p11) / den
    R0 = chi / (1.0 + np.sqrt(1.0 + abs(chi) ** 2))
    return R1, R0


def _stripped_inverse(R1: complex, R0: complex) -> np.ndarray:
    """Coefficients ``(2, 2, 2)`` of ``S_{n+1}(z^2) = S0 + z^2 S1``."""
    Q1, Q0 = -np.conj(R1), -np.conj(R0)
    theta0 = 1.0 + abs(Q0) ** 2
    S = np.empty((2, 2, 2), complex)
    S[:, :, 0] = [[R1 * Q0, -Q0], [-R1, 1.0]]
    S[:, :, 1] = [[1.0, -Q1], [-R0, Q1 * R0]]
    return S / theta0


def lp_step(P: JostPolynomialPair):
    """One layer-peeling step on ``P_{n+1}``.

    Returns
    -------
    R_np1, R_n : complex
        The two samples fixed by the lowest coefficients.
    Minv : PolyMatrix
        ``M_{n+1}(z^2)^{-1}`` as ``z^{-2} S_{n+1}(z^2)``; ``Minv`` applied to
        ``P_{n+1}`` gives ``P_n`` with an exact division by ``z^2``.

    Raises
    ------
    DegeneratePivotError
        If ``P1(0)`` or the second pivot vanishes to within ``PIVOT_TOL``.
    """
    arr = np.stack([P.c1, P.c2])
    R1, R0 = _step_samples(arr, P.n)
    return R1, R0, PolyMatrix(_stripped_inverse(R1, R0), prefactor_power=2)


def _peel_leaf(P: np.ndarray, k: int, top: int, need_C: bool):
    """Sequentially peel ``k`` layers from ``P`` (shape ``(2, k + 1)``).

    ``top`` is the index ``n + 1`` of the first layer.  Returns the ratio
    samples ``R_top .. R_{top-k+1}``, the last ``R_n`` from ``chi`` and the
    accumulated (rescaled) stripped inverse.
    """
    P = np.array(P[:, :k + 1], dtype=complex)
    C = np.zeros((2, 2, k + 1), complex)
    C[0, 0, 0] = C[1, 1, 0] = 1.0
    Rs = np.empty(k, complex)
    R0 = 0.0
    for i in range(k):
        L = k + 1 - i  # current length of P
        R1, R0 = _step_samples(P[:, :L], top - i)
        Rs[i] = R1
        S = _stripped_inverse(R1, R0)
        # P_new[j] = (S0 P)[j+1] + (S1 P)[j]
        new = S[:, :, 0] @ P[:, 1:L] + S[:, :, 1] @ P[:, :L - 1]
        P[:, :L - 1] = new / max(np.abs(new[:, 0]).max(), np.finfo(float).tiny)
        if need_C:
            d = i + 1  # current length of C
            Cn = np.zeros((2, 2, d + 1), complex)
            Cn[:, :, :d] = np.einsum("ij,jkl->ikl", S[:, :, 0], C[:, :, :d])
            Cn[:, :, 1:] += np.einsum("ij,jkl->ikl", S[:, :, 1], C[:, :, :d])
            C[:, :, :d + 1] = Cn / np.abs(Cn).max()
    return Rs, R0, C


def _peel(P: np.ndarray, k: int, top: int, need_C: bool, leaf: int):
    if k <= leaf:
        return _peel_leaf(P, k, top, need_C)
    k1 = k // 2
    Rs1, _, C1 = _peel(P[:, :k1 + 1], k1, top, True, leaf)
    # coefficients k1..k of C1 P form the truncated input of the right half
    P2 = middle_product(C1, P, k1, k + 1)
    P2 /= max(np.abs(P2[:, 0]).max(), np.finfo(float).tiny)
    Rs2, R0, C2 = _peel(P2, k - k1, top - k1, need_C, leaf)
    C = None
    if need_C:
        C = _matconv(C2, C1)
        C /= np.abs(C).max()
    return np.concatenate([Rs1, Rs2]), R0, C


def _to_potential(Rs: np.ndarray, grid: TimeGrid) -> SampledPotential:
    # Rs holds R_N .. R_1; the model has Q_0 = 0.  The last chi only soaks up
    # the truncation defect of the top coefficient, so it is not a sample.
    R = np.concatenate([[0.0], Rs[::-1]])
    Q = -np.conj(R)
    return SampledPotential(grid, Q / tr_weight(grid.h))


def _check(P: JostPolynomialPair, grid: TimeGrid) -> np.ndarray:
    if P.n != grid.N:
        raise ValueError(f"polynomial degree {P.n} does not match N={grid.N}")
    return np.stack([P.c1, P.c2])


def lp_sequential(P_N: JostPolynomialPair, grid: TimeGrid) -> SampledPotential:
    """Recover the TR samples ``q_0..q_N`` by ``N`` peeling steps, ``O(N^2)``.

    ``q_0`` is zero by construction.

    Raises :class:`DegeneratePivotError` naming the offending layer.
    """
    P = _check(P_N, grid)
    Rs, _, _ = _peel_leaf(P, grid.N, grid.N, need_C=False)
    return _to_potential(Rs, grid)


def lp_fast(P_N: JostPolynomialPair, grid: TimeGrid,
            leaf_size: int = 32) -> SampledPotential:
    """Divide-and-conquer layer peeling, ``O(N log^2 N)``.

    The first ``k`` layers depend only on coefficients ``0..k``.  The left
    half is peeled from the truncated input, its cumulative stripped inverse
    is applied to the input with one middle product, and the right half is
    peeled from the result.  Blocks of at most ``leaf_size`` layers are
    peeled sequentially (``leaf_size=1`` gives the plain binary recursion).
    """
    if leaf_size < 1:
        raise ValueError("leaf_size must be >= 1")
    P = _check(P_N, grid)
    Rs, _, _ = _peel(P, grid.N, grid.N, False, int(leaf_size))
    return _to_potential(Rs, grid)
