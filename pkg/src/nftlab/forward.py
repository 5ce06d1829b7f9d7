"""Discrete forward scattering.

Two one-parameter families of discrete Zakharov-Shabat systems are
implemented: the exponential trapezoidal rule (TR) and the exponential
m-step implicit Adams methods IA_m, m = 1, 2, 3.  Both write the Jost
solution ``phi`` as ``phi_n = z^{ell_-} z^{-n} P_n(z^2)`` and propagate the
polynomial vector ``P_n`` through polynomial transfer matrices.

Scaling: TR uses ``Q_n = (h/2) q_n`` and IA_m uses ``Q_n = h beta_m q_n``,
so IA_1 and TR are the same scheme.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

from .core import JostPolynomialPair, PolyMatrix, SampledPotential, TimeGrid
from .polyops import stacked_tree_product

__all__ = [
    "IACoefficients",
    "IA_TABLE",
    "AdmissibilityError",
    "SingularLayerError",
    "tr_weight",
    "tr_transfer_matrix",
    "tr_transfer_stack",
    "forward_scatter_tr",
    "ia_block_transfer",
    "ia_transfer_stack",
    "forward_scatter_ia",
    "forward_scatter",
    "ReflectionSamples",
    "reflection_samples",
    "scattering_coefficients",
    "jost_pointwise",
    "norming_constants",
]

Mode = Literal["sequential", "fast"]


class AdmissibilityError(ValueError):
    """Potential violates ``|Q_n| < 1`` for the chosen scheme."""


class SingularLayerError(ArithmeticError):
    """A layer with ``Theta = 0``."""


@dataclass(frozen=True)
class IACoefficients:
    """Implicit Adams weights ``beta_0..beta_m`` (Hairer-Norsett-Wanner)."""

    m: int
    beta: tuple
    order: int

    @property
    def beta_float(self) -> np.ndarray:
        return np.array([float(b) for b in self.beta])

    @property
    def beta_bar(self) -> np.ndarray:
        """``beta / beta_m``; the last entry is exactly 1."""
        return np.array([float(b / self.beta[-1]) for b in self.beta])

    @classmethod
    def get(cls, m: int) -> "IACoefficients":
        try:
            return IA_TABLE[m]
        except KeyError:
            raise ValueError(f"IA_m is available for m in 1..3, got {m}")


IA_TABLE = {
    1: IACoefficients(1, (Fraction(1, 2), Fraction(1, 2)), 2),
    2: IACoefficients(2, (Fraction(-1, 12), Fraction(8, 12), Fraction(5, 12)), 3),
    3: IACoefficients(3, (Fraction(1, 24), Fraction(-5, 24), Fraction(19, 24),
                          Fraction(9, 24)), 4),
}


def tr_weight(h: float) -> float:
    """Scale factor of the TR scheme, ``Q_n = tr_weight(h) * q_n``."""
    return 0.5 * h


def _check_admissible(Q: np.ndarray) -> None:
    bad = np.flatnonzero(np.abs(Q) >= 1.0)
    if bad.size:
        raise AdmissibilityError(
            f"|Q_n| >= 1 at sample {bad[0]} (|Q|={abs(Q[bad[0]]):.3g}); "
            "refine the grid")


def _scaled(p: SampledPotential, weight: float):
    Q = weight * np.array(p.q)
    Q[0] = 0.0
    _check_admissible(Q)
    R = -np.conj(Q)
    return Q, R, 1.0 - Q * R


# ---------------------------------------------------------------------------
# Trapezoidal rule
# ---------------------------------------------------------------------------

def tr_transfer_matrix(Q_n, R_n, Q_np1, R_np1) -> PolyMatrix:
    """Transfer matrix ``z^{-1} M_{n+1}(z^2)`` of one TR layer."""
    theta = 1.0 - Q_np1 * R_np1
    if theta == 0:
        raise SingularLayerError("Theta_{n+1} = 0")
    c = np.zeros((2, 2, 2), complex)
    c[:, :, 0] = [[1.0, Q_n], [R_np1, R_np1 * Q_n]]
    c[:, :, 1] = [[Q_np1 * R_n, Q_np1], [R_n, 1.0]]
    return PolyMatrix(c / theta, prefactor_power=1)


def tr_transfer_stack(Q: np.ndarray, R: np.ndarray) -> np.ndarray:
    """All ``N`` TR layers as an array of shape ``(N, 2, 2, 2)``."""
    Qa, Ra, Qb, Rb = Q[:-1], R[:-1], Q[1:], R[1:]
    theta = 1.0 - Qb * Rb
    one = np.ones_like(Qa)
    c = np.empty((Qa.size, 2, 2, 2), complex)
    c[:, 0, 0, 0], c[:, 0, 1, 0] = one, Qa
    c[:, 1, 0, 0], c[:, 1, 1, 0] = Rb, Rb * Qa
    c[:, 0, 0, 1], c[:, 0, 1, 1] = Qb * Ra, Qb
    c[:, 1, 0, 1], c[:, 1, 1, 1] = Ra, one
    return c / theta[:, None, None, None]


def forward_scatter_tr(p: SampledPotential,
                       mode: Mode = "fast") -> JostPolynomialPair:
    """Jost polynomials ``P_N`` of the TR discretisation.

    ``Q_0`` is set to zero.  ``mode='fast'`` multiplies the ``N`` transfer
    matrices along a balanced tree (``O(N log^2 N)``); ``'sequential'``
    propagates ``P_n`` layer by layer (``O(N^2)``).
    """
    Q, R, _ = _scaled(p, tr_weight(p.grid.h))
    N = p.grid.N
    if mode == "fast":
        prod = stacked_tree_product(tr_transfer_stack(Q, R))
        return JostPolynomialPair(N, prod[0, 0, :N + 1], prod[1, 0, :N + 1])
    if mode != "sequential":
        raise ValueError(f"unknown mode {mode!r}")
    P = np.zeros((2, N + 1), complex)
    P[0, 0] = 1.0
    for n in range(N):
        Qa, Ra, Qb, Rb = Q[n], R[n], Q[n + 1], R[n + 1]
        L = n + 1
        x, y = P[0, :L].copy(), P[1, :L].copy()
        inv = 1.0 / (1.0 - Qb * Rb)
        P[0, :L] = (x + Qa * y) * inv
        P[1, :L] = Rb * (x + Qa * y) * inv
        P[0, 1:L + 1] += (Qb * Ra * x + Qb * y) * inv
        P[1, 1:L + 1] += (Ra * x + y) * inv
    return JostPolynomialPair(N, P[0], P[1])


# ---------------------------------------------------------------------------
# Implicit Adams
# ---------------------------------------------------------------------------

def _ia_blocks(Qw: np.ndarray, Rw: np.ndarray, coeffs: IACoefficients) -> np.ndarray:
    """Block transfer matrices for windows ``Qw[..., 0..m]`` (scaled samples).

    Returns an array of shape ``batch + (2m, 2m, m + 1)``.
    """
    m = coeffs.m
    bb = coeffs.beta_bar
    batch = Qw.shape[:-1]
    out = np.zeros(batch + (2 * m, 2 * m, m + 1), complex)
    Qe, Re = Qw[..., m], Rw[..., m]
    theta = 1.0 - Qe * Re
    if np.any(theta == 0):
        raise SingularLayerError("Theta_{n+m} = 0")
    # M^(1)
    Qp, Rp = Qw[..., m - 1], Rw[..., m - 1]
    b1 = bb[m - 1]
    out[..., 0, 0, 0] = 1.0
    out[..., 0, 0, 1] = b1 * Rp * Qe
    out[..., 0, 1, 0] = b1 * Qp
    out[..., 0, 1, 1] = Qe
    out[..., 1, 0, 0] = Re
    out[..., 1, 0, 1] = b1 * Rp
    out[..., 1, 1, 0] = b1 * Re * Qp
    out[..., 1, 1, 1] = 1.0
    # beta_bar_{m-j} M^(j), j = 2..m, acting on P_{n+m-j}
    for j in range(2, m + 1):
        w = bb[m - j]
        Qs, Rs = Qw[..., m - j], Rw[..., m - j]
        c = 2 * (j - 1)
        out[..., 0, c, j] = w * Rs * Qe
        out[..., 0, c + 1, 0] = w * Qs
        out[..., 1, c, j] = w * Rs
        out[..., 1, c + 1, 0] = w * Re * Qs
    out[..., :2, :, :] /= theta[..., None, None, None]
    # identity on the sub-diagonal shifts the history down
    for j in range(1, m):
        out[..., 2 * j, 2 * (j - 1), 0] = 1.0
        out[..., 2 * j + 1, 2 * (j - 1) + 1, 0] = 1.0
    return out


def ia_block_transfer(q_window, h: float, coeffs: IACoefficients | int) -> PolyMatrix:
    """Block transfer matrix ``M_{n+m}(z^2)`` from samples ``q_n..q_{n+m}``."""
    if not isinstance(coeffs, IACoefficients):
        coeffs = IACoefficients.get(coeffs)
    q_window = np.asarray(q_window, dtype=complex)
    if q_window.shape != (coeffs.m + 1,):
        raise ValueError(f"need a window of {coeffs.m + 1} samples")
    Q = h * float(coeffs.beta[-1]) * q_window
    R = -np.conj(Q)
    return PolyMatrix(_ia_blocks(Q, R, coeffs))


def _ia_windows(p: SampledPotential, coeffs: IACoefficients):
    m = coeffs.m
    Q = h_beta(p.grid.h, coeffs) * np.array(p.q)
    Q[0] = 0.0
    _check_admissible(Q)
    # q_n = 0 for the m - 1 virtual samples left of the grid
    Qp = np.concatenate([np.zeros(m - 1, complex), Q])
    idx = np.arange(p.grid.N)[:, None] + np.arange(m + 1)[None, :]
    Qw = Qp[idx]
    return Qw, -np.conj(Qw)


def h_beta(h: float, coeffs: IACoefficients) -> float:
    return h * float(coeffs.beta[-1])


def ia_transfer_stack(p: SampledPotential, m: int) -> np.ndarray:
    """All ``N`` block transfer matrices, shape ``(N, 2m, 2m, m + 1)``."""
    coeffs = IACoefficients.get(m)
    Qw, Rw = _ia_windows(p, coeffs)
    return _ia_blocks(Qw, Rw, coeffs)


def forward_scatter_ia(p: SampledPotential, m: int = 3,
                       mode: Mode = "fast") -> JostPolynomialPair:
    """Jost polynomials of the exponential implicit Adams scheme IA_m.

    ``a_N = P_1`` and ``b_N = (z^2)^{-ell_+} P_2`` are the discrete
    scattering coefficients.
    """
    N = p.grid.N
    blocks = ia_transfer_stack(p, m)
    if mode == "fast":
        prod = stacked_tree_product(blocks)
        # initial stacked vector (1, 0, 1, 0, ...)
        top = prod[:2, 0::2, :].sum(axis=1)
        return JostPolynomialPair(N, top[0, :N + 1], top[1, :N + 1])
    if mode != "sequential":
        raise ValueError(f"unknown mode {mode!r}")
    hist = np.zeros((m, 2, N + 1), complex)
    hist[:, 0, 0] = 1.0
    for n in range(N):
        B = blocks[n]
        L = n + 1  # active length of P_n
        new = np.zeros((2, min(L + 1, N + 1)), complex)
        for j in range(m):
            blk = B[:2, 2 * j:2 * j + 2, :]
            Pj = hist[j, :, :L]
            for k in range(blk.shape[-1]):
                if not np.any(blk[:, :, k]):
                    continue
                span = min(L, new.shape[1] - k)
                new[:, k:k + span] += blk[:, :, k] @ Pj[:, :span]
        hist[1:] = hist[:-1]
        hist[0] = 0.0
        hist[0, :, :new.shape[1]] = new
    return JostPolynomialPair(N, hist[0, 0], hist[0, 1])


def forward_scatter(p: SampledPotential, scheme: str = "ia3",
                    mode: Mode = "fast") -> JostPolynomialPair:
    """Dispatch on ``scheme`` in ``{'tr', 'ia1', 'ia2', 'ia3'}``."""
    if scheme == "tr":
        return forward_scatter_tr(p, mode)
    if scheme in ("ia1", "ia2", "ia3"):
        return forward_scatter_ia(p, int(scheme[-1]), mode)
    raise ValueError(f"unknown scheme {scheme!r}")


# ---------------------------------------------------------------------------
# Spectral quantities
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ReflectionSamples:
    """Discrete scattering data on ``xi_j = j pi / (2 M h)``, ``j = -M..M-1``.

    ``near_zero`` flags samples where ``|a_N|`` is too small for the quotient
    to be trusted; those entries of ``rho`` are still returned.
    """

    xi: np.ndarray
    a: np.ndarray
    b: np.ndarray
    rho: np.ndarray
    near_zero: np.ndarray


def _eval_on_circle(c: np.ndarray, M: int) -> np.ndarray:
    """Values at ``exp(i pi j / M)`` for ``j = -M..M-1``."""
    L = 2 * M
    folded = np.zeros(L, complex)
    np.add.at(folded, np.arange(c.size) % L, c)
    vals = np.fft.ifft(folded) * L  # index j -> exp(+2 pi i j k / L)
    j = np.arange(-M, M)
    return vals[j % L]


def reflection_samples(P: JostPolynomialPair, grid: TimeGrid, M: int,
                       tol: float = 1e-12) -> ReflectionSamples:
    """``rho = b_N / a_N`` on ``2M`` equispaced points of ``[-pi/2h, pi/2h)``.

    Both polynomials are evaluated with one length-``2M`` FFT each.
    """
    if P.n != grid.N:
        raise ValueError("polynomial degree does not match the grid")
    h = grid.h
    j = np.arange(-M, M)
    xi = j * np.pi / (2 * M * h)
    a = _eval_on_circle(P.c1, M)
    b = np.exp(-2j * xi * grid.T2) * _eval_on_circle(P.c2, M)
    scale = max(np.abs(a).max(), np.abs(b).max(), 1e-300)
    near_zero = np.abs(a) <= tol * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = b / a
    return ReflectionSamples(xi, a, b, rho, near_zero)


def scattering_coefficients(P: JostPolynomialPair, grid: TimeGrid, xi):
    """``(a_N(xi), b_N(xi))`` at arbitrary real or complex ``xi`` (Horner)."""
    xi = np.asarray(xi, dtype=complex)
    z2 = np.exp(2j * xi * grid.h)
    p1, p2 = P.evaluate(z2)
    return p1, np.exp(-2j * xi * grid.T2) * p2


def jost_pointwise(p: SampledPotential, zeta, m: int = 1, stop: int | None = None):
    """Run the scheme's recurrence at fixed spectral points.

    Returns ``(P, logscale)`` with ``P`` of shape ``(2, len(zeta))`` such that
    ``P_stop(z^2) = exp(logscale) * P``; the running rescaling keeps the
    iteration clear of overflow for ``Im zeta > 0``.  ``m = 1`` is the TR
    scheme.
    """
    coeffs = IACoefficients.get(m)
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
    z2 = np.exp(2j * zeta * p.grid.h)
    Qw, Rw = _ia_windows(p, coeffs)
    stop = p.grid.N if stop is None else int(stop)
    hist = np.zeros((m, 2, zeta.size), complex)
    hist[:, 0, :] = 1.0
    logscale = np.zeros(zeta.size)
    powers = z2[None, :] ** np.arange(m + 1)[:, None]
    for n in range(stop):
        blk = _ia_blocks(Qw[n], Rw[n], coeffs)[:2]  # (2, 2m, m+1)
        vals = np.einsum("ijk,kz->ijz", blk, powers)
        new = np.einsum("ijz,jz->iz", vals, hist.reshape(2 * m, -1))
        hist[1:] = hist[:-1]
        hist[0] = new
        s = np.abs(hist).max(axis=(0, 1))
        s = np.where(s > 0, s, 1.0)
        hist /= s
        logscale += np.log(s)
    return hist[0], logscale


def _reversed(p: SampledPotential) -> SampledPotential:
    grid = TimeGrid(-p.grid.T2, -p.grid.T1, p.grid.N)
    return SampledPotential(grid, np.conj(p.q[::-1]))


def norming_constants(p: SampledPotential, eigenvalues, m: int = 3,
                      method: Literal["bidirectional", "polynomial"] = "bidirectional",
                      match: int | None = None) -> np.ndarray:
    """Norming constants ``b_k`` at given eigenvalues.

    ``method='polynomial'`` evaluates ``b_N(zeta_k) = (z_k^2)^{-ell_+}
    P_2^{(N)}(z_k^2)``.  Any deviation of ``zeta_k`` from a root of ``a_N``
    is amplified by the growth of the Jost solution across the domain, so
    the default ``'bidirectional'`` instead propagates ``phi`` from the left
    and ``psi`` from the right up to the sample ``match`` (default: peak of
    ``|q|``) and takes the least-squares ratio ``phi = b psi`` there.
    """
    zeta = np.atleast_1d(np.asarray(eigenvalues, dtype=complex))
    if zeta.size == 0:
        return np.zeros(0, complex)
    if np.any(zeta.imag <= 0):
        raise ValueError("eigenvalues must lie in the upper half plane")
    grid = p.grid
    if method == "polynomial":
        P, ls = jost_pointwise(p, zeta, m)
        with np.errstate(divide="ignore"):
            logp2 = np.log(P[1].astype(complex))
        return np.exp(-2j * zeta * grid.T2 + ls + logp2)
    if method != "bidirectional":
        raise ValueError(f"unknown method {method!r}")
    n = int(np.argmax(np.abs(p.q))) if match is None else int(match)
    n = min(max(n, 1), grid.N - 1)
    Pf, lf = jost_pointwise(p, zeta, m, stop=n)
    Pb, lb = jost_pointwise(_reversed(p), zeta, m, stop=grid.N - n)
    # phi(t_n) = e^{-i zeta t_n} Pf,  psi(t_n) = e^{i zeta t_n} sigma_1 Pb
    psi = Pb[::-1]
    ratio = np.sum(np.conj(psi) * Pf, axis=0) / np.sum(np.abs(psi) ** 2, axis=0)
    t_n = grid.t[n]
    return ratio * np.exp(-2j * zeta * t_n + lf - lb)
