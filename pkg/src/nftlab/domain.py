"""Computational-domain estimates.

The tail energy of a nonlinearly bandlimited potential to the right of
``T`` is bounded through its impulse response ``p``:

    E_+(T) <= 2 I_2(T)^2 / (1 - I_1(T)^2),
    I_m(T) = ( int_{2T}^inf |p(-tau)|^m dtau )^(1/m),

valid while ``I_1(T) < 1``.  Closed forms cover the raised-cosine filter,
the sech potential and soliton-bearing spectra.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .core import DiscreteSpectrum

__all__ = [
    "EpsteinBound",
    "NotAchievableError",
    "epstein_bound",
    "find_T",
    "rc_T_estimate",
    "rc_tail_asymptotics",
    "sech_domain",
    "qpsk_domain",
    "soliton_domain",
]


class NotAchievableError(ValueError):
    """The requested tail bound is not reached below the search cap."""


class EpsteinBound(NamedTuple):
    I1: float
    I2: float
    bound: float
    applicable: bool


_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


def _panel_integrals(f, a: float, length: float, width: float):
    """Composite Gauss-Legendre of ``|f|`` and ``|f|^2`` over ``[a, a+length]``."""
    n = max(1, int(np.ceil(length / width)))
    half = 0.5 * length / n
    s1 = s2 = 0.0
    for lo in range(0, n, 4096):
        mid = a + (2 * np.arange(lo, min(n, lo + 4096)) + 1)[:, None] * half
        v = np.abs(np.asarray(f(mid + half * _GL_X[None, :]), dtype=complex))
        w = half * _GL_W[None, :]
        s1 += float(np.sum(w * v))
        s2 += float(np.sum(w * v * v))
    return s1, s2


def epstein_bound(p: Callable, T: float, scale: float = 1.0,
                  rtol: float = 1e-5, max_doublings: int = 60) -> EpsteinBound:
    """Tail integrals ``I_1, I_2`` at ``T`` and the resulting energy bound.

    Parameters
    ----------
    p : callable
        Impulse response, evaluated at ``-tau`` for ``tau >= 2T``.
    T : float
        Boundary candidate.
    scale : float
        Panel width of the composite quadrature; should resolve the finest
        feature of ``p`` (for the raised cosine, a fraction of ``tau_s``).
    rtol : float
        The integration runs over doubling chunks until a chunk adds less
        than ``rtol`` relative; the remainder is extrapolated geometrically
        from the last two chunks.

    Returns
    -------
    EpsteinBound
        ``bound`` is ``inf`` and ``applicable`` False when ``I_1 >= 1``.
    """
    f = lambda tau: p(-tau)  # noqa: E731
    a = 2.0 * T
    L = 64.0 * scale
    tot = np.zeros(2)
    prev = None
    for _ in range(max_doublings):
        c = np.array(_panel_integrals(f, a, L, scale))
        tot += c
        if np.all(c <= rtol * tot):
            if prev is not None:
                with np.errstate(divide="ignore", invalid="ignore"):
                    r = np.where(prev > 0, c / prev, 0.0)
                r = np.clip(r, 0.0, 0.9)
                tot += c * r / (1 - r)
            break
        prev = c
        a += L
        L *= 2
    else:
        raise ArithmeticError("tail integral did not converge")
    I1, I2sq = tot
    I2 = float(np.sqrt(I2sq))
    if I1 >= 1:
        return EpsteinBound(float(I1), I2, float("inf"), False)
    return EpsteinBound(float(I1), I2, float(2 * I2sq / (1 - I1 ** 2)), True)


def find_T(p: Callable, eps: float, scale: float = 1.0, rtol: float = 1e-3,
           T_max: float = 1e6) -> float:
    """Smallest ``T`` (to relative ``rtol``) with ``epstein_bound <= eps``.

    Returns 0 when the bound already holds at ``T = 0``.  The bound is
    assumed nonincreasing in ``T``; the search doubles ``T`` and then
    bisects.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")

    def ok(T):
        return epstein_bound(p, T, scale).bound <= eps

    if ok(0.0):
        return 0.0
    lo, hi = 0.0, scale
    while not ok(hi):
        lo, hi = hi, 2 * hi
        if hi > T_max:
            raise NotAchievableError(f"bound > {eps:g} up to T = {T_max:g}")
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def rc_T_estimate(A: float, tau_s: float, beta: float, eps: float) -> float:
    """Closed-form ``T(eps)`` from the raised-cosine tail asymptotics."""
    if not 0 < beta <= 1:
        raise ValueError("beta must lie in (0, 1]")
    return 0.5 * (np.pi ** 2 * A ** 2 * tau_s ** 4
                  / (40 * beta ** 4 * eps)) ** 0.2


def rc_tail_asymptotics(A: float, tau_s: float, beta: float, T: float):
    """Envelope asymptotics ``(I_1(T), I_2(T)^2)`` of the raised cosine.

    The envelope of ``|p_rc|`` is ``C / tau^3`` with
    ``C = A pi tau_s^2 / (4 beta^2)``; the oscillating factor is not
    averaged out here.
    """
    C = A * np.pi * tau_s ** 2 / (4 * beta ** 2)
    return C / (2 * (2 * T) ** 2), C ** 2 / (5 * (2 * T) ** 5)


def sech_domain(A_R: float, eps: float) -> float:
    """Half-width ``log(2 A_R / eps)`` of a window for ``A_R sech t``."""
    if not 0 < A_R < 0.5:
        raise ValueError("A_R must lie in (0, 0.5)")
    return float(np.log(2 * A_R / eps))


def qpsk_domain(N_sym: int, tau_s: float = 1.0, eps: float = 1e-9,
                A_rc: float = 1.0, beta: float = 0.5,
                T_eps: float | None = None, W: float | None = None):
    """``(T1, T2)`` for a QPSK raised-cosine spectrum.

    ``T2 = T(eps) + pi tau_s N_sym / 4`` and ``T1 = -W T2`` with the
    heuristic ``W = 5 log2(N_sym)`` unless ``W`` is given.
    """
    if N_sym <= 0 or N_sym % 2:
        raise ValueError("N_sym must be a positive even integer")
    if T_eps is None:
        T_eps = rc_T_estimate(A_rc, tau_s, beta, eps)
    T2 = T_eps + np.pi * tau_s * N_sym / 4
    if W is None:
        W = 5 * np.log2(N_sym)
    return -W * T2, T2


def soliton_domain(S: DiscreteSpectrum, multiplier: float = 30.0):
    """``(kappa, T)`` with ``kappa = 2 sqrt(sum Im zeta_k)`` and
    ``T = multiplier * kappa / min Im zeta_k``."""
    if S.K == 0:
        raise ValueError("soliton_domain needs at least one eigenvalue")
    im = S.eigenvalues.imag
    kappa = 2 * np.sqrt(im.sum())
    return float(kappa), float(multiplier * kappa / im.min())
