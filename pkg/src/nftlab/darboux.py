"""Bound-state addition by the classical Darboux transformation and the
two-step inverse NFT.

Each fold adds one eigenvalue ``zeta = xi + i eta`` with norming constant
``b`` to the current potential using the eigenfunction ``v = phi - b psi``
built from the Jost solutions of the seed:

    q <- q + 4 eta v1 conj(v2) / (|v1|^2 + |v2|^2).

The eigenfunctions of the remaining eigenvalues are carried through the
fold by the Darboux matrix ``zeta_j I - Sigma``.  The transformed spectrum
keeps every norming constant and divides the reflection coefficient by the
Blaschke factor of the added eigenvalues.
"""

from __future__ import annotations

from typing import Literal

import numpy as np

from .core import (DiscreteSpectrum, NFSpectrum, SampledPotential, TimeGrid,
                   radiative_reflection)
from .forward import tr_weight
from .synthesis import synthesize

__all__ = [
    "DarbouxBlowUpError",
    "seed_jost_profiles",
    "cdt_add_bound_states",
    "inft",
]

#: sample magnitude treated as a blow-up
BLOWUP = 1e150


class DarbouxBlowUpError(ArithmeticError):
    """The Darboux iteration produced non-finite or huge samples."""

    def __init__(self, fold: int):
        self.fold = fold
        super().__init__(f"Darboux transformation blew up at fold {fold}")


def seed_jost_profiles(seed: SampledPotential, zeta):
    """Jost solutions of the TR discretisation at every node.

    Returns ``(phi, lphi, psi, lpsi)`` with arrays of shape ``(N+1, 2, K)``
    (vectors) and ``(N+1, K)`` (log scales) such that

        phi(t_n) = exp(-i zeta t_n + lphi_n) * phi_n,
        psi(t_n) = exp(+i zeta t_n + lpsi_n) * psi_n.

    ``phi`` is propagated forward from ``(1, 0)`` and ``psi`` backward from
    ``(0, 1)``.
    """
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
    grid = seed.grid
    N, K = grid.N, zeta.size
    Q = tr_weight(grid.h) * np.array(seed.q)
    Q[0] = 0.0
    R = -np.conj(Q)
    theta = 1.0 - Q * R
    z2 = np.exp(2j * zeta * grid.h)

    phi = np.empty((N + 1, 2, K), complex)
    lphi = np.zeros((N + 1, K))
    cur = np.zeros((2, K), complex)
    cur[0] = 1.0
    acc = np.zeros(K)
    phi[0] = cur
    for n in range(N):
        Qa, Ra, Qb, Rb = Q[n], R[n], Q[n + 1], R[n + 1]
        x, y = cur
        nx = (1 + z2 * Qb * Ra) * x + (z2 * Qb + Qa) * y
        ny = (Rb + z2 * Ra) * x + (Rb * Qa + z2) * y
        cur = np.array([nx, ny]) / theta[n + 1]
        s = np.abs(cur).max(axis=0)
        s = np.where(s > 0, s, 1.0)
        cur /= s
        acc = acc + np.log(s)
        phi[n + 1], lphi[n + 1] = cur, acc

    psi = np.empty((N + 1, 2, K), complex)
    lpsi = np.zeros((N + 1, K))
    cur = np.zeros((2, K), complex)
    cur[1] = 1.0
    acc = np.zeros(K)
    psi[N] = cur
    for n in range(N - 1, -1, -1):
        # psi_n = S_{n+1}(z^2) psi_{n+1},  S = z^2 M^{-1}
        Qa, Ra, Qb, Rb = Q[n], R[n], Q[n + 1], R[n + 1]
        x, y = cur
        nx = (Rb * Qa + z2) * x - (z2 * Qb + Qa) * y
        ny = -(Rb + z2 * Ra) * x + (1 + z2 * Qb * Ra) * y
        cur = np.array([nx, ny]) / theta[n]
        s = np.abs(cur).max(axis=0)
        s = np.where(s > 0, s, 1.0)
        cur /= s
        acc = acc + np.log(s)
        psi[n], lpsi[n] = cur, acc
    return phi, lphi, psi, lpsi


def _eigenfunctions(seed: SampledPotential, zeta, b) -> np.ndarray:
    """``v = phi - b psi`` at each node, rescaled per node; ``(N+1, 2, K)``."""
    phi, lphi, psi, lpsi = seed_jost_profiles(seed, zeta)
    t = seed.grid.t[:, None]
    ephi = -1j * zeta[None, :] * t + lphi
    epsi = 1j * zeta[None, :] * t + lpsi + np.log(b.astype(complex))[None, :]
    top = np.maximum(ephi.real, epsi.real)
    v = (np.exp(ephi - top)[:, None, :] * phi
         - np.exp(epsi - top)[:, None, :] * psi)
    return v


def cdt_add_bound_states(seed: SampledPotential, S: DiscreteSpectrum,
                         order: Literal["imag-desc", "given"] = "imag-desc"
                         ) -> SampledPotential:
    """Add the bound states ``S`` to ``seed`` by ``K`` Darboux folds.

    The result has eigenvalues ``S.eigenvalues`` with norming constants
    ``S.norming_constants`` and reflection coefficient ``rho_seed / a_S``.
    Folds run in order of decreasing ``Im zeta`` unless ``order='given'``.

    Raises
    ------
    DarbouxBlowUpError
        If a fold produces non-finite samples or magnitudes above ``BLOWUP``;
        the exception names the fold index.
    """
    if S.K == 0:
        return seed
    zeta = np.array(S.eigenvalues)
    b = np.array(S.norming_constants)
    if order == "imag-desc":
        idx = np.argsort(-zeta.imag, kind="stable")
        zeta, b = zeta[idx], b[idx]
    elif order != "given":
        raise ValueError(f"unknown order {order!r}")
    v = _eigenfunctions(seed, zeta, b)  # (N+1, 2, K)
    q = np.array(seed.q, dtype=complex)
    for k in range(zeta.size):
        zk = zeta[k]
        v1, v2 = v[:, 0, k], v[:, 1, k]
        den = np.abs(v1) ** 2 + np.abs(v2) ** 2
        with np.errstate(all="ignore"):
            q = q + 4 * zk.imag * v1 * np.conj(v2) / den
        if not np.all(np.isfinite(q)) or np.abs(q).max() > BLOWUP:
            raise DarbouxBlowUpError(k)
        if k + 1 == zeta.size:
            break
        # Darboux matrix at the remaining eigenvalues: zeta_j I - Sigma_k
        d = zk - np.conj(zk)
        s11 = (zk * np.abs(v1) ** 2 + np.conj(zk) * np.abs(v2) ** 2) / den
        s22 = (np.conj(zk) * np.abs(v1) ** 2 + zk * np.abs(v2) ** 2) / den
        s12 = d * v1 * np.conj(v2) / den
        s21 = d * v2 * np.conj(v1) / den
        rest = v[:, :, k + 1:]
        zj = zeta[None, k + 1:]
        w1 = (zj - s11[:, None]) * rest[:, 0] - s12[:, None] * rest[:, 1]
        w2 = -s21[:, None] * rest[:, 0] + (zj - s22[:, None]) * rest[:, 1]
        scale = np.maximum(np.abs(w1), np.abs(w2))
        scale = np.where(scale > 0, scale, 1.0)
        v[:, 0, k + 1:] = w1 / scale
        v[:, 1, k + 1:] = w2 / scale
        if not np.all(np.isfinite(v[:, :, k + 1:])):
            raise DarbouxBlowUpError(k)
    return SampledPotential(seed.grid, q)


def inft(spectrum: NFSpectrum, grid: TimeGrid, *, n_os: int = 8,
         route: Literal["direct", "rh"] = "direct",
         lp: Literal["fast", "seq"] = "fast",
         dt: Literal["cdt", "fdt", "fdt-pf"] = "cdt") -> SampledPotential:
    """Two-step inverse NFT.

    Step I synthesises the radiative potential from ``a_S rho`` by layer
    peeling; step II adds the bound states with Darboux folds.  Only the
    classical Darboux transformation is available.
    """
    if dt in ("fdt", "fdt-pf"):
        raise NotImplementedError(f"dt={dt!r} is reserved but not implemented")
    if dt != "cdt":
        raise ValueError(f"unknown Darboux variant {dt!r}")
    rho_R = radiative_reflection(spectrum.continuous, spectrum.discrete)
    q_R = synthesize(rho_R, grid, n_os=n_os, route=route, lp=lp)
    return cdt_add_bound_states(q_R, spectrum.discrete)
