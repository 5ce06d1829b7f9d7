"""Layer-peeling input from a bandlimited reflection coefficient.

With ``h = pi / (2 Lambda)`` and ``z = exp(i xi h)``, the delayed reflection
coefficient ``rho(xi) exp(2 i xi T2)`` is a Fourier series in ``z^2``.  Its
first ``N`` coefficients, estimated with one FFT of length ``2M``, give the
direct input ``(1, rho_N)``.  The Riemann-Hilbert route builds ``a_N`` from
``|a|^2 = 1 / (1 + |rho|^2)`` instead and pairs it with ``{a_N rho_N}_N``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import ContinuousSpectrum, JostPolynomialPair, SampledPotential, TimeGrid
from .layerpeel import lp_fast, lp_sequential
from .polyops import poly_mul, series_exp

__all__ = [
    "SynthesisPlan",
    "rho_fourier_coeffs",
    "lp_input_direct",
    "rh_a_polynomial",
    "rh_b_polynomial",
    "lp_input_rh",
    "synthesize",
]


@dataclass(frozen=True)
class SynthesisPlan:
    """Sampling plan for coefficient estimation.

    Parameters
    ----------
    Lambda : float
        Half-width of the band; fixes ``h = pi / (2 Lambda)``.
    N : int
        Number of layers (coefficients).
    n_os : int
        Oversampling factor, ``M = n_os * N``.
    T2 : float
        Right boundary of the time window, ``T2 = shift_n * h``.
    """

    Lambda: float
    N: int
    n_os: int = 8
    T2: float = 0.0

    def __post_init__(self):
        if not self.Lambda > 0:
            raise ValueError("Lambda must be positive")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("N must be a positive integer")
        if int(self.n_os) != self.n_os or self.n_os < 1:
            raise ValueError("n_os must be a positive integer")

    @classmethod
    def from_grid(cls, grid: TimeGrid, n_os: int = 8) -> "SynthesisPlan":
        return cls(grid.Lambda, grid.N, n_os, grid.T2)

    @property
    def h(self) -> float:
        return np.pi / (2.0 * self.Lambda)

    @property
    def M(self) -> int:
        return self.n_os * self.N

    @property
    def shift_n(self) -> float:
        return self.T2 / self.h

    @property
    def xi(self) -> np.ndarray:
        """Nodes ``xi_j = j pi / (2 M h)``, ``j = -M..M-1``."""
        return np.arange(-self.M, self.M) * (np.pi / (2 * self.M * self.h))

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid.from_spacing(self.T2, self.h, self.N)


def _check_band(rho: ContinuousSpectrum, plan: SynthesisPlan) -> None:
    if rho.bandlimited and rho.Lambda > plan.Lambda * (1 + 1e-12):
        raise ValueError(
            f"spectrum support {rho.Lambda:g} exceeds the grid band "
            f"{plan.Lambda:g}; refine the grid")


def _fourier_half(values: np.ndarray, M: int, n: int) -> np.ndarray:
    """``(1/2M) sum_j values_j exp(-2 pi i j k / 2M)`` for ``k = 0..n-1``."""
    L = 2 * M
    j = np.arange(-M, M)
    buf = np.empty(L, complex)
    buf[j % L] = values
    return np.fft.fft(buf)[:n] / L


def rho_fourier_coeffs(rho: ContinuousSpectrum, plan: SynthesisPlan) -> np.ndarray:
    """First ``N`` Fourier coefficients of the delayed reflection coefficient."""
    _check_band(rho, plan)
    xi = plan.xi
    vals = rho(xi) * np.exp(2j * xi * plan.T2)
    return _fourier_half(vals, plan.M, plan.N)


def lp_input_direct(coeffs) -> JostPolynomialPair:
    """``P1 = 1`` and ``P2 = sum_k coeffs[k] z^{2k}`` (degree bound ``N``)."""
    coeffs = np.asarray(coeffs, dtype=complex).ravel()
    N = max(coeffs.size, 1)
    return JostPolynomialPair(N, [1.0], coeffs)


def rh_a_polynomial(rho_samples, N: int) -> np.ndarray:
    """``a_N = {exp g(z^2)}_N`` from reflection samples on the ``xi``-grid.

    ``rho_samples`` holds ``rho(xi_j)`` for ``j = -M..M-1`` with ``2M >= 2N``.
    The jump is ``f = -log(1 + |rho|^2)`` and ``g`` is its analytic half,
    ``g = f_0 / 2 + sum_{k >= 1} f_k z^{2k}``, so that ``2 Re g = f`` on
    the circle.
    """
    rho_samples = np.asarray(rho_samples, dtype=complex).ravel()
    if rho_samples.size % 2 or rho_samples.size < 2 * N:
        raise ValueError("need an even number >= 2N of samples")
    M = rho_samples.size // 2
    f = -np.log1p(np.abs(rho_samples) ** 2)
    g = _fourier_half(f, M, N)
    g[0] *= 0.5
    return series_exp(g, N)


def rh_b_polynomial(a_N, coeffs) -> np.ndarray:
    """``{a_N(z^2) sum_k coeffs_k z^{2k}}_N``."""
    coeffs = np.asarray(coeffs, dtype=complex).ravel()
    return poly_mul(a_N, coeffs)[:coeffs.size]


def lp_input_rh(rho: ContinuousSpectrum, plan: SynthesisPlan) -> JostPolynomialPair:
    """``(a_N, {a_N rho_N}_N)`` for the Riemann-Hilbert route."""
    coeffs = rho_fourier_coeffs(rho, plan)
    a = rh_a_polynomial(rho(plan.xi), plan.N)
    return JostPolynomialPair(plan.N, a, rh_b_polynomial(a, coeffs))


def synthesize(rho: ContinuousSpectrum, grid: TimeGrid, n_os: int = 8,
               route: Literal["direct", "rh"] = "direct",
               lp: Literal["fast", "seq"] = "fast") -> SampledPotential:
    """Radiative potential on ``grid`` whose reflection coefficient is ``rho``.

    The band of the grid, ``pi / (2h)``, must contain the support of a
    bandlimited ``rho``; closed-form spectra that merely decay are sampled
    on the band as they are.
    """
    plan = SynthesisPlan.from_grid(grid, n_os)
    if route == "direct":
        P = lp_input_direct(rho_fourier_coeffs(rho, plan))
    elif route == "rh":
        P = lp_input_rh(rho, plan)
    else:
        raise ValueError(f"unknown route {route!r}")
    if lp == "fast":
        return lp_fast(P, grid)
    if lp in ("seq", "sequential"):
        return lp_sequential(P, grid)
    raise ValueError(f"unknown layer-peeling mode {lp!r}")
