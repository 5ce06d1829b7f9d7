"""Closed-form test spectra and potentials, and error metrics.

Includes a complex log-gamma (Lanczos, 15 terms) used by the exact
scattering data of the sech potential.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (ContinuousSpectrum, DiscreteSpectrum, NFSpectrum,
                   SampledPotential, TimeGrid, a_S_eval)

__all__ = [
    "loggamma",
    "gamma",
    "sech_a",
    "sech_b",
    "sech_rho_R",
    "sech_discrete",
    "sech_spectrum",
    "sech_potential",
    "RaisedCosineParams",
    "H_rc",
    "rc_spectrum",
    "rc_impulse",
    "qpsk_symbols",
    "qpsk_spectrum",
    "l2_norm",
    "metric_q",
    "metric_rho",
    "metric_b",
    "continuous_from_dict",
]

# ---------------------------------------------------------------------------
# Complex Gamma
# ---------------------------------------------------------------------------

_LANCZOS_G = 607 / 128
_LANCZOS_C = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])
_HALF_LOG_2PI = 0.5 * np.log(2 * np.pi)


def _loggamma_right(z):
    # valid for Re z >= 1/2
    z = z - 1.0
    x = np.full(z.shape, _LANCZOS_C[0], complex)
    for k in range(1, _LANCZOS_C.size):
        x = x + _LANCZOS_C[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(x)


def _log_sin(w):
    """``log sin(w)`` (mod ``2 pi i``) without overflow for large ``|Im w|``."""
    flip = w.imag < 0
    u = np.where(flip, np.conj(w), w)
    # sin u = (i/2) e^{-iu} (1 - e^{2iu}),  |e^{2iu}| <= 1
    out = -1j * u + np.log1p(-np.exp(2j * u)) + np.log(0.5j)
    return np.where(flip, np.conj(out), out)


def loggamma(z):
    """Logarithm of the Gamma function at complex ``z``, modulo ``2 pi i``.

    Lanczos approximation (g = 607/128, 15 terms) on ``Re z >= 1/2`` and the
    reflection formula elsewhere.
    """
    z = np.asarray(z, dtype=complex)
    left = z.real < 0.5
    zr = np.where(left, 1.0 - z, z)
    out = _loggamma_right(zr)
    if np.any(left):
        with np.errstate(divide="ignore", invalid="ignore"):
            refl = np.log(np.pi) - _log_sin(np.pi * z) - out
        out = np.where(left, refl, out)
    return out if out.ndim else complex(out)


def gamma(z):
    """Gamma function at complex ``z``."""
    return np.exp(loggamma(z))


# ---------------------------------------------------------------------------
# sech potential
# ---------------------------------------------------------------------------

def _log_sech(x):
    ax = np.abs(x)
    return np.log(2.0) - ax - np.log1p(np.exp(-2 * ax))


def sech_a(xi, A: float):
    """Exact ``a(xi)`` of ``q = A sech t``."""
    xi = np.asarray(xi, dtype=complex)
    w = 0.5 - 1j * xi
    return np.exp(2 * loggamma(w) - loggamma(w - A) - loggamma(w + A))


def sech_b(xi, A: float):
    """Exact ``b(xi)`` of ``q = A sech t`` on the real axis."""
    xi = np.asarray(xi, dtype=float)
    return -np.sin(np.pi * A) * np.exp(_log_sech(np.pi * xi))


def sech_rho_R(xi, A_R: float, K: int = 0):
    """Reflection coefficient of the radiative part of ``(A_R + K) sech t``."""
    xi = np.asarray(xi, dtype=float)
    w = 0.5 - 1j * xi
    amp = -np.sin((A_R + K) * np.pi)
    lg = loggamma(w + A_R) + loggamma(w - A_R) - 2 * loggamma(w)
    return amp * np.exp(_log_sech(np.pi * xi) + lg)


def sech_discrete(A_R: float, K: int) -> DiscreteSpectrum:
    """Bound states ``zeta_k = i(A_R + 1/2 + K - k)``, ``b_k = (-1)^k``."""
    k = np.arange(1, K + 1)
    return DiscreteSpectrum(1j * (A_R + 0.5 + K - k), (-1.0) ** k)


def _sech_continuous(A_R: float, K: int) -> ContinuousSpectrum:
    S = sech_discrete(A_R, K)

    def rho(xi):
        xi = np.asarray(xi, dtype=float)
        return sech_rho_R(xi, A_R, K) / a_S_eval(xi.astype(complex), S)

    # |rho| ~ e^{-pi |xi|}: beyond this the values are below 1e-16
    Lam = np.log(4.0 / 1e-16) / np.pi
    return ContinuousSpectrum(rho, Lam, bandlimited=False,
                              meta={"kind": "sech", "A_R": A_R, "K": K})


def sech_spectrum(A_R: float, K: int = 0) -> NFSpectrum:
    """Nonlinear Fourier spectrum of ``q = (A_R + K) sech t``."""
    if not 0 <= A_R < 0.5:
        raise ValueError("A_R must lie in [0, 0.5)")
    if int(K) != K or K < 0:
        raise ValueError("K must be a nonnegative integer")
    K = int(K)
    return NFSpectrum(sech_discrete(A_R, K), _sech_continuous(A_R, K))


def sech_potential(A: float, grid: TimeGrid) -> SampledPotential:
    return SampledPotential(grid, A * np.exp(_log_sech(grid.t)))


# ---------------------------------------------------------------------------
# Raised cosine and QPSK
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RaisedCosineParams:
    """Raised-cosine filter with amplitude ``A_rc``, symbol time ``tau_s``
    and roll-off ``beta``."""

    A_rc: float = 1.0
    tau_s: float = 1.0
    beta: float = 0.5

    def __post_init__(self):
        if not self.A_rc > 0 or not self.tau_s > 0:
            raise ValueError("A_rc and tau_s must be positive")
        if not 0 <= self.beta <= 1:
            raise ValueError("beta must lie in [0, 1]")

    @property
    def Lambda(self) -> float:
        return (1 + self.beta) / self.tau_s

    def with_amplitude(self, A: float) -> "RaisedCosineParams":
        return RaisedCosineParams(A, self.tau_s, self.beta)


def H_rc(xi, params: RaisedCosineParams):
    """Raised-cosine spectrum, flat on ``|tau_s xi| <= 1 - beta``."""
    xi = np.asarray(xi, dtype=float)
    a = np.abs(params.tau_s * xi)
    b = params.beta
    out = np.where(a <= 1 - b, params.A_rc, 0.0)
    if b > 0:
        roll = (a > 1 - b) & (a <= 1 + b)
        Xi = a - (1 - b)
        out = np.where(roll, 0.5 * params.A_rc
                       * (1 + np.cos(np.pi / (2 * b) * Xi)), out)
    return out


def rc_spectrum(params: RaisedCosineParams) -> ContinuousSpectrum:
    return ContinuousSpectrum(
        lambda xi: H_rc(xi, params).astype(complex), params.Lambda, True,
        meta={"kind": "rc", "A_rc": params.A_rc, "tau_s": params.tau_s,
              "beta": params.beta})


def rc_impulse(params: RaisedCosineParams):
    """Impulse response ``p_rc(tau) = (1/2pi) int H_rc(xi) e^{-i xi tau} dxi``.

    The removable singularity at ``2 beta tau = pi tau_s`` is resolved by
    writing the roll-off factor in terms of ``d = pi/2 - beta |tau| / tau_s``.
    """
    A, ts, b = params.A_rc, params.tau_s, params.beta

    def p(tau):
        tau = np.asarray(tau, dtype=float)
        x = tau / ts
        d = np.pi / 2 - b * np.abs(x)
        # cos(u) / (1 - (2u/pi)^2) with u = pi/2 - d
        roll = (np.pi / 2) * np.sinc(d / np.pi) / (2 - 2 * d / np.pi)
        return A / (np.pi * ts) * np.sinc(x / np.pi) * roll

    return p


def qpsk_symbols(N_sym: int, seed: int | None = 0) -> np.ndarray:
    """Uniform random symbols from ``{1, i, -1, -i}``."""
    rng = np.random.default_rng(seed)
    return 1j ** rng.integers(0, 4, size=N_sym)


def _gauss_norm2(f, edges, panels: int, nodes: int = 32) -> float:
    x, w = np.polynomial.legendre.leggauss(nodes)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        cuts = np.linspace(lo, hi, panels + 1)
        mid = 0.5 * (cuts[1:] + cuts[:-1])[:, None]
        half = 0.5 * (cuts[1:] - cuts[:-1])[:, None]
        pts = mid + half * x[None, :]
        total += float(np.sum(half * w[None, :] * np.abs(f(pts)) ** 2))
    return total


def _symbol_sum(symbols, tau_s):
    n = np.arange(-(symbols.size // 2), symbols.size // 2)

    def S(xi):
        xi = np.asarray(xi, dtype=float)
        ph = np.exp(-1j * np.pi * tau_s * np.multiply.outer(xi, n))
        return ph @ symbols

    return S


def qpsk_spectrum(symbols, params: RaisedCosineParams,
                  A_eff: float | None = 10.0) -> ContinuousSpectrum:
    """QPSK-modulated raised cosine ``rho = S(xi) H_rc(xi)``.

    ``S(xi) = sum_n s_n exp(-i n pi tau_s xi)`` over
    ``n = -N_sym/2 .. N_sym/2 - 1``.  When ``A_eff`` is given the amplitude is
    chosen so that ``||rho||_2 / ||H_rc(A_rc=1)||_2 = A_eff``; otherwise
    ``params.A_rc`` is used as is.
    """
    symbols = np.asarray(symbols, dtype=complex).ravel()
    if symbols.size == 0 or symbols.size % 2:
        raise ValueError("N_sym must be a positive even integer")
    S = _symbol_sum(symbols, params.tau_s)
    unit = params.with_amplitude(1.0)
    b, ts = params.beta, params.tau_s
    edges = np.array([-(1 + b), -(1 - b), 1 - b, 1 + b]) / ts
    panels = 8 + 2 * symbols.size
    ref = _gauss_norm2(lambda x: H_rc(x, unit), edges, panels)
    ratio = np.sqrt(_gauss_norm2(lambda x: S(x) * H_rc(x, unit), edges,
                                 panels) / ref)
    if A_eff is None:
        A = params.A_rc
    elif ratio == 0:
        A = params.A_rc
    else:
        A = A_eff / ratio
    par = params.with_amplitude(A)

    def rho(xi):
        return S(xi) * H_rc(xi, par)

    return ContinuousSpectrum(
        rho, par.Lambda, True,
        meta={"kind": "qpsk-rc", "A_rc": A, "tau_s": ts, "beta": b,
              "A_eff": float(ratio * A),
              "symbols": [[s.real, s.imag] for s in symbols]})


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

def l2_norm(x, dx: float = 1.0) -> float:
    """Trapezoidal L2 norm of equispaced samples."""
    return float(np.sqrt(np.trapezoid(np.abs(np.asarray(x)) ** 2, dx=dx)))


def _rel_l2(num, ref) -> float:
    num = np.asarray(num, dtype=complex)
    ref = np.asarray(ref, dtype=complex)
    if num.shape != ref.shape:
        raise ValueError("sample vectors differ in length")
    den = l2_norm(ref)
    if den == 0:
        raise ZeroDivisionError("reference is identically zero")
    return l2_norm(num - ref) / den


def metric_q(q_num, q_ref) -> float:
    """Relative L2 error of potential samples (trapezoidal rule)."""
    return _rel_l2(q_num, q_ref)


def metric_rho(rho_num, rho_ref) -> float:
    """Relative L2 error of reflection samples on ``Omega_h``."""
    return _rel_l2(rho_num, rho_ref)


def metric_b(b_num, b_ref) -> float:
    """RMS-relative error of norming constants."""
    b_num = np.asarray(b_num, dtype=complex)
    b_ref = np.asarray(b_ref, dtype=complex)
    den = np.sum(np.abs(b_ref) ** 2)
    if den == 0:
        raise ZeroDivisionError("reference is identically zero")
    return float(np.sqrt(np.sum(np.abs(b_num - b_ref) ** 2) / den))


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def continuous_from_dict(spec: dict, Lambda: float | None = None) -> ContinuousSpectrum:
    """Build a :class:`ContinuousSpectrum` from its JSON description."""
    kind = spec.get("kind", "zero")
    if kind == "zero":
        return ContinuousSpectrum.zero(Lambda or 1.0)
    if kind == "samples":
        if Lambda is None:
            raise ValueError("sampled spectra need 'Lambda'")
        vals = np.array([complex(*v) if isinstance(v, (list, tuple)) else v
                         for v in spec["values"]])
        return ContinuousSpectrum.from_samples(vals, Lambda)
    if kind == "sech":
        return _sech_continuous(float(spec.get("A_R", 0.4)),
                                int(spec.get("K", 0)))
    params = RaisedCosineParams(float(spec.get("A_rc", 1.0)),
                                float(spec.get("tau_s", 1.0)),
                                float(spec.get("beta", 0.5)))
    if kind == "rc":
        return rc_spectrum(params)
    if kind == "qpsk-rc":
        if "symbols" in spec:
            sym = np.array([complex(*s) for s in spec["symbols"]])
        else:
            sym = qpsk_symbols(int(spec["N_sym"]), spec.get("seed", 0))
        A_eff = spec.get("A_eff", None if "A_rc" in spec else 10.0)
        return qpsk_spectrum(sym, params, A_eff)
    raise ValueError(f"unknown spectrum kind {kind!r}")
