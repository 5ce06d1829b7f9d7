"""Domain types shared by the whole package.

Conventions
-----------
The Zakharov-Shabat problem is taken in the focusing form

    v_t = -i zeta sigma_3 v + U v,   U = [[0, q], [r, 0]],   r = -conj(q).

A potential is sampled on the equispaced grid ``t_n = T1 + n h``,
``n = 0..N`` with ``t_N = T2``, and ``z = exp(i zeta h)``.  All polynomials
in this package are coefficient vectors in powers of ``z**2``; odd powers of
``z`` only ever show up as integer prefactors that are book-kept separately.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "TimeGrid",
    "SampledPotential",
    "JostPolynomialPair",
    "DiscreteSpectrum",
    "ContinuousSpectrum",
    "NFSpectrum",
    "PolyMatrix",
    "PoleError",
    "a_S_eval",
    "radiative_reflection",
    "read_potential_csv",
    "write_potential_csv",
]


class PoleError(ArithmeticError):
    """Evaluation point coincides with a pole of ``a_S``."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# Grids and potentials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimeGrid:
    """Equispaced grid ``t_n = T1 + n h`` for ``n = 0..N``.

    Parameters
    ----------
    T1, T2 : float
        Left and right boundary, ``T2 > T1``.
    N : int
        Number of layers; the grid has ``N + 1`` nodes.
    """

    T1: float
    T2: float
    N: int

    def __post_init__(self):
        if not (np.isfinite(self.T1) and np.isfinite(self.T2)):
            raise ValueError("grid boundaries must be finite")
        if not self.T2 > self.T1:
            raise ValueError(f"need T2 > T1, got T1={self.T1}, T2={self.T2}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "T1", float(self.T1))
        object.__setattr__(self, "T2", float(self.T2))

    @classmethod
    def symmetric(cls, T: float, N: int) -> "TimeGrid":
        return cls(-T, T, N)

    @classmethod
    def from_spacing(cls, T2: float, h: float, N: int) -> "TimeGrid":
        """Grid ending at ``T2`` with spacing ``h`` and ``N`` layers."""
        return cls(T2 - N * h, T2, N)

    @property
    def h(self) -> float:
        return (self.T2 - self.T1) / self.N

    @property
    def ell_minus(self) -> float:
        return -self.T1 / self.h

    @property
    def ell_plus(self) -> float:
        return self.T2 / self.h

    @property
    def Lambda(self) -> float:
        """Half-width ``pi / (2h)`` of the Nyquist band of the grid."""
        return np.pi / (2.0 * self.h)

    @property
    def t(self) -> np.ndarray:
        # linspace pins both endpoints exactly
        return np.linspace(self.T1, self.T2, self.N + 1)

    def node(self, n: int) -> float:
        return float(self.t[n])


@dataclass(frozen=True, eq=False)
class SampledPotential:
    """Complex samples ``q_n = q(t_n)`` on a :class:`TimeGrid`.

    Only the focusing case ``r = -conj(q)`` is supported; passing
    ``kappa=-1`` (defocusing) raises.
    """

    grid: TimeGrid
    q: np.ndarray
    kappa: int = 1

    def __post_init__(self):
        if self.kappa != 1:
            raise ValueError("only the focusing case (kappa=+1) is supported")
        q = np.array(self.q, dtype=complex).ravel()
        if q.shape != (self.grid.N + 1,):
            raise ValueError(
                f"expected {self.grid.N + 1} samples, got {q.shape[0]}")
        if not np.all(np.isfinite(q)):
            raise ValueError("potential samples must be finite")
        object.__setattr__(self, "q", _readonly(q))

    @classmethod
    def from_function(cls, fun: Callable[[np.ndarray], np.ndarray],
                      grid: TimeGrid) -> "SampledPotential":
        return cls(grid, np.asarray(fun(grid.t), dtype=complex))

    @property
    def t(self) -> np.ndarray:
        return self.grid.t

    @property
    def r(self) -> np.ndarray:
        return -np.conj(self.q)

    def scaled(self, weight: float):
        """Scheme-local ``(Q, R, Theta)`` for ``Q_n = weight * q_n``."""
        Q = weight * self.q
        R = -np.conj(Q)
        return Q, R, 1.0 - Q * R

    def energy(self) -> float:
        """Trapezoidal approximation of the L2 energy."""
        return float(np.trapezoid(np.abs(self.q) ** 2, dx=self.grid.h))

    def with_samples(self, q: np.ndarray) -> "SampledPotential":
        return SampledPotential(self.grid, q)


@dataclass(frozen=True, eq=False)
class JostPolynomialPair:
    """Coefficients of ``P_1^{(n)}(z^2)`` and ``P_2^{(n)}(z^2)``.

    ``c1[k]`` is the coefficient of ``z^{2k}``; both vectors have length
    ``n + 1``.
    """

    n: int
    c1: np.ndarray
    c2: np.ndarray

    def __post_init__(self):
        c1 = np.array(self.c1, dtype=complex).ravel()
        c2 = np.array(self.c2, dtype=complex).ravel()
        L = int(self.n) + 1
        if c1.size > L or c2.size > L:
            raise ValueError(f"coefficients exceed degree bound n={self.n}")
        c1 = np.pad(c1, (0, L - c1.size))
        c2 = np.pad(c2, (0, L - c2.size))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "c1", _readonly(c1))
        object.__setattr__(self, "c2", _readonly(c2))

    @classmethod
    def vacuum(cls, n: int) -> "JostPolynomialPair":
        return cls(n, [1.0], [0.0])

    def truncated(self, k: int) -> "JostPolynomialPair":
        """Keep coefficients ``0..k`` (a pair of formal degree ``k``)."""
        return JostPolynomialPair(k, self.c1[:k + 1], self.c2[:k + 1])

    def evaluate(self, z2) -> tuple[np.ndarray, np.ndarray]:
        """Horner evaluation of both polynomials at ``z2``."""
        z2 = np.asarray(z2, dtype=complex)
        return (np.polyval(self.c1[::-1], z2), np.polyval(self.c2[::-1], z2))


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DiscreteSpectrum:
    """Bound states ``(zeta_k, b_k)`` with ``Im zeta_k > 0``."""

    eigenvalues: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    norming_constants: np.ndarray = field(
        default_factory=lambda: np.zeros(0, complex))

    def __post_init__(self):
        z = np.array(self.eigenvalues, dtype=complex).ravel()
        b = np.array(self.norming_constants, dtype=complex).ravel()
        if z.shape != b.shape:
            raise ValueError("need one norming constant per eigenvalue")
        if np.any(z.imag <= 0):
            raise ValueError("eigenvalues must lie in the upper half plane")
        if np.any(b == 0):
            raise ValueError("norming constants must be nonzero")
        if z.size > 1:
            d = np.abs(z[:, None] - z[None, :]) + np.eye(z.size)
            if np.any(d < 1e-12 * (1 + np.abs(z).max())):
                raise ValueError("eigenvalues must be pairwise distinct")
        object.__setattr__(self, "eigenvalues", _readonly(z))
        object.__setattr__(self, "norming_constants", _readonly(b))

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[complex, complex]]):
        if len(pairs) == 0:
            return cls()
        z, b = zip(*pairs)
        return cls(np.array(z), np.array(b))

    @property
    def K(self) -> int:
        return self.eigenvalues.size

    @property
    def pairs(self) -> list[tuple[complex, complex]]:
        return list(zip(self.eigenvalues.tolist(),
                        self.norming_constants.tolist()))

    def __len__(self):
        return self.K


@dataclass(frozen=True, eq=False)
class ContinuousSpectrum:
    """Reflection coefficient ``xi -> rho(xi)``.

    ``rho`` is a vectorised callable.  ``Lambda`` is the half-width of the
    support; when ``bandlimited`` is set the callable is zeroed outside
    ``[-Lambda, Lambda]``.  Otherwise ``Lambda`` is only the effective
    support used to check grid resolution.
    """

    rho: Callable[[np.ndarray], np.ndarray]
    Lambda: float
    bandlimited: bool = True
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.Lambda > 0:
            raise ValueError("Lambda must be positive")

    def __call__(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        out = np.asarray(self.rho(xi), dtype=complex)
        out = np.broadcast_to(out, xi.shape).copy()
        if self.bandlimited:
            out[np.abs(xi) > self.Lambda] = 0.0
        return out

    @classmethod
    def zero(cls, Lambda: float = 1.0) -> "ContinuousSpectrum":
        return cls(lambda xi: np.zeros(np.shape(xi), complex), Lambda,
                   meta={"kind": "zero"})

    @classmethod
    def from_samples(cls, values, Lambda: float) -> "ContinuousSpectrum":
        """Trigonometric interpolant of uniform samples on ``[-Lambda, Lambda)``.

        Sample ``j`` sits at ``-Lambda + 2 Lambda j / L``.  Evaluation uses the
        Fourier sum of the samples, so it reproduces them exactly.
        """
        values = np.asarray(values, dtype=complex).ravel()
        L = values.size
        if L == 0:
            raise ValueError("need at least one sample")
        k = np.fft.fftfreq(L, d=1.0 / L)
        # rho(xi) = sum_k c_k exp(i k pi (xi + Lambda) / Lambda)
        c = np.fft.fft(values) / L
        if L % 2 == 0:
            # split the Nyquist term so the interpolant stays real for real data
            nyq = L // 2
            c = np.append(c, c[nyq] / 2)
            c[nyq] /= 2
            k = np.append(k, -k[nyq])

        def rho(xi, c=c, k=k):
            xi = np.asarray(xi, dtype=float)
            flat = xi.ravel()
            out = np.empty(flat.size, complex)
            step = max(1, 2 ** 22 // k.size)
            for s in range(0, flat.size, step):
                ph = np.pi * (flat[s:s + step, None] + Lambda) / Lambda
                out[s:s + step] = np.exp(1j * ph * k[None, :]) @ c
            return out.reshape(xi.shape)

        return cls(rho, Lambda, True,
                   meta={"kind": "samples", "values": values})


@dataclass(frozen=True, eq=False)
class NFSpectrum:
    """Full nonlinear Fourier spectrum: bound states plus reflection."""

    discrete: DiscreteSpectrum
    continuous: ContinuousSpectrum

    @property
    def K(self) -> int:
        return self.discrete.K

    @property
    def Lambda(self) -> float:
        return self.continuous.Lambda

    @classmethod
    def empty(cls) -> "NFSpectrum":
        return cls(DiscreteSpectrum(), ContinuousSpectrum.zero())

    # JSON: {"bound_states": [{"zeta": [re, im], "b": [re, im]}, ...],
    #        "rho": {"kind": ..., ...}, "Lambda": x}
    @classmethod
    def from_json(cls, obj) -> "NFSpectrum":
        from . import signals

        if isinstance(obj, (str, bytes)):
            obj = json.loads(obj)
        states = obj.get("bound_states", [])
        pairs = [(complex(*s["zeta"]), complex(*s["b"])) for s in states]
        discrete = DiscreteSpectrum.from_pairs(pairs)
        spec = dict(obj.get("rho", {"kind": "zero"}))
        continuous = signals.continuous_from_dict(spec, obj.get("Lambda"))
        return cls(discrete, continuous)

    def to_json(self) -> dict:
        states = [{"zeta": [z.real, z.imag], "b": [b.real, b.imag]}
                  for z, b in self.discrete.pairs]
        rho = {k: v for k, v in self.continuous.meta.items()
               if k != "values"}
        if "values" in self.continuous.meta:
            rho["values"] = [[v.real, v.imag]
                             for v in self.continuous.meta["values"]]
        return {"bound_states": states, "rho": rho,
                "Lambda": self.continuous.Lambda}


# ---------------------------------------------------------------------------
# Polynomial matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PolyMatrix:
    """Matrix with polynomial entries in ``z**2``.

    ``coeffs[i, j, k]`` is the coefficient of ``z^{2k}`` in entry ``(i, j)``.
    The whole matrix carries a scalar prefactor ``z^{-prefactor_power}``.
    """

    coeffs: np.ndarray
    prefactor_power: int = 0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim == 2:
            c = c[:, :, None]
        if c.ndim != 3 or c.shape[2] == 0:
            raise ValueError("coeffs must have shape (rows, cols, ncoef)")
        object.__setattr__(self, "coeffs", _readonly(c))
        object.__setattr__(self, "prefactor_power", int(self.prefactor_power))

    @classmethod
    def identity(cls, size: int, ncoef: int = 1) -> "PolyMatrix":
        c = np.zeros((size, size, ncoef), complex)
        c[np.arange(size), np.arange(size), 0] = 1.0
        return cls(c)

    @property
    def rows(self) -> int:
        return self.coeffs.shape[0]

    @property
    def cols(self) -> int:
        return self.coeffs.shape[1]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[2] - 1

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        from .polyops import polymat_mul
        return polymat_mul(self, other)

    def evaluate(self, z) -> np.ndarray:
        """Values at ``z`` (not ``z**2``), prefactor included.

        Returns an array of shape ``(rows, cols) + shape(z)``.
        """
        z = np.asarray(z, dtype=complex)
        z2 = z * z
        out = np.zeros((self.rows, self.cols) + z.shape, complex)
        for c in self.coeffs[:, :, ::-1].transpose(2, 0, 1):
            out = out * z2 + c.reshape(c.shape + (1,) * z.ndim)
        return out * z ** (-self.prefactor_power)

    def trimmed(self, ncoef: int) -> "PolyMatrix":
        return PolyMatrix(self.coeffs[:, :, :ncoef], self.prefactor_power)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def a_S_eval(zeta, S: DiscreteSpectrum, tol: float = 1e-14):
    """Blaschke product ``prod_k (zeta - zeta_k) / (zeta - conj(zeta_k))``.

    Vectorised over ``zeta``.  The empty product is 1.
    """
    zeta = np.asarray(zeta, dtype=complex)
    out = np.ones(zeta.shape, complex)
    for zk in S.eigenvalues:
        den = zeta - np.conj(zk)
        if np.any(np.abs(den) <= tol * max(1.0, abs(zk))):
            raise PoleError(f"zeta coincides with the pole conj({zk})")
        out = out * (zeta - zk) / den
    return out if out.ndim else complex(out)


def radiative_reflection(rho: ContinuousSpectrum,
                         S: DiscreteSpectrum) -> ContinuousSpectrum:
    """Reflection coefficient ``a_S(xi) rho(xi)`` of the radiative part."""
    if S.K == 0:
        return rho

    def rho_R(xi):
        xi = np.asarray(xi, dtype=float)
        return a_S_eval(xi.astype(complex), S) * rho(xi)

    meta = dict(rho.meta)
    meta["radiative_of"] = meta.get("kind")
    return ContinuousSpectrum(rho_R, rho.Lambda, rho.bandlimited, meta)


# ---------------------------------------------------------------------------
# CSV for sampled potentials: header ``t,re_q,im_q``
# ---------------------------------------------------------------------------

def write_potential_csv(path, p: SampledPotential) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "re_q", "im_q"])
        for t, q in zip(p.t, p.q):
            w.writerow([repr(float(t)), repr(float(q.real)),
                        repr(float(q.imag))])


def read_potential_csv(path) -> SampledPotential:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["t", "re_q", "im_q"]:
        raise ValueError("expected CSV header 't,re_q,im_q'")
    data = np.array([[float(x) for x in r] for r in rows[1:] if r])
    if data.shape[0] < 2:
        raise ValueError("need at least two samples")
    t = data[:, 0]
    grid = TimeGrid(t[0], t[-1], t.size - 1)
    if not np.allclose(t, grid.t, rtol=0, atol=1e-9 * (1 + np.abs(t).max())):
        raise ValueError("samples are not on an equispaced grid")
    return SampledPotential(grid, data[:, 1] + 1j * data[:, 2])
