"""Shared builders for the test modules."""

import numpy as np

from nftlab.core import SampledPotential, TimeGrid


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_potential(rng, N, T=1.0, strength=3.0, smooth=False):
    """Admissible random samples on ``[-T, T]`` with ``q_0 = 0``.

    The TR samples ``Q_n = (h/2) q_n`` are normalised to ``sum |Q_n| =
    strength``, as for samples of a finite-energy signal.  Fixing ``|Q_n|``
    instead makes the reflection grow exponentially in ``N``.
    """
    grid = TimeGrid.symmetric(T, N)
    Q = crandn(rng, N + 1)
    if smooth:
        Q = np.convolve(Q, np.hanning(9), mode="same")
    Q[0] = 0
    # short grids: keep every |Q_n| <= 0.5
    Q *= min(strength / np.abs(Q).sum(), 0.5 / np.abs(Q).max())
    return SampledPotential(grid, Q / (0.5 * grid.h))


def rel(x, ref):
    return np.linalg.norm(np.ravel(x - ref)) / np.linalg.norm(np.ravel(ref))


def observed_order(Ns, errs):
    """Least-squares slope of ``-log err`` against ``log N``."""
    return -np.polyfit(np.log(Ns), np.log(errs), 1)[0]
