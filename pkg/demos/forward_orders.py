"""Compare trapezoidal and implicit Adams forward scattering.

The m-step implicit Adams scheme converges at order m + 1; one step is the
trapezoidal rule.  The test pulse 4.4 sech(t) has four bound states and a
closed form a(xi).
"""

import numpy as np

from nftlab.core import TimeGrid
from nftlab.forward import forward_scatter_ia, scattering_coefficients
from nftlab.signals import sech_a, sech_potential

xi = np.linspace(-4, 4, 33)
ref = sech_a(xi, 4.4)
Ns = [2**k for k in range(10, 14)]
for m in (1, 2, 3):
    errs = []
    for N in Ns:
        p = sech_potential(4.4, TimeGrid.symmetric(30, N))
        a, _ = scattering_coefficients(forward_scatter_ia(p, m), p.grid, xi)
        errs.append(np.linalg.norm(a - ref) / np.linalg.norm(ref))
    order = -np.polyfit(np.log(Ns), np.log(errs), 1)[0]
    print(f"IA{m}: errors " + " ".join(f"{e:.1e}" for e in errs)
          + f"  order {order:.2f}")
