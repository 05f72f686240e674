"""Fixed-step classical RK4 propagation for y'' = c(x) y.

The coefficient is sampled per step at the left endpoint, midpoint, and
right endpoint.  Passing one-sided limits at discontinuities (square-well
edges, table knots pinned to mesh nodes) keeps every step smooth and the
scheme fourth-order.  The loop is compiled with numba (cached, GIL
released) so shooting sweeps can run thousands of trajectories per second.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a hard dependency
    njit = None


def _propagate_impl(x, c_start, c_mid, c_end, y0, p0, cap):
    n = x.shape[0]
    val = np.zeros(n)
    der = np.zeros(n)
    val[0] = y0
    der[0] = p0
    nodes = 0
    last = n - 1
    for i in range(n - 1):
        h = x[i + 1] - x[i]
        y = val[i]
        p = der[i]
        c0 = c_start[i]
        cm = c_mid[i]
        c1 = c_end[i]
        k1y = p
        k1p = c0 * y
        k2y = p + 0.5 * h * k1p
        k2p = cm * (y + 0.5 * h * k1y)
        k3y = p + 0.5 * h * k2p
        k3p = cm * (y + 0.5 * h * k2y)
        k4y = p + h * k3p
        k4p = c1 * (y + h * k3y)
        ynew = y + h * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0
        pnew = p + h * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0
        # abs(nan) < cap is False, so NaN is caught here as well
        if not (abs(ynew) < cap and abs(pnew) < cap):
            last = i
            break
        val[i + 1] = ynew
        der[i + 1] = pnew
        if ynew * y < 0.0:
            nodes += 1
    return val, der, nodes, last


if njit is not None:
    propagate = njit(cache=True, nogil=True)(_propagate_impl)
else:  # pragma: no cover
    propagate = _propagate_impl


def warm_up() -> None:
    """Trigger JIT compilation once so timed paths run warm."""
    x = np.linspace(0.0, 1.0, 17)
    c = np.ones(16)
    propagate(x, c, c, c, 1.0, 0.0, 1e250)
