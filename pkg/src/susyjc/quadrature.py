"""Derivatives and antiderivatives of smooth functions on dense sample grids.

Quintic splines give O(h^5) derivatives and O(h^6) running integrals, which
keeps certification residuals well below the ODE tolerances they audit.
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import make_interp_spline


def spline_derivative(ts: np.ndarray, ys: np.ndarray, order: int = 5) -> np.ndarray:
    """d(ys)/dt sampled at ts; ys may have trailing axes (splined along axis 0)."""
    ts = np.asarray(ts, dtype=float)
    order = min(order, ts.size - 1)
    if np.iscomplexobj(ys):
        re = make_interp_spline(ts, np.real(ys), k=order, axis=0).derivative()(ts)
        im = make_interp_spline(ts, np.imag(ys), k=order, axis=0).derivative()(ts)
        return re + 1j * im
    return make_interp_spline(ts, ys, k=order, axis=0).derivative()(ts)


def cumulative_antiderivative(ts: np.ndarray, ys: np.ndarray, order: int = 5):
    """Callable F with F(ts[0]) = 0 and F' interpolating (ts, ys)."""
    ts = np.asarray(ts, dtype=float)
    order = min(order, ts.size - 1)
    anti = make_interp_spline(ts, np.asarray(ys, dtype=float), k=order).antiderivative()
    f0 = anti(ts[0])

    def integral(t):
        t = np.asarray(t, dtype=float)
        out = anti(t) - f0
        return out if out.ndim else float(out)

    return integral
