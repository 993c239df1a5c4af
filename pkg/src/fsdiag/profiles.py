"""Windowed Fourier profiles of the time cutoff.

``xi_lower(t, lam)`` is the running Fourier integral of the cutoff from 0
to t; ``xi_upper(t, lam)`` is the complementary integral from t out to the
edge of the support (with the signed-interval convention for negative
times).  Both are evaluated with the closed-form segment moments from
:mod:`fsdiag.cutoff`, so they are exact up to rounding for any frequency.
"""

from __future__ import annotations

import numpy as np

from .cutoff import CHI_SEGMENTS, SUPPORT, integrate_chi_poly

_UNIT = [np.array([1.0])] * len(CHI_SEGMENTS)


def xi_lower(t: float, lam):
    """``int_0^t exp(i*lam*r) chi(r) dr``; broadcasts over ``lam``.

    Zero at t=0; reduces to ``(exp(i*lam*t)-1)/(i*lam)`` while the path
    stays on the plateau of the cutoff.
    """
    t = float(t)
    if t == 0.0:
        lam = np.asarray(lam, dtype=float)
        z = np.zeros(lam.shape, dtype=complex)
        return z if lam.ndim else 0j
    return integrate_chi_poly(_UNIT, 0.0, t, lam)


def xi_upper(t: float, lam):
    """Tail profile: integral of ``exp(i*lam*r) chi(r)`` over ``{r: t in [0,r]}``.

    Equals ``int_t^inf`` for t >= 0 and ``-int_-inf^t`` for t < 0; vanishes
    for |t| >= 3/2 on the corresponding side.
    """
    t = float(t)
    lam = np.asarray(lam, dtype=float)
    if t >= 0.0:
        if t >= SUPPORT:
            z = np.zeros(lam.shape, dtype=complex)
            return z if lam.ndim else 0j
        return integrate_chi_poly(_UNIT, t, SUPPORT, lam)
    if t <= -SUPPORT:
        z = np.zeros(lam.shape, dtype=complex)
        return z if lam.ndim else 0j
    return -integrate_chi_poly(_UNIT, -SUPPORT, t, lam)


def xi_lower_grid(ts, lam):
    """``xi_lower`` on a vector of times for one frequency (complex array)."""
    return np.array([xi_lower(t, float(lam)) for t in np.asarray(ts, dtype=float)])


def xi_upper_grid(ts, lam):
    """``xi_upper`` on a vector of times for one frequency (complex array)."""
    return np.array([xi_upper(t, float(lam)) for t in np.asarray(ts, dtype=float)])
