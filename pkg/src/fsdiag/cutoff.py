"""Smooth symmetric time cutoff and closed-form oscillatory moments.

The cutoff ``chi`` equals 1 on [-1, 1], vanishes outside (-3/2, 3/2) and
interpolates with a quintic smoothstep on the two transition bands, so it
is C^2 and piecewise polynomial.  Every windowed Fourier-type integral in
this package ultimately reduces to integrals of ``exp(i*mu*t) * p(t)`` with
``p`` a polynomial on one of the cutoff's segments; those moments have
machine-precision closed forms (repeated integration by parts for large
``mu``, a Taylor expansion of the exponential for small ``mu``), which is
what :func:`poly_osc_moment` provides.
"""

from __future__ import annotations

import hashlib

import numpy as np

SUPPORT = 1.5
PLATEAU = 1.0

# quintic smoothstep psi(u) = 6u^5 - 15u^4 + 10u^3, ascending coefficients
_PSI = np.array([0.0, 0.0, 0.0, 10.0, -15.0, 6.0])

# switch between the integration-by-parts branch and the Taylor branch
_MU_SWITCH = 1.0
_TAYLOR_TERMS = 26


def _poly_compose_affine(coeffs, a, b):
    """Coefficients of p(a + b*t) given ascending coefficients of p."""
    out = np.zeros(1)
    basis = np.array([1.0])
    for c in coeffs:
        padded = np.zeros(max(len(out), len(basis)))
        padded[: len(out)] += out
        padded[: len(basis)] += c * basis
        out = padded
        basis = np.convolve(basis, [a, b])
    return out


# chi as ascending-coefficient polynomials on its segments.  On [1, 3/2]
# chi(t) = psi(3 - 2t); on [-3/2, -1] chi(t) = psi(3 + 2t); 1 on [-1, 1].
CHI_SEGMENTS = (
    (-SUPPORT, -PLATEAU, _poly_compose_affine(_PSI, 3.0, 2.0)),
    (-PLATEAU, PLATEAU, np.array([1.0])),
    (PLATEAU, SUPPORT, _poly_compose_affine(_PSI, 3.0, -2.0)),
)


def chi_version_hash() -> str:
    """Stable hash of the cutoff definition, used to key kernel caches."""
    h = hashlib.sha256()
    for a, b, c in CHI_SEGMENTS:
        h.update(np.asarray([a, b], dtype=float).tobytes())
        h.update(np.asarray(c, dtype=float).tobytes())
    return h.hexdigest()[:16]


def chi(t):
    """Cutoff value; 1 on [-1,1], quintic transition, 0 for |t| >= 3/2."""
    t = np.asarray(t, dtype=float)
    a = np.abs(t)
    out = np.zeros_like(a)
    out[a <= PLATEAU] = 1.0
    band = (a > PLATEAU) & (a < SUPPORT)
    if np.any(band):
        u = 2.0 * (SUPPORT - a[band])
        out[band] = ((6.0 * u - 15.0) * u + 10.0) * u**3
    return out if out.ndim else float(out)


def chi_prime(t):
    """Derivative of the cutoff (zero on the plateau and outside support)."""
    t = np.asarray(t, dtype=float)
    a = np.abs(t)
    out = np.zeros_like(a)
    band = (a > PLATEAU) & (a < SUPPORT)
    if np.any(band):
        u = 2.0 * (SUPPORT - a[band])
        dpsi = 30.0 * u**2 * (u - 1.0) ** 2
        out[band] = -2.0 * np.sign(t[band]) * dpsi
    return out if out.ndim else float(out)


def _poly_derivatives(coeffs):
    """Table of ascending coefficients of p, p', p'', ... (down to degree 0)."""
    table = [np.asarray(coeffs, dtype=float)]
    while len(table[-1]) > 1:
        c = table[-1]
        table.append(c[1:] * np.arange(1, len(c)))
    return table


def _polyval(coeffs, t):
    t = np.asarray(t)
    out = np.zeros_like(t, dtype=complex) if np.iscomplexobj(t) else np.zeros_like(t, dtype=float)
    for c in coeffs[::-1]:
        out = out * t + c
    return out


def poly_osc_moment(coeffs, a, b, mu):
    """Closed-form ``int_a^b exp(i*mu*t) p(t) dt`` for polynomial ``p``.

    ``mu`` may be a scalar or array; the result broadcasts over ``mu``.
    Uses the antiderivative exp(i*mu*t) * R(t) with
    R = sum_m (-1)^m p^(m) / (i*mu)^(m+1) when |mu| is large enough, and a
    Taylor expansion in mu otherwise (segments are short, so the series
    converges to machine precision in a couple dozen terms).
    """
    mu = np.asarray(mu, dtype=float)
    scalar = mu.ndim == 0
    mu = np.atleast_1d(mu)
    out = np.empty(mu.shape, dtype=complex)

    derivs = _poly_derivatives(coeffs)

    big = np.abs(mu) >= _MU_SWITCH
    if np.any(big):
        m = mu[big]
        imu = 1j * m
        ra = np.zeros_like(m, dtype=complex)
        rb = np.zeros_like(m, dtype=complex)
        inv = 1.0 / imu
        fac = inv.copy()
        sign = 1.0
        for d in derivs:
            ra += sign * _polyval(d, a) * fac
            rb += sign * _polyval(d, b) * fac
            fac *= inv
            sign = -sign
        out[big] = np.exp(imu * b) * rb - np.exp(imu * a) * ra

    small = ~big
    if np.any(small):
        m = mu[small]
        # moments int_a^b t^j p(t) dt, j = 0.._TAYLOR_TERMS
        c = np.asarray(coeffs, dtype=float)
        deg = len(c) - 1
        powers_b = b ** np.arange(deg + _TAYLOR_TERMS + 2)
        powers_a = a ** np.arange(deg + _TAYLOR_TERMS + 2)
        moments = np.empty(_TAYLOR_TERMS + 1)
        for j in range(_TAYLOR_TERMS + 1):
            # int t^j p(t) = sum_k c_k (b^{j+k+1}-a^{j+k+1})/(j+k+1)
            k = np.arange(deg + 1)
            moments[j] = np.sum(c * (powers_b[j + k + 1] - powers_a[j + k + 1]) / (j + k + 1))
        acc = np.zeros_like(m, dtype=complex)
        term = np.ones_like(m, dtype=complex)
        for j in range(_TAYLOR_TERMS + 1):
            acc += term * moments[j]
            term = term * (1j * m) / (j + 1)
        out[small] = acc

    return out[0] if scalar else out


def chi_segment_table():
    """(a, b, coeffs) per segment of the cutoff, ascending coefficients."""
    return CHI_SEGMENTS


def integrate_chi_poly(extra_coeffs_per_segment, lo, hi, mu):
    """``int_lo^hi exp(i*mu*t) chi(t) q_seg(t) dt`` with per-segment ``q``.

    ``extra_coeffs_per_segment`` maps segment index -> ascending coefficients
    of the extra polynomial factor (use [1.0] for none).  The range is
    clipped against each segment.  Broadcasts over ``mu``.
    """
    mu = np.asarray(mu, dtype=float)
    out = np.zeros(np.atleast_1d(mu).shape, dtype=complex)
    if hi <= lo:
        sign = -1.0
        lo, hi = hi, lo
    else:
        sign = 1.0
    for i, (a, b, c) in enumerate(CHI_SEGMENTS):
        s, e = max(a, lo), min(b, hi)
        if e <= s:
            continue
        q = extra_coeffs_per_segment[i]
        out += poly_osc_moment(np.convolve(c, q), s, e, mu)
    out *= sign
    return out if np.asarray(mu).ndim else out[0]
