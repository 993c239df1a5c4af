"""Fourier kernel of the local time-integration operator, and friends.

``ichi_apply`` is the time-domain operator -i*chi(t)*int_0^t chi(s) f(s) ds.
``ichi_kernel`` evaluates the unnormalized Fourier kernel

    K(lam, lam1) = int dt e^{-i lam t} chi(t) int_0^t ds e^{i lam1 s} chi(s),

closed-form and uniformly accurate in both frequencies: on each cutoff
segment the inner profile splits into a slow part plus e^{i lam1 t} times a
slow part, so the outer integral reduces to polynomial oscillatory moments.
The true operator kernel (the one satisfying the Fourier identity with the
1/(2pi) inverse-transform convention) is -i/(2pi) times this; all second
moment formulas in the package carry those constants explicitly.

``resonance_general`` is the integer resonance phase of the mode product.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .cutoff import (CHI_SEGMENTS, SUPPORT, chi, chi_version_hash,
                     _poly_derivatives, _polyval, poly_osc_moment)
from .quadrature import QuadratureGrid

_SMALL_LAM1 = 1.0
_SERIES_TERMS = 24

_SEG_NEG = 0   # [-3/2, -1]
_SEG_MID = 1   # [-1, 1]
_SEG_POS = 2   # [1, 3/2]


def _seg_moment_table():
    """Closed-form factory for W_seg,j(mu) = int_seg e^{i mu t} t^j chi(t) dt."""
    tables = []
    for a, b, c in CHI_SEGMENTS:
        per_power = []
        for j in range(6):
            coeffs = np.convolve(c, np.concatenate((np.zeros(j), [1.0])))
            per_power.append((a, b, coeffs))
        tables.append(per_power)
    return tables


_SEG_MOMENTS = _seg_moment_table()


def _seg_w(seg: int, j: int, mu):
    a, b, coeffs = _SEG_MOMENTS[seg][j]
    return poly_osc_moment(coeffs, a, b, mu)


def _antiderivative_poly(coeffs):
    c = np.asarray(coeffs, dtype=float)
    return np.concatenate(([0.0], c / np.arange(1, len(c) + 1)))


def _running_chi_moment_segments(j: int):
    """Piecewise polynomials of m_j(t) = int_0^t r^j chi(r) dr (per segment)."""
    segs = []
    consts = {}
    # integrate outward from 0: order MID first, then POS, then NEG
    mid_a, mid_b, mid_c = CHI_SEGMENTS[_SEG_MID]
    p_mid = _antiderivative_poly(np.convolve(mid_c, np.concatenate((np.zeros(j), [1.0]))))
    consts[_SEG_MID] = -_polyval(p_mid, 0.0)
    pos_a, pos_b, pos_c = CHI_SEGMENTS[_SEG_POS]
    p_pos = _antiderivative_poly(np.convolve(pos_c, np.concatenate((np.zeros(j), [1.0]))))
    m_at_1 = consts[_SEG_MID] + _polyval(p_mid, mid_b)
    consts[_SEG_POS] = m_at_1 - _polyval(p_pos, pos_a)
    neg_a, neg_b, neg_c = CHI_SEGMENTS[_SEG_NEG]
    p_neg = _antiderivative_poly(np.convolve(neg_c, np.concatenate((np.zeros(j), [1.0]))))
    m_at_m1 = consts[_SEG_MID] + _polyval(p_mid, mid_a)
    consts[_SEG_NEG] = m_at_m1 - _polyval(p_neg, neg_b)
    for seg, p in ((_SEG_NEG, p_neg), (_SEG_MID, p_mid), (_SEG_POS, p_pos)):
        q = p.copy()
        q[0] += consts[seg]
        segs.append(q)
    return segs


# series branch tables: for each j, per-segment polynomials of chi(t)*m_j(t)
_SERIES_TABLE = []
for _j in range(_SERIES_TERMS):
    _per_seg = []
    for _seg, _mj in enumerate(_running_chi_moment_segments(_j)):
        _a, _b, _c = CHI_SEGMENTS[_seg]
        _per_seg.append((_a, _b, np.convolve(_c, _mj)))
    _SERIES_TABLE.append(_per_seg)


def _transition_r_coeffs(seg: int, lam1):
    """lam1-dependent polynomial R with d/dt[e^{i lam1 t} R(t)] = e^{i lam1 t} chi_seg(t).

    Returns an array of shape (6,) + lam1.shape (ascending powers of t).
    """
    _, _, c = CHI_SEGMENTS[seg]
    derivs = _poly_derivatives(c)
    lam1 = np.asarray(lam1, dtype=float)
    inv = 1.0 / (1j * lam1)
    out = np.zeros((6,) + lam1.shape, dtype=complex)
    fac = inv.copy()
    sign = 1.0
    for d in derivs:
        out[: len(d)] += sign * d.reshape((-1,) + (1,) * lam1.ndim) * fac
        fac = fac * inv
        sign = -sign
    return out


def _kernel_large_lam1(lam, lam1):
    """Closed form for |lam1| >= threshold (flat arrays, equal shape)."""
    inv = 1.0 / (1j * lam1)
    mu_out = -lam
    mu_mix = lam1 - lam

    total = np.zeros(lam.shape, dtype=complex)

    # plateau: profile (e^{i lam1 t} - 1) / (i lam1)
    total += inv * (_seg_w(_SEG_MID, 0, mu_mix) - _seg_w(_SEG_MID, 0, mu_out))

    # transition segments: profile = alpha(lam1) + e^{i lam1 t} R(t; lam1)
    e_p = np.exp(1j * lam1)
    xi_at_1 = inv * (e_p - 1.0)
    e_m = np.exp(-1j * lam1)
    xi_at_m1 = inv * (e_m - 1.0)

    r_pos = _transition_r_coeffs(_SEG_POS, lam1)
    alpha_pos = xi_at_1 - e_p * sum(r_pos[j] * 1.0 ** j for j in range(6))
    total += alpha_pos * _seg_w(_SEG_POS, 0, mu_out)
    for j in range(6):
        total += r_pos[j] * _seg_w(_SEG_POS, j, mu_mix)

    r_neg = _transition_r_coeffs(_SEG_NEG, lam1)
    alpha_neg = xi_at_m1 - e_m * sum(r_neg[j] * (-1.0) ** j for j in range(6))
    total += alpha_neg * _seg_w(_SEG_NEG, 0, mu_out)
    for j in range(6):
        total += r_neg[j] * _seg_w(_SEG_NEG, j, mu_mix)

    return total


def _kernel_small_lam1(lam, lam1):
    """Taylor series in lam1 (flat arrays, equal shape)."""
    mu_out = -lam
    total = np.zeros(lam.shape, dtype=complex)
    term = np.ones(lam.shape, dtype=complex)
    for j in range(_SERIES_TERMS):
        gj = np.zeros(lam.shape, dtype=complex)
        for a, b, coeffs in _SERIES_TABLE[j]:
            gj += poly_osc_moment(coeffs, a, b, mu_out)
        total += term * gj
        term = term * (1j * lam1) / (j + 1)
    return total


def ichi_kernel(lam, lam1):
    """Unnormalized integration kernel K(lam, lam1); broadcasts elementwise.

    Decays like 1/(<lam><lam-lam1>); exact (closed form) in both arguments.
    """
    lam_b, lam1_b = np.broadcast_arrays(np.asarray(lam, dtype=float),
                                        np.asarray(lam1, dtype=float))
    shape = lam_b.shape
    lam_f = lam_b.ravel()
    lam1_f = lam1_b.ravel()
    out = np.empty(lam_f.shape, dtype=complex)
    small = np.abs(lam1_f) < _SMALL_LAM1
    if np.any(small):
        out[small] = _kernel_small_lam1(lam_f[small], lam1_f[small])
    if np.any(~small):
        out[~small] = _kernel_large_lam1(lam_f[~small], lam1_f[~small])
    out = out.reshape(shape)
    return out if shape else complex(out)


TRUE_KERNEL_PREFACTOR = -1j / (2.0 * np.pi)


def ichi_apply(f_samples, tgrid, t: float):
    """Reference time-domain operator: -i chi(t) int_0^t chi(s) f(s) ds.

    ``f_samples`` are values of f on the (uniform, symmetric) ``tgrid``;
    t must lie inside the sampled window.
    """
    tgrid = np.asarray(tgrid, dtype=float)
    f_samples = np.asarray(f_samples)
    if not (tgrid[0] <= t <= tgrid[-1]):
        raise ValueError("evaluation time outside the sampled window")
    if abs(t) > SUPPORT:
        raise ValueError("evaluation time outside the cutoff support")
    g = f_samples * chi(tgrid)
    lo, hi = (0.0, t) if t >= 0.0 else (t, 0.0)
    mask = (tgrid >= lo) & (tgrid <= hi)
    if mask.sum() < 2:
        return 0.0 + 0.0j
    val = np.trapezoid(g[mask], tgrid[mask])
    if t < 0.0:
        val = -val
    return -1j * chi(float(t)) * val


def resonance_general(k: int, kvec, lvec) -> int:
    """Integer resonance phase -k^2 - sum k_i^2 + sum l_j^2 (exact)."""
    k = int(k)
    return -k * k - sum(int(x) ** 2 for x in kvec) + sum(int(x) ** 2 for x in lvec)


def resonance_pair(k: int, k1: int) -> int:
    """Two-mode resonance 2*k*k1 (equal to the general formula at p=q=1)."""
    return 2 * int(k) * int(k1)


class IChiKernelTable:
    """Cached kernel values on a pair of quadrature grids.

    Values are stored for the unnormalized kernel; immutable after build.
    Serializes to a flat .npz keyed by (grid ids, lam_max, cutoff hash).
    """

    def __init__(self, row_grid: QuadratureGrid, col_grid: QuadratureGrid,
                 cache_dir: str | None = None):
        self.row_grid = row_grid
        self.col_grid = col_grid
        self.cache_key = (f"ichi_{row_grid.grid_id}_{col_grid.grid_id}"
                          f"_{row_grid.lam_max:g}_{chi_version_hash()}")
        self._values = None
        self.cache_dir = cache_dir or os.environ.get("FSDIAG_CACHE_DIR")

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            path = None
            if self.cache_dir:
                path = Path(self.cache_dir) / f"{self.cache_key}.npz"
                if path.exists():
                    self._values = np.load(path)["values"]
                    return self._values
            vals = ichi_kernel(self.row_grid.nodes[:, None],
                               self.col_grid.nodes[None, :])
            self._values = vals
            if path is not None:
                path.parent.mkdir(parents=True, exist_ok=True)
                np.savez_compressed(path, values=vals)
        return self._values


def kernel_decay_ratio(lam, lam1) -> np.ndarray:
    """|K(lam,lam1)| * <lam> * <lam-lam1>, the quantity bounded by one constant."""
    lam = np.asarray(lam, dtype=float)
    lam1 = np.asarray(lam1, dtype=float)
    k = np.abs(ichi_kernel(lam, lam1))
    return k * np.sqrt(1.0 + lam**2) * np.sqrt(1.0 + (lam - lam1) ** 2)
