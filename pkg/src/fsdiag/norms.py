"""Weighted (mode, frequency) norms for discretized spectral data."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .params import bracket
from .noise import dyadic_classify
from .quadrature import QuadratureGrid, pairwise_sum


@dataclass(frozen=True)
class SpectralFunction:
    """Mode-indexed spectral samples on one shared frequency grid."""

    grid: QuadratureGrid
    modes: dict

    def __post_init__(self):
        n = len(self.grid.nodes)
        for k, v in self.modes.items():
            if len(np.asarray(v)) != n:
                raise ValueError(f"mode {k} not sampled on the shared grid")


@dataclass
class NormEstimate:
    """A computed norm-type scalar with its error budget and provenance."""

    value: float
    quad_error: float = 0.0
    mc_error: float = 0.0
    grid_id: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.value < -1e-12:
            raise ValueError("norm estimates are nonnegative")
        self.value = max(self.value, 0.0)
        if self.quad_error < 0 or self.mc_error < 0:
            raise ValueError("error fields are nonnegative")


def xbc_norm_sq(z: SpectralFunction, b: float, c: float) -> NormEstimate:
    """Squared anisotropic norm: int dlam sum_k (<lam>^2b + <k>^2c) |z_k|^2.

    ``b = 0`` or ``c = 0`` recover the one-sided scales (the other weight
    degenerates to the constant 1).
    """
    if not (0.0 <= b < 1.0 and 0.0 <= c < 1.0):
        raise ValueError("b and c must lie in [0, 1)")
    lam_w = bracket(z.grid.nodes) ** (2.0 * b)
    per_mode = []
    for k in sorted(z.modes):
        v = np.abs(np.asarray(z.modes[k])) ** 2
        w = lam_w + bracket(k) ** (2.0 * c)
        per_mode.append(float(np.dot(v * w, z.grid.weights)))
    total = float(np.real(pairwise_sum(per_mode)))
    return NormEstimate(value=total, quad_error=z.grid.tail_error * total,
                        grid_id=z.grid.grid_id, params={"b": b, "c": c})


def weighted_mode_sum(weight_rule, modes):
    """Partial sum of a mode weight plus the dyadic-block tail diagnostic.

    Returns (value, block_sums, label, tail_ratio); blocks are indexed by
    2^j <= |k| < 2^(j+1) and the k = 0 term (if present) joins the total
    but no block.
    """
    modes = np.asarray(list(modes), dtype=int)
    if len(modes) == 0:
        return 0.0, np.array([]), "inconclusive", float("nan")
    vals = np.array([float(weight_rule(int(k))) for k in modes])
    total = float(np.real(pairwise_sum(list(vals))))
    absk = np.abs(modes)
    kmax = absk.max()
    blocks = []
    j = 0
    while 2**j <= kmax:
        sel = (absk >= 2**j) & (absk < 2 ** (j + 1))
        if np.any(sel):
            blocks.append(float(np.sum(vals[sel])))
        j += 1
    label, ratio = dyadic_classify(blocks)
    return total, np.asarray(blocks), label, ratio
