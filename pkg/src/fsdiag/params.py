"""Model parameter bundle and mode-set helpers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ModelParams:
    """Hurst index H, spectral cutoff exponent n, and regularity weights b, c.

    H = 1/2 is accepted only with ``white_noise=True`` (the space-time
    white-noise experiment mode); otherwise H must lie in (1/2, 1).
    """

    H: float
    n: int
    b: float = 0.0
    c: float = 0.0
    white_noise: bool = False

    def __post_init__(self):
        if self.white_noise:
            if self.H != 0.5:
                raise ValueError("white-noise mode requires H = 1/2")
        elif not 0.5 < self.H < 1.0:
            raise ValueError("H must lie in (1/2, 1); H=1/2 only as white-noise mode")
        if not 0.0 <= self.b < 1.0 or not 0.0 <= self.c < 1.0:
            raise ValueError("b and c must lie in [0, 1)")
        if self.n < 0 or int(self.n) != self.n:
            raise ValueError("n must be a nonnegative integer")

    @property
    def mode_bound(self) -> float:
        return 2.0 ** self.n


def mode_set(n: int, exclude_zero: bool = False) -> np.ndarray:
    """Integer modes k with sqrt(1 + k^2) <= 2^n, ascending."""
    bound = 2.0 ** n
    if bound < 1.0:
        return np.array([], dtype=int)
    kmax = int(np.floor(np.sqrt(max(bound**2 - 1.0, 0.0))))
    ks = np.arange(-kmax, kmax + 1)
    if exclude_zero:
        ks = ks[ks != 0]
    return ks


def mode_in_range(k: int, n: int) -> bool:
    return 1.0 + k * k <= 4.0 ** n


def bracket(x):
    """Japanese bracket <x> = sqrt(1 + x^2) (elementwise)."""
    x = np.asarray(x, dtype=float)
    out = np.sqrt(1.0 + x * x)
    return out if out.ndim else float(out)
