"""Coin operators acting on the two internal (spin) states.

The coin is the SU(2) matrix

    M(alpha, gamma, chi) = [[ e^{i alpha} cos chi, -e^{-i gamma} sin chi],
                            [ e^{i gamma} sin chi,  e^{-i alpha} cos chi]]

Index 0 is the coin state |0>, index 1 is |1>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class CoinMatrix:
    """Immutable coin operator. Angles are in radians."""

    alpha: float
    gamma: float
    chi: float
    matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("alpha", "gamma", "chi"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"coin angle {name} must be finite, got {value!r}")
        object.__setattr__(self, "matrix", coin_entries(self.alpha, self.gamma, self.chi))
        self.matrix.setflags(write=False)

    @classmethod
    def from_degrees(cls, alpha: float, gamma: float, chi: float) -> "CoinMatrix":
        return cls(math.radians(alpha), math.radians(gamma), math.radians(chi))

    def degrees(self) -> tuple[float, float, float]:
        return math.degrees(self.alpha), math.degrees(self.gamma), math.degrees(self.chi)

    def with_gamma_offset(self, delta: float) -> "CoinMatrix":
        return CoinMatrix(self.alpha, self.gamma + delta, self.chi)


def coin_entries(alpha, gamma, chi):
    """Coin matrices for (broadcastable) angle arrays, shape ``(..., 2, 2)``."""
    alpha, gamma, chi = np.broadcast_arrays(
        np.asarray(alpha, float), np.asarray(gamma, float), np.asarray(chi, float)
    )
    c = np.cos(chi)
    s = np.sin(chi)
    out = np.empty(alpha.shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = np.exp(1j * alpha) * c
    out[..., 0, 1] = -np.exp(-1j * gamma) * s
    out[..., 1, 0] = np.exp(1j * gamma) * s
    out[..., 1, 1] = np.exp(-1j * alpha) * c
    return out


def make_coin(alpha: float, gamma: float, chi: float) -> CoinMatrix:
    """Build the coin M(alpha, gamma, chi) from angles in radians.

    Raises
    ------
    ValueError
        If any angle is NaN or infinite.
    """
    return CoinMatrix(float(alpha), float(gamma), float(chi))


def compensate_light_shift(coin: CoinMatrix, k: float) -> CoinMatrix:
    """Coin that, combined with the per-kick light shift, acts like ``coin``.

    The light shift diag(e^{-ik}, e^{ik}) commutes with kick and free
    evolution, and diag(e^{-ik}, e^{ik}) M(k, gamma - k, chi) = M(0, gamma, chi).
    So ``alpha = k`` cancels the shift exactly once ``gamma`` is reduced by
    ``k``, which is the ``gamma' = gamma + alpha`` rule read backwards. Only
    meaningful for coins with ``alpha == 0``.
    """
    if coin.alpha != 0.0:
        raise ValueError("light-shift compensation needs a coin with alpha = 0")
    return CoinMatrix(k, coin.gamma - k, coin.chi)
