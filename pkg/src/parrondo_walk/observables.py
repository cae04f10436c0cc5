"""Momentum distribution, winning probability and its running time average."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .state import WalkState


@dataclass(frozen=True)
class MomentumDistribution:
    momenta: np.ndarray
    probabilities: np.ndarray

    def __getitem__(self, n: int) -> float:
        L = (len(self.momenta) - 1) // 2
        if abs(n) > L:
            return 0.0
        return float(self.probabilities[n + L])

    def total(self) -> float:
        return float(self.probabilities.sum())


def probabilities(amplitudes: np.ndarray) -> np.ndarray:
    """Coin-traced P(n) for amplitude arrays of shape ``(..., 2, 2L+1)``."""
    return np.sum(amplitudes.real**2 + amplitudes.imag**2, axis=-2)


def momentum_distribution(state: WalkState) -> MomentumDistribution:
    return MomentumDistribution(state.momenta, probabilities(state.amplitudes))


def winning_from_probabilities(prob: np.ndarray) -> np.ndarray:
    """P_R - P_L along the last axis; the centre bin n = 0 counts for neither."""
    L = (prob.shape[-1] - 1) // 2
    return prob[..., L + 1 :].sum(axis=-1) - prob[..., :L].sum(axis=-1)


def winning_probability(dist) -> float:
    """O = sum_{n>=1} P(n) - sum_{n<=-1} P(n).

    Accepts a :class:`MomentumDistribution`, a :class:`WalkState`, or a bare
    probability array centred on n = 0.
    """
    if isinstance(dist, WalkState):
        prob = probabilities(dist.amplitudes)
    elif isinstance(dist, MomentumDistribution):
        prob = dist.probabilities
    else:
        prob = np.asarray(dist, dtype=float)
    return float(winning_from_probabilities(prob))


def running_average(values) -> np.ndarray:
    """Running mean along the last axis: out[..., N] = mean(values[..., :N+1])."""
    values = np.asarray(values, dtype=float)
    if values.shape[-1] == 0:
        return values.copy()
    counts = np.arange(1, values.shape[-1] + 1)
    return np.cumsum(values, axis=-1) / counts


def time_averaged(records: Sequence[float]) -> float:
    """Mean of O(0), ..., O(N), i.e. normalized by the N + 1 recorded values.

    Raises
    ------
    ValueError
        If ``records`` is empty.
    """
    records = np.asarray(records, dtype=float)
    if records.size == 0:
        raise ValueError("time average needs at least one record")
    return float(records.sum() / records.size)


class RunningMean:
    """Incrementally updated mean of a stream of O values."""

    def __init__(self):
        self.count = 0
        self.total = 0.0

    def update(self, value: float) -> float:
        self.count += 1
        self.total += value
        return self.value

    @property
    def value(self) -> float:
        if self.count == 0:
            raise ValueError("no values recorded")
        return self.total / self.count
