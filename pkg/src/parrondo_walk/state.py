"""Walk states on a truncated momentum lattice and run parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .coins import CoinMatrix
from .errors import LatticeTooSmallError

KICKED_ROTOR = "kicked-rotor"
IDEAL = "ideal"
PROPAGATORS = (KICKED_ROTOR, IDEAL)

# Momenta |n| >= L - EDGE_WIDTH count as the lattice edge.
EDGE_WIDTH = 2
LEAK_TOLERANCE = 1e-10


def default_half_width(steps: int) -> int:
    return 2 * int(steps) + 32


@dataclass
class WalkState:
    """Amplitudes psi[c, n + L] for coin c in {0, 1} and momentum n in [-L, L]."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 2 or amps.shape[0] != 2 or amps.shape[1] % 2 != 1:
            raise ValueError(f"amplitudes must have shape (2, 2L+1), got {amps.shape}")
        self.amplitudes = amps

    @property
    def half_width(self) -> int:
        return (self.amplitudes.shape[1] - 1) // 2

    @property
    def momenta(self) -> np.ndarray:
        L = self.half_width
        return np.arange(-L, L + 1)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def amplitude(self, coin: int, n: int) -> complex:
        return complex(self.amplitudes[coin, n + self.half_width])

    def edge_probability(self) -> float:
        return edge_probability(self.amplitudes)

    def check_boundary(self, step=None) -> None:
        check_boundary(self.amplitudes, step=step)

    def copy(self) -> "WalkState":
        return WalkState(self.amplitudes.copy())


def edge_probability(amplitudes: np.ndarray) -> np.ndarray:
    """Probability on |n| >= L - 2, over the trailing (coin, momentum) axes."""
    prob = np.abs(amplitudes) ** 2
    w = EDGE_WIDTH + 1
    return prob[..., :w].sum(axis=(-2, -1)) + prob[..., -w:].sum(axis=(-2, -1))


def check_boundary(amplitudes: np.ndarray, step=None) -> None:
    leaked = np.max(edge_probability(amplitudes))
    if leaked >= LEAK_TOLERANCE:
        L = (amplitudes.shape[-1] - 1) // 2
        where = "" if step is None else f" at step {step}"
        raise LatticeTooSmallError(
            f"probability {leaked:.3e} reached the lattice edge |n| >= {L - EDGE_WIDTH}{where}; "
            f"increase the lattice half-width (L={L})",
            leaked=float(leaked),
            step=step,
        )


def _normalized_coin(coin_amplitudes) -> np.ndarray:
    coin = np.asarray(coin_amplitudes, dtype=np.complex128)
    if coin.shape != (2,):
        raise ValueError("coin amplitudes must be a pair of complex numbers")
    norm = np.linalg.norm(coin)
    if norm == 0.0 or not np.isfinite(norm):
        raise ValueError("coin amplitudes must not both be zero")
    return coin / norm


def ratchet_state(
    momenta: Sequence[int] = (-1, 0, 1),
    coin_amplitudes=(1.0, 1j),
    half_width: int = 32,
    phase_sign: int = -1,
) -> WalkState:
    """Ratchet superposition ``sum_s e^{phase_sign * i s pi/2} |s>`` with a coin spinor.

    ``phase_sign=-1`` gives the e^{-i s pi/2} phases of the generic ratchet;
    ``phase_sign=+1`` gives the conjugate convention, which is what
    :func:`default_state` uses.
    """
    if phase_sign not in (1, -1):
        raise ValueError("phase_sign must be +1 or -1")
    momenta = [int(s) for s in momenta]
    if not momenta:
        raise ValueError("at least one contributing momentum is required")
    if len(set(momenta)) != len(momenta):
        raise ValueError("contributing momenta must be distinct")
    L = int(half_width)
    if L < 0:
        raise ValueError("half_width must be non-negative")
    if max(abs(s) for s in momenta) > L:
        raise LatticeTooSmallError(f"momenta {momenta} do not fit in a lattice with L={L}")
    coin = _normalized_coin(coin_amplitudes)

    row = np.zeros(2 * L + 1, dtype=np.complex128)
    for s in momenta:
        # exact quarter-turn phases
        row[s + L] = (1, 1j, -1, -1j)[(phase_sign * s) % 4]
    row /= math.sqrt(len(momenta))
    return WalkState(coin[:, None] * row[None, :])


def default_state(half_width: int = 32) -> WalkState:
    """(|0> + i|1>)/sqrt2 (x) (-i|-1> + |0> + i|1>)/sqrt3."""
    return ratchet_state((-1, 0, 1), (1.0, 1j), half_width, phase_sign=1)


def single_momentum_state(half_width: int = 32, coin_amplitudes=(1.0, 1j), n: int = 0) -> WalkState:
    """Normalized coin spinor (x) |n>."""
    L = int(half_width)
    if abs(n) > L:
        raise LatticeTooSmallError(f"momentum {n} does not fit in a lattice with L={L}")
    amps = np.zeros((2, 2 * L + 1), dtype=np.complex128)
    amps[:, n + L] = _normalized_coin(coin_amplitudes)
    return WalkState(amps)


@dataclass(frozen=True)
class WalkParams:
    k: float = 1.56
    tau: float = 4 * math.pi
    beta: float = 0.0
    propagator: str = KICKED_ROTOR
    light_shift: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k >= 0):
            raise ValueError(f"kick strength must be finite and >= 0, got {self.k}")
        if not math.isfinite(self.tau):
            raise ValueError(f"kick period must be finite, got {self.tau}")
        if not (0.0 <= self.beta < 1.0):
            raise ValueError(f"quasimomentum must lie in [0, 1), got {self.beta}")
        if self.propagator not in PROPAGATORS:
            raise ValueError(f"propagator must be one of {PROPAGATORS}, got {self.propagator!r}")


@dataclass(frozen=True)
class GameSchedule:
    """Named coins applied cyclically in the order given by ``pattern``."""

    coins: Mapping[str, CoinMatrix]
    pattern: tuple[str, ...] = field(default=())

    def __post_init__(self):
        pattern = tuple(self.pattern)
        if not pattern:
            raise ValueError("schedule pattern must not be empty")
        missing = sorted(set(pattern) - set(self.coins))
        if missing:
            raise ValueError(f"schedule uses unknown coin labels {missing}")
        object.__setattr__(self, "pattern", pattern)
        object.__setattr__(self, "coins", dict(self.coins))

    @classmethod
    def from_string(cls, coins: Mapping[str, CoinMatrix], pattern: str) -> "GameSchedule":
        """``"ABB"`` -> pattern ``("A", "B", "B")`` (single-character labels)."""
        return cls(coins, tuple(pattern))

    def label_at(self, t: int) -> str:
        """Label of the coin used in step ``t`` (1-based)."""
        if t < 1:
            raise ValueError("steps are numbered from 1")
        return self.pattern[(t - 1) % len(self.pattern)]

    def coin_at(self, t: int) -> CoinMatrix:
        return self.coins[self.label_at(t)]

    def labels(self, steps: int) -> list[str]:
        return [self.label_at(t) for t in range(1, steps + 1)]
