"""One-step evolution operators and schedule-driven evolution.

Amplitude arrays have shape ``(..., 2, 2L+1)``: any leading batch axes, then
coin, then momentum n = -L..L. The kicked-rotor step is coin, then free
evolution e^{-i tau (n+beta)^2 / 2}, then the kick e^{-i k sigma_z cos theta}.
The ideal step is coin, then a conditional shift in which coin |0> moves to
n - 1 and coin |1> to n + 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import fft, special

from .coins import CoinMatrix
from .observables import probabilities, running_average, winning_from_probabilities
from . import _kernels
from .errors import LatticeTooSmallError
from .state import EDGE_WIDTH, IDEAL, LEAK_TOLERANCE, GameSchedule, WalkParams, WalkState, check_boundary

KERNEL_TOLERANCE = 1e-14

_QUARTER_TURNS = (1.0 + 0j, 1j, -1.0 + 0j, -1j)


def _i_power(q: int) -> complex:
    return _QUARTER_TURNS[q % 4]


@dataclass(frozen=True)
class KickKernel:
    """Fourier coefficients c_m = (-i)^m J_m(k) of e^{-i k cos theta}, |m| <= B."""

    k: float
    half_bandwidth: int
    coefficients: np.ndarray = field(repr=False)

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(-self.half_bandwidth, self.half_bandwidth + 1)

    def signed(self, sign: int) -> np.ndarray:
        """Coefficients of e^{-i sign k cos theta}."""
        if sign == 1:
            return self.coefficients
        # (i)^m J_m(k) = (-1)^m c_m
        return self.coefficients * np.where(self.offsets % 2 == 0, 1.0, -1.0)


@lru_cache(maxsize=64)
def kick_kernel(k: float, tol: float = KERNEL_TOLERANCE) -> KickKernel:
    if k < 0:
        raise ValueError("kick strength must be non-negative")
    B = 0
    # |J_m(k)| decays monotonically once m > k
    while not (B > k and abs(special.jv(B, k)) < tol):
        B += 1
    if k == 0.0:
        B = 0
    m = np.arange(-B, B + 1)
    coeffs = np.array([_i_power(-int(j)) for j in m]) * special.jv(m, k)
    coeffs.setflags(write=False)
    return KickKernel(float(k), B, coeffs)


def kick_matrix_element(k: float, dn: int, sign: int = 1) -> complex:
    """<n + dn| e^{-i sign k cos theta} |n> = (-i sign)^dn J_dn(k)."""
    if k < 0:
        raise ValueError("kick strength must be non-negative")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return _i_power(-sign * int(dn)) * float(special.jv(int(dn), k))


@lru_cache(maxsize=64)
def _kick_phases(k: float, size: int) -> np.ndarray:
    theta = 2.0 * np.pi * np.arange(size) / size
    phases = np.exp(-1j * k * np.array([1.0, -1.0])[:, None] * np.cos(theta)[None, :])
    phases.setflags(write=False)
    return phases


def _fft_size(width: int, k: float) -> int:
    return fft.next_fast_len(width + 2 * kick_kernel(k).half_bandwidth + 1)


def kick_amplitudes(amps: np.ndarray, k: float, workers=None) -> np.ndarray:
    """Apply the kick through the angle representation (zero-padded FFT)."""
    if k == 0.0:
        return np.array(amps, dtype=np.complex128, copy=True)
    width = amps.shape[-1]
    size = _fft_size(width, k)
    buf = np.zeros(amps.shape[:-1] + (size,), dtype=np.complex128)
    buf[..., :width] = amps
    x = fft.ifft(buf, axis=-1, workers=workers, overwrite_x=True)
    x *= _kick_phases(k, size)
    return fft.fft(x, axis=-1, workers=workers, overwrite_x=True)[..., :width]


def kick_amplitudes_kernel(amps: np.ndarray, k: float) -> np.ndarray:
    """Same operator as :func:`kick_amplitudes`, via truncated Bessel convolution."""
    kernel = kick_kernel(k)
    B = kernel.half_bandwidth
    width = amps.shape[-1]
    out = np.zeros_like(amps, dtype=np.complex128)
    for c, sign in enumerate((1, -1)):
        coeffs = kernel.signed(sign)
        src = amps[..., c, :]
        dst = out[..., c, :]
        for m, cm in zip(range(-B, B + 1), coeffs):
            if m >= 0:
                dst[..., m:] += cm * src[..., : width - m]
            else:
                dst[..., : width + m] += cm * src[..., -m:]
    return out


def free_phases(half_width: int, tau: float, beta) -> np.ndarray:
    """e^{-i tau (n + beta)^2 / 2} for n = -L..L; ``beta`` may be an array of rows.

    The phase is evaluated in turns, with the tau/(4 pi) * n^2 part reduced
    modulo 1 separately, so the resonance tau = 4 pi, beta = 0 gives exactly 1.
    """
    n = np.arange(-half_width, half_width + 1, dtype=float)
    beta = np.asarray(beta, dtype=float)[..., None]
    ratio = tau / (4.0 * math.pi)
    turns = np.mod(ratio * n * n, 1.0) + np.mod(ratio * (2.0 * n * beta + beta * beta), 1.0)
    return np.exp(-2j * np.pi * turns)


def coin_amplitudes(amps: np.ndarray, coin: np.ndarray) -> np.ndarray:
    """(psi_0n, psi_1n) <- M (psi_0n, psi_1n); ``coin`` is (2, 2) or (batch, 2, 2)."""
    coin = np.asarray(coin)
    m = coin[..., None]
    a0 = amps[..., 0, :]
    a1 = amps[..., 1, :]
    out = np.empty_like(amps, dtype=np.complex128)
    out[..., 0, :] = m[..., 0, 0, :] * a0 + m[..., 0, 1, :] * a1
    out[..., 1, :] = m[..., 1, 0, :] * a0 + m[..., 1, 1, :] * a1
    return out


def light_shift_phases(k: float) -> np.ndarray:
    return np.array([np.exp(-1j * k), np.exp(1j * k)])[:, None]


def shift_amplitudes(amps: np.ndarray) -> np.ndarray:
    """Ideal conditional shift: coin 0 to n - 1, coin 1 to n + 1 (no wrap-around)."""
    out = np.zeros_like(amps, dtype=np.complex128)
    out[..., 0, :-1] = amps[..., 0, 1:]
    out[..., 1, 1:] = amps[..., 1, :-1]
    return out


class StepOperator:
    """Precomputed single-step propagator on a fixed lattice.

    ``betas`` gives one quasimomentum per batch row (kicked rotor only); when
    omitted the value from ``params`` is used for every row.
    """

    def __init__(self, half_width: int, params: WalkParams, betas=None, workers=None):
        self.half_width = int(half_width)
        self.width = 2 * self.half_width + 1
        self.params = params
        self.workers = workers
        self.ideal = params.propagator == IDEAL
        beta = params.beta if betas is None else np.asarray(betas, dtype=float)
        if np.ndim(beta) and np.all(beta == beta[0]):
            beta = beta[0]
        self._free = np.atleast_2d(free_phases(self.half_width, params.tau, beta))
        self._light = np.array([np.exp(-1j * params.k), np.exp(1j * params.k)])
        if not self.ideal:
            self._size = _fft_size(self.width, params.k)
            self._kick = _kick_phases(params.k, self._size)

    def __call__(self, amps: np.ndarray, coin: np.ndarray) -> np.ndarray:
        """Propagate ``amps`` ((2, W) or (rows, 2, W)) by one step."""
        single = amps.ndim == 2
        out = self.advance(amps[None] if single else amps, coin)[0]
        return out[0] if single else out

    def advance(self, amps: np.ndarray, coin: np.ndarray):
        """One step for a (rows, 2, W) batch.

        Returns the new amplitudes together with the per-row winning
        probability and the probability on the lattice edge.
        """
        rows = amps.shape[0]
        coins = np.ascontiguousarray(np.broadcast_to(coin, (rows, 2, 2)) if np.ndim(coin) == 3 else np.asarray(coin)[None], dtype=np.complex128)
        out = np.empty((rows, 2, self.width), dtype=np.complex128)
        winning = np.empty(rows)
        edge = np.empty(rows)
        if self.ideal:
            shifted = shift_amplitudes(coin_amplitudes(amps, coins))
            _kernels.extract_and_measure(shifted, self._light, self.params.light_shift, out, winning, edge, EDGE_WIDTH + 1)
            return out, winning, edge
        buf = np.zeros((rows, 2, self._size), dtype=np.complex128)
        _kernels.coin_free_into(np.ascontiguousarray(amps), coins, self._free, buf)
        if self.params.k != 0.0:
            buf = fft.ifft(buf, axis=-1, workers=self.workers, overwrite_x=True)
            buf *= self._kick
            buf = fft.fft(buf, axis=-1, workers=self.workers, overwrite_x=True)
        _kernels.extract_and_measure(buf, self._light, self.params.light_shift, out, winning, edge, EDGE_WIDTH + 1)
        return out, winning, edge


def apply_kick(state: WalkState, k: float) -> WalkState:
    state.check_boundary()
    out = WalkState(kick_amplitudes(state.amplitudes, k))
    out.check_boundary()
    return out


def apply_free(state: WalkState, tau: float, beta: float) -> WalkState:
    return WalkState(state.amplitudes * free_phases(state.half_width, tau, beta))


def apply_coin(state: WalkState, coin: CoinMatrix) -> WalkState:
    return WalkState(coin_amplitudes(state.amplitudes, coin.matrix))


def apply_light_shift(state: WalkState, k: float) -> WalkState:
    """Relative phase 2k between the coin states: |0> gets e^{-ik}, |1> gets e^{+ik}."""
    return WalkState(state.amplitudes * light_shift_phases(k))


def ideal_step(state: WalkState, coin: CoinMatrix) -> WalkState:
    out = WalkState(shift_amplitudes(coin_amplitudes(state.amplitudes, coin.matrix)))
    out.check_boundary()
    return out


def step(state: WalkState, coin: CoinMatrix, params: WalkParams) -> WalkState:
    """One coin + propagation step, checking the lattice edge afterwards."""
    op = StepOperator(state.half_width, params)
    out = WalkState(op(state.amplitudes, coin.matrix))
    out.check_boundary()
    return out


def raise_leak(leaked, half_width, step, context=""):
    raise LatticeTooSmallError(
        f"probability {leaked:.3e} reached the lattice edge |n| >= {half_width - EDGE_WIDTH} "
        f"at step {step}{context}; increase the lattice half-width (L={half_width})",
        leaked=float(leaked),
        step=step,
    )


@dataclass
class Trajectory:
    """Winning probabilities for steps 0..N; entry 0 is the initial state."""

    labels: list
    O: np.ndarray
    O_avg: np.ndarray
    final_state: WalkState
    states: list = None

    @property
    def steps(self) -> int:
        return len(self.O) - 1

    def records(self):
        return [(t, float(o), float(a)) for t, (o, a) in enumerate(zip(self.O, self.O_avg))]


def evolve(
    state: WalkState,
    schedule: GameSchedule,
    params: WalkParams,
    steps: int,
    keep_states: bool = False,
    check_leak: bool = True,
    workers=None,
) -> Trajectory:
    """Run ``steps`` steps, using coin ``pattern[(t - 1) % len(pattern)]`` at step t."""
    if steps < 0:
        raise ValueError("number of steps must be non-negative")
    op = StepOperator(state.half_width, params, betas=[params.beta], workers=workers)
    amps = state.amplitudes[None].copy()
    O = np.empty(steps + 1)
    O[0] = winning_from_probabilities(probabilities(amps))[0]
    states = [state.copy()] if keep_states else None
    labels = schedule.labels(steps)
    for t, label in enumerate(labels, start=1):
        amps, winning, edge = op.advance(amps, schedule.coins[label].matrix)
        if check_leak and edge[0] >= LEAK_TOLERANCE:
            raise_leak(edge[0], state.half_width, t)
        O[t] = winning[0]
        if keep_states:
            states.append(WalkState(amps[0].copy()))
    return Trajectory(labels, O, running_average(O), WalkState(amps[0]), states)
