"""Monte Carlo averages over coin phase noise and quasimomentum spread.

Every trajectory is labelled by (walk label, realization r, beta index q).
Its phase-noise draws come from a Philox stream keyed by
(seed, crc32(label), r, q), so results do not depend on chunking, thread
count or evaluation order.
"""

from __future__ import annotations

import logging
import math
import zlib
from dataclasses import dataclass, field
from typing import Iterator, Mapping

import numpy as np

from .coins import CoinMatrix, coin_entries
from .observables import probabilities, running_average, winning_from_probabilities
from .propagation import StepOperator, raise_leak
from .state import LEAK_TOLERANCE, GameSchedule, WalkParams, WalkState, default_half_width, default_state

logger = logging.getLogger(__name__)

_BETA_STREAM = 0x0B37A


@dataclass(frozen=True)
class NoiseSpec:
    """Uniform per-step offsets delta in [-delta_max, delta_max] added to gamma."""

    delta_max: float = 0.0
    realizations: int = 1
    seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.delta_max) and self.delta_max >= 0):
            raise ValueError(f"noise half-width must be >= 0, got {self.delta_max}")
        if self.realizations < 1:
            raise ValueError(f"realization count must be >= 1, got {self.realizations}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class QuasimomentumSpec:
    """Gaussian quasimomentum spread, zero mean, folded into [0, 1)."""

    sigma_beta: float = 0.0
    count: int = 1
    seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.sigma_beta) and self.sigma_beta >= 0):
            raise ValueError(f"sigma_beta must be >= 0, got {self.sigma_beta}")
        if self.count < 1:
            raise ValueError(f"quasimomentum sample count must be >= 1, got {self.count}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def label_key(label: str) -> int:
    return zlib.crc32(label.encode("utf-8"))


def _noise_generator(seed: int, label: str, realization: int, beta_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(label_key(label), int(realization), int(beta_index)))
    return np.random.Generator(np.random.Philox(ss))


def noise_offsets(spec: NoiseSpec, label: str, realization: int, steps: int, beta_index: int = 0) -> np.ndarray:
    """Offsets delta_1..delta_steps for one trajectory (index t - 1 is step t)."""
    if spec.delta_max == 0.0:
        return np.zeros(steps)
    rng = _noise_generator(spec.seed, label, realization, beta_index)
    return rng.uniform(-spec.delta_max, spec.delta_max, size=steps)


def noisy_coin_stream(
    base: CoinMatrix, spec: NoiseSpec, realization: int, label: str = "A", beta_index: int = 0
) -> Iterator[CoinMatrix]:
    """Endless per-step coins M(alpha, gamma + delta_t, chi)."""
    if spec.delta_max == 0.0:
        while True:
            yield base
    rng = _noise_generator(spec.seed, label, realization, beta_index)
    while True:
        yield base.with_gamma_offset(rng.uniform(-spec.delta_max, spec.delta_max))


def sample_quasimomenta(spec: QuasimomentumSpec) -> np.ndarray:
    if spec.sigma_beta == 0.0:
        return np.zeros(spec.count)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(spec.seed, spawn_key=(_BETA_STREAM,))))
    beta = np.mod(rng.normal(0.0, spec.sigma_beta, size=spec.count), 1.0)
    # mod of a tiny negative number can round up to exactly 1.0
    beta[beta >= 1.0] = 0.0
    return beta


@dataclass
class WalkAverages:
    O: np.ndarray
    O_avg: np.ndarray
    distribution: np.ndarray
    trajectories: int
    per_trajectory_O: np.ndarray = field(default=None, repr=False)
    per_trajectory_P: np.ndarray = field(default=None, repr=False)


@dataclass
class EnsembleResult:
    """Ensemble means for steps 0..N, keyed by walk label."""

    walks: dict
    betas: np.ndarray
    metadata: dict

    def __getitem__(self, label: str) -> WalkAverages:
        return self.walks[label]

    @property
    def momenta(self) -> np.ndarray:
        L = self.metadata["half_width"]
        return np.arange(-L, L + 1)


def _schedule_angles(schedule: GameSchedule, steps: int) -> np.ndarray:
    """(steps, 3) array of (alpha, gamma, chi) for steps 1..N."""
    return np.array([[c.alpha, c.gamma, c.chi] for c in map(schedule.coins.__getitem__, schedule.labels(steps))]).reshape(steps, 3)


def _evolve_rows(label, schedule, params, initial, steps, betas, rows, noise, workers):
    """Evolve the trajectories listed in ``rows`` ((r, q) pairs) as one batch.

    Returns O for steps 0..N per row and the final momentum distributions.
    """
    nrows = len(rows)
    angles = _schedule_angles(schedule, steps)
    deltas = np.stack([noise_offsets(noise, label, r, steps, q) for r, q in rows]) if steps else np.zeros((nrows, 0))
    op = StepOperator(initial.half_width, params, betas=betas[[q for _, q in rows]], workers=workers)
    amps = np.broadcast_to(initial.amplitudes, (nrows,) + initial.amplitudes.shape).copy()
    O = np.empty((nrows, steps + 1))
    O[:, 0] = winning_from_probabilities(probabilities(amps))
    for t in range(1, steps + 1):
        alpha, gamma, chi = angles[t - 1]
        if noise.delta_max == 0.0:
            coin = schedule.coin_at(t).matrix
        else:
            coin = coin_entries(alpha, gamma + deltas[:, t - 1], chi)
        amps, O[:, t], edge = op.advance(amps, coin)
        if np.any(edge >= LEAK_TOLERANCE):
            bad = int(np.argmax(edge >= LEAK_TOLERANCE))
            r, q = rows[bad]
            raise_leak(
                edge[bad], initial.half_width, t,
                f" (walk {label}, realization {r}, quasimomentum index {q}, beta={betas[q]!r})",
            )
    return O, probabilities(amps)


def run_ensemble(
    schedules: Mapping[str, GameSchedule],
    params: WalkParams,
    noise: NoiseSpec,
    qm: QuasimomentumSpec,
    steps: int,
    initial: WalkState = None,
    chunk_size: int = 1024,
    keep_trajectories: bool = False,
    workers=None,
) -> EnsembleResult:
    """Average O(t) and its running mean over realizations x quasimomenta.

    Each walk label gets its own noise streams. Means are reduced chunk by
    chunk in a fixed order, so identical inputs give bit-identical output.
    """
    if steps < 0:
        raise ValueError("number of steps must be non-negative")
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    if initial is None:
        initial = default_state(default_half_width(steps))
    betas = np.mod(params.beta + sample_quasimomenta(qm), 1.0)
    betas[betas >= 1.0] = 0.0
    pairs = [(r, q) for r in range(noise.realizations) for q in range(qm.count)]
    total = len(pairs)

    walks = {}
    for label, schedule in schedules.items():
        sum_O = np.zeros(steps + 1)
        sum_avg = np.zeros(steps + 1)
        sum_P = np.zeros(initial.amplitudes.shape[-1])
        kept_O, kept_P = [], []
        for start in range(0, total, chunk_size):
            rows = pairs[start : start + chunk_size]
            O, P = _evolve_rows(label, schedule, params, initial, steps, betas, rows, noise, workers)
            sum_O += O.sum(axis=0)
            sum_avg += running_average(O).sum(axis=0)
            sum_P += P.sum(axis=0)
            if keep_trajectories:
                kept_O.append(O)
                kept_P.append(P)
            logger.debug("walk %s: %d/%d trajectories", label, min(start + chunk_size, total), total)
        walks[label] = WalkAverages(
            O=sum_O / total,
            O_avg=sum_avg / total,
            distribution=sum_P / total,
            trajectories=total,
            per_trajectory_O=np.concatenate(kept_O) if keep_trajectories else None,
            per_trajectory_P=np.concatenate(kept_P) if keep_trajectories else None,
        )

    metadata = {
        "steps": steps,
        "half_width": initial.half_width,
        "noise": {"delta_max": noise.delta_max, "realizations": noise.realizations, "seed": noise.seed},
        "quasimomentum": {"sigma_beta": qm.sigma_beta, "count": qm.count, "seed": qm.seed},
        "params": {
            "k": params.k,
            "tau": params.tau,
            "beta": params.beta,
            "propagator": params.propagator,
            "light_shift": params.light_shift,
        },
        "schedules": {
            label: {
                "pattern": list(s.pattern),
                "coins": {name: [c.alpha, c.gamma, c.chi] for name, c in s.coins.items()},
            }
            for label, s in schedules.items()
        },
        "chunk_size": chunk_size,
    }
    return EnsembleResult(walks, betas, metadata)
