"""Brute-force search over coin angles (gamma, chi) at fixed alpha.

The default objective simulates walks A, B and ABB without noise and scores
a candidate coin by |time-averaged O(N)|. A candidate is feasible when it
reproduces the paradox: A and B losing, ABB winning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from .coins import CoinMatrix, coin_entries
from .observables import winning_probability
from .propagation import StepOperator, evolve, raise_leak
from .state import LEAK_TOLERANCE, GameSchedule, WalkParams, WalkState, default_half_width, default_state

OBJECTIVES = ("A", "ABB", "joint")


def grid_axis(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Half-open degree range [start, stop) with the given spacing, rounded to 1e-9 deg."""
    if step <= 0:
        raise ValueError("grid step must be positive")
    count = max(1, int(math.ceil((stop - start) / step - 1e-9)))
    return tuple(round(start + i * step, 9) for i in range(count))


@dataclass(frozen=True)
class GridSpec:
    """Candidate angles (degrees) for the coin ``vary`` inside the walks A, B, ABB."""

    gamma_deg: Sequence[float]
    chi_deg: Sequence[float]
    alpha_deg: float = 0.0
    vary: str = "A"
    fixed_coins: Mapping[str, CoinMatrix] = field(default_factory=dict)
    walks: Mapping[str, str] = field(default_factory=lambda: {"A": "A", "B": "B", "ABB": "ABB"})
    objective: str = "joint"
    require_paradox: bool = True
    steps: int = 50

    def __post_init__(self):
        object.__setattr__(self, "gamma_deg", tuple(float(g) for g in self.gamma_deg))
        object.__setattr__(self, "chi_deg", tuple(float(c) for c in self.chi_deg))
        if not self.gamma_deg or not self.chi_deg:
            raise ValueError("grid must contain at least one point per angle")
        for value in self.gamma_deg + self.chi_deg:
            if not 0.0 <= value < 360.0:
                raise ValueError(f"grid angles must lie in [0, 360) degrees, got {value}")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        if self.steps < 1:
            raise ValueError("objective horizon must be at least one step")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.gamma_deg), len(self.chi_deg)

    def points(self) -> list[tuple[float, float]]:
        return [(g, c) for g in self.gamma_deg for c in self.chi_deg]


@dataclass(frozen=True)
class Candidate:
    alpha_deg: float
    gamma_deg: float
    chi_deg: float
    value: float
    feasible: bool = True
    time_averages: Mapping[str, float] = field(default_factory=dict)

    @property
    def coin(self) -> CoinMatrix:
        return CoinMatrix.from_degrees(self.alpha_deg, self.gamma_deg, self.chi_deg)


@dataclass
class OptimizationReport:
    """Every evaluated grid point, feasible ones first, then by decreasing objective."""

    candidates: list

    def __len__(self):
        return len(self.candidates)

    @property
    def best(self) -> Candidate | None:
        for cand in self.candidates:
            if cand.feasible:
                return cand
        return None

    def feasible(self) -> list:
        return [c for c in self.candidates if c.feasible]


def _rank_key(c: Candidate):
    return (not c.feasible, -c.value, c.gamma_deg, c.chi_deg)


def paradox_flags(time_averages: Mapping[str, float]) -> bool:
    """A and B losing, ABB winning (labels missing from the mapping are not checked)."""
    checks = {"A": lambda v: v < 0, "B": lambda v: v < 0, "ABB": lambda v: v > 0}
    return all(check(time_averages[label]) for label, check in checks.items() if label in time_averages)


def score(time_averages: Mapping[str, float], objective: str) -> float:
    if objective == "joint":
        return min(abs(time_averages["A"]), abs(time_averages["ABB"]))
    return abs(time_averages[objective])


def objective_abs_time_avg(
    coins: Mapping[str, CoinMatrix],
    pattern: str | Sequence[str],
    params: WalkParams,
    steps: int,
    initial: WalkState | None = None,
) -> float:
    """|time-averaged O(steps)| of one noiseless walk."""
    if initial is None:
        initial = default_state(default_half_width(steps))
    traj = evolve(initial, GameSchedule(coins, tuple(pattern)), params, steps)
    return abs(float(traj.O_avg[-1]))


def _batched_time_average(pattern, vary, fixed, varied_coins, params, initial, steps, workers):
    """Time-averaged O(steps) for one walk pattern and a batch of candidate coins."""
    rows = varied_coins.shape[0]
    op = StepOperator(initial.half_width, params, workers=workers)
    amps = np.broadcast_to(initial.amplitudes, (rows,) + initial.amplitudes.shape).copy()
    total = np.full(rows, winning_probability(initial))
    for t in range(1, steps + 1):
        label = pattern[(t - 1) % len(pattern)]
        coin = varied_coins if label == vary else fixed[label].matrix
        amps, winning, edge = op.advance(amps, coin)
        if np.any(edge >= LEAK_TOLERANCE):
            bad = int(np.argmax(edge >= LEAK_TOLERANCE))
            raise_leak(edge[bad], initial.half_width, t, f" (grid row {bad})")
        total += winning
    return total / (steps + 1)


def grid_search(
    spec: GridSpec,
    objective: Callable[[float, float, float], float] | None = None,
    params: WalkParams | None = None,
    initial: WalkState | None = None,
    chunk_size: int = 2048,
    workers=None,
) -> OptimizationReport:
    """Evaluate every grid point and rank them.

    ``objective(alpha, gamma, chi)`` (radians) replaces the simulated score when
    given; such candidates are always feasible. Ties are broken by
    lexicographic (gamma, chi) order.
    """
    points = spec.points()
    if objective is not None:
        cands = [
            Candidate(spec.alpha_deg, g, c, float(objective(*map(math.radians, (spec.alpha_deg, g, c)))))
            for g, c in points
        ]
        return OptimizationReport(sorted(cands, key=_rank_key))

    params = params or WalkParams()
    if initial is None:
        initial = default_state(default_half_width(spec.steps))
    fixed = dict(spec.fixed_coins)
    patterns = {label: tuple(p) for label, p in spec.walks.items()}
    for label, pattern in patterns.items():
        missing = set(pattern) - set(fixed) - {spec.vary}
        if missing:
            raise ValueError(f"walk {label} uses coins {sorted(missing)} that are neither fixed nor varied")

    # walks without the varied coin need one evaluation only
    static = {}
    for label, pattern in patterns.items():
        if spec.vary not in pattern:
            static[label] = float(evolve(initial, GameSchedule(fixed, pattern), params, spec.steps).O_avg[-1])

    g = np.radians([p[0] for p in points])
    c = np.radians([p[1] for p in points])
    matrices = coin_entries(math.radians(spec.alpha_deg), g, c)
    averages = {label: np.empty(len(points)) for label in patterns if label not in static}
    for start in range(0, len(points), chunk_size):
        block = matrices[start : start + chunk_size]
        for label in averages:
            averages[label][start : start + len(block)] = _batched_time_average(
                patterns[label], spec.vary, fixed, block, params, initial, spec.steps, workers
            )

    cands = []
    for i, (gd, cd) in enumerate(points):
        tavg = dict(static)
        tavg.update({label: float(v[i]) for label, v in averages.items()})
        feasible = paradox_flags(tavg) if spec.require_paradox else True
        cands.append(Candidate(spec.alpha_deg, gd, cd, score(tavg, spec.objective), feasible, tavg))
    return OptimizationReport(sorted(cands, key=_rank_key))


def refine(
    report: OptimizationReport,
    spec: GridSpec,
    top: int = 3,
    span_deg: float = 1.0,
    step_deg: float = 0.01,
    **kwargs,
) -> OptimizationReport:
    """Re-search fine grids around the ``top`` best feasible candidates.

    The returned report merges the coarse candidates with the new ones, so its
    best value is never worse than the coarse best.
    """
    seeds = report.feasible()[:top] or report.candidates[:top]
    seen = {(c.gamma_deg, c.chi_deg): c for c in report.candidates}
    for seed in seeds:
        gammas = [round(v % 360.0, 9) for v in grid_axis(seed.gamma_deg - span_deg, seed.gamma_deg + span_deg + step_deg / 2, step_deg)]
        chis = [round(v % 360.0, 9) for v in grid_axis(seed.chi_deg - span_deg, seed.chi_deg + span_deg + step_deg / 2, step_deg)]
        fine = replace(spec, gamma_deg=sorted(set(gammas)), chi_deg=sorted(set(chis)))
        for cand in grid_search(fine, **kwargs).candidates:
            seen.setdefault((cand.gamma_deg, cand.chi_deg), cand)
    return OptimizationReport(sorted(seen.values(), key=_rank_key))
