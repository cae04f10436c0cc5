"""Execute a :class:`RunConfig` and write series, distributions and a manifest."""

from __future__ import annotations

import json
import logging
import math
import platform
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .coins import CoinMatrix
from .config import RunConfig, dump_config
from .ensembles import NoiseSpec, QuasimomentumSpec, run_ensemble
from .io import DISTRIBUTION_COLUMNS, SERIES_COLUMNS, distribution_rows, emit, series_rows
from .optimizer import GridSpec, grid_axis, grid_search, refine
from .propagation import evolve
from .state import GameSchedule, WalkParams, default_half_width, ratchet_state

logger = logging.getLogger(__name__)


def build_coins(cfg: RunConfig) -> dict:
    return {label: CoinMatrix.from_degrees(c.alpha_deg, c.gamma_deg, c.chi_deg) for label, c in cfg.coins.items()}


def build_params(cfg: RunConfig, propagator=None) -> WalkParams:
    w = cfg.walk
    return WalkParams(w.k, w.tau, w.beta, propagator or w.propagator, w.light_shift)


def build_state(cfg: RunConfig, label: str):
    st = cfg.initial_states[label]
    L = cfg.walk.half_width if cfg.walk.half_width is not None else default_half_width(cfg.steps)
    coin = [complex(re, im) for re, im in st.coin]
    return ratchet_state(st.momenta, coin, L, st.phase_sign)


def _tag(value) -> str:
    return format(value, "g")


class Runner:
    def __init__(self, cfg: RunConfig, out_dir, workers=None):
        self.cfg = cfg
        self.out_dir = Path(out_dir)
        self.workers = workers
        self.files = []
        self.extra = {}

    def manifest_core(self) -> dict:
        return {
            "config": self.cfg.to_dict(),
            "seeds": {"noise": self.cfg.seed, "quasimomentum": self.cfg.seed},
            "version": __version__,
            "numpy": np.__version__,
        }

    def write(self, stem, columns, rows, **meta):
        path = emit(self.out_dir / stem, columns, rows, self.cfg.format, manifest=self.manifest_core())
        self.files.append({"path": path.name, "columns": list(columns), "rows": len(rows), **meta})

    def _stem(self, *parts):
        return "_".join([self.cfg.name, *[p for p in parts if p]])

    def run(self) -> dict:
        start = time.time()
        getattr(self, f"_run_{self.cfg.kind}")()
        manifest = self.manifest_core()
        manifest.update(
            {
                "started": time.strftime("%Y-%m-%dT%H:%M:%S%z", time.localtime(start)),
                "wall_clock_seconds": round(time.time() - start, 3),
                "python": platform.python_version(),
                "files": self.files,
            }
        )
        manifest.update(self.extra)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        (self.out_dir / f"{self.cfg.name}_manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
        (self.out_dir / f"{self.cfg.name}_config.yaml").write_text(dump_config(self.cfg))
        return manifest

    def _run_walks(self):
        cfg = self.cfg
        coins = build_coins(cfg)
        propagators = cfg.propagators or [cfg.walk.propagator]
        many_states = len(cfg.initial_states) > 1
        many_props = len(propagators) > 1
        for prop in propagators:
            params = build_params(cfg, prop)
            for state_label in cfg.initial_states:
                initial = build_state(cfg, state_label)
                for label, pattern in cfg.walks.items():
                    traj = evolve(initial, GameSchedule(coins, tuple(pattern)), params, cfg.steps, workers=self.workers)
                    parts = (label, state_label if many_states else "", prop if many_props else "")
                    meta = {"walk": label, "initial_state": state_label, "propagator": prop}
                    self.write(self._stem(*parts, "series"), SERIES_COLUMNS, series_rows(traj.O, traj.O_avg), kind="series", **meta)
                    P = (np.abs(traj.final_state.amplitudes) ** 2).sum(axis=0)
                    self.write(
                        self._stem(*parts, "distribution"),
                        DISTRIBUTION_COLUMNS,
                        distribution_rows(traj.final_state.momenta, P),
                        kind="distribution",
                        **meta,
                    )

    def _run_ensemble(self):
        cfg = self.cfg
        e = cfg.ensemble
        coins = build_coins(cfg)
        params = build_params(cfg)
        schedules = {label: GameSchedule(coins, tuple(p)) for label, p in cfg.walks.items()}
        many_d = len(e.delta_max_deg) > 1
        many_s = len(e.sigma_beta) > 1
        effective = []
        for state_label in cfg.initial_states:
            initial = build_state(cfg, state_label)
            for delta_deg in e.delta_max_deg:
                for sigma in e.sigma_beta:
                    # identical trajectories: one realization / one beta suffices
                    R = e.realizations if delta_deg > 0 else 1
                    count = e.beta_samples if sigma > 0 else 1
                    noise = NoiseSpec(math.radians(delta_deg), R, cfg.seed)
                    qm = QuasimomentumSpec(sigma, count, cfg.seed)
                    logger.info("ensemble delta=%g deg sigma_beta=%g: %d x %d trajectories", delta_deg, sigma, R, count)
                    result = run_ensemble(schedules, params, noise, qm, cfg.steps, initial, e.chunk_size, workers=self.workers)
                    effective.append({"delta_max_deg": delta_deg, "sigma_beta": sigma, "realizations": R, "beta_samples": count})
                    tags = (
                        f"delta{_tag(delta_deg)}" if many_d else "",
                        f"sigma{_tag(sigma)}" if many_s else "",
                        state_label if len(cfg.initial_states) > 1 else "",
                    )
                    for label, avg in result.walks.items():
                        meta = {"walk": label, "delta_max_deg": delta_deg, "sigma_beta": sigma, "initial_state": state_label}
                        self.write(self._stem(label, *tags, "series"), SERIES_COLUMNS, series_rows(avg.O, avg.O_avg), kind="series", **meta)
                        self.write(
                            self._stem(label, *tags, "distribution"),
                            DISTRIBUTION_COLUMNS,
                            distribution_rows(result.momenta, avg.distribution),
                            kind="distribution",
                            **meta,
                        )
        self.extra["ensemble_runs"] = effective

    def _run_optimize(self):
        cfg = self.cfg
        o = cfg.optimize
        coins = build_coins(cfg)
        fixed = {k: v for k, v in coins.items() if k != o.vary}
        spec = GridSpec(
            gamma_deg=grid_axis(*o.gamma_deg),
            chi_deg=grid_axis(*o.chi_deg),
            alpha_deg=o.alpha_deg,
            vary=o.vary,
            fixed_coins=fixed,
            walks=dict(cfg.walks),
            objective=o.objective,
            require_paradox=o.require_paradox,
            steps=cfg.steps,
        )
        params = build_params(cfg)
        initial = build_state(cfg, next(iter(cfg.initial_states)))
        kwargs = {"params": params, "initial": initial, "workers": self.workers}
        logger.info("coarse grid: %d points", len(spec.points()))
        report = grid_search(spec, **kwargs)
        coarse_best = report.best
        if o.refine_top > 0:
            report = refine(report, spec, o.refine_top, o.refine_span_deg, o.refine_step_deg, **kwargs)
        labels = sorted(cfg.walks)
        columns = ("rank", "alpha_deg", "gamma_deg", "chi_deg", "objective", "feasible", *[f"O_timeavg_{l}" for l in labels])
        rows = [
            (i, c.alpha_deg, c.gamma_deg, c.chi_deg, c.value, int(c.feasible), *[c.time_averages.get(l, float("nan")) for l in labels])
            for i, c in enumerate(report.candidates[: o.report_top])
        ]
        self.write(self._stem("ranking"), columns, rows, kind="ranking")
        best = report.best
        self.extra["optimization"] = {
            "evaluated": len(report),
            "coarse_best": None if coarse_best is None else [coarse_best.alpha_deg, coarse_best.gamma_deg, coarse_best.chi_deg, coarse_best.value],
            "best": None if best is None else [best.alpha_deg, best.gamma_deg, best.chi_deg, best.value],
        }


def run(cfg: RunConfig, out_dir, workers=None) -> dict:
    return Runner(cfg, out_dir, workers).run()


def apply_overrides(cfg: RunConfig, seed=None, steps=None, fmt=None) -> RunConfig:
    changes = {}
    if seed is not None:
        changes["seed"] = seed
    if steps is not None:
        changes["steps"] = steps
    if fmt is not None:
        changes["format"] = fmt
    return replace(cfg, **changes) if changes else cfg
