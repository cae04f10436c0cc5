"""Discrete-time quantum walks in momentum space and quantum Parrondo games."""

from .coins import CoinMatrix, make_coin, compensate_light_shift
from .state import WalkState, WalkParams, GameSchedule, ratchet_state, default_state, single_momentum_state
from .errors import LatticeTooSmallError
from .observables import MomentumDistribution, momentum_distribution, winning_probability, time_averaged
from .propagation import Trajectory, step, evolve
from .ensembles import NoiseSpec, QuasimomentumSpec, EnsembleResult, run_ensemble

__version__ = "0.1.0"

__all__ = [
    "CoinMatrix",
    "make_coin",
    "compensate_light_shift",
    "WalkState",
    "WalkParams",
    "GameSchedule",
    "ratchet_state",
    "default_state",
    "single_momentum_state",
    "LatticeTooSmallError",
    "MomentumDistribution",
    "momentum_distribution",
    "winning_probability",
    "time_averaged",
    "Trajectory",
    "step",
    "evolve",
    "NoiseSpec",
    "QuasimomentumSpec",
    "EnsembleResult",
    "run_ensemble",
]
