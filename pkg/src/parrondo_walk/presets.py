"""Named parameter sets, one per figure panel.

Coins are written with explicit angle names. Triples written
M(a, b, c) read as alpha = a, chi = b (rotation) and gamma = c (phase);
this is the reading under which the zero-alpha rule gamma' = gamma + alpha
turns M(137.2, 29.4, 52.1) into M(0, 29.4, 189.3).
"""

import copy
import math


def _coin(alpha, chi, gamma):
    return {"alpha_deg": alpha, "gamma_deg": gamma, "chi_deg": chi}


ORIGINAL = {"A": _coin(137.2, 29.4, 52.1), "B": _coin(149.6, 67.4, 132.5)}
SHIFTED_A_ZERO = {"A": _coin(0.0, 29.4, 189.3), "B": _coin(12.4, 67.4, 269.7)}
ZERO_ALPHA = {"A": _coin(0.0, 29.4, 189.3), "B": _coin(0.0, 67.4, 282.1)}
OPTIMIZED = {"A": _coin(0.0, 184.32, 246.96), "B": _coin(0.0, 67.4, 282.1)}

PARRONDO_WALKS = {"A": "A", "B": "B", "ABB": "ABB"}
RATCHET = {"momenta": [-1, 0, 1], "phase_sign": 1, "coin": [[1.0, 0.0], [0.0, 1.0]]}
SINGLE = {"momenta": [0], "phase_sign": 1, "coin": [[1.0, 0.0], [0.0, 1.0]]}
WALK = {"k": 1.56, "tau": 4 * math.pi, "beta": 0.0, "propagator": "kicked-rotor", "light_shift": False, "half_width": None}

PI_10 = 18.0
PI_5 = 36.0
PI_3 = 60.0


def _walks(name, coins, description):
    return {
        "name": name,
        "kind": "walks",
        "steps": 50,
        "walk": dict(WALK),
        "coins": copy.deepcopy(coins),
        "walks": dict(PARRONDO_WALKS),
        "initial_states": {"ratchet": dict(RATCHET)},
        "description": description,
    }


def _ensemble(name, delta, sigma, samples, steps, description, walks=PARRONDO_WALKS):
    return {
        "name": name,
        "kind": "ensemble",
        "steps": steps,
        "walk": dict(WALK),
        "coins": copy.deepcopy(OPTIMIZED),
        "walks": dict(walks),
        "initial_states": {"ratchet": dict(RATCHET)},
        "ensemble": {
            "delta_max_deg": list(delta),
            "realizations": 50,
            "sigma_beta": list(sigma),
            "beta_samples": samples,
            "chunk_size": 1024,
        },
        "description": description,
    }


PRESETS = {
    "fig1": {
        "name": "fig1",
        "kind": "walks",
        "steps": 50,
        "walk": dict(WALK),
        "coins": {"A": copy.deepcopy(ORIGINAL["A"])},
        "walks": {"A": "A"},
        "initial_states": {"single": dict(SINGLE), "ratchet": dict(RATCHET)},
        "propagators": ["kicked-rotor", "ideal"],
        "description": "walk A after 50 steps, single-momentum vs ratchet start, kicked rotor vs ideal walk",
    },
    "fig2a": _walks("fig2a", ORIGINAL, "original coins, no noise"),
    "fig2b": _walks("fig2b", SHIFTED_A_ZERO, "alpha_A moved into gamma, alpha_B reduced by alpha_A"),
    "fig2c": _walks("fig2c", ZERO_ALPHA, "both alphas moved into gamma"),
    "fig3a": _ensemble("fig3a", [PI_10], [0.0], 1, 50, "optimized coins, gamma noise in [-pi/10, pi/10]"),
    "fig3b": _ensemble("fig3b", [PI_5], [0.0], 1, 50, "optimized coins, gamma noise in [-pi/5, pi/5]"),
    "fig3c": _ensemble("fig3c", [PI_3], [0.0], 1, 50, "optimized coins, gamma noise in [-pi/3, pi/3]"),
    "fig4": _ensemble("fig4", [PI_3], [0.005, 0.01, 0.02], 200, 50, "gamma noise pi/3 with Gaussian quasimomentum"),
    "fig5": _ensemble(
        "fig5", [0.0, PI_3], [0.0, 0.005, 0.01, 0.02], 200, 50,
        "ABB momentum distributions, resonant and finite quasimomentum, without and with noise",
        walks={"ABB": "ABB"},
    ),
    "fig6": _ensemble("fig6", [PI_3], [0.02], 200, 500, "long-time run with the fig4 (c, f) settings"),
    "optimize-a": {
        "name": "optimize-a",
        "kind": "optimize",
        "steps": 50,
        "walk": dict(WALK),
        "coins": {"B": copy.deepcopy(ZERO_ALPHA["B"])},
        "walks": dict(PARRONDO_WALKS),
        "initial_states": {"ratchet": dict(RATCHET)},
        "optimize": {
            "vary": "A",
            "alpha_deg": 0.0,
            "gamma_deg": [0.0, 360.0, 1.0],
            "chi_deg": [0.0, 360.0, 1.0],
            "objective": "joint",
            "require_paradox": True,
            "refine_top": 3,
            "refine_span_deg": 1.0,
            "refine_step_deg": 0.01,
            "report_top": 50,
        },
        "description": "brute-force search for coin A at alpha = 0 with coin B fixed",
    },
}
