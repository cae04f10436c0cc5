import math

import numpy as np
import pytest

from parrondo_walk import CoinMatrix, GameSchedule


def coin_deg(alpha, chi, gamma):
    """Coin from an (alpha, chi, gamma) triple in degrees, in that order."""
    return CoinMatrix.from_degrees(alpha, gamma, chi)


ORIGINAL = {"A": coin_deg(137.2, 29.4, 52.1), "B": coin_deg(149.6, 67.4, 132.5)}
ZERO_ALPHA = {"A": coin_deg(0, 29.4, 189.3), "B": coin_deg(0, 67.4, 282.1)}
OPTIMIZED = {"A": coin_deg(0, 184.32, 246.96), "B": coin_deg(0, 67.4, 282.1)}


def schedules(coins, labels=("A", "B", "ABB")):
    return {label: GameSchedule(coins, tuple(label)) for label in labels}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_state(rng, half_width, support=None):
    """Normalized random amplitudes, optionally confined to |n| <= support."""
    amps = rng.normal(size=(2, 2 * half_width + 1)) + 1j * rng.normal(size=(2, 2 * half_width + 1))
    if support is not None:
        n = np.arange(-half_width, half_width + 1)
        amps[:, np.abs(n) > support] = 0
    return amps / np.linalg.norm(amps)


HADAMARD_LIKE = CoinMatrix(0.0, 0.0, math.pi / 4)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def report(criterion, passed, detail):
    line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
