import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from parrondo_walk import WalkState, default_state, momentum_distribution, single_momentum_state, time_averaged, winning_probability
from parrondo_walk.observables import RunningMean, running_average

probs = arrays(float, st.integers(1, 20).map(lambda h: 2 * h + 1), elements=st.floats(0, 1))


def test_distribution_of_basis_state():
    dist = momentum_distribution(single_momentum_state(half_width=5, coin_amplitudes=(1, 0), n=3))
    assert dist[3] == 1 and dist.total() == 1
    assert all(dist[n] == 0 for n in range(-5, 6) if n != 3)


def test_default_state_distribution_and_balance():
    dist = momentum_distribution(default_state(4))
    for n in (-1, 0, 1):
        assert dist[n] == pytest.approx(1 / 3, abs=1e-15)
    assert abs(winning_probability(dist)) < 1e-15
    assert abs(dist.total() - 1) < 1e-12


def test_all_mass_right():
    assert winning_probability(momentum_distribution(single_momentum_state(5, (0, 1), 2))) == 1.0
    assert winning_probability(single_momentum_state(5, (0, 1), -4)) == -1.0


@given(probs)
def test_symmetric_distribution_has_no_win(p):
    sym = p + p[::-1]
    sym = sym / sym.sum() if sym.sum() > 0 else sym
    assert abs(winning_probability(sym)) < 1e-12


@given(probs)
def test_winning_probability_bounded(p):
    if p.sum() == 0:
        return
    assert abs(winning_probability(p / p.sum())) <= 1 + 1e-12


def test_global_phase_does_not_change_observables(rng):
    amps = rng.normal(size=(2, 21)) + 1j * rng.normal(size=(2, 21))
    amps /= np.linalg.norm(amps)
    a = WalkState(amps)
    b = WalkState(amps * np.exp(0.73j))
    assert winning_probability(a) == pytest.approx(winning_probability(b), abs=1e-15)


def test_time_average_values():
    assert time_averaged([0.3] * 7) == pytest.approx(0.3)
    assert time_averaged([0.0, 1.0]) == 0.5
    with pytest.raises(ValueError):
        time_averaged([])


@given(st.lists(st.floats(-1, 1), min_size=1, max_size=200))
def test_running_mean_incremental_matches_batch(values):
    rm = RunningMean()
    incremental = [rm.update(v) for v in values]
    np.testing.assert_allclose(incremental, running_average(values), rtol=0, atol=1e-14)
    assert abs(time_averaged(values) - running_average(values)[-1]) < 1e-14
