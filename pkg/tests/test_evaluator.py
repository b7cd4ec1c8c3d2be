import math

import numpy as np
import pytest

from irs_crlb.evaluator import concentrated_objective, mle_estimate, monte_carlo_mse
from irs_crlb.optimizer import JointDesign
from irs_crlb.scenario import ChannelRealization, Scenario, generate_channel
from irs_crlb.sensing import simulate_echo, synthesize_waveform
from oracles import crandn, mean_signal, random_unit_modulus


def _setup(rng, M=4, theta=0.3):
    ch = ChannelRealization(crandn(rng, M, M), complex(0.8, -0.6), theta)
    v = random_unit_modulus(rng, M)
    X = synthesize_waveform(np.eye(M, dtype=complex), 32)
    return ch, v, X


def test_noiseless_recovery(rng):
    for theta in (-1.2, -0.3, 0.0, 0.7, 1.3):
        ch, v, X = _setup(rng, theta=theta)
        Y = mean_signal(ch.G, v, theta, ch.alpha, X).reshape(X.shape, order="F")
        est = mle_estimate(Y, X, ch.G, v)
        assert est.theta == pytest.approx(theta, abs=1e-7)
        assert est.alpha == pytest.approx(ch.alpha, rel=1e-5)


def test_objective_peak_at_truth(rng):
    ch, v, X = _setup(rng, theta=0.4)
    Y = mean_signal(ch.G, v, 0.4, ch.alpha, X).reshape(X.shape, order="F")
    grid = np.linspace(-1.5, 1.5, 3001)
    obj = concentrated_objective(grid, Y, X, ch.G, v)
    assert grid[np.argmax(obj)] == pytest.approx(0.4, abs=1e-3)
    # the concentrated objective equals ||Y||^2 at the truth when noise is absent
    assert obj.max() == pytest.approx(np.linalg.norm(Y) ** 2, rel=1e-5)


def test_estimate_stays_in_range(rng):
    ch, v, X = _setup(rng)
    Y = crandn(rng, *X.shape)  # pure noise
    est = mle_estimate(Y, X, ch.G, v)
    assert -math.pi / 2 <= est.theta <= math.pi / 2


def test_zero_model_rejected(rng):
    _, v, X = _setup(rng)
    with pytest.raises(ValueError):
        mle_estimate(crandn(rng, *X.shape), X, np.zeros((4, 4)), v)


def test_high_snr_mse_near_bound(rng):
    sc = Scenario(num_ap_antennas=4, num_irs_elements=4)
    ch = generate_channel(sc, np.random.default_rng(1))
    from irs_crlb.estimation import crlb_theta

    R = sc.power_budget / 4 * np.eye(4, dtype=complex) * 1e4
    v = np.ones(4, dtype=complex)
    c = crlb_theta(ch.G, ch.alpha, ch.theta, v, R, sc.dwell_slots, sc.noise_power)
    d = JointDesign("manual", R, v, c)
    pt = monte_carlo_mse(sc, ch, d, 200, np.random.default_rng(2))
    assert 0.7 * c <= pt.mse <= 1.5 * c
    assert pt.trials == 200 and pt.stderr > 0


def test_monte_carlo_deterministic(rng):
    sc = Scenario(num_ap_antennas=4, num_irs_elements=4)
    ch = generate_channel(sc, np.random.default_rng(1))
    d = JointDesign("manual", sc.power_budget / 4 * np.eye(4, dtype=complex), np.ones(4, dtype=complex), 1.0)
    a = monte_carlo_mse(sc, ch, d, 20, np.random.default_rng(5))
    b = monte_carlo_mse(sc, ch, d, 20, np.random.default_rng(5))
    assert a.mse == b.mse


def test_noise_statistics():
    sc = Scenario(num_ap_antennas=2, num_irs_elements=2)
    ch = ChannelRealization(np.zeros((2, 2), dtype=complex), 0j, 0.0)
    X = np.zeros((2, 4000), dtype=complex)
    Y = simulate_echo(ch, np.ones(2), X, 2.0, np.random.default_rng(0))
    assert np.mean(np.abs(Y) ** 2) == pytest.approx(2.0, rel=0.03)
    assert abs(np.mean(Y**2)) < 0.05  # circular
