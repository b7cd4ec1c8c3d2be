import math

import numpy as np
import pytest

from irs_crlb.estimation import crlb_theta
from irs_crlb.optimizer import (
    SCHEMES,
    DesignOptions,
    design_reflective_only,
    design_schemes,
    design_snr_max,
    design_transmit_only,
    minimize_crlb,
)
from irs_crlb.scenario import ChannelRealization, Scenario, generate_channel
from oracles import crandn

SMALL = Scenario(num_ap_antennas=4, num_irs_elements=4)
FAST = DesignOptions(num_samples=200, max_outer=10)


@pytest.fixture(scope="module")
def small_channel():
    return generate_channel(SMALL, np.random.default_rng(7))


def test_alternation_monotone(small_channel):
    d = minimize_crlb(SMALL, small_channel, np.random.default_rng(1), options=FAST)
    tr = np.array(d.crlb_trace)
    assert np.all(np.diff(tr) <= 1e-8 * tr[:-1])
    hs = np.array(d.half_steps)
    assert np.all(np.diff(hs) <= 1e-8 * hs[:-1])
    assert d.converged and d.outer_iters <= 10
    assert d.crlb == pytest.approx(tr[-1], rel=1e-12)
    assert np.real(np.trace(d.R_x)) == pytest.approx(SMALL.power_budget)
    assert np.allclose(np.abs(d.v), 1)


def test_reported_crlb_is_true_angle_bound(small_channel):
    d = design_transmit_only(SMALL, small_channel, np.random.default_rng(2), options=FAST)
    direct = crlb_theta(
        small_channel.G, small_channel.alpha, small_channel.theta, d.v, d.R_x, SMALL.dwell_slots, SMALL.noise_power
    )
    assert d.crlb == pytest.approx(direct, rel=1e-12)


def test_benchmarks_shapes(small_channel):
    rng = np.random.default_rng(3)
    snr = design_snr_max(SMALL, small_channel, rng, options=FAST)
    assert np.linalg.matrix_rank(snr.R_x, tol=1e-9) == 1
    ref = design_reflective_only(SMALL, small_channel, rng, options=FAST)
    assert np.allclose(ref.R_x, SMALL.power_budget / 4 * np.eye(4))
    assert all(math.isfinite(d.crlb) for d in (snr, ref))


def test_scheme_ordering(small_channel):
    out = design_schemes(SMALL, small_channel, np.random.default_rng(4), options=FAST)
    assert list(out) == list(SCHEMES)
    for name in SCHEMES[1:]:
        assert out["crlb_min"].crlb <= out[name].crlb * (1 + 1e-6)


def test_rank_one_unidentifiable():
    rng = np.random.default_rng(5)
    ch = ChannelRealization(np.outer(crandn(rng, 4), crandn(rng, 4)), 1e-3 + 0j, 0.0)
    d = minimize_crlb(SMALL, ch, rng, options=FAST)
    assert not d.identifiable and math.isinf(d.crlb)


def test_mismatched_angle_design_evaluated_at_truth(small_channel):
    d = minimize_crlb(SMALL, small_channel, np.random.default_rng(6), assumed_theta=0.1, options=FAST)
    direct = crlb_theta(
        small_channel.G, small_channel.alpha, small_channel.theta, d.v, d.R_x, SMALL.dwell_slots, SMALL.noise_power
    )
    assert d.crlb == pytest.approx(direct, rel=1e-12)


def test_power_scaling_of_design(small_channel):
    d = minimize_crlb(SMALL, small_channel, np.random.default_rng(8), options=FAST)
    for c in (2.0, 10.0):
        assert d.scaled(c * SMALL.power_budget).crlb == pytest.approx(d.crlb / c, rel=1e-12)


def test_unknown_scheme_rejected(small_channel):
    with pytest.raises(ValueError):
        design_schemes(SMALL, small_channel, np.random.default_rng(0), ["nope"])


def test_seeded_runs_repeat(small_channel):
    a = minimize_crlb(SMALL, small_channel, np.random.default_rng(9), options=FAST)
    b = minimize_crlb(SMALL, small_channel, np.random.default_rng(9), options=FAST)
    assert a.crlb_trace == b.crlb_trace
    assert np.array_equal(a.v, b.v)
