import warnings

import numpy as np
import pytest

from conftest import random_instance
from irs_crlb.sensing import cascaded_response
from irs_crlb.txbf import DegenerateInstanceWarning, extract_beams, optimize_transmit, transmit_objective
from oracles import crandn, random_psd


def _resp(ch, v):
    r = cascaded_response(ch.G, v, ch.theta, 0.5)
    return r.B, r.B_dot


def test_budget_and_psd(rng):
    for P0 in (1e-3, 1.0, 1e3):
        ch, v, _ = random_instance(rng, 6)
        tc = optimize_transmit(ch.G, v, ch.theta, P0)
        assert np.real(np.trace(tc.R_x)) == pytest.approx(P0, rel=1e-12)
        assert np.allclose(tc.R_x, tc.R_x.conj().T)
        assert np.linalg.eigvalsh(tc.R_x)[0] >= -1e-12 * P0


def test_beats_random_feasible_points(rng):
    ch, v, _ = random_instance(rng, 5)
    B, Bd = _resp(ch, v)
    tc = optimize_transmit(ch.G, v, ch.theta, 1.0)
    for _ in range(300):
        R = random_psd(rng, 5)
        R /= np.real(np.trace(R))
        assert transmit_objective(B, Bd, R) <= tc.objective * (1 + 1e-6)
    iso = transmit_objective(B, Bd, np.eye(5) / 5)
    assert tc.objective > iso


def test_epigraph_matches_objective(rng):
    ch, v, _ = random_instance(rng, 4)
    tc = optimize_transmit(ch.G, v, ch.theta, 2.0)
    assert tc.t == pytest.approx(tc.objective, rel=1e-6)
    assert all(g <= 1e-7 * max(1.0, tc.t) for g in tc.duality_gaps)


def test_matches_cvxpy(rng):
    cp = pytest.importorskip("cvxpy")
    ch, v, _ = random_instance(rng, 4)
    B, Bd = _resp(ch, v)
    R = cp.Variable((4, 4), hermitian=True)
    t = cp.Variable()
    a = cp.real(cp.trace(Bd.conj().T @ Bd @ R)) - t
    c = cp.trace(Bd.conj().T @ B @ R)
    d = cp.real(cp.trace(B.conj().T @ B @ R))
    cr, ci = cp.real(c), cp.imag(c)
    M4 = cp.bmat([[a, cr, 0, -ci], [cr, d, ci, 0], [0, ci, a, cr], [-ci, 0, cr, d]])
    prob = cp.Problem(cp.Maximize(t), [R >> 0, cp.real(cp.trace(R)) <= 1, M4 >> 0])
    prob.solve(solver="CLARABEL")
    tc = optimize_transmit(ch.G, v, ch.theta, 1.0)
    assert tc.objective == pytest.approx(prob.value, rel=1e-5)


def test_incumbent_kept_when_better(rng):
    ch, v, _ = random_instance(rng, 4)
    tc = optimize_transmit(ch.G, v, ch.theta, 1.0)
    again = optimize_transmit(ch.G, v, ch.theta, 1.0, incumbent=tc.R_x)
    assert again.objective >= tc.objective


def test_zero_response_rejected(rng):
    G = np.zeros((4, 4), dtype=complex)
    with pytest.raises(ValueError):
        optimize_transmit(G, np.ones(4), 0.1, 1.0)


def test_rank_one_warns(rng):
    G = np.outer(crandn(rng, 4), crandn(rng, 4))
    with pytest.warns(DegenerateInstanceWarning):
        optimize_transmit(G, np.ones(4, dtype=complex), 0.2, 1.0)


def test_endfire_warns(rng):
    ch, v, _ = random_instance(rng, 4)
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        tc = optimize_transmit(ch.G, v, np.pi / 2, 1.0)
    # derivative is ~1e-16 relative at endfire, either branch is acceptable
    assert tc.objective <= 1e-12 or any(issubclass(w.category, DegenerateInstanceWarning) for w in rec)


def test_extract_beams():
    u = np.array([1, 1j, 0]) / np.sqrt(2)
    w = np.array([0, 0, 1.0])
    beams = extract_beams(3 * np.outer(u, u.conj()) + np.outer(w, w))
    assert beams[0][0] == pytest.approx(3)
    assert abs(np.vdot(beams[0][1], u)) == pytest.approx(1)
    assert beams[2][0] == pytest.approx(0, abs=1e-12)
