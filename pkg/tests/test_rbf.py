import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_instance
from irs_crlb.estimation import crlb_theta_reflective_form, reflective_info
from irs_crlb.rbf import (
    DegenerateReflectorError,
    _relaxed_objective,
    f1_tangent,
    gaussian_randomize,
    reflector_objective,
    reflector_objective_batch,
    optimize_reflector,
    sca_solve,
    split_f1_f2,
    tight_slacks,
)
from irs_crlb.sensing import reflect_matrices
from oracles import crandn, random_psd, random_unit_modulus


def _mats(rng, N=4):
    ch, v, R = random_instance(rng, N)
    return (*reflect_matrices(ch.G, R, ch.theta, 0.5), v)



def test_objective_matches_information(rng):
    for _ in range(20):
        R1, R2, D, v = _mats(rng)
        assert reflector_objective(v, R1, R2, D) == pytest.approx(reflective_info(v, R1, R2, D), rel=1e-10)


def test_batch_matches_scalar(rng):
    R1, R2, D, _ = _mats(rng, 5)
    Vc = np.stack([random_unit_modulus(rng, 5) for _ in range(7)], axis=1)
    batch = reflector_objective_batch(Vc, R1, R2, D)
    assert np.allclose(batch, [reflector_objective(Vc[:, k], R1, R2, D) for k in range(7)], rtol=1e-12)


def test_split_reconstructs_relaxed(rng):
    for _ in range(200):
        R1, R2, D, _ = _mats(rng)
        V = random_psd(rng, 4)
        t1, t2 = rng.uniform(0.1, 5, 2)
        f1, f2 = split_f1_f2(V, t1, t2, R1, R2, D)
        assert f1 + f2 == pytest.approx(_relaxed_objective(V, t1, t2, R1, R2, D), rel=1e-9, abs=1e-12)


def test_tight_slacks_recover_objective(rng):
    R1, R2, D, v = _mats(rng)
    V = np.outer(v, v.conj())
    t1, t2 = tight_slacks(V, R1, R2, D)
    assert _relaxed_objective(V, t1, t2, R1, R2, D) == pytest.approx(reflector_objective(v, R1, R2, D), rel=1e-7)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_tangent_underestimates(seed):
    rng = np.random.default_rng(seed)
    R1, R2, D, _ = _mats(rng, 3)
    V0, V = random_psd(rng, 3), random_psd(rng, 3)
    t10, t20, t1, t2 = rng.uniform(0.1, 3, 4)
    f1, _ = split_f1_f2(V, t1, t2, R1, R2, D)
    assert f1_tangent(V, t1, t2, V0, t10, t20, R1, R2, D) <= f1 + 1e-9 * max(1.0, abs(f1))
    f10, _ = split_f1_f2(V0, t10, t20, R1, R2, D)
    assert f1_tangent(V0, t10, t20, V0, t10, t20, R1, R2, D) == pytest.approx(f10, rel=1e-12, abs=1e-14)


def test_sca_monotone_and_feasible(rng):
    R1, R2, D, v = _mats(rng, 4)
    lifted, trace = sca_solve(R1, R2, D, np.outer(v, v.conj()))
    obj = np.array(trace.objective)
    assert np.all(np.diff(obj) >= -1e-8 * np.abs(obj[1:]))
    assert np.allclose(np.diag(lifted.V), 1, atol=1e-6)
    assert np.linalg.eigvalsh(lifted.V)[0] >= -1e-6
    assert not trace.failed


def test_randomization_unit_modulus(rng):
    R1, R2, D, v = _mats(rng, 4)
    out = gaussian_randomize(np.outer(v, v.conj()), R1, R2, D, 50, rng)
    assert np.allclose(np.abs(out), 1)
    # a rank-one lift returns its own phases (up to a global phase)
    assert reflector_objective(out, R1, R2, D) == pytest.approx(reflector_objective(v, R1, R2, D), rel=1e-7)


def test_degenerate_randomization():
    N = 3
    Z = np.zeros((N, N), dtype=complex)
    with pytest.raises(DegenerateReflectorError):
        gaussian_randomize(np.eye(N), Z, Z, np.diag(np.arange(N)), 5, np.random.default_rng(0))


def test_optimize_reflector_not_worse(rng):
    ch, v, R = random_instance(rng, 4)
    R1, R2, D = reflect_matrices(ch.G, R, ch.theta, 0.5)
    before = crlb_theta_reflective_form(ch.G, R, v, ch.theta, ch.alpha, 8, 1.0)
    vn, trace = optimize_reflector(R1, R2, D, v, rng, num_samples=200)
    after = crlb_theta_reflective_form(ch.G, R, vn, ch.theta, ch.alpha, 8, 1.0)
    assert np.allclose(np.abs(vn), 1)
    assert after <= before * (1 + 1e-12)
