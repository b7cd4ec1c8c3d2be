"""Reflective beamforming: SDR lifting, SCA on the relaxed problem, and
Gaussian randomization back to a unit-modulus reflector.

The relaxed objective is the sum of two bilinear terms

    tr(R2 V) (tr(D R1 D V) - t1) + tr(R1 V) (tr(D R2 D V) - t2),

written as ``f1 + f2`` with ``f1`` a sum of squares of affine functions
(convex) and ``f2`` minus such a sum (concave).  Each SCA step replaces
``f1`` by its tangent plane and solves the resulting concave maximization as
an SDP, with every square in ``f2`` moved to an epigraph 2x2 LMI.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import sdp

logger = logging.getLogger(__name__)

__all__ = [
    "DegenerateReflectorError",
    "LiftedReflector",
    "ScaTrace",
    "reflector_objective",
    "reflector_objective_batch",
    "split_f1_f2",
    "f1_tangent",
    "sca_solve",
    "gaussian_randomize",
    "optimize_reflector",
    "tight_slacks",
]


class DegenerateReflectorError(ValueError):
    """A quadratic form ``v^H R v`` in a denominator vanishes."""


@dataclass
class LiftedReflector:
    V: np.ndarray
    t1: float
    t2: float


@dataclass
class ScaTrace:
    objective: list[float] = field(default_factory=list)
    duality_gaps: list[float] = field(default_factory=list)  # relative, inf marks a failed solve
    converged: bool = False
    failed: bool = False

    @property
    def iterations(self) -> int:
        return max(len(self.objective) - 1, 0)


def _qf(R, V):
    """``tr(R V)`` for a Hermitian pair (real)."""
    return float(np.real(np.sum(R.T * V)))


def reflector_objective(v: np.ndarray, R1: np.ndarray, R2: np.ndarray, D: np.ndarray) -> float:
    val = reflector_objective_batch(np.asarray(v)[:, None], R1, R2, D)[0]
    if np.isnan(val):
        raise DegenerateReflectorError("v^H R1 v or v^H R2 v vanishes for this reflector")
    return float(val)


def reflector_objective_batch(Vc: np.ndarray, R1: np.ndarray, R2: np.ndarray, D: np.ndarray) -> np.ndarray:
    """Objective for each column of ``Vc``; NaN marks a degenerate column."""
    d = np.diag(D)[:, None]
    DV = d * Vc
    R1V, R2V = R1 @ Vc, R2 @ Vc
    q1 = np.real(np.sum(Vc.conj() * R1V, axis=0))
    q2 = np.real(np.sum(Vc.conj() * R2V, axis=0))
    d1 = np.real(np.sum(DV.conj() * (R1 @ DV), axis=0))
    d2 = np.real(np.sum(DV.conj() * (R2 @ DV), axis=0))
    c1 = np.sum(DV.conj() * R1V, axis=0)
    c2 = np.sum(DV.conj() * R2V, axis=0)
    scale = np.linalg.norm(R1, 2) * np.linalg.norm(R2, 2) * np.sum(np.abs(Vc) ** 2, axis=0) ** 2
    bad = (q1 <= 1e-14 * np.sqrt(scale)) | (q2 <= 1e-14 * np.sqrt(scale)) | (scale == 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = q2 * (d1 - np.abs(c1) ** 2 / q1) + q1 * (d2 - np.abs(c2) ** 2 / q2)
    out[bad] = np.nan
    return out


def _pieces(R1, R2, D):
    """Matrices whose traces against V give the eight affine pieces."""
    DR1D, DR2D = D @ R1 @ D, D @ R2 @ D
    return {
        "g": [R2 + DR1D, R2, R1 + DR2D, R1],
        "h": [R2 - DR1D, R2, R1 - DR2D, R1],
        "t_sign_g": [0, -1, 0, -1],
        "t_sign_h": [0, +1, 0, +1],
        "t_index": [None, 0, None, 1],
    }


def _affine_values(V, t1, t2, mats, signs, index):
    ts = (t1, t2)
    return np.array([_qf(Mk, V) + (s * ts[i] if i is not None else 0.0) for Mk, s, i in zip(mats, signs, index)])


def split_f1_f2(V, t1, t2, R1, R2, D) -> tuple[float, float]:
    """Convex / concave parts of the relaxed objective (difference-of-squares)."""
    p = _pieces(R1, R2, D)
    g = _affine_values(V, t1, t2, p["g"], p["t_sign_g"], p["t_index"])
    h = _affine_values(V, t1, t2, p["h"], p["t_sign_h"], p["t_index"])
    return 0.25 * float(g @ g), -0.25 * float(h @ h)


def f1_tangent(V, t1, t2, V0, t10, t20, R1, R2, D) -> float:
    """First-order expansion of ``f1`` at ``(V0, t10, t20)``, evaluated at ``(V, t1, t2)``."""
    p = _pieces(R1, R2, D)
    g = _affine_values(V, t1, t2, p["g"], p["t_sign_g"], p["t_index"])
    g0 = _affine_values(V0, t10, t20, p["g"], p["t_sign_g"], p["t_index"])
    return 0.25 * float(np.sum(g0**2 + 2 * g0 * (g - g0)))


def tight_slacks(V, R1, R2, D) -> tuple[float, float]:
    """Smallest ``t1, t2`` meeting the two quadratic-over-linear constraints."""
    t1 = abs(np.sum((D @ R1).T * V)) ** 2 / _qf(R1, V)
    t2 = abs(np.sum((D @ R2).T * V)) ** 2 / _qf(R2, V)
    return float(t1), float(t2)


def _relaxed_objective(V, t1, t2, R1, R2, D) -> float:
    # bilinear form directly (no difference-of-squares cancellation)
    return _qf(R2, V) * (_qf(D @ R1 @ D, V) - t1) + _qf(R1, V) * (_qf(D @ R2 @ D, V) - t2)


def _sca_step(R1, R2, D, V0, t10, t20, tol, backend):
    N = R1.shape[0]
    p = _pieces(R1, R2, D)
    g0 = _affine_values(V0, t10, t20, p["g"], p["t_sign_g"], p["t_index"])

    prob = sdp.SdpProblem()
    V = prob.hermitian(N, "V")
    t = [prob.scalar("t1"), prob.scalar("t2")]
    s = [prob.scalar(f"s{k}") for k in range(4)]

    def affine(Mk, sign, idx):
        e = V.trace_dot(Mk).real
        return e + sign * t[idx] if idx is not None else e

    g = [affine(*args) for args in zip(p["g"], p["t_sign_g"], p["t_index"])]
    h = [affine(*args) for args in zip(p["h"], p["t_sign_h"], p["t_index"])]

    prob.add_psd(V)
    for n in range(N):
        prob.add_eq(V[n, n].real, 1.0)
    for R, tk in ((R1, t[0]), (R2, t[1])):
        cross = V.trace_dot(D @ R)
        prob.add_psd(sdp.bmat([[tk, cross], [cross.conj(), V.trace_dot(R).real]]))
    for sk, hk in zip(s, h):
        prob.add_psd(sdp.bmat([[sk, hk], [hk, 1.0]]))

    obj = sum((0.5 * g0k) * gk for g0k, gk in zip(g0, g)) - 0.25 * (s[0] + s[1] + s[2] + s[3])
    prob.maximize(obj - 0.25 * float(g0 @ g0))
    sol = sdp.solve(prob, tol=tol, backend=backend)
    Vn = sol[V]
    Vn = 0.5 * (Vn + Vn.conj().T)
    return sol, Vn, float(sol[t[0]]), float(sol[t[1]])


def _normalizers(R1, R2, D):
    s1 = np.linalg.norm(R1, 2) or 1.0
    s2 = np.linalg.norm(R2, 2) or 1.0
    dn = max(float(np.max(np.abs(np.diag(D)))), 1.0)
    return s1, s2, dn


def sca_solve(
    R1: np.ndarray,
    R2: np.ndarray,
    D: np.ndarray,
    V_init: np.ndarray,
    t_init: tuple[float, float] | None = None,
    max_iters: int = 50,
    eps_rel: float = 1e-4,
    tol: float = 1e-8,
    backend=None,
) -> tuple[LiftedReflector, ScaTrace]:
    """SCA iterations on the relaxed (rank-free) reflector problem.

    Data are rescaled internally (``R1``, ``R2`` to unit spectral norm and
    ``D`` to unit max entry) and results mapped back.  An iterate whose
    relaxed objective does not improve on its predecessor, which can only
    happen through solver round-off, ends the loop and is discarded.
    """
    s1, s2, dn = _normalizers(R1, R2, D)
    R1n, R2n, Dn = R1 / s1, R2 / s2, D / dn
    t_scale = (dn**2 / s1, dn**2 / s2)
    obj_scale = s1 * s2 * dn**2

    V = np.asarray(V_init, dtype=complex)
    if t_init is None:
        t1, t2 = tight_slacks(V, R1n, R2n, Dn)
    else:
        t1, t2 = t_init[0] / t_scale[0], t_init[1] / t_scale[1]

    trace = ScaTrace()
    f = _relaxed_objective(V, t1, t2, R1n, R2n, Dn)
    trace.objective.append(f * obj_scale)
    for _ in range(max_iters):
        try:
            sol, Vn, t1n, t2n = _sca_step(R1n, R2n, Dn, V, t1, t2, tol, backend)
        except (np.linalg.LinAlgError, ValueError, RuntimeError) as exc:
            logger.warning("SCA step failed: %s", exc)
            trace.failed = True
            break
        trace.duality_gaps.append(sol.relative_gap if sol.optimal else np.inf)
        if not sol.optimal:
            trace.failed = True
            break
        fn = _relaxed_objective(Vn, t1n, t2n, R1n, R2n, Dn)
        if fn < f:
            trace.converged = True
            break
        gain = (fn - f) / max(abs(f), 1e-300)
        V, t1, t2, f = Vn, t1n, t2n, fn
        trace.objective.append(f * obj_scale)
        if gain < eps_rel:
            trace.converged = True
            break
    return LiftedReflector(V, t1 * t_scale[0], t2 * t_scale[1]), trace


def gaussian_randomize(
    V_tilde: np.ndarray,
    R1: np.ndarray,
    R2: np.ndarray,
    D: np.ndarray,
    num_samples: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Best unit-modulus candidate ``exp(j arg z)``, ``z ~ CN(0, V_tilde)``.

    The phase of the dominant eigenvector of ``V_tilde`` is always among the
    candidates.
    """
    N = V_tilde.shape[0]
    lam, U = np.linalg.eigh(0.5 * (V_tilde + V_tilde.conj().T))
    lam = np.clip(lam, 0, None)
    L = U * np.sqrt(lam)
    w = (rng.standard_normal((N, num_samples)) + 1j * rng.standard_normal((N, num_samples))) / np.sqrt(2)
    Z = np.concatenate([U[:, -1:], L @ w], axis=1)
    # zero entries have no phase; map them to phase 0
    cands = np.exp(1j * np.angle(np.where(np.abs(Z) > 0, Z, 1.0)))
    vals = reflector_objective_batch(cands, R1, R2, D)
    if np.all(np.isnan(vals)):
        raise DegenerateReflectorError("every randomization candidate is degenerate")
    return cands[:, int(np.nanargmax(vals))]


def optimize_reflector(
    R1: np.ndarray,
    R2: np.ndarray,
    D: np.ndarray,
    v_incumbent: np.ndarray,
    rng: np.random.Generator,
    *,
    num_samples: int = 1000,
    max_iters: int = 50,
    eps_rel: float = 1e-4,
    tol: float = 1e-8,
    backend=None,
) -> tuple[np.ndarray, ScaTrace]:
    """One full reflector pass: SCA from ``v_incumbent``, randomize, keep the better."""
    v0 = np.asarray(v_incumbent, dtype=complex)
    lifted, trace = sca_solve(R1, R2, D, np.outer(v0, v0.conj()), None, max_iters, eps_rel, tol, backend)
    v = gaussian_randomize(lifted.V, R1, R2, D, num_samples, rng)
    try:
        inc = reflector_objective(v0, R1, R2, D)
    except DegenerateReflectorError:
        return v, trace
    if reflector_objective(v, R1, R2, D) < inc:
        logger.debug("randomized reflector underperforms incumbent; keeping incumbent")
        return v0, trace
    return v, trace
