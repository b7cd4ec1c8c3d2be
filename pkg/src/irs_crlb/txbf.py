"""Transmit covariance optimization for a fixed reflector."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import sdp
from .sensing import cascaded_response

logger = logging.getLogger(__name__)

__all__ = ["TransmitCovariance", "DegenerateInstanceWarning", "transmit_objective", "optimize_transmit", "extract_beams"]


class DegenerateInstanceWarning(UserWarning):
    """The DoA is not identifiable for this instance (rank-one AP-IRS channel)."""


@dataclass
class TransmitCovariance:
    R_x: np.ndarray
    objective: float  # tr(B' R B'^H) - |tr(B R B'^H)|^2 / tr(B R B^H)
    t: float = np.nan  # epigraph value reported by the SDP
    duality_gaps: list[float] = field(default_factory=list)  # relative, inf marks a failed solve

    @property
    def beams(self) -> list[tuple[float, np.ndarray]]:
        return extract_beams(self.R_x)


def transmit_objective(B: np.ndarray, B_dot: np.ndarray, R_x: np.ndarray) -> float:
    """Alpha-free part of the Fisher information for the DoA (to be maximized)."""
    tr_dd = np.real(np.trace(B_dot @ R_x @ B_dot.conj().T))
    tr_bb = np.real(np.trace(B @ R_x @ B.conj().T))
    if tr_bb <= 0:
        return 0.0
    tr_bd = np.trace(B @ R_x @ B_dot.conj().T)
    return float(tr_dd - abs(tr_bd) ** 2 / tr_bb)


def _project_budget(R: np.ndarray, P0: float) -> np.ndarray:
    R = 0.5 * (R + R.conj().T)
    lam, U = np.linalg.eigh(R)
    lam = np.clip(lam, 0, None)
    R = (U * lam) @ U.conj().T
    return 0.5 * (R + R.conj().T) * (P0 / np.sum(lam))


def optimize_transmit(
    G: np.ndarray,
    v: np.ndarray,
    theta: float,
    P0: float,
    *,
    spacing_ratio: float = 0.5,
    incumbent: np.ndarray | None = None,
    tol: float = 1e-8,
    backend=None,
) -> TransmitCovariance:
    """Maximize the DoA information over ``tr(R_x) <= P0, R_x >= 0``.

    Solved as an SDP with the Schur-complement LMI on an epigraph variable.
    Data are normalized (``B``, ``B'`` to unit Frobenius norm, ``R_x / P0``)
    before the solve; the objective is invariant to the scale of ``B`` and
    quadratic in the scale of ``B'``.  The returned covariance has its trace
    set to ``P0`` exactly (the objective is linear under scaling).  If an
    ``incumbent`` covariance scores better it is returned instead.
    """
    resp = cascaded_response(G, v, theta, spacing_ratio)
    B, Bd = resp.B, resp.B_dot
    nb, nd = np.linalg.norm(B), np.linalg.norm(Bd)
    if nb == 0:
        raise ValueError("cascaded response b = G^T A v vanishes; reflector is degenerate")
    M = B.shape[0]
    if nd == 0:
        warnings.warn("angle derivative of the response vanishes (theta at endfire)", DegenerateInstanceWarning, stacklevel=2)
        R = P0 / M * np.eye(M, dtype=complex)
        return TransmitCovariance(R, 0.0, 0.0)
    Bn, Dn = B / nb, Bd / nd

    prob = sdp.SdpProblem()
    W = prob.hermitian(M, "W")
    t = prob.scalar("t")
    prob.add_psd(W)
    prob.add_le(W.trace_dot(np.eye(M)).real, 1.0)
    prob.add_psd(
        sdp.bmat(
            [
                [W.trace_dot(Dn.conj().T @ Dn) - t, W.trace_dot(Dn.conj().T @ Bn)],
                [W.trace_dot(Bn.conj().T @ Dn), W.trace_dot(Bn.conj().T @ Bn)],
            ]
        )
    )
    prob.maximize(t)
    sol = sdp.solve(prob, tol=tol, backend=backend)
    if sol.status in (sdp.Status.INFEASIBLE, sdp.Status.UNBOUNDED):
        raise RuntimeError(f"transmit SDP reported {sol.status.value}")

    R = _project_budget(P0 * sol[W], P0)
    out = TransmitCovariance(R, transmit_objective(B, Bd, R), float(sol.objective) * P0 * nd**2, [sol.relative_gap])
    if out.objective <= 1e-10 * P0 * nd**2:
        warnings.warn(
            "transmit optimum is ~0: the DoA is not identifiable (rank-one channel?)",
            DegenerateInstanceWarning,
            stacklevel=2,
        )
    if incumbent is not None:
        inc = _project_budget(np.asarray(incumbent, dtype=complex), P0)
        inc_obj = transmit_objective(B, Bd, inc)
        if inc_obj > out.objective:
            logger.debug("transmit step kept incumbent (%.3e > %.3e)", inc_obj, out.objective)
            out = TransmitCovariance(inc, inc_obj, out.t, out.duality_gaps)
    if not sol.optimal:
        out.duality_gaps.append(np.inf)
    return out


def extract_beams(R_x: np.ndarray) -> list[tuple[float, np.ndarray]]:
    """Eigen-beams ``(power, unit vector)`` of ``R_x``, strongest first."""
    lam, U = np.linalg.eigh(0.5 * (R_x + R_x.conj().T))
    order = np.argsort(lam)[::-1]
    return [(float(max(lam[k], 0.0)), U[:, k]) for k in order]
