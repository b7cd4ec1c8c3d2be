"""Fisher information, DoA Cramer-Rao bound and identifiability."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sensing import cascaded_response, reflect_matrices

__all__ = [
    "FisherInfo",
    "CrlbReport",
    "Identifiability",
    "SINGULAR_RTOL",
    "fisher_information",
    "crlb_theta_closed_form",
    "crlb_from_fim",
    "crlb_report",
    "crlb_theta_reflective_form",
    "reflective_info",
    "crlb_theta",
    "identifiability",
]

# Schur complement at or below SINGULAR_RTOL * F_thth counts as singular.
SINGULAR_RTOL = 1e-8
# angle information this small next to the gain information means endfire
# (cos(theta) ~ 1e-10): the derivative of the response has vanished
ENDFIRE_RTOL = 1e-20


@dataclass
class FisherInfo:
    """3x3 FIM over ``[theta, Re alpha, Im alpha]`` plus the trace terms it is built from."""

    F: np.ndarray
    tr_dd: float  # tr(B' R B'^H)
    tr_bd: complex  # tr(B R B'^H)
    tr_bb: float  # tr(B R B^H)
    alpha: complex
    T: int
    noise_power: float

    @property
    def f_thth(self) -> float:
        return float(self.F[0, 0])

    @property
    def f_thalpha(self) -> np.ndarray:
        return self.F[0, 1:]

    @property
    def f_alphaalpha(self) -> np.ndarray:
        return self.F[1:, 1:]

    def schur_complement(self) -> float:
        faa = self.F[1, 1]
        if faa <= 0:
            return 0.0
        f = self.f_thalpha
        return float(self.F[0, 0] - f @ f / faa)


@dataclass
class CrlbReport:
    crlb_theta: float  # math.inf when unbounded
    identifiable: bool
    fim: FisherInfo
    conditioning: float  # smallest FIM eigenvalue

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.crlb_theta)


@dataclass
class Identifiability:
    identifiable: bool
    rank: int
    singular_values: np.ndarray

    def __bool__(self) -> bool:
        return self.identifiable


def fisher_information(
    channel, v: np.ndarray, R_x: np.ndarray, T: int, noise_power: float, spacing_ratio: float = 0.5
) -> FisherInfo:
    """Closed-form FIM blocks for the deterministic-unknown echo model."""
    resp = cascaded_response(channel.G, v, channel.theta, spacing_ratio)
    B, Bd = resp.B, resp.B_dot
    alpha = complex(channel.alpha)
    tr_dd = float(np.real(np.trace(Bd @ R_x @ Bd.conj().T)))
    tr_bd = complex(np.trace(B @ R_x @ Bd.conj().T))
    tr_bb = float(np.real(np.trace(B @ R_x @ B.conj().T)))
    c = 2 * T / noise_power
    F = np.zeros((3, 3))
    F[0, 0] = c * abs(alpha) ** 2 * tr_dd
    cross = alpha.conjugate() * tr_bd
    F[0, 1] = F[1, 0] = c * cross.real
    F[0, 2] = F[2, 0] = c * (1j * cross).real
    F[1, 1] = F[2, 2] = c * tr_bb
    return FisherInfo(F, tr_dd, tr_bd, tr_bb, alpha, T, noise_power)


def crlb_theta_closed_form(fisher: FisherInfo) -> float:
    """DoA bound from the trace terms, with alpha eliminated analytically."""
    if fisher.tr_bb <= 0 or fisher.alpha == 0 or fisher.tr_dd <= ENDFIRE_RTOL * fisher.tr_bb:
        return math.inf
    info = fisher.tr_dd - abs(fisher.tr_bd) ** 2 / fisher.tr_bb
    if info <= SINGULAR_RTOL * fisher.tr_dd:
        return math.inf
    return fisher.noise_power / (2 * fisher.T * abs(fisher.alpha) ** 2 * info)


def crlb_from_fim(fisher: FisherInfo) -> float:
    """``[F^-1]_{1,1}`` through the Schur complement of the alpha block."""
    s = fisher.schur_complement()
    if fisher.f_thth <= ENDFIRE_RTOL * fisher.F[1, 1] * abs(fisher.alpha) ** 2:
        return math.inf
    if s <= SINGULAR_RTOL * fisher.f_thth or s <= 0:
        return math.inf
    return 1.0 / s


def crlb_report(fisher: FisherInfo) -> CrlbReport:
    crlb = crlb_theta_closed_form(fisher)
    lam_min = float(np.linalg.eigvalsh(fisher.F)[0])
    return CrlbReport(crlb, not math.isinf(crlb), fisher, lam_min)


def crlb_theta(
    G: np.ndarray,
    alpha: complex,
    theta: float,
    v: np.ndarray,
    R_x: np.ndarray,
    T: int,
    noise_power: float,
    spacing_ratio: float = 0.5,
) -> float:
    """Convenience wrapper: FIM blocks then the closed-form bound."""
    from .scenario import ChannelRealization

    ch = ChannelRealization(np.asarray(G), alpha, theta)
    return crlb_theta_closed_form(fisher_information(ch, v, R_x, T, noise_power, spacing_ratio))


def reflective_info(v: np.ndarray, R1: np.ndarray, R2: np.ndarray, D: np.ndarray) -> float:
    """Quadratic-form bracket of the bound written in terms of ``v``."""
    q1 = np.real(np.vdot(v, R1 @ v))
    q2 = np.real(np.vdot(v, R2 @ v))
    if q1 <= 0 or q2 <= 0:
        return 0.0
    Dv = D @ v
    d1 = np.real(np.vdot(Dv, R1 @ Dv))
    d2 = np.real(np.vdot(Dv, R2 @ Dv))
    c1 = np.vdot(Dv, R1 @ v)
    c2 = np.vdot(Dv, R2 @ v)
    return float(q2 * (d1 - abs(c1) ** 2 / q1) + q1 * (d2 - abs(c2) ** 2 / q2))


def crlb_theta_reflective_form(
    G: np.ndarray,
    R_x: np.ndarray,
    v: np.ndarray,
    theta: float,
    alpha: complex,
    T: int,
    noise_power: float,
    spacing_ratio: float = 0.5,
) -> float:
    cos2 = math.cos(theta) ** 2
    if cos2 <= ENDFIRE_RTOL or alpha == 0:
        return math.inf
    R1, R2, D = reflect_matrices(G, R_x, theta, spacing_ratio)
    info = reflective_info(v, R1, R2, D)
    # same relative singularity test as the trace route: compare against the
    # leading (Cauchy-Schwarz-free) part of the bracket
    Dv = D @ v
    lead = np.real(np.vdot(v, R2 @ v) * np.vdot(Dv, R1 @ Dv) + np.vdot(v, R1 @ v) * np.vdot(Dv, R2 @ Dv))
    if info <= SINGULAR_RTOL * lead or info <= 0:
        return math.inf
    return noise_power / (8 * T * abs(alpha) ** 2 * math.pi**2 * spacing_ratio**2 * cos2 * info)


def identifiability(G: np.ndarray, rtol: float = 1e-10) -> Identifiability:
    """theta is estimable iff ``rank(G) > 1``."""
    s = np.linalg.svd(np.asarray(G), compute_uv=False)
    rank = int(np.sum(s > rtol * s[0])) if s.size and s[0] > 0 else 0
    return Identifiability(rank > 1, rank, s)

