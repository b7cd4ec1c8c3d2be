"""Signal model of the AP-IRS-target-IRS-AP echo link.

The reflector ``v`` is used everywhere in place of ``diag(v)``; since the
reflection matrix is diagonal its transpose never needs materializing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CascadedResponse",
    "steering_vector",
    "derivative_scale",
    "cascaded_response",
    "reflect_matrices",
    "synthesize_waveform",
    "simulate_echo",
]


def steering_vector(theta: float, N: int, spacing_ratio: float = 0.5) -> np.ndarray:
    """IRS array response; entry n is ``exp(j 2 pi ratio n sin(theta))``."""
    return np.exp(2j * np.pi * spacing_ratio * np.arange(N) * np.sin(theta))


def derivative_scale(theta: float, spacing_ratio: float = 0.5) -> float:
    return 2 * np.pi * spacing_ratio * np.cos(theta)


@dataclass
class CascadedResponse:
    b: np.ndarray
    b_dot: np.ndarray

    @property
    def B(self) -> np.ndarray:
        return np.outer(self.b, self.b)

    @property
    def B_dot(self) -> np.ndarray:
        return np.outer(self.b_dot, self.b) + np.outer(self.b, self.b_dot)


def cascaded_response(G: np.ndarray, v: np.ndarray, theta: float, spacing_ratio: float = 0.5) -> CascadedResponse:
    """``b = G^T A v`` and its angle derivative ``j 2 pi (d/lambda) cos(theta) G^T A D v``."""
    G = np.asarray(G)
    v = np.asarray(v)
    N = G.shape[0]
    if v.shape != (N,):
        raise ValueError(f"reflector has shape {v.shape}, expected ({N},) for G of shape {G.shape}")
    av = steering_vector(theta, N, spacing_ratio) * v
    b = G.T @ av
    b_dot = 1j * derivative_scale(theta, spacing_ratio) * (G.T @ (np.arange(N) * av))
    return CascadedResponse(b, b_dot)


def reflect_matrices(G: np.ndarray, R_x: np.ndarray, theta: float, spacing_ratio: float = 0.5):
    """``(R1, R2, D)`` with ``R1 = A^H G* G^T A`` and ``R2 = A^H G* R_x* G^T A``."""
    N = G.shape[0]
    a = steering_vector(theta, N, spacing_ratio)
    GtA = G.T * a[None, :]
    R1 = GtA.conj().T @ GtA
    R2 = GtA.conj().T @ np.conj(R_x) @ GtA
    R1 = 0.5 * (R1 + R1.conj().T)
    R2 = 0.5 * (R2 + R2.conj().T)
    return R1, R2, np.diag(np.arange(N, dtype=float))


def synthesize_waveform(R_x: np.ndarray, T: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """Transmit block ``X`` (M x T) with sample covariance exactly ``R_x``.

    ``X = sqrt(T) U Lambda^(1/2) Q^H`` with ``Q`` the first M columns of the
    T-point unitary DFT, so no randomness enters (``rng`` is accepted for a
    uniform call signature and ignored).
    """
    R_x = np.asarray(R_x)
    M = R_x.shape[0]
    lam, U = np.linalg.eigh(0.5 * (R_x + R_x.conj().T))
    scale = max(np.max(np.abs(lam)), np.finfo(float).tiny)
    lam = np.where(lam > 1e-13 * scale, lam, 0.0)
    rank = int(np.count_nonzero(lam))
    if rank > T:
        raise ValueError(f"covariance of rank {rank} is not realizable with T={T} slots")
    if rank == 0:
        return np.zeros((M, T), dtype=complex)
    # only the nonzero eigen-directions need orthonormal time sequences
    keep = lam > 0
    Q = np.exp(-2j * np.pi * np.outer(np.arange(T), np.arange(rank)) / T) / np.sqrt(T)
    return np.sqrt(T) * (U[:, keep] * np.sqrt(lam[keep])) @ Q.conj().T


def simulate_echo(
    channel,
    v: np.ndarray,
    X: np.ndarray,
    noise_power: float,
    rng: np.random.Generator,
    spacing_ratio: float = 0.5,
) -> np.ndarray:
    """Received block ``Y = alpha B(theta) X + N`` with CN(0, noise_power) noise.

    ``channel`` is a :class:`~irs_crlb.scenario.ChannelRealization`.
    """
    resp = cascaded_response(channel.G, v, channel.theta, spacing_ratio)
    signal = channel.alpha * np.outer(resp.b, resp.b @ X)
    noise = (rng.standard_normal(signal.shape) + 1j * rng.standard_normal(signal.shape)) * np.sqrt(noise_power / 2)
    return signal + noise
