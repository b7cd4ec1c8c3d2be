"""Maximum-likelihood DoA estimation and Monte Carlo MSE measurement."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .scenario import ChannelRealization, Scenario
from .sensing import simulate_echo, steering_vector, synthesize_waveform

__all__ = ["MleResult", "MsePoint", "MseCurve", "concentrated_objective", "mle_estimate", "monte_carlo_mse"]

_GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass
class MleResult:
    theta: float
    alpha: complex
    objective: float


@dataclass
class MsePoint:
    power_budget: float
    crlb: float
    mse: float
    stderr: float
    trials: int
    mean_error: float = 0.0
    error_stderr: float = 0.0


@dataclass
class MseCurve:
    points: list[MsePoint] = field(default_factory=list)


def _grid_terms(thetas, P, Q, G, v, spacing_ratio):
    """``(b^H P b*, ||b||^2 b^T Q b*)`` for the cascaded response at each angle."""
    N = G.shape[0]
    thetas = np.atleast_1d(thetas)
    A = np.exp(2j * np.pi * spacing_ratio * np.outer(np.arange(N), np.sin(thetas)))
    Bm = G.T @ (A * v[:, None])  # (M, K)
    Bc = Bm.conj()
    corr = np.sum(Bc * (P @ Bc), axis=0)
    energy = np.sum(np.abs(Bm) ** 2, axis=0) * np.real(np.sum(Bm * (Q @ Bc), axis=0))
    return corr, energy


def concentrated_objective(thetas, Y, X, G, v, spacing_ratio: float = 0.5) -> np.ndarray:
    """``|u(theta)^H y|^2 / ||u(theta)||^2`` with ``u = vec(B(theta) X)``."""
    corr, energy = _grid_terms(thetas, Y @ X.conj().T, X @ X.conj().T, G, np.asarray(v), spacing_ratio)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(energy > 0, np.abs(corr) ** 2 / energy, 0.0)


def mle_estimate(
    Y: np.ndarray,
    X: np.ndarray,
    G: np.ndarray,
    v: np.ndarray,
    grid_step: float = 1e-3,
    refine_iters: int = 40,
    spacing_ratio: float = 0.5,
) -> MleResult:
    """Grid search over [-pi/2, pi/2] followed by golden-section refinement."""
    v = np.asarray(v)
    P, Q = Y @ X.conj().T, X @ X.conj().T
    K = int(math.ceil(math.pi / grid_step)) + 1
    grid = np.linspace(-math.pi / 2, math.pi / 2, K)
    corr, energy = _grid_terms(grid, P, Q, G, v, spacing_ratio)
    if not np.any(energy > 0):
        raise ValueError("model response vanishes on the whole angle grid")
    with np.errstate(divide="ignore", invalid="ignore"):
        obj = np.where(energy > 0, np.abs(corr) ** 2 / energy, -np.inf)
    k = int(np.argmax(obj))

    def f(th):
        c, e = _grid_terms(th, P, Q, G, v, spacing_ratio)
        return float(np.abs(c[0]) ** 2 / e[0]) if e[0] > 0 else -np.inf

    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, K - 1)]
    x1, x2 = hi - _GOLDEN * (hi - lo), lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(refine_iters):
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
    cands = [(obj[k], grid[k]), (f1, x1), (f2, x2)]
    best_obj, theta = max(cands)
    theta = float(np.clip(theta, -math.pi / 2, math.pi / 2))
    c, e = _grid_terms(theta, P, Q, G, v, spacing_ratio)
    return MleResult(theta, complex(c[0] / e[0]), float(best_obj))


def monte_carlo_mse(
    scenario: Scenario,
    channel: ChannelRealization,
    design,
    num_trials: int,
    rng: np.random.Generator,
    grid_step: float = 1e-3,
    refine_iters: int = 40,
) -> MsePoint:
    """Empirical MSE of the MLE under ``design`` (a :class:`JointDesign`).

    Every trial draws its noise from its own child generator, so results do
    not depend on execution order.
    """
    if num_trials < 1:
        raise ValueError("num_trials must be positive")
    ratio = scenario.element_spacing_ratio
    X = synthesize_waveform(design.R_x, scenario.dwell_slots)
    errors = np.empty(num_trials)
    for i, child in enumerate(rng.spawn(num_trials)):
        Y = simulate_echo(channel, design.v, X, scenario.noise_power, child, ratio)
        est = mle_estimate(Y, X, channel.G, design.v, grid_step, refine_iters, ratio)
        errors[i] = est.theta - channel.theta
    sq = errors**2
    n = num_trials
    se = float(np.std(sq, ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    ese = float(np.std(errors, ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    return MsePoint(float(np.real(np.trace(design.R_x))), design.crlb, float(np.mean(sq)), se, n, float(np.mean(errors)), ese)
