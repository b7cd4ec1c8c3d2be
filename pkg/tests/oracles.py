"""Independent reference computations used by the tests.

Nothing here calls into the library's signal model; quantities are rebuilt
from their definitions with explicit diagonal matrices.
"""

import numpy as np


def steering(theta, N, ratio=0.5):
    return np.array([np.exp(1j * 2 * np.pi * ratio * n * np.sin(theta)) for n in range(N)])


def mean_signal(G, v, theta, alpha, X, ratio=0.5):
    """Stacked noiseless echo ``alpha vec(B(theta) X)`` built from definitions."""
    N = G.shape[0]
    Phi = np.diag(v)
    a = steering(theta, N, ratio)
    H = alpha * np.outer(a, a)
    return (G.T @ Phi.T @ H @ Phi @ G @ X).ravel(order="F")


def fim_finite_difference(G, v, theta, alpha, X, noise_power, ratio=0.5, h=1e-6):
    """FIM of (theta, Re alpha, Im alpha) from central differences of the mean."""
    def u(xi):
        return mean_signal(G, v, xi[0], xi[1] + 1j * xi[2], X, ratio)

    xi0 = np.array([theta, alpha.real, alpha.imag])
    J = []
    for k in range(3):
        step = h if k == 0 else h * max(1.0, abs(alpha))
        e = np.zeros(3)
        e[k] = step
        J.append((u(xi0 + e) - u(xi0 - e)) / (2 * step))
    J = np.array(J).T
    return 2.0 / noise_power * np.real(J.conj().T @ J)


def random_psd(rng, M, rank=None):
    k = M if rank is None else rank
    A = rng.standard_normal((M, k)) + 1j * rng.standard_normal((M, k))
    return A @ A.conj().T


def random_unit_modulus(rng, N):
    return np.exp(1j * rng.uniform(0, 2 * np.pi, N))


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
