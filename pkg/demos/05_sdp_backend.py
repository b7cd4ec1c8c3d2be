# %% [markdown]
# # The built-in SDP solver
#
# All convex subproblems go through a small dense primal-dual interior-point
# method. Problems are written with Hermitian or symmetric matrix variables
# and affine expressions. This script solves a max-eigenvalue SDP, checks it
# against numpy, and shows how to plug in another backend.

# %%
import numpy as np

from irs_crlb import sdp

rng = np.random.default_rng(0)
A = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
C = (A + A.conj().T) / 2

prob = sdp.SdpProblem()
X = prob.hermitian(6, "X")
prob.add_psd(X)
prob.add_eq(X.trace_dot(np.eye(6)).real, 1.0)
prob.maximize(X.trace_dot(C).real)
sol = sdp.solve(prob)
print(f"status {sol.status.value}, {sol.iterations} iterations")
print(f"SDP optimum {sol.objective:.10f}, largest eigenvalue {np.linalg.eigvalsh(C)[-1]:.10f}")
print(f"relative duality gap {sol.relative_gap:.1e}")

# %% [markdown]
# A backend is any callable taking the compiled standard form and a
# tolerance. Here we wrap the default one to count calls.

# %%
calls = []


def counting_backend(sf, tol):
    calls.append(len(sf.b))
    return sdp.interior_point(sf, tol)


sdp.solve(prob, backend=counting_backend)
print("backend saw problems with", calls, "free parameters")
