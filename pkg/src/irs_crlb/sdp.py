"""Small dense semidefinite programming.

A tiny modeling layer (affine expressions over real, complex-Hermitian and
scalar variables) on top of a primal-dual path-following interior-point
method.  Problems are compiled into the standard pair

    (primal)  min <C, X>    s.t.  <A_i, X> = b_i,  X >= 0
    (dual)    max b^T y     s.t.  C - sum_i y_i A_i = S >= 0

where the cone is a product of dense real symmetric PSD blocks and one
nonnegative orthant.  Every user problem is a dual-form problem: the decision
variables are ``y`` and every PSD / inequality constraint is one block of
``S``.  Hermitian blocks are handled through the real embedding
``[[Re Z, -Im Z], [Im Z, Re Z]]``; linear equalities are eliminated exactly
through a null-space parameterization before the solve.

The search direction is HKM with a Mehrotra predictor-corrector step.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

logger = logging.getLogger(__name__)

__all__ = [
    "Affine",
    "Variable",
    "SdpProblem",
    "SdpSolution",
    "Status",
    "StandardForm",
    "bmat",
    "hermitian_embedding",
    "interior_point",
    "solve",
]


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    OPTIMAL_INACCURATE = "optimal_inaccurate"  # stalled, best iterate within 10 * tol
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERICAL_FAILURE = "numerical_failure"


# --------------------------------------------------------------------------
# modeling layer
# --------------------------------------------------------------------------


class Variable:
    """A block of real decision variables.

    ``basis`` has shape ``(size, *shape)``; the value of the variable is
    ``sum_k y_k basis[k]``.
    """

    def __init__(self, basis: np.ndarray, name: str = ""):
        self.basis = basis
        self.size = basis.shape[0]
        self.shape = basis.shape[1:]
        self.name = name

    def __repr__(self) -> str:
        return f"Variable({self.name!r}, size={self.size}, shape={self.shape})"


class Affine:
    """Affine expression ``const + sum_v <coef_v, y_v>``.

    ``terms`` maps each :class:`Variable` to a coefficient array of shape
    ``(var.size, *shape)``.  Values may be complex; constraints take care of
    requiring real / Hermitian values.
    """

    __array_priority__ = 100

    def __init__(self, terms: dict[Variable, np.ndarray], const):
        self.terms = terms
        self.const = np.asarray(const)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.const.shape

    @classmethod
    def constant(cls, value) -> "Affine":
        return cls({}, np.asarray(value))

    @classmethod
    def of(cls, var: Variable) -> "Affine":
        return cls({var: var.basis.copy()}, np.zeros(var.shape, dtype=var.basis.dtype))

    def _map(self, fn) -> "Affine":
        return Affine({v: fn(c) for v, c in self.terms.items()}, fn(self.const))

    def __add__(self, other) -> "Affine":
        if not isinstance(other, Affine):
            other = Affine.constant(other)
        terms = dict(self.terms)
        for v, c in other.terms.items():
            terms[v] = terms[v] + c if v in terms else c
        return Affine(terms, self.const + other.const)

    __radd__ = __add__

    def __neg__(self) -> "Affine":
        return self._map(lambda c: -c)

    def __sub__(self, other) -> "Affine":
        return self + (-other if isinstance(other, Affine) else -np.asarray(other))

    def __rsub__(self, other) -> "Affine":
        return (-self) + other

    def __mul__(self, scalar) -> "Affine":
        if isinstance(scalar, Affine):
            raise TypeError("product of two affine expressions is not affine")
        return self._map(lambda c: c * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "Affine":
        return self * (1.0 / scalar)

    @property
    def real(self) -> "Affine":
        return self._map(np.real)

    @property
    def imag(self) -> "Affine":
        return self._map(np.imag)

    def conj(self) -> "Affine":
        return self._map(np.conj)

    def __getitem__(self, idx) -> "Affine":
        return Affine(
            {v: c[(slice(None),) + (idx if isinstance(idx, tuple) else (idx,))] for v, c in self.terms.items()},
            self.const[idx],
        )

    def trace_dot(self, C: np.ndarray) -> "Affine":
        """Scalar expression ``tr(C @ self)`` for a square matrix expression."""
        C = np.asarray(C)
        return Affine(
            {v: np.einsum("ij,kji->k", C, c) for v, c in self.terms.items()},
            np.trace(C @ self.const),
        )

    def value(self, values: dict[Variable, np.ndarray]) -> np.ndarray:
        out = self.const.astype(np.result_type(self.const, complex), copy=True)
        for v, c in self.terms.items():
            out = out + np.tensordot(values[v], c, axes=(0, 0))
        if np.all(np.imag(out) == 0):
            out = np.real(out)
        return out


def bmat(rows: Sequence[Sequence]) -> Affine:
    """Assemble a matrix expression from a nested list of scalar entries."""
    nr, nc = len(rows), len(rows[0])
    entries = [[e if isinstance(e, Affine) else Affine.constant(e) for e in row] for row in rows]
    const = np.zeros((nr, nc), dtype=complex)
    terms: dict[Variable, np.ndarray] = {}
    for i, row in enumerate(entries):
        for j, e in enumerate(row):
            if e.shape != ():
                raise ValueError("bmat entries must be scalar expressions")
            const[i, j] = e.const
            for v, c in e.terms.items():
                if v not in terms:
                    terms[v] = np.zeros((v.size, nr, nc), dtype=complex)
                terms[v][:, i, j] += c
    return Affine(terms, const)


def _hermitian_basis(n: int) -> np.ndarray:
    """n**2 real-coefficient basis of the n x n Hermitian matrices."""
    basis = []
    for i in range(n):
        E = np.zeros((n, n), dtype=complex)
        E[i, i] = 1.0
        basis.append(E)
    for i in range(n):
        for j in range(i + 1, n):
            E = np.zeros((n, n), dtype=complex)
            E[i, j] = E[j, i] = 1.0
            basis.append(E)
            E = np.zeros((n, n), dtype=complex)
            E[i, j] = 1j
            E[j, i] = -1j
            basis.append(E)
    return np.array(basis)


def _symmetric_basis(n: int) -> np.ndarray:
    basis = []
    for i in range(n):
        for j in range(i, n):
            E = np.zeros((n, n))
            E[i, j] = E[j, i] = 1.0
            basis.append(E)
    return np.array(basis)


def hermitian_embedding(Z: np.ndarray) -> np.ndarray:
    """Real symmetric 2n x 2n matrix that is PSD iff Hermitian ``Z`` is."""
    Z = np.asarray(Z)
    re, im = Z.real, Z.imag
    return np.block([[re, -im], [im, re]])


def hermitian_extraction(E: np.ndarray) -> np.ndarray:
    """Inverse of :func:`hermitian_embedding`."""
    n = E.shape[-1] // 2
    return E[..., :n, :n] + 1j * E[..., n:, :n]


# --------------------------------------------------------------------------
# standard form
# --------------------------------------------------------------------------


@dataclass
class StandardForm:
    """Compiled real data of ``max b^T y s.t. C - sum y_i A_i >= 0``.

    ``C_psd[k]`` is ``(n_k, n_k)`` and ``A_psd[k]`` is ``(m, n_k, n_k)``;
    the orthant block is ``C_lp`` ``(p,)`` / ``A_lp`` ``(m, p)``.
    """

    b: np.ndarray
    C_psd: list[np.ndarray]
    A_psd: list[np.ndarray]
    C_lp: np.ndarray
    A_lp: np.ndarray

    @property
    def m(self) -> int:
        return self.b.shape[0]

    def slack(self, y: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
        S = [C - np.tensordot(y, A, axes=(0, 0)) for C, A in zip(self.C_psd, self.A_psd)]
        s = self.C_lp - y @ self.A_lp
        return S, s


@dataclass
class IpmResult:
    status: Status
    y: np.ndarray
    X_psd: list[np.ndarray]
    x_lp: np.ndarray
    primal_objective: float
    dual_objective: float
    primal_residual: float
    dual_residual: float
    iterations: int


def _psd_step(X: np.ndarray, dX: np.ndarray) -> float:
    """Largest alpha with X + alpha dX >= 0 (inf when unrestricted)."""
    try:
        L = np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        return 0.0
    Li_dX = scipy.linalg.solve_triangular(L, dX, lower=True)
    W = scipy.linalg.solve_triangular(L, Li_dX.T, lower=True)
    lam = np.linalg.eigvalsh(0.5 * (W + W.T))[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _lp_step(x: np.ndarray, dx: np.ndarray) -> float:
    neg = dx < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(-x[neg] / dx[neg]))


def interior_point(sf: StandardForm, tol: float = 1e-8, max_iters: int = 100) -> IpmResult:
    """Infeasible primal-dual path-following method (HKM, Mehrotra)."""
    m = sf.m
    b = sf.b
    Cs, As = sf.C_psd, sf.A_psd
    Cl, Al = sf.C_lp, sf.A_lp
    Af = [A.reshape(m, -1) for A in As]
    nu = sum(C.shape[0] for C in Cs) + Cl.shape[0]

    norm_b = np.linalg.norm(b)
    norm_C = np.sqrt(sum(np.sum(C**2) for C in Cs) + np.sum(Cl**2))

    def Aop(Xs, xl):
        out = Al @ xl if Al.size else np.zeros(m)
        for A, X in zip(Af, Xs):
            out = out + A @ X.ravel()
        return out

    def Aadj(y):
        return [np.tensordot(y, A, axes=(0, 0)) for A in As], y @ Al if Al.size else np.zeros(0)

    # starting point
    Xs, Ss = [], []
    for C, A in zip(Cs, As):
        n = C.shape[0]
        nrmA = np.linalg.norm(A.reshape(m, -1), axis=1)
        xi = max(10.0, np.sqrt(n), n * np.max((1 + np.abs(b)) / (1 + nrmA)))
        eta = max(10.0, np.sqrt(n), np.max(nrmA), np.linalg.norm(C))
        Xs.append(xi * np.eye(n))
        Ss.append(eta * np.eye(n))
    p = Cl.shape[0]
    if p:
        nrmA = np.linalg.norm(Al, axis=0)
        xi = max(10.0, np.max((1 + np.abs(b).max()) / (1 + nrmA)))
        eta = max(10.0, np.max(nrmA), np.linalg.norm(Cl))
        xl, sl = xi * np.ones(p), eta * np.ones(p)
    else:
        xl, sl = np.zeros(0), np.zeros(0)
    y = np.zeros(m)

    status = Status.NUMERICAL_FAILURE
    pobj = dobj = np.nan
    pres = dres = np.inf
    best = None
    it = 0
    for it in range(1, max_iters + 1):
        ATy, ATy_l = Aadj(y)
        Rd = [C - S - T for C, S, T in zip(Cs, Ss, ATy)]
        rd = Cl - sl - ATy_l
        rp = b - Aop(Xs, xl)
        pobj = sum(np.sum(C * X) for C, X in zip(Cs, Xs)) + Cl @ xl
        dobj = b @ y
        mu = (sum(np.sum(X * S) for X, S in zip(Xs, Ss)) + xl @ sl) / nu
        pres = np.linalg.norm(rp) / (1 + norm_b)
        dres = np.sqrt(sum(np.sum(R**2) for R in Rd) + np.sum(rd**2)) / (1 + norm_C)
        gap = abs(pobj - dobj) / max(1.0, abs(pobj), abs(dobj))
        logger.debug("it=%d pobj=%.9e dobj=%.9e gap=%.2e pres=%.2e dres=%.2e", it, pobj, dobj, gap, pres, dres)
        if gap <= tol and pres <= tol and dres <= tol:
            status = Status.OPTIMAL
            break
        score = max(gap, pres, dres)
        if best is None or score < best[0]:
            best = (score, [X.copy() for X in Xs], xl.copy(), y.copy(), pobj, dobj, pres, dres)

        # certificates: dual-form LMI infeasible / objective unbounded
        cx = pobj
        if cx < 0 and np.linalg.norm(Aop(Xs, xl)) / -cx < tol and pres > tol:
            status = Status.INFEASIBLE
            break
        if dobj > 0:
            lhs = np.sqrt(sum(np.sum((T + S) ** 2) for T, S in zip(ATy, Ss)) + np.sum((ATy_l + sl) ** 2))
            if lhs / dobj < tol and dres > tol:
                status = Status.UNBOUNDED
                break
        if not np.isfinite(mu) or mu > 1e30 or abs(dobj) > 1e30:
            status = Status.UNBOUNDED if dobj > 1e30 else Status.NUMERICAL_FAILURE
            break

        try:
            Sinv = [np.linalg.inv(S) for S in Ss]
        except np.linalg.LinAlgError:
            break
        Sinv = [0.5 * (Si + Si.T) for Si in Sinv]

        # Schur complement M_ij = sum tr(A_i X A_j S^-1)
        M = np.zeros((m, m))
        for A, AF, X, Si in zip(As, Af, Xs, Sinv):
            W = np.matmul(np.matmul(X, A), Si)
            M += AF @ W.reshape(m, -1).T
        if p:
            M += (Al * (xl / sl)) @ Al.T
        M = 0.5 * (M + M.T)
        try:
            factor = scipy.linalg.cho_factor(M)
            msolve = lambda r: scipy.linalg.cho_solve(factor, r)  # noqa: E731
        except np.linalg.LinAlgError:
            msolve = lambda r: np.linalg.lstsq(M, r, rcond=None)[0]  # noqa: E731

        def direction(sigma_mu, corr=None):
            # dX = sigma_mu S^-1 - X - X dS S^-1 [- dXa dSa S^-1]
            G = [sigma_mu * Si - X - X @ R @ Si for X, R, Si in zip(Xs, Rd, Sinv)]
            g = sigma_mu / sl - xl - xl * rd / sl if p else np.zeros(0)
            if corr is not None:
                dXa, dSa, dxa, dsa = corr
                G = [Gk - dXk @ dSk @ Si for Gk, dXk, dSk, Si in zip(G, dXa, dSa, Sinv)]
                if p:
                    g = g - dxa * dsa / sl
            dy = msolve(rp - Aop(G, g))
            ATdy, ATdy_l = Aadj(dy)
            dS = [R - T for R, T in zip(Rd, ATdy)]
            ds = rd - ATdy_l
            dX = []
            for Gk, X, T, Si in zip(G, Xs, ATdy, Sinv):
                H = Gk + X @ T @ Si
                dX.append(0.5 * (H + H.T))
            dx = g + xl * ATdy_l / sl if p else np.zeros(0)
            return dX, dy, dS, dx, ds

        def steps(dX, dS, dx, ds):
            ap = min([_psd_step(X, d) for X, d in zip(Xs, dX)] + ([_lp_step(xl, dx)] if p else []))
            ad = min([_psd_step(S, d) for S, d in zip(Ss, dS)] + ([_lp_step(sl, ds)] if p else []))
            return ap, ad

        dXa, dya, dSa, dxa, dsa = direction(0.0)
        ap, ad = steps(dXa, dSa, dxa, dsa)
        ap, ad = min(1.0, ap), min(1.0, ad)
        mu_aff = (
            sum(np.sum((X + ap * dX) * (S + ad * dS)) for X, dX, S, dS in zip(Xs, dXa, Ss, dSa))
            + (xl + ap * dxa) @ (sl + ad * dsa)
        ) / nu
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3)) if mu > 0 else 0.0

        dX, dy, dS, dx, ds = direction(sigma * mu, (dXa, dSa, dxa, dsa))
        ap, ad = steps(dX, dS, dx, ds)
        tau = 0.98 if it < 5 else 0.995
        ap, ad = min(1.0, tau * ap), min(1.0, tau * ad)
        if ap < 1e-12 and ad < 1e-12:
            break
        Xs = [X + ap * d for X, d in zip(Xs, dX)]
        xl = xl + ap * dx
        y = y + ad * dy
        Ss = [S + ad * d for S, d in zip(Ss, dS)]
        sl = sl + ad * ds

    if status is Status.NUMERICAL_FAILURE and best is not None:
        score, Xs, xl, y, pobj, dobj, pres, dres = best
        if score <= 10 * tol:
            status = Status.OPTIMAL_INACCURATE
    return IpmResult(status, y, Xs, xl, float(pobj), float(dobj), float(pres), float(dres), it)


# --------------------------------------------------------------------------
# problem container
# --------------------------------------------------------------------------


@dataclass
class SdpSolution:
    status: Status
    values: dict[Variable, np.ndarray]
    objective: float
    primal_objective: float
    dual_objective: float
    primal_residual: float
    dual_residual: float
    iterations: int = 0
    gap_scale: float = 1.0  # max(1, |p|, |d|) of the problem the backend solved

    @property
    def optimal(self) -> bool:
        return self.status in (Status.OPTIMAL, Status.OPTIMAL_INACCURATE)

    @property
    def duality_gap(self) -> float:
        return abs(self.primal_objective - self.dual_objective)

    @property
    def relative_gap(self) -> float:
        """Gap scaled as in the stopping test.

        The denominator uses the objectives the backend saw, before the
        constant left over from eliminating equality constraints is added.
        """
        return self.duality_gap / self.gap_scale

    def __getitem__(self, expr) -> np.ndarray:
        if isinstance(expr, Variable):
            return np.tensordot(self.values[expr], expr.basis, axes=(0, 0))
        return expr.value(self.values)


Backend = Callable[[StandardForm, float], IpmResult]


@dataclass
class SdpProblem:
    """Container for a dual-form SDP built from :class:`Affine` expressions."""

    variables: list[Variable] = field(default_factory=list)
    psd: list[Affine] = field(default_factory=list)
    nonneg: list[Affine] = field(default_factory=list)
    equalities: list[Affine] = field(default_factory=list)
    objective: Affine | None = None
    sense: int = 1

    # -- variables --------------------------------------------------------
    def _add(self, basis, name) -> Affine:
        var = Variable(basis, name)
        self.variables.append(var)
        return Affine.of(var)

    def scalar(self, name: str = "") -> Affine:
        var = Variable(np.ones((1,)), name)
        self.variables.append(var)
        return Affine({var: np.ones(1)}, np.zeros(()))

    def hermitian(self, n: int, name: str = "") -> Affine:
        return self._add(_hermitian_basis(n), name)

    def symmetric(self, n: int, name: str = "") -> Affine:
        return self._add(_symmetric_basis(n), name)

    # -- constraints ------------------------------------------------------
    def add_psd(self, expr: Affine) -> None:
        if len(expr.shape) != 2 or expr.shape[0] != expr.shape[1]:
            raise ValueError(f"PSD constraint needs a square matrix expression, got shape {expr.shape}")
        self.psd.append(expr)

    def add_nonneg(self, expr: Affine) -> None:
        """``expr >= 0`` for a real scalar expression."""
        if expr.shape != ():
            raise ValueError("nonnegativity constraint needs a scalar expression")
        self.nonneg.append(expr)

    def add_le(self, lhs: Affine, rhs) -> None:
        self.add_nonneg(rhs - lhs)

    def add_eq(self, lhs: Affine, rhs=0.0) -> None:
        expr = lhs - rhs
        for e in np.ndindex(expr.shape):
            self.equalities.append(expr[e] if expr.shape else expr)

    def maximize(self, expr: Affine) -> None:
        self.objective, self.sense = expr, 1

    def minimize(self, expr: Affine) -> None:
        self.objective, self.sense = expr, -1

    # -- compilation ------------------------------------------------------
    def _offsets(self) -> dict[Variable, slice]:
        out, k = {}, 0
        for v in self.variables:
            out[v] = slice(k, k + v.size)
            k += v.size
        return out

    def _dense(self, expr: Affine, offsets, m) -> tuple[np.ndarray, np.ndarray]:
        coef = np.zeros((m,) + expr.shape, dtype=np.result_type(expr.const, complex))
        for v, c in expr.terms.items():
            coef[offsets[v]] += c
        return coef, expr.const

    def compile(self) -> tuple[StandardForm, np.ndarray, np.ndarray, float]:
        """Return ``(sf, y0, N, const)`` with ``y = y0 + N z``."""
        offsets = self._offsets()
        m = sum(v.size for v in self.variables)
        if self.objective is None:
            raise ValueError("no objective set")
        obj_c, obj_k = self._dense(self.objective, offsets, m)
        if np.max(np.abs(np.imag(obj_c)), initial=0) > 1e-12 or abs(np.imag(obj_k)) > 1e-12:
            raise ValueError("objective must be real")
        b = self.sense * np.real(obj_c)
        const = self.sense * float(np.real(obj_k))

        if self.equalities:
            rows = [self._dense(e, offsets, m) for e in self.equalities]
            E = np.array([np.real(r[0]) for r in rows])
            f = -np.array([np.real(r[1]) for r in rows])
            if any(np.max(np.abs(np.imag(r[0]))) > 1e-12 for r in rows):
                raise ValueError("equality constraints must be real")
            y0 = np.linalg.lstsq(E, f, rcond=None)[0]
            if np.linalg.norm(E @ y0 - f) > 1e-9 * (1 + np.linalg.norm(f)):
                raise ValueError("inconsistent equality constraints")
            N = scipy.linalg.null_space(E)
        else:
            y0, N = np.zeros(m), np.eye(m)

        C_psd, A_psd = [], []
        for expr in self.psd:
            F, F0 = self._dense(expr, offsets, m)
            F0 = np.asarray(F0, dtype=complex)
            herm_err = np.max(np.abs(F - np.conj(np.swapaxes(F, 1, 2))), initial=0)
            scale = max(1.0, np.max(np.abs(F), initial=0))
            if herm_err > 1e-10 * scale or np.max(np.abs(F0 - F0.conj().T)) > 1e-10 * max(1.0, np.max(np.abs(F0))):
                raise ValueError("PSD constraint expression is not Hermitian")
            if np.max(np.abs(F.imag), initial=0) == 0 and np.max(np.abs(F0.imag)) == 0:
                Fr, F0r = F.real, F0.real
            else:
                Fr, F0r = hermitian_embedding(F), hermitian_embedding(F0)
            # S = F0 + F y = (F0 + F y0) - sum_j z_j (-(F N)_j)
            Cb = F0r + np.tensordot(y0, Fr, axes=(0, 0))
            Ab = -np.tensordot(N, Fr, axes=(0, 0))
            C_psd.append(0.5 * (Cb + Cb.T))
            A_psd.append(0.5 * (Ab + np.swapaxes(Ab, 1, 2)))
        if self.nonneg:
            rows = [self._dense(e, offsets, m) for e in self.nonneg]
            G = np.array([np.real(r[0]) for r in rows]).T
            g0 = np.array([np.real(r[1]) for r in rows])
            C_lp = g0 + y0 @ G
            A_lp = -(N.T @ G)
        else:
            C_lp, A_lp = np.zeros(0), np.zeros((N.shape[1], 0))
        sf = StandardForm(N.T @ b, C_psd, A_psd, C_lp, A_lp)
        return sf, y0, N, const + b @ y0

    def dump(self, path) -> None:
        """Write the compiled problem in SDPA sparse format.

        SDPA convention: ``min c^T x  s.t.  sum_i F_i x_i - F_0 >= 0``.
        """
        sf, *_ = self.compile()
        blocks = [C.shape[0] for C in sf.C_psd] + ([-sf.C_lp.shape[0]] if sf.C_lp.size else [])
        lines = [f"{sf.m}", f"{len(blocks)}", " ".join(str(s) for s in blocks)]
        lines.append(" ".join(repr(float(-c)) for c in sf.b))

        def emit(mat_no, blk_no, M):
            n = M.shape[0]
            for i in range(n):
                for j in range(i, n):
                    if M[i, j] != 0:
                        lines.append(f"{mat_no} {blk_no} {i + 1} {j + 1} {float(M[i, j])!r}")

        for k, C in enumerate(sf.C_psd, start=1):
            emit(0, k, -C)
        if sf.C_lp.size:
            emit(0, len(blocks), np.diag(-sf.C_lp))
        for i in range(sf.m):
            for k, A in enumerate(sf.A_psd, start=1):
                emit(i + 1, k, -A[i])
            if sf.C_lp.size:
                emit(i + 1, len(blocks), np.diag(-sf.A_lp[i]))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def solve(problem: SdpProblem, tol: float = 1e-8, backend: Backend | None = None) -> SdpSolution:
    """Solve ``problem``; ``backend`` maps a :class:`StandardForm` to an :class:`IpmResult`."""
    sf, y0, N, const = problem.compile()
    backend = backend or (lambda sf_, tol_: interior_point(sf_, tol_))
    res = backend(sf, tol)
    y = y0 + N @ res.y
    offsets = problem._offsets()
    values = {v: y[offsets[v]] for v in problem.variables}
    sense = problem.sense
    sol = SdpSolution(
        status=res.status,
        values=values,
        objective=sense * (res.dual_objective + const),
        primal_objective=sense * (res.primal_objective + const),
        dual_objective=sense * (res.dual_objective + const),
        primal_residual=res.primal_residual,
        dual_residual=res.dual_residual,
        iterations=res.iterations,
        gap_scale=max(1.0, abs(res.primal_objective), abs(res.dual_objective)),
    )
    if not sol.optimal:
        logger.warning("SDP solve ended with status %s after %d iterations", res.status.value, res.iterations)
    return sol
