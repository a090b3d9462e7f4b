"""Channel-extension bound via an optimised Kraus representation.

Equivalent Kraus families ``K~(phi) = u(phi) K(phi)`` with
``u = exp(-i h (phi - phi0))`` have derivatives
``dK~_i = dK_i - i sum_j h_ij K_j`` at phi0.  With

    alpha(h) = sum_i dK~_i^dag dK~_i,     beta(h) = i sum_i dK~_i^dag K_i

the N-probe QFI obeys ``F_N <= 4 (N ||alpha|| + N(N-1) ||beta||^2)``.  If some
``h`` makes ``beta`` vanish, ``F_N <= 4 N min ||alpha||`` and the minimum is a
small SDP over the affine set of such ``h``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ._config import TOL, Tolerances
from .channel import Channel, dagger, is_hermitian, matrix_to_json, opnorm, require_valid
from .classical import _realify, hermitian_basis
from .sdp import solve_lmi


def rotated_derivatives(ch: Channel, h: np.ndarray) -> np.ndarray:
    """``dK~_i = dK_i - i sum_j h_ij K_j``, shape ``(k, d_out, d_in)``."""
    h = np.asarray(h, dtype=complex)
    if h.shape != (ch.k, ch.k):
        raise ValueError(f"h must be {ch.k}x{ch.k}, got {h.shape}")
    return ch.kraus_dot - 1j * np.einsum("ij,jab->iab", h, ch.kraus)


def alpha_beta(ch: Channel, h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    Kt = rotated_derivatives(ch, h)
    alpha = np.einsum("iba,ibc->ac", Kt.conj(), Kt)
    beta = 1j * np.einsum("iba,ibc->ac", Kt.conj(), ch.kraus)
    return alpha, beta


@dataclass(frozen=True)
class BetaSolution:
    """Affine solution set ``h0 + span(nullspace)`` of ``beta(h) = 0``."""

    feasible: bool
    h0: np.ndarray | None
    nullspace: np.ndarray  # (m, k, k) Hermitian directions
    residual: float
    relative_residual: float

    def h(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=float)
        if len(coords) == 0:
            return self.h0
        return self.h0 + np.tensordot(coords, self.nullspace, axes=1)


def beta_constraint_solve(ch: Channel, tol: Tolerances = TOL) -> BetaSolution:
    """Solve ``sum_ij h_ij K_i^dag K_j = i sum_q dK_q^dag K_q`` over Hermitian ``h``."""
    require_valid(ch, tol)
    K = ch.kraus
    basis = hermitian_basis(ch.k)
    images = np.array([np.einsum("ij,iab,jac->bc", E, K.conj(), K) for E in basis])
    target = 1j * np.einsum("qab,qac->bc", ch.kraus_dot.conj(), K)
    A = _realify(images)
    b = _realify(target[None])[:, 0]
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    h0 = np.einsum("a,aij->ij", x, basis)
    residual = opnorm(np.einsum("ij,iab,jac->bc", h0, K.conj(), K) - target)
    scale = opnorm(target)
    rel = residual / scale if scale > 0 else 0.0
    if rel > tol.res:
        return BetaSolution(False, None, np.zeros((0, ch.k, ch.k), complex), residual, rel)
    _, s, Vt = np.linalg.svd(A)
    rank = int(np.sum(s > max(A.shape) * np.finfo(float).eps * s[0]))
    null = np.einsum("ma,aij->mij", Vt[rank:], basis)
    return BetaSolution(True, h0, null, residual, rel)


def assemble_lmi(ch: Channel, h: np.ndarray, t: float) -> np.ndarray:
    """Block matrix with ``sqrt(t)`` identities on the diagonal and ``dK~_i`` in the first block row/column.

    It is PSD exactly when ``alpha(h) <= t * 1``.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    Kt = rotated_derivatives(ch, h)
    B = Kt.reshape(ch.k * ch.d_out, ch.d_in)
    st = math.sqrt(t)
    return np.block([
        [st * np.eye(ch.d_in), dagger(B)],
        [B, st * np.eye(ch.k * ch.d_out)],
    ])


def _lmi_data(ch: Channel, sol: BetaSolution):
    """Affine data of ``[[t 1, B^dag], [B, 1]] >= 0`` in ``y = (coords, t)``."""
    d1, n2 = ch.d_in, ch.k * ch.d_out
    B0 = rotated_derivatives(ch, sol.h0).reshape(n2, d1)
    F0 = np.block([[np.zeros((d1, d1)), dagger(B0)], [B0, np.eye(n2)]])
    Fs = []
    for N in sol.nullspace:
        Bj = (-1j * np.einsum("ij,jab->iab", N, ch.kraus)).reshape(n2, d1)
        Fs.append(np.block([[np.zeros((d1, d1)), dagger(Bj)], [Bj, np.zeros((n2, n2))]]))
    Ft = np.zeros((d1 + n2, d1 + n2), complex)
    Ft[:d1, :d1] = np.eye(d1)
    Fs.append(Ft)
    return F0, np.array(Fs)


def alpha_norm(ch: Channel, h: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(alpha_beta(ch, h)[0])[-1])


def minimize_alpha_direct(ch: Channel, sol: BetaSolution, x0=None) -> tuple[np.ndarray, float]:
    """Independent route to ``min ||alpha||``: smoothed largest-eigenvalue descent.

    Minimises ``log(sum exp(s * eig(alpha))) / s`` with BFGS for increasing
    sharpness ``s``, warm-starting each stage.  Returns ``(coords, ||alpha||)``.
    """
    m = len(sol.nullspace)
    x = np.zeros(m) if x0 is None else np.asarray(x0, dtype=float)
    if m == 0:
        return x, alpha_norm(ch, sol.h0)
    n2 = ch.k * ch.d_out
    B0 = rotated_derivatives(ch, sol.h0).reshape(n2, ch.d_in)
    Bs = np.array([(-1j * np.einsum("ij,jab->iab", N, ch.kraus)).reshape(n2, ch.d_in) for N in sol.nullspace])

    def smoothed(x, s):
        B = B0 + np.tensordot(x, Bs, axes=1)
        w, V = np.linalg.eigh(dagger(B) @ B)
        z = s * (w - w[-1])
        p = np.exp(z) / np.exp(z).sum()
        f = w[-1] + np.log(np.exp(z).sum()) / s
        # d alpha / dx_j = Bj^dag B + B^dag Bj
        BV = B @ V
        BjV = Bs @ V
        g = 2 * np.einsum("a,jka,ka->j", p, BjV.conj(), BV).real
        return f, g

    for s in (1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7):
        res = minimize(smoothed, x, args=(s,), jac=True, method="BFGS", options={"gtol": 1e-12, "maxiter": 2000})
        x = res.x
    return x, alpha_norm(ch, sol.h(x))


@dataclass(frozen=True)
class CEResult:
    feasible: bool
    h_opt: np.ndarray | None
    alpha_norm: float | None
    t_opt: float | None
    solver_status: str
    iterations: int = 0
    dual_gap: float | None = None
    dual_residual: float | None = None
    nullspace_dim: int = 0
    beta_residual: float = 0.0

    @property
    def bound_const(self) -> float | None:
        """``1 / (2 sqrt(min ||alpha||))``; the bound is ``bound_const / sqrt(N)``."""
        if not self.feasible:
            return None
        if self.alpha_norm <= 0:
            return math.inf
        return 1.0 / (2.0 * math.sqrt(self.alpha_norm))

    def qfi_bound(self, n: int) -> float:
        """Upper bound ``4 N min ||alpha||`` on the N-probe QFI (``inf`` if not certified)."""
        return 4 * n * self.alpha_norm if self.feasible else math.inf

    def delta_phi(self, n: int) -> float | None:
        c = self.bound_const
        return None if c is None else c / math.sqrt(n)

    def to_dict(self) -> dict:
        return {
            "method": "ce",
            "feasible": self.feasible,
            "note": None if self.feasible else "beta=0 infeasible: Heisenberg scaling not excluded by this method",
            "h_opt": None if self.h_opt is None else matrix_to_json(self.h_opt),
            "alpha_norm": self.alpha_norm,
            "t_opt": self.t_opt,
            "bound_const": self.bound_const,
            "solver_status": self.solver_status,
            "iterations": self.iterations,
            "dual_gap": self.dual_gap,
            "dual_residual": self.dual_residual,
            "nullspace_dim": self.nullspace_dim,
            "beta_residual": self.beta_residual,
        }


def ce_sdp_bound(ch: Channel, tol: Tolerances = TOL, gap_tol: float = 1e-9) -> CEResult:
    """Minimise ``||alpha(h)||`` over ``beta(h) = 0`` by semidefinite programming."""
    sol = beta_constraint_solve(ch, tol)
    if not sol.feasible:
        return CEResult(False, None, None, None, "infeasible", beta_residual=sol.relative_residual)
    m = len(sol.nullspace)
    F0, Fs = _lmi_data(ch, sol)
    c = np.zeros(m + 1)
    c[-1] = 1.0
    y0 = np.zeros(m + 1)
    y0[-1] = alpha_norm(ch, sol.h0) + 1.0
    try:
        res = solve_lmi(c, F0, Fs, y0, gap_tol=gap_tol)
    except (np.linalg.LinAlgError, ValueError) as exc:
        res, status = None, f"interior point failed: {exc}"
    else:
        status = res.status
    if res is not None and res.converged:
        coords = res.y[:m]
        h = sol.h(coords)
        return CEResult(True, (h + dagger(h)) / 2, alpha_norm(ch, h), float(res.y[-1]), "optimal",
                        res.iterations, res.gap, res.dual_residual, m, sol.relative_residual)
    # fall back to the direct descent; any feasible h still gives a valid bound
    x0 = None if res is None else res.y[:m]
    coords, a = minimize_alpha_direct(ch, sol, x0)
    h = sol.h(coords)
    return CEResult(True, (h + dagger(h)) / 2, a, a, f"fallback ({status})", 0, None, None, m,
                    sol.relative_residual)


def finite_n_bound(ch: Channel, h: np.ndarray, n: int) -> float:
    """``4 (N ||alpha|| + N(N-1) ||beta||^2)`` for the given ``h`` (no beta=0 requirement)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not is_hermitian(np.asarray(h, dtype=complex), 1e-10):
        raise ValueError("h must be Hermitian")
    alpha, beta = alpha_beta(ch, h)
    return 4.0 * (n * opnorm(alpha) + n * (n - 1) * opnorm(beta) ** 2)
