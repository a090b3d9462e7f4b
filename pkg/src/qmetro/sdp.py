"""Small dense SDP solver for a single complex Hermitian LMI.

Solves ``min c.y  s.t.  F(y) = F0 + sum_j y_j F_j >= 0`` with a log-det
barrier path-following method (damped Newton centering).  At the end the
scaled inverse ``Z = F(y)^{-1} / tau`` is a dual point, and the reported
dual residual and duality gap certify the optimum.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LMIResult:
    y: np.ndarray
    objective: float
    dual_objective: float
    gap: float  # Tr(Z F(y))
    dual_residual: float  # max_j |Tr(Z F_j) - c_j|
    iterations: int
    status: str  # "optimal" or a failure description
    Z: np.ndarray

    @property
    def converged(self) -> bool:
        return self.status == "optimal"


def _affine(F0, Fs, y):
    return F0 + np.tensordot(y, Fs, axes=1)


def _inv_pd(F):
    """Inverse of a Hermitian positive definite matrix, or None if not PD."""
    try:
        L = np.linalg.cholesky(F)
    except np.linalg.LinAlgError:
        return None
    Linv = np.linalg.inv(L)
    return Linv.conj().T @ Linv


def solve_lmi(c, F0, Fs, y0, gap_tol: float = 1e-9, mu: float = 10.0, max_newton: int = 100,
              newton_tol: float = 1e-10) -> LMIResult:
    """Barrier method for ``min c.y`` over the LMI; ``y0`` must be strictly feasible."""
    c = np.asarray(c, dtype=float)
    Fs = np.asarray(Fs, dtype=complex)
    F0 = np.asarray(F0, dtype=complex)
    y = np.array(y0, dtype=float)
    n = F0.shape[0]
    if _inv_pd(_affine(F0, Fs, y)) is None:
        raise ValueError("starting point is not strictly feasible")

    tau = 1.0
    iters = 0
    status = "optimal"
    while True:
        prev = np.inf
        for _ in range(max_newton):
            iters += 1
            Finv = _inv_pd(_affine(F0, Fs, y))
            G = Finv @ Fs  # (m, n, n)
            grad = tau * c - np.einsum("jaa->j", G).real
            H = np.einsum("jab,lba->jl", G, G).real
            try:
                dy = -np.linalg.solve(H, grad)
            except np.linalg.LinAlgError:
                dy = -np.linalg.lstsq(H, grad, rcond=None)[0]
            lam2 = float(-grad @ dy)
            # at large tau round-off puts a floor under lam2; a small decrement
            # that has stopped shrinking is as central as the arithmetic allows
            if lam2 < newton_tol or (lam2 < 1e-6 and lam2 > 0.5 * prev):
                break
            prev = lam2
            lam = np.sqrt(max(lam2, 0.0))
            s = 1.0 if lam < 0.25 else 1.0 / (1.0 + lam)
            while _inv_pd(_affine(F0, Fs, y + s * dy)) is None:
                s *= 0.5
                if s < 1e-16:
                    break
            y = y + s * dy
        else:
            status = f"centering did not converge at tau={tau:.1e}"
            break
        if n / tau < gap_tol:
            break
        tau *= mu

    F = _affine(F0, Fs, y)
    Finv = _inv_pd(F)
    if Finv is None:
        # can only happen through round-off at the boundary
        status = "final iterate not strictly feasible"
        Finv = np.linalg.pinv(F)
    Z = Finv / tau
    dual_res = float(np.max(np.abs(np.einsum("ab,jba->j", Z, Fs).real - c))) if len(c) else 0.0
    gap = float(np.trace(Z @ F).real)
    dual_obj = float(-np.trace(Z @ F0).real)
    return LMIResult(y, float(c @ y), dual_obj, gap, dual_res, iters, status, Z)
