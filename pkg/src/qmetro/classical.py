"""Classical-simulation bound.

The channel at ``phi0`` is written as a two-point mixture of the channels
``P +/- eps_pm D`` sitting where the tangent line leaves the set of channels.
The phi-dependence then lives only in the mixing probabilities, and N probes
can do no better than N samples of that binary distribution::

    delta_phi_N >= sqrt(eps_plus * eps_minus / N)
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._config import TOL, NotApplicable, Tolerances
from .channel import Channel, ChoiPair, choi, dagger, opnorm, require_valid


class Classification(str, enum.Enum):
    PHI_NONEXTREMAL = "phi_nonextremal"
    PHI_EXTREMAL = "phi_extremal"
    UNITARY_LIKE_EXTREMAL = "unitary_like_extremal"


class InconsistentClassification(RuntimeError):
    """The pencil test and the mu test disagree; indicates a numerical problem."""


def epsilon_max(cp: ChoiPair, sign: int, tol: Tolerances = TOL) -> float:
    """Largest ``eps >= 0`` with ``P + sign*eps*D`` positive semidefinite.

    Returns 0.0 when ``D`` does not vanish on the kernel of ``P`` (the pencil
    leaves the PSD cone immediately) and ``math.inf`` when ``D`` restricted to
    the support of ``P`` is semidefinite in the direction of ``sign``.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    P, D = np.asarray(cp.P), np.asarray(cp.D)
    if not (np.allclose(P, dagger(P), atol=1e-12) and np.allclose(D, dagger(D), atol=1e-12)):
        raise ValueError("Choi pair must be Hermitian")
    w, V = np.linalg.eigh(P)
    lam_max = w[-1]
    if lam_max <= 0:
        raise ValueError("Choi matrix has no positive eigenvalue")
    supp = w > tol.psd * lam_max
    Vs, Vk = V[:, supp], V[:, ~supp]
    if Vk.shape[1] and opnorm(D @ Vk) > tol.psd * max(1.0, lam_max):
        return 0.0
    s = 1.0 / np.sqrt(w[supp])
    M = s[:, None] * (dagger(Vs) @ D @ Vs) * s[None, :]
    top = np.linalg.eigvalsh(-sign * (M + dagger(M)) / 2)[-1]
    if top <= 0:
        if opnorm(D) > 0 and abs(np.trace(D)) <= tol.tp:
            # impossible for a traceless nonzero D; surface rather than hide
            warnings.warn("unbounded epsilon for a traceless nonzero derivative", RuntimeWarning)
        return math.inf
    return float(1.0 / top)


@dataclass(frozen=True)
class MuSolution:
    """Least-squares solution of ``D = sum_ij mu_ij |K_i><K_j|`` over Hermitian ``mu``."""

    mu: np.ndarray | None  # None when the residual is too large
    residual: float
    relative_residual: float
    trace_condition: float | None  # ||sum_ij mu_ij K_j^dag K_i||, zero for valid mu
    condition_number: float
    ill_conditioned: bool

    @property
    def exists(self) -> bool:
        return self.mu is not None


def hermitian_basis(k: int) -> np.ndarray:
    """Real basis of k x k Hermitian matrices, shape ``(k*k, k, k)``."""
    basis = []
    for a in range(k):
        E = np.zeros((k, k), complex)
        E[a, a] = 1
        basis.append(E)
    for a in range(k):
        for b in range(a + 1, k):
            E = np.zeros((k, k), complex)
            E[a, b] = E[b, a] = 1
            basis.append(E)
            E = np.zeros((k, k), complex)
            E[a, b], E[b, a] = 1j, -1j
            basis.append(E)
    return np.array(basis)


def _realify(mats: np.ndarray) -> np.ndarray:
    """Stack real and imaginary parts of flattened matrices as columns."""
    flat = mats.reshape(len(mats), -1)
    return np.concatenate([flat.real, flat.imag], axis=1).T


def mu_condition(ch: Channel, tol: Tolerances = TOL) -> MuSolution:
    require_valid(ch, tol)
    V = ch.kraus.reshape(ch.k, -1)
    D = choi(ch, tol).D
    basis = hermitian_basis(ch.k)
    images = np.array([V.T @ E @ V.conj() for E in basis])
    A = _realify(images)
    b = _realify(D[None])[:, 0]
    x, *_, sv = np.linalg.lstsq(A, b, rcond=None)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    mu = np.einsum("a,aij->ij", x, basis)
    residual = opnorm(D - V.T @ mu @ V.conj())
    scale = opnorm(D)
    rel = residual / scale if scale > 0 else 0.0
    ill = cond > 1e8
    if ill:
        warnings.warn(f"mu system ill-conditioned (condition number {cond:.2e})", RuntimeWarning)
    if rel > tol.mu:
        return MuSolution(None, residual, rel, None, cond, ill)
    # partial trace over the output of sum mu_ij |K_i><K_j|
    traced = opnorm(np.einsum("ij,jab,iac->bc", mu, ch.kraus.conj(), ch.kraus))
    if traced > tol.mu * max(1.0, opnorm(mu)):
        raise InconsistentClassification(f"mu solves the Choi equation but sum mu_ij K_j^dag K_i = {traced:.2e}")
    return MuSolution(mu, residual, rel, traced, cond, ill)


def classify_phi_extremality(ch: Channel, tol: Tolerances = TOL) -> Classification:
    """Decide phi-extremality with the pencil test, cross-checked by the mu test."""
    cp = choi(ch, tol)
    eps_p, eps_m = epsilon_max(cp, +1, tol), epsilon_max(cp, -1, tol)
    by_eps = eps_p > 0 and eps_m > 0
    by_mu = mu_condition(ch, tol).exists
    if by_eps != by_mu:
        raise InconsistentClassification(f"pencil test says {by_eps} (eps={eps_p:.3g},{eps_m:.3g}), mu test says {by_mu}")
    if by_eps:
        return Classification.PHI_NONEXTREMAL
    if ch.k == 1:
        return Classification.UNITARY_LIKE_EXTREMAL
    return Classification.PHI_EXTREMAL


def classical_fisher(p, p_dot, tol: float = 1e-12) -> float:
    """Fisher information ``sum p_dot**2 / p`` of a discrete distribution.

    Returns ``math.inf`` if some outcome has vanishing probability but a
    nonzero derivative.
    """
    p = np.asarray(p, dtype=float)
    p_dot = np.asarray(p_dot, dtype=float)
    if p.shape != p_dot.shape:
        raise ValueError("p and p_dot must have the same shape")
    if np.any(p < -tol) or abs(p.sum() - 1) > 1e-9:
        raise ValueError("p must be a probability vector")
    if abs(p_dot.sum()) > 1e-9:
        raise ValueError(f"derivatives must sum to zero, got {p_dot.sum():.3g}")
    zero = p <= tol
    if np.any(np.abs(p_dot[zero]) > tol):
        return math.inf
    return float(np.sum(p_dot[~zero] ** 2 / p[~zero]))


@dataclass(frozen=True)
class TangentSimulation:
    """Two-point mixture reproducing ``(P, D)`` at phi0."""

    P_plus: np.ndarray
    P_minus: np.ndarray
    eps_plus: float
    eps_minus: float
    phi0: float = 0.0

    def probabilities(self, phi: float) -> tuple[float, float]:
        s = self.eps_plus + self.eps_minus
        x = phi - self.phi0
        return (self.eps_minus + x) / s, (self.eps_plus - x) / s

    @property
    def p_plus(self) -> float:
        return self.probabilities(self.phi0)[0]

    @property
    def p_minus(self) -> float:
        return self.probabilities(self.phi0)[1]

    @property
    def p_dot_plus(self) -> float:
        return 1.0 / (self.eps_plus + self.eps_minus)

    @property
    def p_dot_minus(self) -> float:
        return -1.0 / (self.eps_plus + self.eps_minus)

    def fisher(self) -> float:
        return classical_fisher([self.p_plus, self.p_minus], [self.p_dot_plus, self.p_dot_minus])


def tangent_simulation(ch: Channel, tol: Tolerances = TOL) -> TangentSimulation:
    cp = choi(ch, tol)
    ep, em = epsilon_max(cp, +1, tol), epsilon_max(cp, -1, tol)
    if not (ep > 0 and em > 0):
        raise NotApplicable("channel is phi-extremal; no tangent classical simulation exists")
    if math.isinf(ep) or math.isinf(em):
        raise NotApplicable("tangent line never leaves the channel set (phi-independent channel?)")
    return TangentSimulation(cp.P + ep * cp.D, cp.P - em * cp.D, ep, em, ch.phi0)


@dataclass(frozen=True)
class CSResult:
    eps_plus: float
    eps_minus: float
    classification: Classification
    residual_mu: float

    @property
    def applicable(self) -> bool:
        return self.classification is Classification.PHI_NONEXTREMAL

    @property
    def bound_const(self) -> float | None:
        """``sqrt(eps_plus*eps_minus)``; the bound is ``bound_const / sqrt(N)``."""
        if not self.applicable:
            return None
        return math.sqrt(self.eps_plus * self.eps_minus)

    @property
    def f_cl(self) -> float:
        if not self.applicable:
            return math.inf
        return 1.0 / (self.eps_plus * self.eps_minus)

    def delta_phi(self, n: int) -> float | None:
        c = self.bound_const
        return None if c is None else c / math.sqrt(n)

    def to_dict(self) -> dict:
        return {
            "method": "cs",
            "eps_plus": self.eps_plus,
            "eps_minus": self.eps_minus,
            "bound_const": self.bound_const,
            "classification": self.classification.value,
            "f_cl": self.f_cl if math.isfinite(self.f_cl) else None,
            "residual_mu": self.residual_mu,
            "applicable": self.applicable,
        }


def cs_bound(ch: Channel, tol: Tolerances = TOL) -> CSResult:
    cp = choi(ch, tol)
    ep, em = epsilon_max(cp, +1, tol), epsilon_max(cp, -1, tol)
    cls = classify_phi_extremality(ch, tol)
    return CSResult(ep, em, cls, mu_condition(ch, tol).relative_residual)
