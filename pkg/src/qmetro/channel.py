"""Kraus-family channels, their Choi matrices, and N-fold application to states.

A :class:`Channel` holds the Kraus operators ``K_i(phi0)`` of a one-parameter
family together with their derivatives ``dK_i/dphi`` at ``phi0``.  Everything
downstream (bounds and the QFI oracle) is local at ``phi0``.

Conventions: the phase is encoded as ``U = exp(i G phi)`` before the noise, so
``K_i(phi) = K_i U(phi)``.  The Choi matrix uses the unnormalised maximally
entangled vector ``sum_j |j>|j>`` with the output factor first, so the Kraus
vector ``|K> = (K x 1)|Phi>`` is just ``K.ravel()``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from ._config import TOL, BudgetExceeded, ChannelValidationError, Tolerances, tensor_budget

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (I2, SX, SY, SZ)


class ChannelFormatError(ValueError):
    """Malformed channel document."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def opnorm(a: np.ndarray) -> float:
    """Spectral norm (largest singular value)."""
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def is_hermitian(a: np.ndarray, tol: float = TOL.herm) -> bool:
    scale = max(opnorm(a), 1.0)
    return opnorm(a - dagger(a)) <= tol * scale


@dataclass(frozen=True)
class Channel:
    """Kraus operators of ``Lambda_phi`` and their phi-derivatives at ``phi0``.

    ``kraus`` and ``kraus_dot`` are stored as ``(k, d_out, d_in)`` arrays.
    Construction only checks shapes and finiteness; use :func:`validate` for
    the physical invariants.
    """

    kraus: np.ndarray
    kraus_dot: np.ndarray
    phi0: float = 0.0

    def __post_init__(self):
        K = np.asarray(self.kraus, dtype=complex)
        Kd = np.asarray(self.kraus_dot, dtype=complex)
        if K.ndim == 2:
            K = K[None]
        if Kd.ndim == 2:
            Kd = Kd[None]
        if K.ndim != 3 or K.shape != Kd.shape:
            raise ValueError(f"kraus {K.shape} and kraus_dot {Kd.shape} must be matching (k, d_out, d_in)")
        if len(K) == 0:
            raise ValueError("empty Kraus list")
        if not (np.all(np.isfinite(K)) and np.all(np.isfinite(Kd))):
            raise ValueError("Kraus operators contain NaN or Inf")
        object.__setattr__(self, "kraus", _frozen(K))
        object.__setattr__(self, "kraus_dot", _frozen(Kd))
        object.__setattr__(self, "phi0", float(self.phi0))

    @property
    def k(self) -> int:
        return self.kraus.shape[0]

    @property
    def d_in(self) -> int:
        return self.kraus.shape[2]

    @property
    def d_out(self) -> int:
        return self.kraus.shape[1]


@dataclass(frozen=True)
class ChoiPair:
    """Choi matrix ``P`` and its phi-derivative ``D`` (both ``d_out*d_in`` square)."""

    P: np.ndarray
    D: np.ndarray
    d_in: int
    d_out: int

    def __post_init__(self):
        object.__setattr__(self, "P", _frozen(self.P))
        object.__setattr__(self, "D", _frozen(self.D))


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("density matrix must be square")
        if not is_hermitian(rho, 1e-10):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > 1e-12:
            raise ValueError(f"trace {np.trace(rho).real:.3g} != 1")
        if np.linalg.eigvalsh(rho).min() < -TOL.psd:
            raise ValueError("density matrix is not positive semidefinite")
        object.__setattr__(self, "matrix", _frozen(rho))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))


def _as_matrix(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return np.asarray(rho, dtype=complex)


# ---------------------------------------------------------------------------
# construction and validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    completeness_defect: float
    derivative_defect: float
    independence_margin: float
    choi_min_eig: float
    valid: bool
    problems: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "completeness_defect": self.completeness_defect,
            "derivative_defect": self.derivative_defect,
            "independence_margin": self.independence_margin,
            "choi_min_eig": self.choi_min_eig,
            "problems": list(self.problems),
        }


def gram(kraus: np.ndarray) -> np.ndarray:
    """Gram matrix ``Tr(K_i^dag K_j)`` of a Kraus list."""
    V = kraus.reshape(len(kraus), -1)
    return V.conj() @ V.T


def validate(ch: Channel, tol: Tolerances = TOL) -> ValidationReport:
    """Check completeness, derivative consistency and linear independence."""
    K, Kd = ch.kraus, ch.kraus_dot
    completeness = opnorm(np.einsum("kai,kaj->ij", K.conj(), K) - np.eye(ch.d_in))
    deriv = np.einsum("kai,kaj->ij", Kd.conj(), K)
    derivative = opnorm(deriv + dagger(deriv))
    margin = float(np.linalg.eigvalsh(gram(K)).min())
    V = K.reshape(ch.k, -1)
    choi_min = float(np.linalg.eigvalsh(V.T @ V.conj()).min())

    problems = []
    if completeness > tol.tp:
        problems.append(f"completeness defect {completeness:.3e} > {tol.tp:g}")
    if derivative > tol.tp:
        problems.append(f"derivative-consistency defect {derivative:.3e} > {tol.tp:g}")
    if margin <= tol.li:
        problems.append(f"Kraus operators linearly dependent (Gram min eigenvalue {margin:.3e})")
    if choi_min < -tol.psd:
        problems.append(f"Choi matrix not PSD (min eigenvalue {choi_min:.3e})")
    return ValidationReport(completeness, derivative, margin, choi_min, not problems, tuple(problems))


def require_valid(ch: Channel, tol: Tolerances = TOL) -> Channel:
    report = validate(ch, tol)
    if not report.valid:
        raise ChannelValidationError("; ".join(report.problems))
    return ch


def phase_encode(kraus_noise: Sequence[np.ndarray], generator: np.ndarray, phi0: float = 0.0,
                 tol: Tolerances = TOL) -> Channel:
    """Channel ``rho -> Lambda(U rho U^dag)`` with ``U = exp(i G phi)``.

    Returns Kraus operators ``K_i U(phi0)`` and derivatives ``i K_i G U(phi0)``.
    Raises :class:`ChannelValidationError` if the noise Kraus set is not a
    valid (complete, linearly independent) channel.
    """
    G = np.asarray(generator, dtype=complex)
    if G.ndim != 2 or G.shape[0] != G.shape[1] or not is_hermitian(G):
        raise ValueError("generator must be a square Hermitian matrix")
    K = np.asarray(kraus_noise, dtype=complex)
    if K.ndim == 2:
        K = K[None]
    if K.shape[2] != G.shape[0]:
        raise ValueError(f"generator dimension {G.shape[0]} does not match Kraus input dimension {K.shape[2]}")
    U = sla.expm(1j * phi0 * G)
    ch = Channel(K @ U, 1j * K @ (G @ U), phi0)
    return require_valid(ch, tol)


def canonicalize(ch: Channel, tol: Tolerances = TOL) -> Channel:
    """Orthogonal Kraus representation, dropping directions with Gram eigenvalue < ``tol.li``.

    The mixing is a constant unitary, so the channel and its derivative are unchanged.
    """
    w, W = np.linalg.eigh(gram(ch.kraus))
    keep = w > tol.li
    W = W[:, keep][:, ::-1]
    K = np.einsum("ia,ixy->axy", W, ch.kraus)
    Kd = np.einsum("ia,ixy->axy", W, ch.kraus_dot)
    return Channel(K, Kd, ch.phi0)


def mix_kraus(ch: Channel, u: np.ndarray) -> Channel:
    """Equivalent Kraus family ``K'_i = sum_j u_ij K_j`` for a constant unitary ``u``."""
    return Channel(np.einsum("ij,jxy->ixy", u, ch.kraus), np.einsum("ij,jxy->ixy", u, ch.kraus_dot), ch.phi0)


# ---------------------------------------------------------------------------
# Choi representation
# ---------------------------------------------------------------------------


def choi(ch: Channel, tol: Tolerances = TOL) -> ChoiPair:
    """``P = sum_i |K_i><K_i|`` and ``D = sum_i |dK_i><K_i| + |K_i><dK_i|``."""
    require_valid(ch, tol)
    V = ch.kraus.reshape(ch.k, -1)
    Vd = ch.kraus_dot.reshape(ch.k, -1)
    P = V.T @ V.conj()
    C = Vd.T @ V.conj()
    return ChoiPair(P, C + dagger(C), ch.d_in, ch.d_out)


def apply_choi(P: np.ndarray, rho: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    """Action of the map with Choi matrix ``P``: ``Tr_in[P (1 x rho^T)]``."""
    P4 = np.asarray(P).reshape(d_out, d_in, d_out, d_in)
    return np.einsum("aibj,ij->ab", P4, np.asarray(rho))


def partial_trace_out(P: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    """Trace over the output factor; equals the identity for trace-preserving maps."""
    return np.einsum("aiaj->ij", np.asarray(P).reshape(d_out, d_in, d_out, d_in))


# ---------------------------------------------------------------------------
# application to states
# ---------------------------------------------------------------------------


def apply(ch: Channel, rho) -> np.ndarray:
    """``sum_i K_i rho K_i^dag``."""
    rho = _as_matrix(rho)
    if rho.shape != (ch.d_in, ch.d_in):
        raise ValueError(f"state dimension {rho.shape[0]} does not match channel input {ch.d_in}")
    return np.einsum("kab,bc,kdc->ad", ch.kraus, rho, ch.kraus.conj())


def _local(X: np.ndarray, dims: list[int], site: int, lefts: np.ndarray, rights: np.ndarray) -> np.ndarray:
    """``sum_i L_i X R_i^dag`` with ``L_i, R_i`` acting on tensor factor ``site``.

    ``X`` is reshaped to ``dims + dims``; the returned tensor has the factor at
    ``site`` replaced by the row dimension of ``L_i``.
    """
    n = len(dims)
    T = X.reshape(dims + dims)
    # contract rows with L, columns with conj(R); sum over Kraus index
    T = np.tensordot(lefts, T, axes=([2], [site]))  # (k, a, ...rest)
    T = np.moveaxis(T, 1, site + 1)  # (k, dims' ..., dims...)
    T = np.tensordot(T, rights.conj(), axes=([0, n + 1 + site], [0, 2]))  # (..., b)
    T = np.moveaxis(T, -1, n + site)
    d = int(np.prod(T.shape[:n]))
    return T.reshape(d, d)


def check_budget(dim: int) -> None:
    budget = tensor_budget()
    if dim * dim > budget:
        raise BudgetExceeded(f"operator of dimension {dim} needs {dim * dim} complex entries; budget is {budget}")


def tensor_apply(ch: Channel, n: int, rho, want_derivative: bool = True):
    """Apply ``Lambda^{(x)n}`` to an n-probe state.

    Returns ``(rho_out, drho_out)``; ``drho_out`` is the phi-derivative of the
    output (product rule over the probes) or ``None``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rho = _as_matrix(rho)
    if rho.shape != (ch.d_in**n, ch.d_in**n):
        raise ValueError(f"state dimension {rho.shape[0]} != d_in**n = {ch.d_in ** n}")
    check_budget(max(ch.d_out, ch.d_in) ** n)
    K, Kd = ch.kraus, ch.kraus_dot
    dims = [ch.d_in] * n
    out, dout = rho, None
    for site in range(n):
        new = _local(out, dims, site, K, K)
        if want_derivative:
            dnew = _local(out, dims, site, Kd, K) + _local(out, dims, site, K, Kd)
            if dout is not None:
                dnew = dnew + _local(dout, dims, site, K, K)
            dout = dnew
        out = new
        dims[site] = ch.d_out
    return out, dout


def tensor_adjoint(ch: Channel, n: int, X: np.ndarray):
    """Heisenberg-picture maps: ``(Lambda^{(x)n})^dag[X]`` and the adjoint of its phi-derivative."""
    K = dagger(ch.kraus)
    Kd = dagger(ch.kraus_dot)
    dims = [ch.d_out] * n
    A, B = np.asarray(X, dtype=complex), None
    for site in range(n):
        newA = _local(A, dims, site, K, K)
        newB = _local(A, dims, site, Kd, K) + _local(A, dims, site, K, Kd)
        if B is not None:
            newB = newB + _local(B, dims, site, K, K)
        A, B = newA, newB
        dims[site] = ch.d_in
    return A, B


# ---------------------------------------------------------------------------
# random instances
# ---------------------------------------------------------------------------


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix."""
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_kraus(d_in: int, d_out: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Kraus operators of a random channel from a random Stinespring isometry."""
    if k * d_out < d_in:
        raise ValueError("need k * d_out >= d_in for an isometry")
    Z = rng.standard_normal((k * d_out, d_in)) + 1j * rng.standard_normal((k * d_out, d_in))
    V, _ = np.linalg.qr(Z)
    return V.reshape(k, d_out, d_in)


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (Z + Z.conj().T) / 2


def random_state(d: int, rng: np.random.Generator) -> np.ndarray:
    """Random full-rank density matrix (Ginibre ensemble)."""
    Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = Z @ Z.conj().T
    return rho / np.trace(rho).real


# ---------------------------------------------------------------------------
# JSON documents
# ---------------------------------------------------------------------------


def matrix_to_json(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"re": a.real.tolist(), "im": a.imag.tolist()}


def matrix_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict) or "re" not in obj:
        raise ChannelFormatError("matrix must be an object with 're' and optional 'im' arrays")
    try:
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj.get("im", np.zeros_like(re)), dtype=float)
    except (TypeError, ValueError) as exc:
        raise ChannelFormatError(f"matrix entries must be numbers: {exc}") from exc
    if re.ndim != 2 or re.shape != im.shape:
        raise ChannelFormatError(f"matrix parts must be 2-D arrays of equal shape, got {re.shape} and {im.shape}")
    return re + 1j * im


def channel_from_dict(doc: dict, tol: Tolerances = TOL) -> Channel:
    """Build a channel from the JSON schema.

    Exactly one of ``generator`` (phase-encoding generator; derivatives are
    derived) or ``kraus_dot`` must be given.  Completeness is not enforced
    here so that invalid documents can still be reported by :func:`validate`.
    """
    if not isinstance(doc, dict):
        raise ChannelFormatError("channel document must be a JSON object")
    if "kraus" not in doc or not isinstance(doc["kraus"], list) or not doc["kraus"]:
        raise ChannelFormatError("missing non-empty 'kraus' list")
    has_gen, has_dot = "generator" in doc, "kraus_dot" in doc
    if has_gen == has_dot:
        raise ChannelFormatError("exactly one of 'generator' or 'kraus_dot' is required")
    K = np.array([matrix_from_json(m) for m in doc["kraus"]])
    if K.ndim != 3:
        raise ChannelFormatError("Kraus operators must share one shape")
    phi0 = float(doc.get("phi0", 0.0))
    for key, val in (("d_in", K.shape[2]), ("d_out", K.shape[1])):
        if key in doc and int(doc[key]) != val:
            raise ChannelFormatError(f"{key}={doc[key]} disagrees with Kraus shape {K.shape[1:]}")
    if has_gen:
        G = matrix_from_json(doc["generator"])
        if G.shape != (K.shape[2], K.shape[2]) or not is_hermitian(G):
            raise ChannelFormatError("generator must be Hermitian with the input dimension")
        U = sla.expm(1j * phi0 * G)
        return Channel(K @ U, 1j * K @ (G @ U), phi0)
    Kd = np.array([matrix_from_json(m) for m in doc["kraus_dot"]])
    if Kd.shape != K.shape:
        raise ChannelFormatError("kraus_dot must match kraus in count and shape")
    return Channel(K, Kd, phi0)


def channel_to_dict(ch: Channel) -> dict:
    return {
        "d_in": ch.d_in,
        "d_out": ch.d_out,
        "phi0": ch.phi0,
        "kraus": [matrix_to_json(K) for K in ch.kraus],
        "kraus_dot": [matrix_to_json(K) for K in ch.kraus_dot],
    }


def load_channel(path) -> Channel:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ChannelFormatError(f"invalid JSON: {exc}") from exc
    return channel_from_dict(doc)
