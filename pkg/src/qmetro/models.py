"""The four single-probe decoherence models with their closed-form bound constants.

Each model is a phi-independent noise map applied after the phase rotation
``exp(i sigma_z phi / 2)``.  ``eta`` is the Bloch radius (depolarizing), the
dephasing parameter, the excited-state survival probability (spontaneous
emission) or the power transmission of each arm (lossy interferometer).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._config import TOL, Tolerances
from .channel import I2, SX, SY, SZ, Channel, canonicalize, phase_encode

MODELS = ("depolarizing", "dephasing", "spontaneous_emission", "lossy_interferometer")


@dataclass(frozen=True)
class ModelSpec:
    name: str
    eta: float
    generator: np.ndarray | None = None  # defaults to sigma_z / 2
    unitary_limit: bool = False

    def __post_init__(self):
        if self.name not in MODELS:
            raise ValueError(f"unknown model {self.name!r}; expected one of {', '.join(MODELS)}")
        eta = float(self.eta)
        if eta == 1.0 and not self.unitary_limit:
            raise ValueError("eta = 1 is the noiseless limit; pass unitary_limit=True to allow it")
        if not 0.0 <= eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1), got {eta}")
        object.__setattr__(self, "eta", eta)

    @property
    def gen(self) -> np.ndarray:
        return SZ / 2 if self.generator is None else np.asarray(self.generator, dtype=complex)


def kraus_operators(name: str, eta: float) -> np.ndarray:
    """Noise Kraus operators in a fixed order that reference_h relies on (may contain zeros at eta = 1)."""
    if name == "depolarizing":
        return np.array([math.sqrt((1 + 3 * eta) / 4) * I2] + [math.sqrt((1 - eta) / 4) * s for s in (SX, SY, SZ)])
    if name == "dephasing":
        return np.array([math.sqrt((1 + eta) / 2) * I2, math.sqrt((1 - eta) / 2) * SZ])
    if name == "spontaneous_emission":
        return np.array([[[1, 0], [0, math.sqrt(eta)]], [[0, math.sqrt(1 - eta)], [0, 0]]], dtype=complex)
    if name == "lossy_interferometer":
        a, b = math.sqrt(1 - eta), math.sqrt(eta)
        return np.array([
            [[0, 0], [0, 0], [0, a]],
            [[0, 0], [0, 0], [a, 0]],
            [[b, 0], [0, b], [0, 0]],
        ], dtype=complex)
    raise ValueError(f"unknown model {name!r}")


def build(spec: ModelSpec, phi0: float = 0.0, tol: Tolerances = TOL) -> Channel:
    """Phase-encoded channel for ``spec`` at ``phi0``.

    In the unitary limit the vanishing Kraus operators are dropped so that the
    result is still a linearly independent Kraus family.
    """
    K = kraus_operators(spec.name, spec.eta)
    G = spec.gen
    if spec.unitary_limit and spec.eta == 1.0:
        keep = [np.linalg.norm(k) > 0 for k in K]
        K = K[keep]
        return canonicalize(phase_encode(K, G, phi0, tol), tol)
    return phase_encode(K, G, phi0, tol)


def reference_bound(spec: ModelSpec, method: str) -> float | None:
    """Closed-form constant ``c`` of ``delta_phi_N >= c / sqrt(N)``.

    ``None`` means the method does not apply; ``math.inf`` means the bound
    diverges (eta = 0 for depolarizing or dephasing).
    """
    if method not in ("cs", "ce"):
        raise ValueError("method must be 'cs' or 'ce'")
    eta, name = spec.eta, spec.name
    if spec.generator is not None:
        raise ValueError("closed forms assume the default generator sigma_z/2")
    if eta == 1.0:
        return 0.0 if method == "ce" or name in ("depolarizing", "dephasing") else None
    if method == "cs" and name in ("spontaneous_emission", "lossy_interferometer"):
        return None
    if eta == 0.0:
        return math.inf
    if name == "depolarizing":
        if method == "cs":
            return math.sqrt((1 - eta) * (1 + 3 * eta) / (4 * eta**2))
        return math.sqrt((1 + eta - 2 * eta**2) / (2 * eta**2))
    if name == "dephasing":
        return math.sqrt(1 - eta**2) / eta
    if name == "spontaneous_emission":
        return 0.5 * math.sqrt((1 - eta) / eta)
    return math.sqrt((1 - eta) / eta)


def reference_h(spec: ModelSpec) -> np.ndarray | None:
    """Optimal Kraus-rotation generator for the closed-form channel-extension bound.

    Indices follow :func:`kraus_operators`.  ``None`` for eta = 1.
    """
    eta = spec.eta
    if eta == 1.0:
        return None
    if spec.name == "depolarizing":
        c = 2 * (1 - eta) * (1 + 2 * eta)
        h = np.zeros((4, 4), complex)
        h[0, 3] = h[3, 0] = math.sqrt((1 - eta) * (1 + 3 * eta)) / c
        h[1, 2] = -1j * (1 + eta) / c
        h[2, 1] = 1j * (1 + eta) / c
        return h
    if spec.name == "dephasing":
        return SX / (2 * math.sqrt(1 - eta**2))
    if spec.name == "spontaneous_emission":
        return (SZ - eta * I2) / (2 * (1 - eta))
    h = np.zeros((3, 3), complex)
    # K_0 removes the photon from the second arm, hence the negative entry first
    h[0, 0] = -1 / (2 * (1 - eta))
    h[1, 1] = 1 / (2 * (1 - eta))
    return h
