"""Numerical tolerances and resource limits shared by all modules."""
from __future__ import annotations

import os
from dataclasses import dataclass

DEFAULT_BUDGET = 2**26


@dataclass(frozen=True)
class Tolerances:
    tp: float = 1e-10  # completeness / trace preservation
    psd: float = 1e-9  # PSD margin and kernel threshold
    li: float = 1e-10  # Kraus linear independence
    herm: float = 1e-12  # relative Hermiticity
    mu: float = 1e-8  # relative residual of the mu system
    beta: float = 1e-9
    res: float = 1e-8  # relative residual of the beta=0 system


TOL = Tolerances()


def tensor_budget() -> int:
    """Maximum number of complex entries of an N-probe operator.

    ``QMB_BUDGET`` in the environment overrides the default of 2**26.
    """
    raw = os.environ.get("QMB_BUDGET")
    if raw:
        return int(float(raw))
    return DEFAULT_BUDGET


class BudgetExceeded(RuntimeError):
    """Raised when an N-fold tensor object would not fit the memory budget."""


class ChannelValidationError(ValueError):
    """A Kraus family violates completeness, derivative consistency or independence."""


class NotApplicable(ValueError):
    """A method cannot be applied to the given channel (e.g. CS on a phi-extremal one)."""
