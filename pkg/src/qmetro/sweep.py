"""Precision-versus-N tables comparing the asymptotic bound with Heisenberg and shot-noise lines."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from ._config import BudgetExceeded
from .channel import Channel
from .extension import ce_sdp_bound
from .oracle import crlb, optimize_input

COLUMNS = ("N", "dphi_bound_ce", "dphi_heisenberg", "dphi_classical", "dphi_oracle")


def crossover(bound_const: float, n_max: int) -> int | None:
    """First N at which ``bound_const / sqrt(N)`` exceeds the Heisenberg line ``1 / N``."""
    for n in range(1, n_max + 1):
        if bound_const / math.sqrt(n) > 1.0 / n:
            return n
    return None


def enhancement_factor(bound_const: float, single_probe_qfi: float) -> float:
    """Ratio of the asymptotic bound to the independent-probe limit ``1/sqrt(N F_1)``."""
    return bound_const * math.sqrt(single_probe_qfi)


@dataclass
class SweepRow:
    n: int
    bound: float
    heisenberg: float
    classical: float
    oracle: float | None = None

    def cells(self) -> list[str]:
        vals = [self.bound, self.heisenberg, self.classical, self.oracle]
        return [str(self.n)] + ["" if v is None else f"{v:.12g}" for v in vals]


def sweep(ch: Channel, n_max: int, oracle_max: int = 0, restarts: int = 8, seed: int = 0,
          workers: int = 4) -> tuple[list[SweepRow], list[str]]:
    """Rows for N = 1..n_max plus notices (skipped oracle points etc.).

    The bound column is ``nan`` when no standard-scaling bound is certified.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    ce = ce_sdp_bound(ch)
    const = ce.bound_const if ce.feasible else math.nan
    f1 = optimize_input(ch, 1, restarts=restarts, seed=seed).best_qfi
    notices = []
    if not ce.feasible:
        notices.append("no standard-scaling bound certified (beta=0 infeasible); bound column is nan")

    def oracle_point(n):
        try:
            return optimize_input(ch, n, restarts=restarts, seed=seed).best_qfi
        except BudgetExceeded as exc:
            notices.append(f"oracle skipped for N={n}: {exc}")
            return None

    ns = list(range(1, min(oracle_max, n_max) + 1))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        oracle = dict(zip(ns, pool.map(oracle_point, ns)))
    rows = []
    for n in range(1, n_max + 1):
        f = oracle.get(n)
        rows.append(SweepRow(n, const / math.sqrt(n), 1.0 / n, crlb(n * f1),
                             None if f is None else crlb(f)))
    return rows, notices
