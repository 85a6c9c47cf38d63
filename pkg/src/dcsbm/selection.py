"""Penalised marginal likelihood estimate of the number of communities."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .core import Network
from .likelihood import DEFAULT_BUDGET, BudgetExceeded, search_profile_labels
from .marginal import EvidenceResult, log_marginal_bracket, log_marginal_exact
from .sampler import make_rng, split_seed

log = logging.getLogger(__name__)

TIE_TOL = 1e-9


def penalty(k: int, n: int) -> float:
    """``(k**3 + 3 k n) log(n + 1)``."""
    if k < 1 or n < 1:
        raise ValueError("penalty needs k >= 1 and n >= 1")
    return (k**3 + 3 * k * n) * math.log(n + 1)


@dataclass
class ScoreRow:
    k: int
    log_p: float | None
    lower: float | None
    upper: float | None
    penalty: float
    score: float | None
    feasible: bool = True
    rigorous_upper: bool = True


@dataclass
class SelectionReport:
    n: int
    backend: str
    rows: list[ScoreRow]
    k_hat: int
    ties: list[int] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def scores(self) -> dict[int, float]:
        return {r.k: r.score for r in self.rows if r.feasible}


def _argmax_smallest(scores: dict[int, float], tol: float = TIE_TOL):
    best = max(scores.values())
    tied = sorted(k for k, s in scores.items() if s >= best - tol)
    return tied[0], tied


def select_k(
    x: Network,
    k_max: int | None = None,
    backend: str = "exact",
    *,
    budget: int = DEFAULT_BUDGET,
    allow_partial: bool = False,
    strategy: str = "greedy",
    restarts: int = 10,
    max_sweeps: int = 100,
    seed: int = 0,
) -> SelectionReport:
    """``argmax_k log p_k(x) - penalty(k, n)`` over ``1 <= k <= k_max``.

    With ``backend="bracket"`` the score is the bracket's lower end; the
    search for each ``k`` uses its own RNG substream of ``seed``. Ties
    (within 1e-9) resolve to the smallest ``k``.
    """
    n = x.n
    k_max = n if k_max is None else k_max
    if not 1 <= k_max <= n:
        raise ValueError(f"k_max must lie in [1, {n}], got {k_max}")
    if backend not in ("exact", "bracket"):
        raise ValueError(f"unknown backend {backend!r}")

    rows = []
    for k in range(1, k_max + 1):
        pen = penalty(k, n)
        if backend == "exact":
            try:
                ev = log_marginal_exact(x, k, budget=budget)
            except BudgetExceeded:
                if not allow_partial:
                    raise
                log.warning("k=%d infeasible for exact backend (k**n > %d)", k, budget)
                rows.append(ScoreRow(k, None, None, None, pen, None, feasible=False))
                continue
        else:
            res = search_profile_labels(
                x, k, strategy, restarts=restarts, max_sweeps=max_sweeps,
                rng=make_rng(split_seed(seed, k)), budget=budget,
            )
            ev = log_marginal_bracket(x, k, res)
        rows.append(_row(ev, pen))

    scores = {r.k: r.score for r in rows if r.feasible}
    if not scores:
        raise BudgetExceeded("no k is feasible for the exact backend")
    k_hat, ties = _argmax_smallest(scores)
    report = SelectionReport(n=n, backend=backend, rows=rows, k_hat=k_hat, ties=ties)
    if backend == "bracket":
        win = rows[k_hat - 1]
        for r in rows:
            if r.k != k_hat and r.upper - r.penalty >= win.lower - win.penalty:
                report.warnings.append(
                    f"bracket for k={r.k} overlaps the winner k={k_hat}"
                )
    return report


def _row(ev: EvidenceResult, pen: float) -> ScoreRow:
    return ScoreRow(
        k=ev.k, log_p=ev.log_p, lower=ev.lower, upper=ev.upper, penalty=pen,
        score=ev.score - pen, rigorous_upper=ev.rigorous_upper,
    )
