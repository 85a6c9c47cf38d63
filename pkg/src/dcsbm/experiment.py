"""Monte Carlo harness: selection accuracy of ``k_hat`` as ``n`` grows."""
from __future__ import annotations

import csv
import io
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import ModelParams
from .likelihood import DEFAULT_BUDGET
from .sampler import make_rng, sample_labels, sample_network, sample_weights, split_seed
from .selection import select_k

log = logging.getLogger(__name__)


@dataclass
class ExperimentConfig:
    """Planted-partition experiment.

    ``rho_rule`` is ``{"fixed": value}`` (dense) or ``{"semisparse": C}``,
    giving ``rho = C log(n) / n``. ``weights`` is ``"ones"`` (homogeneous
    SBM) or ``"dirichlet"`` (``n_a * Dirichlet(1/2)`` within each block).
    """

    k0: int
    pi: list
    lambda_tilde: list
    n_grid: list
    trials: int = 50
    rho_rule: dict = field(default_factory=lambda: {"fixed": 1.0})
    backend: str = "bracket"
    k_max: int = 3
    seed: int = 0
    output: str | None = None
    weights: str = "ones"
    restarts: int = 10
    max_sweeps: int = 100
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if not self.n_grid:
            raise ValueError("n_grid must be nonempty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if len(self.pi) != self.k0 or np.shape(self.lambda_tilde) != (self.k0, self.k0):
            raise ValueError("pi and lambda_tilde must match k0")
        if self.weights not in ("ones", "dirichlet"):
            raise ValueError(f"unknown weights mode {self.weights!r}")
        if len(self.rho_rule) != 1 or not set(self.rho_rule) <= {"fixed", "semisparse"}:
            raise ValueError("rho_rule must be {'fixed': v} or {'semisparse': C}")
        for n in self.n_grid:
            if not self.rho(n) > 0:
                raise ValueError(f"rho_rule gives rho <= 0 at n={n}")

    def rho(self, n: int) -> float:
        if "fixed" in self.rho_rule:
            return float(self.rho_rule["fixed"])
        return float(self.rho_rule["semisparse"]) * math.log(n) / n


@dataclass
class TrialRecord:
    n: int
    trial: int
    seed: int
    k0: int
    k_hat: int
    scores: list
    runtime_ms: float | None = None

    @property
    def correct(self) -> bool:
        return self.k_hat == self.k0


def _run_trial(cfg: ExperimentConfig, n: int, trial: int) -> TrialRecord:
    seed = split_seed(cfg.seed, n, trial)
    rng = make_rng(seed)
    t0 = time.perf_counter()
    z = sample_labels(cfg.pi, n, rng)
    w = sample_weights(z, rng) if cfg.weights == "dirichlet" else np.ones(n)
    params = ModelParams(pi=cfg.pi, lambda_tilde=cfg.lambda_tilde, rho=cfg.rho(n), weights=w)
    x = sample_network(z, params, rng)
    k_max = min(cfg.k_max, n)
    report = select_k(
        x, k_max, cfg.backend, budget=cfg.budget, restarts=cfg.restarts,
        max_sweeps=cfg.max_sweeps, seed=split_seed(seed, 1),
    )
    elapsed = (time.perf_counter() - t0) * 1e3
    return TrialRecord(n, trial, seed, cfg.k0, report.k_hat,
                       [r.score for r in report.rows], elapsed)


def _run_trial_args(args):
    return _run_trial(*args)


def run_experiment(cfg: ExperimentConfig, workers: int = 1):
    """Run every ``(n, trial)`` pair; returns ``(records, summary)``.

    Each trial draws from its own substream of ``cfg.seed`` so results do
    not depend on ``workers``. ``summary`` maps ``n`` to accuracy.
    """
    if cfg.backend == "exact":
        worst = max(cfg.n_grid)
        if min(cfg.k_max, worst) ** worst > cfg.budget:
            raise ValueError(
                f"exact backend needs {cfg.k_max}**{worst} labellings (> budget {cfg.budget}); "
                "use backend='bracket' for this grid"
            )
    jobs = [(cfg, n, t) for n in cfg.n_grid for t in range(cfg.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_trial_args, jobs, chunksize=1))
    else:
        records = []
        for job in jobs:
            records.append(_run_trial(*job))
            log.info("n=%d trial=%d k_hat=%d", job[1], job[2], records[-1].k_hat)
    records.sort(key=lambda r: (r.n, r.trial))
    return records, summarize(records)


def summarize(records) -> dict:
    by_n = {}
    for r in records:
        by_n.setdefault(r.n, []).append(r.correct)
    return {n: sum(v) / len(v) for n, v in sorted(by_n.items())}


def records_to_csv(records, k_max: int, timing: bool = False) -> str:
    """CSV text; ``runtime_ms`` is left blank unless ``timing`` so output is reproducible."""
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["n", "trial", "seed", "k0", "k_hat", "correct", "runtime_ms"]
                 + [f"score_k{k}" for k in range(1, k_max + 1)])
    for r in records:
        scores = [repr(float(s)) if s is not None else "" for s in r.scores]
        scores += [""] * (k_max - len(scores))
        runtime = f"{r.runtime_ms:.3f}" if timing and r.runtime_ms is not None else ""
        out.writerow([r.n, r.trial, r.seed, r.k0, r.k_hat, int(r.correct), runtime] + scores)
    return buf.getvalue()


def summary_to_csv(summary: dict) -> str:
    lines = ["n,accuracy"] + [f"{n},{acc!r}" for n, acc in summary.items()]
    return "\n".join(lines) + "\n"
