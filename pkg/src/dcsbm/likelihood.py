"""Joint likelihood, maximum-likelihood estimates and profile label search."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, xlogy

from .core import Labels, ModelParams, Network, batch_stats, compute_stats
from .sampler import make_rng

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**7
CHUNK = 2**14
TIE_TOL = 1e-9


class BudgetExceeded(RuntimeError):
    """Exhaustive enumeration over ``k**n`` labellings would exceed the budget."""


def log_c(x: Network) -> float:
    """Log of the normaliser ``prod_{i<j} x_ij! * prod_i 2**(x_ii/2) (x_ii/2)!``."""
    counts = x.counts
    iu = np.triu_indices(x.n, 1)
    half = np.diag(counts) / 2.0
    return float(
        gammaln(counts[iu] + 1.0).sum() + (half * math.log(2.0) + gammaln(half + 1.0)).sum()
    )


def log_joint(x: Network, z: Labels, params: ModelParams) -> float:
    """``log p(z | pi) + log p(x | z, w, lambda)`` at the given parameters.

    Zero rates are allowed on blocks without edges (they contribute 0);
    a zero rate or zero weight facing a positive count, or ``pi_a = 0``
    on an occupied block, gives ``-inf``.
    """
    if params.weights is None:
        raise ValueError("log_joint needs node weights")
    lam = params.rates
    if np.any(lam < 0) or np.any(params.weights < 0) or np.any(params.pi < 0):
        raise ValueError("rates, weights and pi must be nonnegative")
    s = compute_stats(x, z)
    iu = np.triu_indices(z.k)
    o, n_pairs, rate = s.o[iu], s.n_pairs[iu], lam[iu]
    terms = (
        xlogy(s.n_a, params.pi).sum()
        - log_c(x)
        + xlogy(s.degrees, params.weights).sum()
        + (xlogy(o, rate) - n_pairs * rate).sum()
    )
    return float(terms) if not np.isnan(terms) else -math.inf


def mle_params(x: Network, z: Labels) -> ModelParams:
    """Closed-form maximisers of the joint likelihood for a fixed labelling.

    ``pi_a = n_a / n``, ``lambda_ab = o_ab / n_ab`` (0 on empty blocks) and
    ``w_i = n_a d_i / d_a`` (1 on blocks with no edges).
    """
    s = compute_stats(x, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.where(s.n_pairs > 0, s.o / np.where(s.n_pairs > 0, s.n_pairs, 1), 0.0)
        dt = s.block_degrees[z.z]
        w = np.where(dt > 0, s.n_a[z.z] * s.degrees / np.where(dt > 0, dt, 1), 1.0)
    return ModelParams(pi=s.n_a / z.n, lambda_tilde=lam, rho=1.0, weights=w)


def log_network_term(x: Network) -> float:
    """``L(x) = -log c(x) - (total edges) + sum_i d_i log d_i``.

    The edge total is ``sum_{a<=b} o_ab = sum_{ij} x_ij / 2``; this is the
    value that makes the profile sup equal the joint at the MLE.
    """
    d = x.degrees
    return -log_c(x) - x.counts.sum() / 2.0 + float(xlogy(d, d).sum())


def _profile_core(n_a, o_tilde, block_deg, n):
    """Label-dependent part of the profile sup; broadcasts over leading axes."""
    n_a = np.asarray(n_a, dtype=float)
    nn = n_a[..., :, None] * n_a[..., None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        pi_term = xlogy(n_a, n_a / n).sum(axis=-1)
        lam_term = 0.5 * (xlogy(o_tilde, o_tilde) - xlogy(o_tilde, nn)).sum(axis=(-2, -1))
        w_term = (xlogy(block_deg, n_a) - xlogy(block_deg, block_deg)).sum(axis=-1)
    return pi_term + lam_term + w_term


def log_profile_sup(x: Network, z: Labels, k: int | None = None) -> float:
    """``log sup_theta p(x, z | theta)`` with ``0 log 0 = 0``."""
    if k is not None and k != z.k:
        z = Labels(z.z, k)
    s = compute_stats(x, z)
    core = _profile_core(s.n_a, s.o_tilde.astype(float), s.block_degrees.astype(float), z.n)
    return log_network_term(x) + float(core)


def log_profile_sup_batch(x: Network, labels: np.ndarray, k: int) -> np.ndarray:
    n_a, o_tilde, block_deg = batch_stats(x, labels, k)
    return log_network_term(x) + _profile_core(n_a, o_tilde, block_deg, x.n)


def log_hat_factors(x: Network, z: Labels):
    """``(log A_hat, log B_hat, log C_hat)``: the sup-likelihood split with ``c(x)`` removed.

    ``log A_hat + log B_hat + log C_hat - log c(x) == log_profile_sup``.
    """
    s = compute_stats(x, z)
    iu = np.triu_indices(z.k)
    o, n_pairs = s.o[iu].astype(float), s.n_pairs[iu]
    with np.errstate(divide="ignore", invalid="ignore"):
        log_a = float((xlogy(o, o) - xlogy(o, n_pairs) - o).sum())
        d = s.degrees.astype(float)
        dt = s.block_degrees[z.z].astype(float)
        log_b = float((xlogy(d, s.n_a[z.z]) + xlogy(d, d) - xlogy(d, dt)).sum())
        log_c_hat = float(xlogy(s.n_a, s.n_a / z.n).sum())
    return log_a, log_b, log_c_hat


def iter_label_chunks(n: int, k: int, chunk: int = CHUNK):
    """All of ``range(k)**n`` in lexicographic order, as ``(m, n)`` arrays."""
    total = k**n
    powers = k ** np.arange(n - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        yield (idx[:, None] // powers) % k


def check_budget(n: int, k: int, budget: int) -> None:
    if k**n > budget:
        raise BudgetExceeded(
            f"exhaustive search over {k}**{n} labellings exceeds budget {budget}"
        )


@dataclass
class ProfileResult:
    z_hat: Labels
    log_sup: float
    exhaustive: bool
    restarts: int = 1
    steps: int = 0
    candidates: list = field(default_factory=list)


def _exhaustive(x: Network, k: int, budget: int) -> ProfileResult:
    check_budget(x.n, k, budget)
    best, best_z = -math.inf, None
    evaluated = 0
    for labels in iter_label_chunks(x.n, k):
        vals = log_profile_sup_batch(x, labels, k)
        evaluated += len(vals)
        i = int(np.argmax(vals))
        if vals[i] > best + TIE_TOL:
            # earliest index within tolerance of the chunk max keeps the lexicographic tie-break
            j = int(np.flatnonzero(vals >= vals[i] - TIE_TOL)[0])
            best, best_z = float(vals[i]), labels[j].copy()
        elif vals[i] > best:
            best = float(vals[i])
    z_hat = Labels(best_z, k)
    return ProfileResult(z_hat, best, True, restarts=1, steps=evaluated, candidates=[z_hat])


class _MoveState:
    """Incremental block counters for single-node label moves."""

    def __init__(self, x: Network, z: np.ndarray, k: int):
        self.x = x.counts.astype(float)
        self.k = k
        self.z = z.copy()
        y = np.eye(k)[z]
        self.node_block = self.x @ y  # edges from node i into each block
        self.o_tilde = y.T @ self.node_block
        self.n_a = y.sum(axis=0)
        self.diag = np.diag(self.x)

    def value(self):
        return float(_profile_core(self.n_a, self.o_tilde, self.o_tilde.sum(axis=1), len(self.z)))

    def candidates(self, i: int):
        """Profile core after moving node ``i`` to each label, shape ``(k,)``."""
        k, a = self.k, self.z[i]
        delta = np.eye(k)
        delta[:, a] -= 1.0  # row b is e_b - e_a
        r = self.node_block[i]
        o_new = (
            self.o_tilde[None]
            + delta[:, :, None] * r[None, None, :]
            + r[None, :, None] * delta[:, None, :]
            + self.diag[i] * delta[:, :, None] * delta[:, None, :]
        )
        n_new = self.n_a[None] + delta
        return _profile_core(n_new, o_new, o_new.sum(axis=2), len(self.z))

    def move(self, i: int, b: int):
        a = self.z[i]
        col = self.x[:, i]
        r = self.node_block[i].copy()
        d = np.zeros(self.k)
        d[b] += 1.0
        d[a] -= 1.0
        self.o_tilde += np.outer(d, r) + np.outer(r, d) + self.diag[i] * np.outer(d, d)
        self.n_a += d
        self.node_block[:, a] -= col
        self.node_block[:, b] += col
        self.z[i] = b


def _degree_sorted_init(x: Network, k: int) -> np.ndarray:
    order = np.argsort(-x.degrees, kind="stable")
    z = np.empty(x.n, dtype=np.int64)
    z[order] = np.arange(x.n) * k // x.n
    return z


def _ascend(x, z0, k, rng, max_sweeps, tol=1e-10):
    state = _MoveState(x, z0, k)
    current = state.value()
    steps = 0
    for _ in range(max_sweeps):
        moved = False
        for i in rng.permutation(x.n):
            vals = state.candidates(i)
            b = int(np.argmax(vals))
            if b != state.z[i] and vals[b] > current + tol:
                state.move(i, b)
                current = float(vals[b])
                steps += 1
                moved = True
        if not moved:
            break
    # recompute from scratch to shed accumulated rounding
    return state.z, state.value(), steps


def search_profile_labels(
    x: Network,
    k: int,
    strategy: str = "exhaustive",
    *,
    restarts: int = 10,
    max_sweeps: int = 100,
    rng=None,
    budget: int = DEFAULT_BUDGET,
) -> ProfileResult:
    """Find the labelling maximising ``log_profile_sup``.

    ``strategy="exhaustive"`` enumerates all ``k**n`` labellings (ties go to
    the lexicographically smallest). ``strategy="greedy"`` runs single-node
    best-label moves from one degree-sorted start plus ``restarts - 1``
    uniform random starts and keeps the best; the result is flagged
    non-exhaustive.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        z = Labels(np.zeros(x.n, dtype=np.int64), 1)
        return ProfileResult(z, log_profile_sup(x, z), True, candidates=[z])
    if strategy == "exhaustive":
        return _exhaustive(x, k, budget)
    if strategy != "greedy":
        raise ValueError(f"unknown strategy {strategy!r}")

    rng = make_rng(rng)
    base = log_network_term(x)
    best_val, best_z, total_steps, candidates = -math.inf, None, 0, []
    for r in range(max(1, restarts)):
        z0 = _degree_sorted_init(x, k) if r == 0 else rng.integers(0, k, size=x.n)
        z, val, steps = _ascend(x, z0, k, rng, max_sweeps)
        total_steps += steps
        candidates.append(Labels(z, k))
        if val > best_val:
            best_val, best_z = val, z
    log.debug("greedy k=%d: best %.6f after %d moves", k, base + best_val, total_steps)
    return ProfileResult(
        Labels(best_z, k), base + best_val, False,
        restarts=max(1, restarts), steps=total_steps, candidates=candidates,
    )
