"""Numerical checks of the inequalities and limit objects behind consistency.

Every check returns a :class:`CheckResult` whose ``margin`` is the bound
minus the attained value, in log scale where the bound is multiplicative.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp, xlogy

from .core import Labels, ModelParams, Network, compute_stats, omega_membership
from .likelihood import (
    DEFAULT_BUDGET,
    check_budget,
    iter_label_chunks,
    log_c,
    log_hat_factors,
    log_profile_sup_batch,
)
from .marginal import LOG_GAMMA_HALF, log_ABC, log_abc_batch

MARGIN_TOL = 1e-9


@dataclass
class CheckResult:
    name: str
    margin: float
    value: float | None = None
    witness: object = None

    @property
    def holds(self) -> bool:
        return self.margin >= -MARGIN_TOL


def check_gamma_partition(m_parts) -> CheckResult:
    """``prod (m_j/m)**m_j / prod Gamma(m_j + 1/2) <= 1 / (Gamma(m + 1/2) Gamma(1/2)**(J-1))``."""
    parts = np.asarray(m_parts, dtype=float)
    if parts.ndim != 1 or parts.size == 0 or np.any(parts < 0):
        raise ValueError("parts must be a nonempty vector of nonnegative integers")
    m = parts.sum()
    if m < 1:
        raise ValueError("parts must sum to at least 1")
    J = parts.size
    log_lhs = float(xlogy(parts, parts / m).sum() - gammaln(parts + 0.5).sum())
    log_rhs = float(-gammaln(m + 0.5) - (J - 1) * LOG_GAMMA_HALF)
    res = CheckResult("gamma_partition", log_rhs - log_lhs, value=log_lhs)
    if not res.holds:
        res.witness = parts.astype(int).tolist()
    return res


def log_gamma_ratio(m: float, J: int) -> float:
    """``log[Gamma(1/2) Gamma(m + J/2) / (Gamma(J/2) Gamma(m + 1/2))]``."""
    return float(LOG_GAMMA_HALF + gammaln(m + J / 2) - gammaln(J / 2) - gammaln(m + 0.5))


def check_gamma_ratio(m: int, J: int) -> CheckResult:
    """``Gamma(1/2) Gamma(m + J/2) / (Gamma(J/2) Gamma(m + 1/2)) <= m**J`` for ``m >= max(J, 3)``."""
    if J < 1 or m < max(J, 3):
        raise ValueError(f"need J >= 1 and m >= max(J, 3); got m={m}, J={J}")
    value = log_gamma_ratio(m, J)
    res = CheckResult("gamma_ratio", J * math.log(m) - value, value=value)
    if not res.holds:
        res.witness = (m, J)
    return res


def ratio_logs(x: Network, z: Labels):
    """``(log A_hat/A, log B_hat/B, log C_hat/C)`` for one labelling."""
    a_hat, b_hat, c_hat = log_hat_factors(x, z)
    a, b, c = log_ABC(x, z)
    return a_hat - a, b_hat - b, c_hat - c


def check_ratio_bounds(x: Network, z: Labels, k: int | None = None):
    """Upper bounds on the sup-to-average ratios of the three factors.

    ``A_hat/A <= (n+1)**(k(k+1))``, ``B_hat/B <= (n**2 log n)**n`` and
    ``C_hat/C <= n**k``; the first two need ``x`` in Omega_n.
    """
    k = z.k if k is None else k
    if k != z.k:
        z = Labels(z.z, k)
    n = x.n
    if n < 3:
        raise ValueError("ratio bounds need n >= 3")
    if not omega_membership(x):
        raise ValueError("network is not in Omega_n (some x_ij > log n)")
    ra, rb, rc = ratio_logs(x, z)
    bounds = (
        k * (k + 1) * math.log(n + 1),
        n * (2 * math.log(n) + math.log(math.log(n))),
        k * math.log(n),
    )
    out = []
    for name, bound, r in zip(("ratio_A", "ratio_B", "ratio_C"), bounds, (ra, rb, rc)):
        res = CheckResult(name, bound - r, value=r)
        if not res.holds:
            res.witness = (x.counts.tolist(), z.z.tolist())
        out.append(res)
    return tuple(out)


def evidence_gap(x: Network, k: int, budget: int = DEFAULT_BUDGET):
    """``logsumexp_z log(A_hat B_hat C_hat) - logsumexp_z log(A B C)`` and its bound.

    The bound is ``k(k+2) log(n+1) + 3 n log n``; the gap is nonnegative
    because every sup term dominates its prior average.
    """
    check_budget(x.n, k, budget)
    lc = log_c(x)
    hat, avg = [], []
    for labels in iter_label_chunks(x.n, k):
        hat.append(logsumexp(log_profile_sup_batch(x, labels, k) + lc))
        a, b, c = log_abc_batch(x, labels, k)
        avg.append(logsumexp(a + b + c))
    gap = float(logsumexp(hat) - logsumexp(avg))
    bound = k * (k + 2) * math.log(x.n + 1) + 3 * x.n * math.log(x.n)
    return gap, bound


def check_evidence_gap(x: Network, k: int, budget: int = DEFAULT_BUDGET) -> CheckResult:
    """Both sides of ``0 <= gap <= bound``; margin is the tighter side."""
    gap, bound = evidence_gap(x, k, budget)
    res = CheckResult("evidence_gap", min(gap, bound - gap), value=gap)
    if not res.holds:
        res.witness = (x.counts.tolist(), k)
    return res


def q_matrix(z_bar: Labels, z0: Labels, w) -> np.ndarray:
    """Weighted confusion matrix ``Q[a, a'] = sum_i w_i [z_bar_i = a, z0_i = a'] / n``."""
    w = np.asarray(w, dtype=float)
    if not (z_bar.n == z0.n == w.size):
        raise ValueError("z_bar, z0 and w must have the same length")
    q = np.zeros((z_bar.k, z0.k))
    np.add.at(q, (z_bar.z, z0.z), w)
    return q / z_bar.n


def _phi(u):
    return xlogy(u, u)


def merging_functional(pi, lam) -> float:
    """``1/2 sum_ab pi_a pi_b [lam pi]_a [lam pi]_b phi(lam_ab / ([lam pi]_a [lam pi]_b))``.

    ``phi(u) = u log u`` with ``phi(0) = 0`` and ``0/0 = 0``.
    """
    pi = np.asarray(pi, dtype=float)
    lam = np.atleast_2d(np.asarray(lam, dtype=float))
    lp = lam @ pi
    outer = np.outer(lp, lp)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(outer > 0, lam / np.where(outer > 0, outer, 1.0), 0.0)
    return float(0.5 * (np.outer(pi, pi) * outer * _phi(u)).sum())


@dataclass(frozen=True)
class MergeMap:
    """Map ``h`` from ``k0`` original blocks onto ``k`` merged ones."""

    h: tuple
    k: int

    def __post_init__(self):
        h = tuple(int(v) for v in self.h)
        if any(v < 0 or v >= self.k for v in h):
            raise ValueError(f"merge map {h} leaves range(0, {self.k})")
        object.__setattr__(self, "h", h)

    @property
    def k0(self) -> int:
        return len(self.h)

    def matrix(self, pi) -> np.ndarray:
        """``R`` with ``R[h(a'), a'] = pi_a'`` and zeros elsewhere."""
        pi = np.asarray(pi, dtype=float)
        if pi.size != self.k0:
            raise ValueError("pi length does not match the merge map")
        R = np.zeros((self.k, self.k0))
        R[list(self.h), np.arange(self.k0)] = pi
        return R

    def then(self, other: "MergeMap") -> "MergeMap":
        """Composite map: apply ``self`` first, then ``other``."""
        return MergeMap(tuple(other.h[a] for a in self.h), other.k)


def merged_params(R, pi, lam):
    """Merged ``(pi*, lambda*)``: ``pi* = R 1`` and ``lambda*_ab = [R lam R^T]_ab / (pi*_a pi*_b)``.

    ``R`` may be a :class:`MergeMap`, in which case its matrix is built from ``pi``.
    Empty merged blocks get rate 0.
    """
    lam = np.atleast_2d(np.asarray(lam, dtype=float))
    if isinstance(R, MergeMap):
        R = R.matrix(pi)
    R = np.asarray(R, dtype=float)
    pi_star = R.sum(axis=1)
    num = R @ lam @ R.T
    den = np.outer(pi_star, pi_star)
    with np.errstate(divide="ignore", invalid="ignore"):
        lam_star = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    return pi_star, lam_star


def identifiability_gap(pi, lam, k: int) -> float:
    """``F(pi, lam) - max_h F(merged_params(h))`` over all ``h: range(k0) -> range(k)``."""
    pi = np.asarray(pi, dtype=float)
    k0 = pi.size
    if k >= k0:
        raise ValueError(f"need k < k0, got k={k}, k0={k0}")
    full = merging_functional(pi, lam)
    best = -math.inf
    for h in itertools.product(range(k), repeat=k0):
        best = max(best, merging_functional(*merged_params(MergeMap(h, k), pi, lam)))
    return full - best


def concentration_deviation(x: Network, z0: Labels, z_bar: Labels, params: ModelParams):
    """Distance of rescaled block counts of ``x`` under ``z_bar`` from their limits.

    Returns ``(dev_o, dev_d)`` with ``dev_o = |o_tilde / (rho n^2) - Q lam Q^T|``
    and ``dev_d = |d^t / (rho n^2) - Q lam Q^T 1|``, ``Q = q_matrix(z_bar, z0, w)``.
    """
    if params.weights is None or params.weights.size != x.n or z0.n != x.n:
        raise ValueError("dimension mismatch between network, labels and weights")
    if params.k != z0.k:
        raise ValueError("params and true labels disagree on k0")
    q = q_matrix(z_bar, z0, params.weights)
    target = q @ params.lambda_tilde @ q.T
    s = compute_stats(x, z_bar)
    scale = params.rho * x.n**2
    dev_o = np.abs(s.o_tilde / scale - target)
    dev_d = np.abs(s.block_degrees / scale - target.sum(axis=1))
    return dev_o, dev_d
