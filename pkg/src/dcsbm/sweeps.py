"""Seeded parameter sweeps over the theory checks."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Labels, Network
from .sampler import make_rng
from . import theory


@dataclass
class SweepResult:
    name: str
    cases: int
    worst_margin: float
    witness: object = None
    threshold: float = -theory.MARGIN_TOL

    @property
    def passed(self) -> bool:
        return self.worst_margin >= self.threshold

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.cases} cases, worst margin {self.worst_margin:.3e}"


def _collect(name, checks, threshold=-theory.MARGIN_TOL):
    worst, witness, count = math.inf, None, 0
    for res in checks:
        count += 1
        if res.margin < worst:
            worst, witness = res.margin, res.witness
    return SweepResult(name, count, worst, witness, threshold)


def random_omega_network(n: int, rng) -> Network:
    """Random network with every entry at most ``ln n`` (so inside Omega_n)."""
    rng = make_rng(rng)
    cap = int(math.floor(math.log(n)))
    density = rng.uniform(0.1, 1.0)
    upper = rng.integers(0, cap + 1, size=(n, n)) * (rng.random((n, n)) < density)
    x = np.triu(upper, 1)
    x = x + x.T
    diag_cap = cap // 2
    x[np.diag_indices(n)] = 2 * rng.integers(0, diag_cap + 1, size=n)
    return Network(x)


def random_partition(rng, m_max=50, j_max=10):
    J = int(rng.integers(1, j_max + 1))
    m = int(rng.integers(1, m_max + 1))
    cuts = np.sort(rng.integers(0, m + 1, size=J - 1))
    return np.diff(np.concatenate([[0], cuts, [m]]))


def gamma_partition_sweep(seed=0, count=1000, m_max=50, j_max=10) -> SweepResult:
    rng = make_rng(seed)
    cases = [random_partition(rng, m_max, j_max) for _ in range(count)]
    return _collect("gamma_partition", (theory.check_gamma_partition(p) for p in cases))


def gamma_ratio_sweep(m_max=200) -> SweepResult:
    checks = (
        theory.check_gamma_ratio(m, J)
        for m in range(3, m_max + 1)
        for J in range(1, m + 1)
    )
    return _collect("gamma_ratio", checks)


def _random_instances(rng, count, n_range=(3, 8), k_range=(1, 3)):
    for _ in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        k = int(rng.integers(k_range[0], k_range[1] + 1))
        x = random_omega_network(n, rng)
        yield x, Labels(rng.integers(0, k, size=n), k)


def ratio_bounds_sweep(seed=0, count=1000):
    """Upper bounds for the three factor ratios plus ``ratio >= 1`` for each."""
    rng = make_rng(seed)
    upper = {"ratio_A": [], "ratio_B": [], "ratio_C": []}
    lower = []
    for x, z in _random_instances(rng, count):
        for res in theory.check_ratio_bounds(x, z):
            upper[res.name].append(res)
            lower.append(theory.CheckResult(res.name + ">=1", res.value,
                                            witness=(x.counts.tolist(), z.z.tolist())))
    out = [_collect(name, checks) for name, checks in upper.items()]
    out.append(_collect("ratios_at_least_one", lower))
    return out


def evidence_gap_sweep(seed=0, count=200) -> SweepResult:
    rng = make_rng(seed)
    checks = (theory.check_evidence_gap(x, z.k) for x, z in _random_instances(rng, count))
    return _collect("evidence_gap", checks)


def random_identifiable(rng, k0, min_pi=0.1, min_cos_dist=0.05, low=0.2, high=5.0):
    """Random ``(pi, lambda_tilde)`` with well-separated columns."""
    while True:
        pi = rng.dirichlet(np.ones(k0))
        if pi.min() < min_pi:
            continue
        lam = rng.uniform(low, high, size=(k0, k0))
        lam = np.triu(lam) + np.triu(lam, 1).T
        unit = lam / np.linalg.norm(lam, axis=0)
        cos = unit.T @ unit
        iu = np.triu_indices(k0, 1)
        if np.all(1.0 - cos[iu] >= min_cos_dist):
            return pi, lam


def random_proportional(rng, k0, low=0.2, high=5.0):
    """``(pi, lambda_tilde)`` whose last two columns are proportional."""
    base = rng.uniform(low, high, size=(k0 - 1, k0 - 1))
    base = np.triu(base) + np.triu(base, 1).T
    idx = list(range(k0 - 1)) + [k0 - 2]
    lam = base[np.ix_(idx, idx)]
    scale = rng.uniform(0.5, 2.0, size=k0)
    scale[:-2] = 1.0
    lam = scale[:, None] * lam * scale[None, :]
    pi = rng.dirichlet(np.ones(k0))
    return pi, lam


def identifiability_sweeps(seed=0, count=100, proportional=20):
    """Positive gap on separated instances; zero gap when two columns are proportional."""
    rng = make_rng(seed)
    pos = []
    for _ in range(count):
        k0 = int(rng.integers(2, 4))
        pi, lam = random_identifiable(rng, k0)
        gap = theory.identifiability_gap(pi, lam, k0 - 1)
        pos.append(theory.CheckResult("gap_positive", gap - 1e-6, value=gap,
                                      witness=(pi.tolist(), lam.tolist())))
    zero = []
    for _ in range(proportional):
        k0 = int(rng.integers(2, 4))
        pi, lam = random_proportional(rng, k0)
        gap = theory.identifiability_gap(pi, lam, k0 - 1)
        zero.append(theory.CheckResult("gap_zero", 1e-10 - abs(gap), value=gap,
                                       witness=(pi.tolist(), lam.tolist())))
    return [
        _collect("identifiability_gap_positive", pos, threshold=np.nextafter(0.0, 1.0)),
        _collect("identifiability_gap_zero", zero, threshold=0.0),
    ]


def all_sweeps(seed=0, quick=False):
    scale = 10 if quick else 1
    out = [
        gamma_partition_sweep(seed, count=1000 // scale),
        gamma_ratio_sweep(m_max=40 if quick else 200),
    ]
    out += ratio_bounds_sweep(seed, count=1000 // scale)
    out.append(evidence_gap_sweep(seed, count=200 // scale))
    out += identifiability_sweeps(seed, count=100 // scale, proportional=20 // (2 if quick else 1))
    return out
