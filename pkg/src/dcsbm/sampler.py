"""Seeded generation of DCSBM networks.

Self-loops: the likelihood normaliser ``2**(x_ii/2) (x_ii/2)!`` corresponds
to ``x_ii = 2 * Poisson(w_i**2 * lam / 2)``, which is what we draw, so the
generator's density is exactly the model likelihood.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import Labels, ModelParams, Network, validate_params

DIRICHLET_CONC = 0.5
GAMMA_SHAPE = 0.5


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def split_seed(root: int, *key: int) -> int:
    """Derive an independent 64-bit seed for substream ``key`` of ``root``.

    The result depends only on ``(root, key)``, never on call order, so
    trials can be scheduled on any number of workers.
    """
    ss = np.random.SeedSequence(entropy=int(root), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def symmetric_dirichlet(size: int, rng: np.random.Generator, conc: float = DIRICHLET_CONC):
    """Dirichlet(conc, ..., conc) via normalised Gamma(conc, 1) draws."""
    if size == 1:
        return np.ones(1)
    g = rng.gamma(conc, 1.0, size=size)
    return g / g.sum()


@dataclass(frozen=True)
class GeneratorConfig:
    n: int
    k0: int
    mode: Literal["hierarchical", "fixed"] = "hierarchical"
    seed: int = 0
    rho: float = 1.0
    pi: np.ndarray | None = None
    lambda_tilde: np.ndarray | None = None
    weights: np.ndarray | None = None
    labels: np.ndarray | None = None

    def __post_init__(self):
        if self.n < 1 or self.k0 < 1:
            raise ValueError("need n >= 1 and k0 >= 1")
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if self.mode not in ("hierarchical", "fixed"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "fixed" and (self.pi is None or self.lambda_tilde is None):
            raise ValueError("fixed mode needs pi and lambda_tilde")
        for name in ("labels", "weights"):
            v = getattr(self, name)
            if v is not None and len(v) != self.n:
                raise ValueError(f"{name} has length {len(v)} but n={self.n}")


def sample_labels(pi, n: int, rng) -> Labels:
    pi = np.asarray(pi, dtype=float)
    rng = make_rng(rng)
    return Labels(rng.choice(pi.size, size=n, p=pi), pi.size)


def sample_weights(z: Labels, rng) -> np.ndarray:
    """Per-community weights ``n_a * Dirichlet(1/2, ..., 1/2)``."""
    rng = make_rng(rng)
    w = np.empty(z.n)
    for a in range(z.k):
        members = np.flatnonzero(z.z == a)
        if members.size:
            w[members] = members.size * symmetric_dirichlet(members.size, rng)
    return w


def sample_params(cfg: GeneratorConfig, rng) -> tuple[ModelParams, Labels]:
    """Draw ``(pi, z, w, lambda)`` from the hierarchical prior, in that order."""
    if cfg.mode != "hierarchical":
        raise ValueError("sample_params draws from the prior; use fixed_params for mode='fixed'")
    rng = make_rng(rng)
    k = cfg.k0
    pi = symmetric_dirichlet(k, rng)
    z = sample_labels(pi, cfg.n, rng)
    w = sample_weights(z, rng)
    upper = rng.gamma(GAMMA_SHAPE, 1.0, size=k * (k + 1) // 2)
    lam = np.zeros((k, k))
    lam[np.triu_indices(k)] = upper
    lam = lam + np.triu(lam, 1).T
    return ModelParams(pi=pi, lambda_tilde=lam, rho=cfg.rho, weights=w), z


def fixed_params(cfg: GeneratorConfig, rng) -> tuple[ModelParams, Labels]:
    """User-supplied ``(pi, lambda_tilde, rho)``; labels and weights drawn if absent.

    Missing weights default to ``w = 1`` (the homogeneous SBM).
    """
    rng = make_rng(rng)
    pi = np.asarray(cfg.pi, dtype=float)
    if cfg.labels is not None:
        z = Labels(cfg.labels, pi.size)
    else:
        z = sample_labels(pi, cfg.n, rng)
    w = np.ones(cfg.n) if cfg.weights is None else np.asarray(cfg.weights, dtype=float)
    params = ModelParams(pi=pi, lambda_tilde=cfg.lambda_tilde, rho=cfg.rho, weights=w)
    if not validate_params(params, z):
        raise ValueError("fixed parameters violate the model invariants for these labels")
    return params, z


def sample_network(z: Labels, params: ModelParams, rng) -> Network:
    """Poisson multigraph with rate ``w_i w_j rho lambda_tilde[z_i, z_j]``."""
    rng = make_rng(rng)
    w = params.weights if params.weights is not None else np.ones(z.n)
    rate = np.outer(w, w) * params.rates[np.ix_(z.z, z.z)]
    iu = np.triu_indices(z.n, 1)
    x = np.zeros((z.n, z.n), dtype=np.int64)
    x[iu] = rng.poisson(rate[iu])
    x = x + x.T
    x[np.diag_indices(z.n)] = 2 * rng.poisson(np.diag(rate) / 2.0)
    return Network(x)


def generate(cfg: GeneratorConfig, rng=None):
    """Sample ``(params, labels, network)`` for a config, seeded by ``cfg.seed``."""
    rng = make_rng(cfg.seed if rng is None else rng)
    if cfg.mode == "hierarchical":
        params, z = sample_params(cfg, rng)
    else:
        params, z = fixed_params(cfg, rng)
    return params, z, sample_network(z, params, rng)
