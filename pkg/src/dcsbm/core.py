"""Domain types and sufficient statistics for the degree-corrected SBM.

Labels are stored 0-based (``z[i] in range(k)``). A network is a dense
symmetric matrix of nonnegative integers whose diagonal holds twice the
number of self-loops at each node.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

WEIGHT_TOL = 1e-9


class NetworkError(ValueError):
    """Raised when an adjacency matrix violates the network invariants."""


class LabelError(ValueError):
    """Raised when a label vector is inconsistent with its declared k."""


@dataclass(frozen=True)
class Network:
    """Symmetric multigraph with the doubled-diagonal convention."""

    counts: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.counts)
        if x.ndim != 2 or x.shape[0] != x.shape[1]:
            raise NetworkError(f"adjacency must be square, got shape {x.shape}")
        if x.dtype.kind == "f":
            if not np.all(np.isfinite(x)) or np.any(x != np.round(x)):
                raise NetworkError("adjacency entries must be integers")
        elif x.dtype.kind not in "iub":
            raise NetworkError(f"unsupported dtype {x.dtype}")
        x = x.astype(np.int64)
        if np.any(x < 0):
            raise NetworkError("adjacency entries must be nonnegative")
        if not np.array_equal(x, x.T):
            i, j = np.argwhere(x != x.T)[0]
            raise NetworkError(f"adjacency is not symmetric at ({i}, {j})")
        diag = np.diag(x)
        if np.any(diag % 2):
            i = int(np.flatnonzero(diag % 2)[0])
            raise NetworkError(f"diagonal entry {i} is odd ({diag[i]})")
        x.setflags(write=False)
        object.__setattr__(self, "counts", x)

    @property
    def n(self) -> int:
        return self.counts.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def permuted(self, perm) -> "Network":
        perm = np.asarray(perm)
        return Network(self.counts[np.ix_(perm, perm)])


@dataclass(frozen=True)
class Labels:
    """Community assignment ``z`` over ``range(k)``; empty blocks allowed."""

    z: np.ndarray
    k: int

    def __post_init__(self):
        z = np.asarray(self.z)
        if z.ndim != 1:
            raise LabelError("labels must be a 1-d vector")
        if z.size and z.dtype.kind not in "iu":
            if not np.all(z == np.round(z)):
                raise LabelError("labels must be integers")
        z = z.astype(np.int64)
        k = int(self.k)
        if k < 1:
            raise LabelError(f"k must be >= 1, got {k}")
        if z.size and (z.min() < 0 or z.max() >= k):
            bad = int(np.flatnonzero((z < 0) | (z >= k))[0])
            raise LabelError(f"label z[{bad}]={z[bad]} outside range(0, {k})")
        z.setflags(write=False)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "k", k)

    @property
    def n(self) -> int:
        return self.z.shape[0]

    def sizes(self) -> np.ndarray:
        return np.bincount(self.z, minlength=self.k)

    def one_hot(self) -> np.ndarray:
        return np.eye(self.k, dtype=np.int64)[self.z]


@dataclass(frozen=True)
class ModelParams:
    """Parameters ``(pi, lambda_tilde, rho, weights)``; the rate is ``rho * lambda_tilde``."""

    pi: np.ndarray
    lambda_tilde: np.ndarray
    rho: float = 1.0
    weights: np.ndarray | None = None

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=float)
        lam = np.atleast_2d(np.asarray(self.lambda_tilde, dtype=float))
        if pi.ndim != 1 or lam.shape != (pi.size, pi.size):
            raise ValueError(
                f"pi has length {pi.size} but lambda_tilde has shape {lam.shape}"
            )
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "lambda_tilde", lam)
        object.__setattr__(self, "rho", float(self.rho))
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.ndim != 1:
                raise ValueError("weights must be a 1-d vector")
            object.__setattr__(self, "weights", w)

    @property
    def k(self) -> int:
        return self.pi.size

    @property
    def rates(self) -> np.ndarray:
        return self.rho * self.lambda_tilde


@dataclass(frozen=True)
class SuffStats:
    """All counters of a ``(x, z)`` pair.

    ``o`` follows the half-diagonal convention (``o[a, a]`` counts edges
    inside block ``a``), ``o_tilde`` is the plain block sum of ``x`` so
    that ``o_tilde[a, a] == 2 * o[a, a]``. ``n_pairs`` is ``n_a n_b`` off
    the diagonal and ``n_a**2 / 2`` on it.
    """

    n_a: np.ndarray
    n_pairs: np.ndarray
    o: np.ndarray
    o_tilde: np.ndarray
    degrees: np.ndarray
    block_degrees: np.ndarray

    @property
    def k(self) -> int:
        return self.n_a.size


def pair_counts(n_a) -> np.ndarray:
    n_a = np.asarray(n_a, dtype=float)
    n_pairs = np.outer(n_a, n_a)
    np.fill_diagonal(n_pairs, n_a**2 / 2.0)
    return n_pairs


def compute_stats(x: Network, z: Labels) -> SuffStats:
    """Sufficient statistics of network ``x`` under labelling ``z``.

    Examples
    --------
    >>> s = compute_stats(Network(np.array([[0, 3], [3, 0]])), Labels([0, 1], 2))
    >>> s.o.tolist(), s.n_pairs.tolist()
    ([[0, 3], [3, 0]], [[0.5, 1.0], [1.0, 0.5]])
    """
    if z.n != x.n:
        raise LabelError(f"labels have length {z.n} but network has {x.n} nodes")
    y = z.one_hot()
    o_tilde = y.T @ x.counts @ y
    o = o_tilde.copy()
    o[np.diag_indices_from(o)] //= 2
    n_a = y.sum(axis=0)
    degrees = x.degrees
    return SuffStats(
        n_a=n_a,
        n_pairs=pair_counts(n_a),
        o=o,
        o_tilde=o_tilde,
        degrees=degrees,
        block_degrees=o_tilde.sum(axis=1),
    )


def omega_membership(x: Network) -> bool:
    """True iff every entry of ``x`` is at most ``ln n``."""
    if x.n < 1:
        raise NetworkError("network must have at least one node")
    return bool(x.counts.max() <= math.log(x.n))


def validate_params(p: ModelParams, z: Labels, allow_boundary: bool = False) -> bool:
    """Check the parameter invariants against a labelling.

    ``allow_boundary`` admits zero entries in ``pi`` and ``lambda_tilde``,
    which maximum-likelihood estimates take on empty or edgeless blocks,
    and zero weights (isolated nodes).
    """
    if p.k != z.k:
        raise ValueError(f"params have k={p.k} but labels have k={z.k}")
    if p.weights is None or p.weights.size != z.n:
        got = None if p.weights is None else p.weights.size
        raise ValueError(f"need {z.n} weights, got {got}")
    pi, lam, w = p.pi, p.lambda_tilde, p.weights
    if not (np.all(np.isfinite(pi)) and np.all(np.isfinite(lam)) and np.all(np.isfinite(w))):
        return False
    if abs(pi.sum() - 1.0) > WEIGHT_TOL:
        return False
    positive = (lambda a: np.all(a >= 0)) if allow_boundary else (lambda a: np.all(a > 0))
    if not (positive(pi) and positive(lam)):
        return False
    if not np.allclose(lam, lam.T, rtol=0, atol=WEIGHT_TOL):
        return False
    if not (p.rho > 0 and positive(w)):
        return False
    sums = np.bincount(z.z, weights=w, minlength=z.k)
    return bool(np.all(np.abs(sums - z.sizes()) <= WEIGHT_TOL))


def batch_stats(x: Network, labels: np.ndarray, k: int):
    """Block counters for many labellings at once.

    ``labels`` has shape ``(m, n)``. Returns ``(n_a, o_tilde, block_degrees)``
    with shapes ``(m, k)``, ``(m, k, k)`` and ``(m, k)``.
    """
    labels = np.asarray(labels, dtype=np.int64)
    m, n = labels.shape
    offsets = (np.arange(m) * k)[:, None]
    n_a = np.bincount((labels + offsets).ravel(), minlength=m * k).reshape(m, k)
    i, j = np.nonzero(x.counts)
    vals = x.counts[i, j].astype(float)
    flat = labels[:, i] * k + labels[:, j] + (np.arange(m) * k * k)[:, None]
    o_tilde = np.bincount(flat.ravel(), weights=np.tile(vals, m), minlength=m * k * k)
    o_tilde = o_tilde.astype(float).reshape(m, k, k)
    return n_a, o_tilde, o_tilde.sum(axis=2)
