import numpy as np
import pytest

from dcsbm import GeneratorConfig, Labels, ModelParams, generate, sample_labels, sample_network
from dcsbm.core import validate_params
from dcsbm.sampler import sample_params, sample_weights, split_seed, symmetric_dirichlet


def test_single_block_prior():
    for seed in range(5):
        params, z = sample_params(GeneratorConfig(n=6, k0=1, seed=seed), seed)
        np.testing.assert_array_equal(params.pi, [1.0])
        assert params.weights.sum() == pytest.approx(6.0)
        assert validate_params(params, z)


def test_singleton_block_weight_is_one():
    z = Labels([0, 1, 1, 2], 3)
    w = sample_weights(z, 0)
    assert w[0] == 1.0 and w[3] == 1.0
    assert w[1] + w[2] == pytest.approx(2.0)


def test_prior_draw_is_deterministic():
    cfg = GeneratorConfig(n=7, k0=3, seed=11)
    p1, z1, x1 = generate(cfg)
    p2, z2, x2 = generate(cfg)
    np.testing.assert_array_equal(p1.lambda_tilde, p2.lambda_tilde)
    np.testing.assert_array_equal(p1.weights, p2.weights)
    np.testing.assert_array_equal(z1.z, z2.z)
    np.testing.assert_array_equal(x1.counts, x2.counts)


def test_prior_draws_are_valid():
    for seed in range(30):
        params, z, x = generate(GeneratorConfig(n=9, k0=3, seed=seed))
        assert validate_params(params, z)
        np.testing.assert_array_equal(x.counts, x.counts.T)
        assert np.all(np.diag(x.counts) % 2 == 0)


def test_labels_single_block():
    assert sample_labels([1.0], 5, 0).z.tolist() == [0] * 5


def test_label_frequencies():
    n = 10**5
    z = sample_labels([0.5, 0.5], n, 2024)
    freq = np.bincount(z.z, minlength=2) / n
    np.testing.assert_allclose(freq, 0.5, atol=3 * np.sqrt(0.25 / n))
    np.testing.assert_array_equal(z.z, sample_labels([0.5, 0.5], n, 2024).z)


def test_vanishing_rate_gives_empty_network():
    z = Labels(np.zeros(20, dtype=int), 1)
    x = sample_network(z, ModelParams([1.0], [[1e-12]], weights=np.ones(20)), 0)
    assert x.counts.sum() == 0


def test_poisson_means():
    # w = 1, lambda = 1, n = 2: E[x_12] = 1 and E[x_11] = 2 * E[loops] = 1
    z = Labels([0, 0], 1)
    params = ModelParams([1.0], [[1.0]], weights=np.ones(2))
    rng = np.random.default_rng(7)
    draws = 100_000
    off = np.empty(draws)
    diag = np.empty(draws)
    for t in range(draws):
        x = sample_network(z, params, rng).counts
        off[t], diag[t] = x[0, 1], x[0, 0]
    # Var x_12 = 1, Var x_11 = 4 Var Poisson(1/2) = 2
    assert abs(off.mean() - 1) < 3 * np.sqrt(1 / draws)
    assert abs(diag.mean() - 1) < 3 * np.sqrt(2 / draws)


def test_split_seed_independent_of_order():
    a = [split_seed(5, n, t) for n in (10, 20) for t in range(3)]
    b = [split_seed(5, n, t) for t in range(3) for n in (10, 20)]
    assert sorted(a) == sorted(b)
    assert len(set(a)) == 6
    assert split_seed(5, 1) != split_seed(6, 1)


def test_symmetric_dirichlet():
    assert symmetric_dirichlet(1, np.random.default_rng(0)).tolist() == [1.0]
    p = symmetric_dirichlet(4, np.random.default_rng(0))
    assert p.sum() == pytest.approx(1.0) and np.all(p >= 0)


def test_fixed_mode():
    cfg = GeneratorConfig(n=4, k0=2, mode="fixed", pi=[0.5, 0.5],
                          lambda_tilde=[[2, 1], [1, 2]], labels=[0, 0, 1, 1], rho=0.5)
    params, z, x = generate(cfg)
    assert z.z.tolist() == [0, 0, 1, 1]
    assert params.rho == 0.5
    np.testing.assert_array_equal(params.weights, np.ones(4))
    bad = GeneratorConfig(n=3, k0=2, mode="fixed", pi=[0.5, 0.5],
                          lambda_tilde=[[1, 1], [1, 1]], labels=[0, 0, 1], weights=[2, 2, 1])
    with pytest.raises(ValueError, match="invariants"):
        generate(bad)


def test_config_validation():
    with pytest.raises(ValueError):
        GeneratorConfig(n=0, k0=1)
    with pytest.raises(ValueError):
        GeneratorConfig(n=3, k0=1, rho=0)
    with pytest.raises(ValueError, match="fixed mode"):
        GeneratorConfig(n=3, k0=1, mode="fixed")
