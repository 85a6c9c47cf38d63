"""Draw a network from the hierarchical prior and look at its counters.

The sampler draws community proportions, labels, degree weights and block
rates in that order from one seed, then a Poisson multigraph. Self-loops
are stored doubled on the diagonal.
"""
import numpy as np

from dcsbm import GeneratorConfig, compute_stats, generate, log_joint, log_profile_sup, mle_params
from dcsbm.io import format_network

params, z, x = generate(GeneratorConfig(n=12, k0=2, seed=6))
print("proportions:", np.round(params.pi, 3))
print("block rates:\n", np.round(params.lambda_tilde, 3))
print("labels:", z.z)
print("network file:\n" + format_network(x))

s = compute_stats(x, z)
print("block sizes:", s.n_a)
print("edges between blocks (o):\n", s.o)
print("block degree totals:", s.block_degrees)

# the profile likelihood is the joint likelihood at the closed-form maximiser
hat = mle_params(x, z)
print("profile sup      :", log_profile_sup(x, z))
print("joint at the MLE :", log_joint(x, z, hat))
print("joint at truth   :", log_joint(x, z, params))
