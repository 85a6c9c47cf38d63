"""Monte Carlo accuracy of k_hat as n grows.

Runs a reduced version of the planted two-block experiment and writes the
per-trial CSV. The full run (50 trials per n) is the config file next to
this script:  dcsbm experiment demos/experiment.json --out results.csv
"""
import sys

from dcsbm.experiment import ExperimentConfig, records_to_csv, run_experiment

cfg = ExperimentConfig(
    k0=2, pi=[0.5, 0.5], lambda_tilde=[[4.0, 1.0], [1.0, 4.0]],
    n_grid=[50, 100, 150], trials=5, backend="bracket", k_max=3, seed=0,
)
records, summary = run_experiment(cfg)
for n, acc in summary.items():
    print(f"n={n:4d}  accuracy {acc:.2f}", file=sys.stderr)
sys.stdout.write(records_to_csv(records, cfg.k_max))
