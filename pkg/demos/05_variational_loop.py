"""The outer variational loop: derivative-free search over sampled objectives.

The optimizer never sees gradients or exact expectations: every evaluation
draws M = 100 shots, post-processes them, and reports mean and standard
error.  The budget matches the few-shot regime: convergence within 30
evaluations and 3000 total shots.
"""

import numpy as np

from nnha import (
    SearchBox,
    dfo_maximize,
    estimate_objective,
    maxcut_objective,
    random_regular,
)
from nnha.rng import spawn_seeds

g = random_regular(10, 3, seed=81)
spec = maxcut_objective(g, p=1, shots=100)
eval_seeds = iter(spawn_seeds(123, 31))


def objective(params):
    mean, stderr = estimate_objective(spec, params, next(eval_seeds))
    return mean, stderr, spec.shots


box = SearchBox(
    lower=[0.0, 0.0], upper=[np.pi, np.pi / 2],
    initial=[1.2, 0.5], max_iters=30,
)
result = dfo_maximize(objective, box, seed=7)

print(f"instance: {g}")
print(f"evaluations: {result.evaluations}, converged: {result.converged}, "
      f"total shots: {sum(rec.shots for rec in result.history)}")
print(f"best angles (gamma, beta) = {np.round(result.best_params, 4)} "
      f"with post-processed mean cut {result.best_value:.3f}\n")
print("history (evaluation, gamma, beta, mean, stderr):")
for i, rec in enumerate(result.history):
    print(f"  {i:2d}  {rec.params[0]:.4f}  {rec.params[1]:.4f} "
          f"  {rec.mean:7.3f}  {rec.stderr:.3f}")
