"""Max 3-Cut via quench correlations and spectral clustering (type 2).

Three Rydberg quenches of a King's subgraph produce shot ensembles; their
weighted connected-correlation matrix supplies eigenvector features for
k-means, and the coloring is polished with the greedy recoloring step.
Setting every quench time to zero collapses the correlations and recovers
the classical random-guess limit.
"""

import numpy as np

from nnha import (
    QuenchParams,
    RydbergModel,
    SpectralParams,
    brute_force_kcut,
    classical_limit_kcut,
    cut_value,
    kcut_pipeline,
    kings_subgraph,
)

g = kings_subgraph(3, 3, 0.3, seed=11)
model = RydbergModel()
print(f"instance: {g} (positions on the unit lattice, scaled to 4.8 um)")
optimum, _ = brute_force_kcut(g, 3)
print(f"exact Max 3-Cut = {optimum} of {g.num_edges} edges")

params = SpectralParams(
    quenches=[QuenchParams(t=0.5, delta=3.0), QuenchParams(t=1.0, delta=8.0),
              QuenchParams(t=2.0, delta=13.0)],
    lambdas=[1.0, 1.0, 1.0],
    k=3,
)

hybrid, classical = [], []
for seed in range(20):
    coloring, diag = kcut_pipeline(g, params, model, shots_per_ansatz=100, seed=seed)
    hybrid.append(diag["post_cut"])
    classical.append(cut_value(g, classical_limit_kcut(g, 3, seed=seed)))
    if seed == 0:
        print(f"\nfirst run: correlation eigenvalues {np.round(diag['eigenvalues'], 4)}")
        print(f"raw clustering cut {diag['raw_cut']} -> post-flip {diag['post_cut']}")
        print(f"coloring: {coloring.labels.tolist()}")

print(f"\nover 20 seeds: hybrid mean {np.mean(hybrid):.2f} "
      f"(ratio {np.mean(hybrid) / optimum:.4f}) vs classical limit "
      f"{np.mean(classical):.2f} (ratio {np.mean(classical) / optimum:.4f})")

t0 = SpectralParams(quenches=[QuenchParams(t=0.0, delta=3.0)] * 3,
                    lambdas=[1.0, 1.0, 1.0], k=3)
_, diag = kcut_pipeline(g, t0, model, shots_per_ansatz=100, seed=0)
print(f"\nt=0 limit: correlations vanish (no_signal={diag['no_signal']}), the "
      "pipeline degrades to a greedy-post-processed random coloring")
