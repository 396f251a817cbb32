"""Recovering the Hardy-Weinberg geometry from samples alone.

Pretend the curve is unknown and only 200 distributions on it are given.
Shortest paths through a 5-nearest-neighbor graph of Hellinger distances
approximate arc length on the curve, and a one-dimensional stress embedding
turns them into coordinates.
"""

import math
import warnings

import numpy as np

from infotests import HW, RngSeed, build_knn_graph, embed_raw_stress, hw_map, pairwise_hellinger, shortest_paths

taus = np.sort(HW.sample_params(200, RngSeed(0, 2**63).generator()).ravel())
dists = np.array([hw_map(t) for t in taus])

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    graph = build_knn_graph(pairwise_hellinger(dists), 5)
print(f"{len(graph.edges)} edges, effective K = {int(graph.value)}")

delta = shortest_paths(graph)
s = np.arcsin(np.sqrt(taus))
exact = 2 * math.sqrt(2) * np.abs(s[:, None] - s[None, :])
iu = np.triu_indices(len(taus), 1)
rel = np.abs(delta[iu] - exact[iu]) / exact[iu]
print(f"graph distance vs arc length: median rel. error {np.median(rel):.3%}, max {rel.max():.3%}")

config = embed_raw_stress(delta, r=1)
z = config.points[:, 0]
print(f"stress {config.stress:.3e} after {config.n_iter} iterations")
print("embedded coordinates are monotone in tau:", bool(np.all(np.diff(z) > 0) or np.all(np.diff(z) < 0)))

# Arc length from one end, learned vs exact
z = np.abs(z - z[0])
for i in (0, 50, 100, 150, 199):
    print(f"tau {taus[i]:.3f}: learned {z[i]:.4f}  exact {exact[0, i]:.4f}")
