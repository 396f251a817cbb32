"""Approximate information tests for submanifolds known only through samples.

Given distributions ``p_bar, p_1, ..., p_m`` drawn from an unknown
submanifold (the null first), :func:`fit_submanifold` learns a Euclidean
picture of its geometry. :func:`test_statistic` embeds an empirical
distribution into that picture and measures how far it lands from the
null; :func:`mc_significance` calibrates the statistic by simulating
samples under the null and :func:`randomized_ait_test` calibrates it
exactly by enumerating outcomes.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from math import comb

import numpy as np

from . import learning
from .exact import OutcomeTable, RandomizedTest, build_exact_test, enumerate_outcomes, outcome_probabilities
from .manifold import as_counts, as_simplex, empirical_distribution
from .stats import RngSeed, multinomial_sample
from .submanifolds import Submanifold


@dataclass
class EmbeddedSubmanifold:
    distributions: np.ndarray
    config: learning.Configuration
    rule: str
    value: float
    r: int
    ell: int
    oos_mode: str
    null_index: int = 0
    delta: np.ndarray | None = field(default=None, repr=False)

    @property
    def null(self) -> np.ndarray:
        return self.distributions[self.null_index]

    @property
    def z_bar(self) -> np.ndarray:
        return self.config.points[self.null_index]

    @property
    def landmarks(self) -> np.ndarray:
        """Row indices used for out-of-sample embedding (every sampled point except the null)."""
        return np.delete(np.arange(len(self.distributions)), self.null_index)

    def graph_params(self) -> dict:
        return {"rule": self.rule, "value": self.value}


@dataclass
class AitResult:
    statistic: float
    p_value: float
    replicates: int
    exceed_count: int
    seed: RngSeed
    p_value_convention: str = "fraction"
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "statistic": self.statistic,
            "p_value": self.p_value,
            "B": self.replicates,
            "exceed_count": self.exceed_count,
            "seed": asdict(self.seed),
            "p_value_convention": self.p_value_convention,
        }
        out.update(self.meta)
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def sample_distributions(family: Submanifold, null, m: int, seed: RngSeed) -> np.ndarray:
    """Stack the null distribution on top of ``m`` uniform draws from ``family``."""
    draws = family.sample(m, seed.generator())
    return np.vstack([np.asarray(null, dtype=float)[None, :], draws])


def fit_submanifold(
    dists,
    *,
    knn: int | None = 5,
    epsilon: float | None = None,
    r: int = 1,
    ell: int | None = None,
    oos_mode: str | None = None,
    weights=None,
    max_iter: int = 500,
    tol: float = 1e-9,
) -> EmbeddedSubmanifold:
    """Hellinger distances, neighborhood graph, shortest paths, raw-stress embedding.

    Row 0 of ``dists`` must be the null distribution. Pass ``epsilon`` to use
    an epsilon-ball graph instead of the (default) symmetric KNN graph.
    """
    dists = np.asarray(dists, dtype=float)
    if dists.ndim != 2:
        raise ValueError("distributions must be given as rows of a 2-D array")
    for i, row in enumerate(dists):
        try:
            as_simplex(row, atol=1e-9)
        except ValueError as exc:
            raise ValueError(f"row {i}: {exc}") from None
    m = len(dists) - 1
    if m < 1:
        raise ValueError("need the null plus at least one sampled distribution")
    h = learning.pairwise_hellinger(dists)
    if epsilon is not None:
        graph = learning.build_epsilon_graph(h, epsilon)
    else:
        graph = learning.build_knn_graph(h, knn)
    delta = learning.shortest_paths(graph)
    config = learning.embed_raw_stress(delta, r, weights=weights, max_iter=max_iter, tol=tol)
    mode = learning.normalize_oos_mode(oos_mode, r)
    ell = learning.default_ell(r) if ell is None else ell
    ell = min(ell, m)
    return EmbeddedSubmanifold(dists, config, graph.rule, float(graph.value), r, ell, mode, 0, delta)


def embed_distribution(sub: EmbeddedSubmanifold, p) -> np.ndarray:
    """Out-of-sample coordinates ``y`` of distribution ``p``."""
    lm = sub.landmarks
    h = learning.hellinger_to_rows(p, sub.distributions[lm])
    return learning.embed_out_of_sample(sub.config.points, zip(lm, h), sub.ell, sub.oos_mode)


def test_statistic(sub: EmbeddedSubmanifold, x) -> float:
    """Distance between the embedded empirical distribution of ``x`` and the embedded null."""
    p_hat = empirical_distribution(x)
    if p_hat.size != sub.distributions.shape[1]:
        raise ValueError(f"counts have {p_hat.size} categories, distributions have {sub.distributions.shape[1]}")
    return float(np.linalg.norm(embed_distribution(sub, p_hat) - sub.z_bar))


test_statistic.__test__ = False  # keep pytest from collecting it


def _replicate_statistics(sub: EmbeddedSubmanifold, n: int, seed: RngSeed, ids: range) -> np.ndarray:
    return np.array([test_statistic(sub, multinomial_sample(sub.null, n, seed.stream(i))) for i in ids])


def mc_significance(
    sub: EmbeddedSubmanifold,
    x,
    B: int,
    seed: RngSeed,
    *,
    add_one: bool = False,
    workers: int = 1,
) -> AitResult:
    """Monte Carlo significance probability of the observed statistic.

    Replicate ``i`` draws ``n`` trials from the null using stream ``i`` of
    ``seed``, so the result does not depend on ``workers``. Ties with the
    observed statistic count as exceedances.
    """
    if B < 1:
        raise ValueError(f"B must be positive, got {B}")
    x = as_counts(x)
    n = int(x.sum())
    observed = test_statistic(sub, x)
    if workers <= 1:
        sims = _replicate_statistics(sub, n, seed, range(B))
    else:
        bounds = np.linspace(0, B, workers + 1).astype(int)
        chunks = [range(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]
        with ThreadPoolExecutor(workers) as pool:
            sims = np.concatenate(list(pool.map(lambda ids: _replicate_statistics(sub, n, seed, ids), chunks)))
    # same tie slack as exact-test grouping, so roundoff cannot split equal statistics
    exceed = int(np.sum(sims >= observed - 1e-9))
    p = (exceed + 1) / (B + 1) if add_one else exceed / B
    meta = {
        "graph_params": sub.graph_params(),
        "r": sub.r,
        "ell": sub.ell,
        "oos_mode": sub.oos_mode,
    }
    return AitResult(observed, p, B, exceed, seed, "add_one" if add_one else "fraction", meta)


def randomized_ait_test(
    sub: EmbeddedSubmanifold, alpha: float, n: int, *, max_outcomes: int = 10**6
) -> RandomizedTest:
    """Exact size-``alpha`` randomized test based on the approximate statistic.

    Evaluates the statistic on every outcome of an ``n``-trial experiment;
    the :class:`OutcomeTable` is kept in ``test.meta["table"]`` for power
    calculations.
    """
    k1 = sub.distributions.shape[1]
    count = comb(n + k1 - 1, k1 - 1)
    if count > max_outcomes:
        raise ValueError(f"{count} outcomes exceed the enumeration cap of {max_outcomes}")
    outcomes = enumerate_outcomes(n, k1)
    stats = np.array([test_statistic(sub, o) for o in outcomes])
    table = OutcomeTable(outcomes, outcome_probabilities(outcomes, sub.null), stats)
    test = build_exact_test(table, alpha)
    test.meta["table"] = table
    return test
