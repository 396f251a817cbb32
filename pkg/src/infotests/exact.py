"""Exact randomized tests for small multinomial experiments.

Every outcome of an ``n``-trial experiment is enumerated, so sizes and
power functions are finite sums and can be computed exactly (up to
floating point). A test is built from an :class:`OutcomeTable` holding
each outcome's null probability and test statistic; large statistics
reject first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable

import numpy as np

from .stats import chi2_quantile, multinomial_log_pmf_table
from .submanifolds import hw_map, hw_restricted_statistic, hw_unrestricted_statistic

#: statistics closer than this are treated as tied
TIE_ATOL = 1e-9
#: slack for comparing cumulative probabilities against alpha
PROB_ATOL = 1e-12


def enumerate_outcomes(n: int, k_plus_1: int) -> np.ndarray:
    """All count vectors of length ``k_plus_1`` summing to ``n``, reverse-lexicographic.

    >>> enumerate_outcomes(2, 2).tolist()
    [[2, 0], [1, 1], [0, 2]]
    """
    if n < 0 or k_plus_1 < 1:
        raise ValueError(f"need n >= 0 and k+1 >= 1, got n={n}, k+1={k_plus_1}")

    def rec(remaining, cells):
        if cells == 1:
            yield (remaining,)
            return
        for first in range(remaining, -1, -1):
            for rest in rec(remaining - first, cells - 1):
                yield (first,) + rest

    out = np.array(list(rec(n, k_plus_1)), dtype=np.int64)
    assert len(out) == comb(n + k_plus_1 - 1, k_plus_1 - 1)
    return out


def outcome_probabilities(outcomes, theta) -> np.ndarray:
    return np.exp(multinomial_log_pmf_table(theta, outcomes))


@dataclass
class OutcomeTable:
    outcomes: np.ndarray
    null_probs: np.ndarray
    statistics: np.ndarray

    def __post_init__(self):
        self.outcomes = np.asarray(self.outcomes)
        self.null_probs = np.asarray(self.null_probs, dtype=float)
        self.statistics = np.asarray(self.statistics, dtype=float)
        if not (len(self.outcomes) == len(self.null_probs) == len(self.statistics)):
            raise ValueError("outcomes, null_probs and statistics must be parallel")

    @property
    def n(self) -> int:
        return int(self.outcomes[0].sum())

    @classmethod
    def build(cls, n: int, theta0, statistic: Callable[[np.ndarray], float]) -> "OutcomeTable":
        """Enumerate outcomes for ``n`` trials and evaluate ``statistic`` on each."""
        theta0 = np.asarray(theta0, dtype=float)
        outcomes = enumerate_outcomes(n, theta0.size)
        stats = np.array([statistic(x) for x in outcomes], dtype=float)
        return cls(outcomes, outcome_probabilities(outcomes, theta0), stats)


@dataclass
class RandomizedTest:
    """Reject outcomes in ``certain_region`` always and ``boundary_group`` with probability ``gamma``.

    Regions are arrays of row indices into the :class:`OutcomeTable` the
    test was built from.
    """

    certain_region: np.ndarray
    boundary_group: np.ndarray
    gamma: float
    size: float
    statistic_threshold: float
    alpha: float = float("nan")
    meta: dict = field(default_factory=dict)

    def rejection_probabilities(self, n_outcomes: int) -> np.ndarray:
        phi = np.zeros(n_outcomes)
        phi[self.certain_region] = 1.0
        phi[self.boundary_group] = self.gamma
        return phi


def _tie_groups(values: np.ndarray) -> list[np.ndarray]:
    """Indices grouped by statistic value (within TIE_ATOL), largest value first."""
    order = np.argsort(-values, kind="stable")
    groups: list[list[int]] = []
    head = None
    for i in order:
        v = values[i]
        if head is None or head - v > TIE_ATOL:
            groups.append([])
            head = v
        groups[-1].append(int(i))
    return [np.sort(np.array(g, dtype=np.int64)) for g in groups]


def build_exact_test(table: OutcomeTable, alpha: float) -> RandomizedTest:
    """Size-``alpha`` randomized test rejecting for large statistics.

    Whole tie groups join the certain region while the cumulative null
    probability stays within ``alpha``; the next group is rejected with
    probability ``gamma = (alpha - cum) / P(group)``.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    empty = np.array([], dtype=np.int64)
    groups = _tie_groups(table.statistics)
    certain: list[np.ndarray] = []
    cum = 0.0
    boundary, gamma = empty, 0.0
    threshold = float("inf")
    if alpha > 0:
        for g in groups:
            pg = float(table.null_probs[g].sum())
            if cum + pg <= alpha + PROB_ATOL:
                certain.append(g)
                cum += pg
                threshold = float(table.statistics[g].min())
                if abs(alpha - cum) <= PROB_ATOL:
                    break
            else:
                boundary = g
                gamma = (alpha - cum) / pg
                threshold = float(table.statistics[g].max())
                break
    certain_idx = np.sort(np.concatenate(certain)) if certain else empty
    size = cum + gamma * float(table.null_probs[boundary].sum())
    return RandomizedTest(certain_idx, boundary, float(gamma), float(size), threshold, alpha)


def exact_power(test: RandomizedTest, table: OutcomeTable, theta) -> float:
    """Probability that ``test`` rejects when the data come from ``Multinomial(theta)``."""
    probs = outcome_probabilities(table.outcomes, theta)
    return float(probs[test.certain_region].sum() + test.gamma * probs[test.boundary_group].sum())


def chi2_critical_test(table: OutcomeTable, alpha: float, df: int, n: int | None = None) -> RandomizedTest:
    """Nonrandomized test rejecting when the statistic exceeds ``sqrt(q_{1-alpha}(df) / n)``."""
    n = table.n if n is None else n
    c = float(np.sqrt(chi2_quantile(df, 1.0 - alpha) / n)) if alpha > 0 else float("inf")
    region = np.flatnonzero(table.statistics > c)
    size = float(table.null_probs[region].sum())
    return RandomizedTest(region, np.array([], dtype=np.int64), 0.0, size, c, alpha, {"df": df, "critical_value": c})


def power_curve(test: RandomizedTest, table: OutcomeTable, thetas) -> np.ndarray:
    return np.array([exact_power(test, table, th) for th in thetas])


# Hardy-Weinberg tables -------------------------------------------------------------


def hw_tables(n: int, tau_bar: float, mhde_xtol: float | None = None) -> tuple[OutcomeTable, OutcomeTable]:
    """Outcome tables with unrestricted and restricted information statistics for ``H0: psi(tau_bar)``.

    ``mhde_xtol`` is passed to :func:`~infotests.submanifolds.hw_restricted_mhde`.
    """
    theta0 = hw_map(tau_bar)
    unrestricted = OutcomeTable.build(n, theta0, lambda x: hw_unrestricted_statistic(x, tau_bar))
    restricted = OutcomeTable(
        unrestricted.outcomes,
        unrestricted.null_probs,
        [hw_restricted_statistic(x, tau_bar, mhde_xtol) for x in unrestricted.outcomes],
    )
    return unrestricted, restricted
