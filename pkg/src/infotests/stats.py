"""Probability utilities: chi-squared tails, multinomial pmf and sampling, seeded RNG streams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special


@dataclass(frozen=True)
class RngSeed:
    """Seed for a reproducible random stream.

    Every ``(master_seed, stream_id)`` pair maps to its own independent
    generator, so Monte Carlo replicate ``i`` can use ``stream_id=i`` and get
    the same variates whatever order or thread it runs on.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            v = getattr(self, name)
            if not (0 <= int(v) < 2**64):
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {v}")

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=int(self.master_seed), spawn_key=(int(self.stream_id),))
        return np.random.Generator(np.random.PCG64(seq))

    def stream(self, stream_id: int) -> "RngSeed":
        return RngSeed(self.master_seed, stream_id)


def chi2_quantile(df: int, prob: float) -> float:
    """Return q with P(chi2(df) <= q) = prob."""
    if df < 1 or int(df) != df:
        raise ValueError(f"df must be a positive integer, got {df}")
    if not 0.0 < prob < 1.0:
        raise ValueError(f"prob must lie in (0, 1), got {prob}")
    # gammaincinv inverts the regularized lower incomplete gamma; chi2(df) = Gamma(df/2, 2)
    return float(2.0 * special.gammaincinv(df / 2.0, prob))


def chi2_survival(df: int, x: float) -> float:
    """Return P(chi2(df) > x)."""
    if df < 1 or int(df) != df:
        raise ValueError(f"df must be a positive integer, got {df}")
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    return float(special.gammaincc(df / 2.0, x / 2.0))


def multinomial_log_pmf(theta, counts) -> float:
    """Log multinomial probability of ``counts`` under cell probabilities ``theta``.

    Returns ``-inf`` when a cell with zero probability has a positive count.
    """
    theta = np.asarray(theta, dtype=float)
    counts = np.asarray(counts)
    if theta.shape != counts.shape:
        raise ValueError(f"dimension mismatch: theta {theta.shape} vs counts {counts.shape}")
    if np.any(counts < 0):
        raise ValueError("counts must be nonnegative")
    return float(multinomial_log_pmf_table(theta, counts[None, :])[0])


def multinomial_log_pmf_table(theta, outcomes) -> np.ndarray:
    """Vectorized log pmf over the rows of ``outcomes`` (all with the same total)."""
    theta = np.asarray(theta, dtype=float)
    outcomes = np.asarray(outcomes)
    n = outcomes.sum(axis=1)
    log_coef = special.gammaln(n + 1) - special.gammaln(outcomes + 1).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(outcomes > 0, outcomes * np.log(theta), 0.0)
    return log_coef + terms.sum(axis=1)


def multinomial_sample(theta, n: int, seed: RngSeed) -> np.ndarray:
    """Draw one count vector of ``n`` trials from ``Multinomial(theta)``."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    theta = np.asarray(theta, dtype=float)
    # numpy draws sequential conditional binomials
    return seed.generator().multinomial(int(n), theta / theta.sum())
