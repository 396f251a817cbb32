"""The multinomial statistical manifold.

Distributions on ``k+1`` categories are plain 1-D numpy arrays. A simplex
point holds probabilities ``theta``; the matching sphere point is
``sigma = sqrt(theta)``, which lies on the nonnegative orthant of the unit
sphere. Hellinger distance is the chord ``2 * ||sigma - rho||`` and
information (Fisher-Rao) distance is the great-circle length
``2 * arccos <sigma, rho>``, so ``h^2 = 8 - 8 cos(i / 2)``.
"""

from __future__ import annotations

import numpy as np

SIMPLEX_ATOL = 1e-12


def as_simplex(p, atol: float = SIMPLEX_ATOL) -> np.ndarray:
    """Validate ``p`` as a probability vector and return it as a float array."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise ValueError(f"expected a 1-D probability vector, got shape {p.shape}")
    if np.any(p < -atol) or np.any(p > 1 + atol):
        raise ValueError(f"probabilities must lie in [0, 1]: {p}")
    if abs(p.sum() - 1.0) > atol:
        raise ValueError(f"probabilities must sum to 1 (sum={p.sum()!r})")
    return np.clip(p, 0.0, 1.0)


def to_sphere(theta) -> np.ndarray:
    return np.sqrt(np.clip(np.asarray(theta, dtype=float), 0.0, None))


def to_simplex(sigma) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma < -SIMPLEX_ATOL):
        raise ValueError("sphere coordinates must be nonnegative")
    if abs(np.linalg.norm(sigma) - 1.0) > SIMPLEX_ATOL:
        raise ValueError(f"sphere point must have unit norm (norm={np.linalg.norm(sigma)!r})")
    return sigma**2


def as_counts(x) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D count vector, got shape {x.shape}")
    if not np.issubdtype(x.dtype, np.integer):
        if not np.all(x == np.round(x)):
            raise ValueError(f"counts must be integers: {x}")
        x = x.astype(np.int64)
    if np.any(x < 0):
        raise ValueError(f"counts must be nonnegative: {x}")
    return x


def _check_dims(p, q):
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {q.shape}")


def hellinger_distance(p, q) -> float:
    """Hellinger distance ``||2 sqrt(p) - 2 sqrt(q)||``; ranges over ``[0, 2*sqrt(2)]``."""
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    _check_dims(p, q)
    return float(2.0 * np.linalg.norm(to_sphere(p) - to_sphere(q)))


def info_distance_multinomial(p, q) -> float:
    """Fisher-Rao geodesic distance between two multinomial distributions."""
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    _check_dims(p, q)
    # 2 arccos<s, r> rewritten through the chord: arccos loses ~1e-8 near identical points
    half_chord = min(1.0, 0.5 * float(np.linalg.norm(to_sphere(p) - to_sphere(q))))
    return float(4.0 * np.arcsin(half_chord))


def empirical_distribution(x) -> np.ndarray:
    x = as_counts(x)
    n = x.sum()
    if n < 1:
        raise ValueError("empirical distribution needs at least one trial")
    return x / n


def fisher_information(theta) -> np.ndarray:
    """Fisher information of one multinomial trial, in the drop-last-coordinate chart.

    Returns the ``k x k`` matrix ``diag(1/theta[:k]) + 1/theta[k]``.
    """
    theta = np.asarray(theta, dtype=float)
    if np.any(theta <= 0):
        raise ValueError("Fisher information is singular on the simplex boundary")
    k = theta.size - 1
    return np.diag(1.0 / theta[:k]) + 1.0 / theta[k]


def wald_statistic(x, theta0) -> float:
    x = as_counts(x)
    theta0 = np.asarray(theta0, dtype=float)
    _check_dims(x, theta0)
    n = x.sum()
    d = (x / n - theta0)[:-1]
    return float(n * d @ fisher_information(theta0) @ d)


def hd_statistic(x, theta0) -> float:
    """Squared Hellinger distance between the empirical distribution and the null."""
    return hellinger_distance(empirical_distribution(x), theta0) ** 2


def likelihood_ratio_statistic(x, theta0) -> float:
    """G^2 = 2 sum x_j log(x_j / (n theta0_j)); empty cells contribute 0."""
    x = as_counts(x)
    theta0 = np.asarray(theta0, dtype=float)
    _check_dims(x, theta0)
    n = x.sum()
    pos = x > 0
    if np.any(theta0[pos] == 0):
        return float("inf")
    return float(2.0 * np.sum(x[pos] * np.log(x[pos] / (n * theta0[pos]))))


def pearson_statistic(x, theta0) -> float:
    x = as_counts(x)
    theta0 = np.asarray(theta0, dtype=float)
    _check_dims(x, theta0)
    if np.any(theta0 == 0):
        raise ZeroDivisionError("Pearson's X^2 needs every null probability > 0")
    expected = x.sum() * theta0
    return float(np.sum((x - expected) ** 2 / expected))
