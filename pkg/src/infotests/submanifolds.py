"""Parametric submanifolds of the multinomial manifold.

Two concrete families are provided behind a small common interface:

* :class:`HardyWeinberg`, the trinomial curve ``(t^2, 2t(1-t), (1-t)^2)``;
* :class:`SphericalSubfamily`, a 2-parameter family of 7-category
  distributions whose square roots sweep a patch of a small sphere.

A subfamily maps a parameter vector in a box-shaped domain to a simplex
point. It can be sampled uniformly over that box, which is all the
approximate test in :mod:`infotests.ait` needs to know about it.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, optimize

from .manifold import as_counts, empirical_distribution


class Submanifold:
    """Base interface: a map from a parameter box into the simplex."""

    #: ``(low, high)`` arrays bounding the parameter domain
    domain: tuple[np.ndarray, np.ndarray]

    @property
    def dim(self) -> int:
        return len(self.domain[0])

    def check_param(self, tau) -> np.ndarray:
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        lo, hi = self.domain
        if tau.shape != lo.shape or np.any(tau < lo) or np.any(tau > hi):
            raise ValueError(f"parameter {tau} outside domain [{lo}, {hi}]")
        return tau

    def simplex(self, tau) -> np.ndarray:
        raise NotImplementedError

    def sample_params(self, m: int, rng: np.random.Generator) -> np.ndarray:
        lo, hi = self.domain
        return rng.uniform(lo, hi, size=(m, len(lo)))

    def sample(self, m: int, rng: np.random.Generator) -> np.ndarray:
        """Return an ``(m, k+1)`` array of distributions drawn uniformly in parameter space."""
        return np.array([self.simplex(t) for t in self.sample_params(m, rng)])

    def restricted_estimate(self, x):
        raise NotImplementedError(f"{type(self).__name__} has no restricted estimator")


class HardyWeinberg(Submanifold):
    domain = (np.array([0.0]), np.array([1.0]))

    def simplex(self, tau) -> np.ndarray:
        (t,) = self.check_param(tau)
        return np.array([t * t, 2.0 * t * (1.0 - t), (1.0 - t) ** 2])

    def restricted_estimate(self, x) -> float:
        return hw_restricted_mhde(x)


class SphericalSubfamily(Submanifold):
    domain = (np.zeros(2), np.full(2, math.pi / 2))

    def __init__(self, fixed_head=(0.3, 0.3, 0.3, 0.5), rho_sq: float = 0.48):
        self.fixed_head = np.asarray(fixed_head, dtype=float)
        self.rho_sq = float(rho_sq)
        if abs(self.fixed_head @ self.fixed_head + self.rho_sq - 1.0) > 1e-12:
            raise ValueError("fixed head and rho^2 must give unit-norm sphere points")

    @property
    def rho(self) -> float:
        return math.sqrt(self.rho_sq)

    def sphere(self, tau) -> np.ndarray:
        t1, t2 = self.check_param(tau)
        tail = self.rho * np.array([math.cos(t1) * math.sin(t2), math.sin(t1) * math.sin(t2), math.cos(t2)])
        return np.concatenate([self.fixed_head, tail])

    def simplex(self, tau) -> np.ndarray:
        return self.sphere(tau) ** 2

    def restricted_estimate(self, x) -> tuple[float, float]:
        return spherical_restricted_mle(x)


HW = HardyWeinberg()
SPHERICAL = SphericalSubfamily()


# Hardy-Weinberg ---------------------------------------------------------------


def hw_map(tau: float) -> np.ndarray:
    return HW.simplex(tau)


def hw_mhde_objective(tau, a, b, c):
    """Objective maximized by :func:`hw_restricted_mhde`; ``(a, b, c)`` are ``sqrt(x/n)``."""
    return tau * a + np.sqrt(2.0 * tau * (1.0 - tau)) * b + (1.0 - tau) * c


#: Brent tolerance (``eps ** 0.25``) of the coarse bounded search; it stops a few 1e-6 short of the exact maximizer
COARSE_MHDE_XTOL = 2.0**-13


def hw_restricted_mhde(x, xtol: float | None = None) -> float:
    """Restricted minimum Hellinger distance estimate of the Hardy-Weinberg parameter.

    Maximizes ``t*a + sqrt(2t(1-t))*b + (1-t)*c`` over ``[0, 1]`` where
    ``(a, b, c) = sqrt(x/n)``. For ``b > 0`` the objective is strictly
    concave and its stationary point solves ``b(1-2t) = (c-a) sqrt(2t(1-t))``,
    giving ``t = (1 + s/sqrt(2b^2 + s^2)) / 2`` with ``s = a - c``. For
    ``b = 0`` it is linear, so an endpoint wins; a flat objective returns 0.

    With ``xtol`` set, the interior maximizer is instead located by a
    bounded Brent search to that tolerance. This is only useful for
    matching values produced by a coarse numerical optimizer
    (see :data:`COARSE_MHDE_XTOL`).
    """
    x = as_counts(x)
    if x.size != 3:
        raise ValueError("Hardy-Weinberg estimation needs trinomial counts")
    a, b, c = np.sqrt(empirical_distribution(x))
    s = a - c
    if b > 0:
        if xtol is not None:
            return float(optimize.fminbound(lambda t: -hw_mhde_objective(t, a, b, c), 0.0, 1.0, xtol=xtol))
        return float(0.5 * (1.0 + s / math.sqrt(2.0 * b * b + s * s)))
    return 1.0 if s > 0 else 0.0


def _hw_speed_u(u: float) -> float:
    # ||sigma'(t)|| dt/du under t = sin^2(u), multiplied through so both
    # endpoint singularities cancel: (2 + (1-2t)^2 / (2t(1-t))) * 4t(1-t)
    t = math.sin(u) ** 2
    return 2.0 * math.sqrt(8.0 * t * (1.0 - t) + 2.0 * (1.0 - 2.0 * t) ** 2)


def hw_info_distance(tau0: float, tau1: float) -> float:
    """Information distance along the Hardy-Weinberg curve, by numerical arc length."""
    for t in (tau0, tau1):
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"tau must lie in [0, 1], got {t}")
    u0, u1 = sorted((math.asin(math.sqrt(tau0)), math.asin(math.sqrt(tau1))))
    if u0 == u1:
        return 0.0
    val, _ = integrate.quad(_hw_speed_u, u0, u1, epsabs=1e-13, epsrel=1e-13, limit=200)
    return float(val)


def hw_unrestricted_statistic(x, tau_bar: float) -> float:
    """Information distance from ``x/n`` to ``psi(tau_bar)`` on the full trinomial manifold."""
    x = as_counts(x)
    n = x.sum()
    t = tau_bar
    inner = t * math.sqrt(x[0] / n) + math.sqrt(2.0 * t * (1.0 - t) * x[1] / n) + (1.0 - t) * math.sqrt(x[2] / n)
    return float(2.0 * math.acos(min(1.0, max(-1.0, inner))))


def hw_restricted_statistic(x, tau_bar: float, xtol: float | None = None) -> float:
    """Information distance along the curve from ``psi(tau_bar)`` to the restricted MHDE."""
    return hw_info_distance(tau_bar, hw_restricted_mhde(x, xtol))


# Spherical subfamily -----------------------------------------------------------


def spherical_map(tau1: float, tau2: float) -> np.ndarray:
    return SPHERICAL.sphere((tau1, tau2))


def spherical_restricted_mle(x) -> tuple[float, float]:
    """Restricted MLE of ``(tau1, tau2)`` from 7-category counts.

    The negative log likelihood separates into
    ``-2 x5 log cos t1 - 2 x6 log sin t1`` and
    ``-2 (x5+x6) log sin t2 - 2 x7 log cos t2``, each strictly convex,
    so the minimizers are ``sin^2 t1 = x6/(x5+x6)`` and
    ``sin^2 t2 = (x5+x6)/(x5+x6+x7)``.
    """
    x = as_counts(x)
    if x.size != 7:
        raise ValueError("spherical subfamily needs 7-category counts")
    x5, x6, x7 = (int(v) for v in x[4:])
    t1 = math.asin(math.sqrt(x6 / (x5 + x6))) if x5 + x6 > 0 else 0.0
    t2 = math.asin(math.sqrt((x5 + x6) / (x5 + x6 + x7))) if x5 + x6 + x7 > 0 else 0.0
    return t1, t2


def spherical_restricted_lrt(x, sigma_bar, family: SphericalSubfamily = SPHERICAL) -> float:
    """Restricted likelihood ratio statistic ``-2 log L(sigma_bar) / L(psi(tau_hat))``."""
    x = as_counts(x)
    theta_bar = np.asarray(sigma_bar, dtype=float) ** 2
    theta_hat = family.simplex(spherical_restricted_mle(x))
    pos = x > 0
    return float(2.0 * np.sum(x[pos] * (np.log(theta_hat[pos]) - np.log(theta_bar[pos]))))


def submanifold_by_name(name: str) -> Submanifold:
    try:
        return {"hardy-weinberg": HW, "hw": HW, "spherical": SPHERICAL}[name.lower()]
    except KeyError:
        raise ValueError(f"unknown submanifold {name!r}; choose 'hardy-weinberg' or 'spherical'") from None


__all__ = [
    "Submanifold",
    "HardyWeinberg",
    "SphericalSubfamily",
    "HW",
    "SPHERICAL",
    "hw_map",
    "hw_restricted_mhde",
    "hw_mhde_objective",
    "COARSE_MHDE_XTOL",
    "hw_info_distance",
    "hw_unrestricted_statistic",
    "hw_restricted_statistic",
    "spherical_map",
    "spherical_restricted_mle",
    "spherical_restricted_lrt",
    "submanifold_by_name",
]
