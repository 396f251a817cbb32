"""Learning the geometry of a sampled submanifold.

Isomap-style pipeline over Hellinger distances: build a neighborhood graph,
take all-pairs shortest paths as approximate geodesic distances, then find
a Euclidean configuration whose distances match them by minimizing raw
stress with SMACOF majorization. New distributions are placed into an
existing configuration from their distances to a few nearby landmarks.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra
from scipy.spatial.distance import cdist

from .manifold import to_sphere

# scipy drops zero-weight sparse entries; coincident distributions keep their edge with this weight
_MIN_EDGE_WEIGHT = 1e-300


class DisconnectedGraphError(ValueError):
    """The neighborhood graph splits into several components."""

    def __init__(self, labels: np.ndarray):
        self.components = [np.flatnonzero(labels == c).tolist() for c in np.unique(labels)]
        shown = "; ".join(str(c if len(c) <= 10 else c[:10] + ["..."]) for c in self.components[:5])
        super().__init__(f"neighborhood graph has {len(self.components)} components: {shown}")


class DegenerateInputError(ValueError):
    pass


def pairwise_hellinger(dists) -> np.ndarray:
    """Matrix of Hellinger distances between the rows of ``dists``."""
    p = np.asarray(dists, dtype=float)
    if p.ndim != 2 or p.shape[0] < 2:
        raise ValueError(f"need at least two distributions as rows, got shape {p.shape}")
    h = 2.0 * cdist(to_sphere(p), to_sphere(p))
    h = 0.5 * (h + h.T)
    np.fill_diagonal(h, 0.0)
    return h


def hellinger_to_rows(p, dists) -> np.ndarray:
    """Hellinger distances from one distribution ``p`` to each row of ``dists``."""
    diff = to_sphere(np.asarray(dists, dtype=float)) - to_sphere(p)
    return 2.0 * np.sqrt(np.einsum("ij,ij->i", diff, diff))


@dataclass
class NeighborhoodGraph:
    vertex_count: int
    edges: np.ndarray  # (E, 3): i, j, weight with i < j
    rule: str
    value: float

    def adjacency(self) -> csr_matrix:
        i = self.edges[:, 0].astype(np.int64)
        j = self.edges[:, 1].astype(np.int64)
        w = np.maximum(self.edges[:, 2], _MIN_EDGE_WEIGHT)
        n = self.vertex_count
        return csr_matrix((np.concatenate([w, w]), (np.concatenate([i, j]), np.concatenate([j, i]))), shape=(n, n))

    def components(self) -> np.ndarray:
        _, labels = connected_components(self.adjacency(), directed=False)
        return labels

    def is_connected(self) -> bool:
        return len(np.unique(self.components())) == 1


def _graph_from_mask(d: np.ndarray, mask: np.ndarray, rule: str, value: float) -> NeighborhoodGraph:
    i, j = np.nonzero(np.triu(mask, k=1))
    edges = np.column_stack([i, j, d[i, j]]).astype(float)
    return NeighborhoodGraph(len(d), edges.reshape(-1, 3), rule, value)


def _check_dissimilarity(d) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"dissimilarity matrix must be square, got {d.shape}")
    if not np.all(np.isfinite(d)) or np.any(d < 0):
        raise ValueError("dissimilarities must be finite and nonnegative")
    if np.max(np.abs(d - d.T)) > 1e-12 or np.any(np.diag(d) != 0):
        raise ValueError("dissimilarity matrix must be symmetric with zero diagonal")
    return d


def build_knn_graph(d, K: int) -> NeighborhoodGraph:
    """Symmetric K-nearest-neighbor graph: ``i ~ j`` if either is among the other's K nearest.

    If the graph is disconnected, K is increased until it connects and a
    warning is issued; the K actually used is stored in ``graph.value``.
    """
    d = _check_dissimilarity(d)
    n = len(d)
    if K < 1:
        raise ValueError(f"K must be positive, got {K}")
    masked = d + np.diag(np.full(n, np.inf))
    order = np.argsort(masked, axis=1, kind="stable")
    requested = K
    K = min(K, n - 1)
    while True:
        mask = np.zeros((n, n), dtype=bool)
        rows = np.repeat(np.arange(n), K)
        mask[rows, order[:, :K].ravel()] = True
        mask |= mask.T
        g = _graph_from_mask(d, mask, "knn", K)
        if g.is_connected():
            break
        K += 1
    if K != requested:
        warnings.warn(f"{requested}-NN graph is disconnected; using K={K}", stacklevel=2)
    return g


def build_epsilon_graph(d, epsilon: float) -> NeighborhoodGraph:
    """Connect ``i`` and ``j`` when their dissimilarity is at most ``epsilon``."""
    d = _check_dissimilarity(d)
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    g = _graph_from_mask(d, d <= epsilon, "epsilon", epsilon)
    labels = g.components()
    if len(np.unique(labels)) > 1:
        raise DisconnectedGraphError(labels)
    return g


def shortest_paths(g: NeighborhoodGraph) -> np.ndarray:
    labels = g.components()
    if len(np.unique(labels)) > 1:
        raise DisconnectedGraphError(labels)
    delta = dijkstra(g.adjacency(), directed=False)
    delta[delta <= _MIN_EDGE_WEIGHT * g.vertex_count] = 0.0
    delta = np.minimum(delta, delta.T)
    np.fill_diagonal(delta, 0.0)
    return delta


# Embedding ----------------------------------------------------------------------------


@dataclass
class Configuration:
    points: np.ndarray
    stress: float
    stress_history: list = field(default_factory=list)
    n_iter: int = 0

    @property
    def r(self) -> int:
        return self.points.shape[1]


def classical_scaling(delta, r: int) -> np.ndarray:
    """Torgerson scaling: top-``r`` spectral coordinates of the double-centered squared dissimilarities."""
    delta = np.asarray(delta, dtype=float)
    n = len(delta)
    J = np.eye(n) - 1.0 / n
    B = -0.5 * J @ (delta**2) @ J
    evals, evecs = np.linalg.eigh(B)
    idx = np.argsort(evals)[::-1][:r]
    coords = evecs[:, idx] * np.sqrt(np.clip(evals[idx], 0.0, None))
    if coords.shape[1] < r:
        coords = np.hstack([coords, np.zeros((n, r - coords.shape[1]))])
    # eigenvector signs are arbitrary; fix them so the output is reproducible
    for c in range(r):
        k = np.argmax(np.abs(coords[:, c]))
        if coords[k, c] < 0:
            coords[:, c] = -coords[:, c]
    return coords


def _pairwise_euclidean(z: np.ndarray) -> np.ndarray:
    diff = z[:, None, :] - z[None, :, :]
    return np.sqrt(np.sum(diff**2, axis=-1))


def raw_stress(z, delta, weights=None) -> float:
    """Sum over ``i < j`` of ``w_ij (||z_i - z_j|| - delta_ij)^2``."""
    z = np.asarray(z, dtype=float)
    delta = np.asarray(delta, dtype=float)
    w = np.ones_like(delta) if weights is None else np.asarray(weights, dtype=float)
    resid = _pairwise_euclidean(z) - delta
    return float(np.sum(np.triu(w * resid**2, 1)))


def embed_raw_stress(delta, r: int, weights=None, max_iter: int = 500, tol: float = 1e-9, init=None) -> Configuration:
    """Embed dissimilarities in R^r by SMACOF majorization of raw stress.

    Starts from classical scaling unless ``init`` is given. Each Guttman
    transform cannot increase stress; iteration stops once the relative
    decrease falls below ``tol`` or after ``max_iter`` steps.
    """
    delta = _check_dissimilarity(delta)
    if r < 1:
        raise ValueError(f"embedding dimension must be positive, got {r}")
    n = len(delta)
    if not np.any(delta > 0):
        raise DegenerateInputError("all dissimilarities are zero")
    w = np.ones((n, n)) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (n, n) or np.any(w < 0) or np.max(np.abs(w - w.T)) > 0:
        raise ValueError("weights must be a symmetric nonnegative matrix matching delta")
    w = w.copy()
    np.fill_diagonal(w, 0.0)

    V = -w.copy()
    np.fill_diagonal(V, w.sum(axis=1))
    unit = np.allclose(w[~np.eye(n, dtype=bool)], 1.0)
    V_pinv = None if unit else np.linalg.pinv(V)

    z = classical_scaling(delta, r) if init is None else np.array(init, dtype=float)
    z = z - z.mean(axis=0)
    if np.allclose(z, 0):
        # degenerate start leaves every Guttman transform at zero
        z = np.arange(n, dtype=float)[:, None] * np.ones((1, r)) / n
    scale = float(np.sum(np.triu(w * delta**2, 1)))
    stress = raw_stress(z, delta, w)
    history = [stress]
    it = 0
    for it in range(1, max_iter + 1):
        d = _pairwise_euclidean(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(d > 0, w * delta / d, 0.0)
        B = -ratio
        np.fill_diagonal(B, ratio.sum(axis=1))
        z_new = (B @ z) / n if unit else V_pinv @ B @ z
        new_stress = raw_stress(z_new, delta, w)
        if new_stress > stress:
            # only roundoff can do this; keep the better iterate
            break
        z = z_new
        history.append(new_stress)
        converged = stress - new_stress <= tol * stress or new_stress <= 1e-30 * scale
        stress = new_stress
        if converged:
            break
    return Configuration(z, stress, history, it)


def embed_out_of_sample(points, dists_to_landmarks, ell: int | None = None, mode: str | None = None) -> np.ndarray:
    """Place a new point into an embedding from its distances to landmark rows.

    Parameters
    ----------
    points : (N, r) array
        Embedded configuration.
    dists_to_landmarks : sequence of (index, distance)
        Candidate landmarks; the ``ell`` with the smallest distances are used.
    ell : int, optional
        Number of landmarks. Defaults to 2 when ``r == 1`` and ``r + 1`` otherwise.
    mode : {"cosines", "centroid"}, optional
        ``"cosines"`` (only for ``r == 1``, ``ell == 2``) projects the point
        onto the line through the two landmarks via the law of cosines;
        ``"centroid"`` averages the landmarks' coordinates. Defaults to
        ``"cosines"`` when ``r == 1``.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    r = points.shape[1]
    mode = normalize_oos_mode(mode, r)
    ell = default_ell(r) if ell is None else ell
    if ell < 1:
        raise ValueError(f"ell must be positive, got {ell}")
    pairs = sorted(((float(dist), int(i)) for i, dist in dists_to_landmarks))[:ell]
    idx = [i for _, i in pairs]
    if mode == "centroid":
        return points[idx].mean(axis=0)
    if r != 1 or ell != 2:
        raise ValueError("law-of-cosines embedding needs r == 1 and ell == 2")
    (a, j1), (b, j2) = pairs
    z1, z2 = points[j1, 0], points[j2, 0]
    s = abs(z2 - z1)
    if s == 0:
        return np.array([z1])
    return np.array([z1 + (a * a + s * s - b * b) / (2.0 * s) * np.sign(z2 - z1)])


_OOS_ALIASES = {
    "cosines": "cosines",
    "law_of_cosines": "cosines",
    "law_of_cosines_1d": "cosines",
    "centroid": "centroid",
}


def normalize_oos_mode(mode: str | None, r: int) -> str:
    if mode is None:
        return "cosines" if r == 1 else "centroid"
    try:
        return _OOS_ALIASES[mode]
    except KeyError:
        raise ValueError(f"unknown out-of-sample mode {mode!r}") from None


def default_ell(r: int) -> int:
    return 2 if r == 1 else r + 1
