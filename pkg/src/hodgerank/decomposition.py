"""Orthogonal decomposition of comparison flows and global score estimators.

Any edge flow splits into five mutually orthogonal pieces:

* ``bias``          symmetric part (position bias, general mode only)
* ``tie_kernel``    per-edge zero-mean residual (voters cancelling out)
* ``gradient_flow`` difference flow of a global score
* ``curl_flow``     triangular cycles
* ``harmonic``      cycles around loops of the clique complex

The sum reconstructs the input exactly, energies add up (Pythagoras),
and the harmonic piece vanishes whenever the clique complex is loop-free.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .graph import (
    ComparisonGraph,
    coboundary,
    coboundary_adjoint,
    connected_components,
    curl_adjoint,
    curl_matrix,
    laplacian,
)

__all__ = [
    "RidgeConfig",
    "HodgeComponents",
    "DisconnectedGraphWarning",
    "split_bias",
    "split_tie_kernel",
    "global_score",
    "decompose",
    "cyclic_projection",
    "outlier_lasso",
    "worker_bias_fit",
]

# relative eigenvalue cutoff for pseudo-inverse solves
_RANK_CUTOFF = 1e-10


class DisconnectedGraphWarning(UserWarning):
    """Scores on a disconnected graph are only comparable within components."""


@dataclass(frozen=True)
class RidgeConfig:
    """Ridge weight gamma (= noise variance / prior variance) and noise scale."""

    gamma: float = 0.0
    sigma_eps: float = 1.0

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be nonnegative, got {self.gamma}")
        if self.sigma_eps <= 0:
            raise ValueError(f"sigma_eps must be positive, got {self.sigma_eps}")


@dataclass
class HodgeComponents:
    """The five orthogonal flow components with their potentials."""

    bias: np.ndarray
    tie_kernel: np.ndarray
    score: np.ndarray
    curl_potential: np.ndarray
    gradient_flow: np.ndarray
    curl_flow: np.ndarray
    harmonic: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.bias + self.tie_kernel + self.gradient_flow + self.curl_flow + self.harmonic

    def energies(self) -> dict[str, float]:
        """Squared norms of the five flow components."""
        return {
            "bias": float(self.bias @ self.bias),
            "tie_kernel": float(self.tie_kernel @ self.tie_kernel),
            "gradient": float(self.gradient_flow @ self.gradient_flow),
            "curl": float(self.curl_flow @ self.curl_flow),
            "harmonic": float(self.harmonic @ self.harmonic),
        }


def _psd_pinv_apply(A: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Min-norm solve of A v = rhs for symmetric PSD A via eigendecomposition."""
    vals, vecs = np.linalg.eigh(A)
    if len(vals) == 0:
        return np.zeros_like(rhs)
    cutoff = _RANK_CUTOFF * max(vals[-1], 0.0)
    inv = np.where(vals > cutoff, 1.0, 0.0) / np.where(vals > cutoff, vals, 1.0)
    return vecs @ (inv * (vecs.T @ rhs))


def _bias_partners(graph: ComparisonGraph) -> np.ndarray:
    """Partner record index for the symmetric split, -1 when unmatched.

    The k-th record a voter reports on ordered pair (i, j) is partnered
    with the voter's k-th record on (j, i).  Binary-mode graphs store a
    canonical orientation only, so nothing pairs up and the bias part is
    identically zero, matching skew-symmetric input data.
    """
    partner = np.full(graph.num_records, -1, dtype=np.intp)
    if graph.mode == "binary":
        return partner
    by_key: dict[tuple, list[int]] = {}
    for idx, rec in enumerate(graph.records):
        by_key.setdefault((rec.voter, rec.edge), []).append(idx)
    for key, idxs in by_key.items():
        fwd = [i for i in idxs if graph.records[i].sign > 0]
        rev = [i for i in idxs if graph.records[i].sign < 0]
        for i, j in zip(fwd, rev):
            partner[i], partner[j] = j, i
    return partner


def split_bias(graph: ComparisonGraph, y) -> tuple[np.ndarray, np.ndarray]:
    """Split a flow into its symmetric (position bias) and skew parts.

    A record's bias is the average of its value with the same voter's
    report in the opposite direction; records without an opposite-
    direction partner are treated as purely skew.
    """
    y = np.asarray(y, dtype=np.float64)
    partner = _bias_partners(graph)
    matched = partner >= 0
    b = np.zeros_like(y)
    b[matched] = (y[matched] + y[partner[matched]]) / 2.0
    return b, y - b


def split_tie_kernel(graph: ComparisonGraph, y_skew) -> tuple[np.ndarray, np.ndarray]:
    """Split a skew flow into the per-edge zero-mean residual and the mean flow."""
    y_skew = np.asarray(y_skew, dtype=np.float64)
    c = graph._cache()
    means = graph.edge_means(y_skew)
    ybar = c["sign"] * means[c["rec_edge"]]
    return y_skew - ybar, ybar


def _solve_score(L: np.ndarray, rhs: np.ndarray, gamma: float) -> np.ndarray:
    if gamma > 0:
        return cho_solve(cho_factor(L + gamma * np.eye(len(L)), lower=True), rhs)
    return _psd_pinv_apply(L, rhs)


def global_score(graph: ComparisonGraph, y, cfg: RidgeConfig = RidgeConfig()) -> np.ndarray:
    """Global rating score fitted to a comparison flow in least squares.

    With ``gamma > 0`` solves the ridge system (L + gamma I) x = D0^T y;
    with ``gamma = 0`` returns the minimal-norm least-squares solution,
    which is mean-zero on every connected component.
    """
    rhs = coboundary_adjoint(graph, y)
    L = laplacian(graph)
    if cfg.gamma == 0:
        if len(connected_components(graph)) > 1:
            warnings.warn(
                "graph is disconnected; scores are only comparable within components",
                DisconnectedGraphWarning,
                stacklevel=2,
            )
    return _solve_score(L, rhs, cfg.gamma)


def decompose(graph: ComparisonGraph, y) -> HodgeComponents:
    """Full orthogonal decomposition of a comparison flow."""
    y = np.asarray(y, dtype=np.float64)
    b, y_skew = split_bias(graph, y)
    u, ybar = split_tie_kernel(graph, y_skew)

    x = _solve_score(laplacian(graph), coboundary_adjoint(graph, ybar), 0.0)
    grad = coboundary(graph, x)

    resid = ybar - grad
    D1 = curl_matrix(graph)
    if D1.shape[0] > 0:
        z = _psd_pinv_apply(D1 @ D1.T, D1 @ resid)
        curl_flow = curl_adjoint(graph, z)
    else:
        z = np.zeros(0)
        curl_flow = np.zeros_like(y)
    w = resid - curl_flow
    return HodgeComponents(
        bias=b,
        tie_kernel=u,
        score=x,
        curl_potential=z,
        gradient_flow=grad,
        curl_flow=curl_flow,
        harmonic=w,
    )


def _make_cyclic_projector(graph: ComparisonGraph):
    """Precompute the projector onto the cyclic-ranking space."""
    partner = _bias_partners(graph)
    matched = partner >= 0
    vals, vecs = np.linalg.eigh(laplacian(graph))
    cutoff = _RANK_CUTOFF * max(vals[-1], 0.0)
    inv = np.where(vals > cutoff, 1.0, 0.0) / np.where(vals > cutoff, vals, 1.0)

    def project(v: np.ndarray) -> np.ndarray:
        b = np.zeros_like(v)
        b[matched] = (v[matched] + v[partner[matched]]) / 2.0
        v_skew = v - b
        rhs = coboundary_adjoint(graph, v_skew)
        return v_skew - coboundary(graph, vecs @ (inv * (vecs.T @ rhs)))

    return project


def cyclic_projection(graph: ComparisonGraph, v) -> np.ndarray:
    """Project a flow onto the cyclic-ranking space.

    Drops the symmetric part, then removes the gradient component of
    what remains; the result collects ties, triangular cycles and
    harmonic cycles.
    """
    return _make_cyclic_projector(graph)(np.asarray(v, dtype=np.float64))


def outlier_lasso(
    graph: ComparisonGraph,
    y,
    lam: float,
    max_iter: int = 100_000,
    tol: float = 1e-10,
) -> np.ndarray:
    """Sparse approximation of the cyclic part of a flow.

    Minimizes ||Proj(y) - Proj(g)||^2 + lam * ||g||_1 by proximal
    gradient descent; records with nonzero entries in the result are the
    outlier candidates.  Stops when the objective decreases by less than
    ``tol``.
    """
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    y = np.asarray(y, dtype=np.float64)
    project = _make_cyclic_projector(graph)
    target = project(y)

    def objective(g, proj_g):
        d = target - proj_g
        return d @ d + lam * np.abs(g).sum()

    # gradient of the smooth part is 2 P (g - y); Lipschitz constant 2,
    # so the proximal step is 1/2 and the shrinkage threshold lam/2
    g = np.zeros_like(y)
    proj_g = np.zeros_like(y)
    obj = objective(g, proj_g)
    for _ in range(max_iter):
        step = g - (proj_g - target)
        g_new = np.sign(step) * np.maximum(np.abs(step) - lam / 2.0, 0.0)
        proj_g = project(g_new)
        obj_new = objective(g_new, proj_g)
        g = g_new
        if obj - obj_new < tol:
            break
        obj = obj_new
    return g


def worker_bias_fit(graph: ComparisonGraph, y) -> tuple[dict[int, float], np.ndarray]:
    """Joint fit of per-voter position intercepts and a global score.

    Minimizes ||y - b - D0 x||^2 where b is constant per voter across
    all of that voter's reports.  Large |intercept| marks a careless
    voter.  Returns (voter -> intercept, score).
    """
    y = np.asarray(y, dtype=np.float64)
    if graph.num_records == 0:
        raise ValueError("graph has no records")
    voters = sorted({rec.voter for rec in graph.records})
    col = {v: k for k, v in enumerate(voters)}
    m, n_w = graph.num_records, len(voters)
    A = np.zeros((m, n_w + graph.n))
    for idx, rec in enumerate(graph.records):
        A[idx, col[rec.voter]] = 1.0
        A[idx, n_w + rec.item_i] += 1.0
        A[idx, n_w + rec.item_j] -= 1.0
    theta, *_ = np.linalg.lstsq(A, y, rcond=None)
    intercepts = {v: float(theta[col[v]]) for v in voters}
    return intercepts, theta[n_w:]
