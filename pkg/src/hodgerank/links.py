"""Generalized linear preference models.

A link maps a score difference to the probability that the first item is
preferred.  Every link is a symmetric CDF: monotone, Phi(0) = 1/2 and
Phi(t) + Phi(-t) = 1.  Bounded links clamp out-of-domain differences to
the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, logit, ndtr, ndtri

__all__ = [
    "Link",
    "get_link",
    "LINK_NAMES",
    "SaturationError",
    "clip_empirical",
    "sample_label",
    "generate_ground_truth",
]


class SaturationError(ValueError):
    """Inverse link requested at a probability outside its open domain."""


def _uniform_cdf(t):
    return (np.clip(t, -1.0, 1.0) + 1.0) / 2.0


def _uniform_inv(p):
    return 2.0 * p - 1.0


def _bt_inv(p):
    return logit(p)


def _tm_cdf(t):
    return ndtr(t)


def _tm_inv(p):
    return ndtri(p)


def _angular_cdf(t):
    return (np.sin(np.clip(t, -np.pi / 2, np.pi / 2)) + 1.0) / 2.0


def _angular_inv(p):
    return np.arcsin(2.0 * p - 1.0)


@dataclass(frozen=True)
class Link:
    """A preference-probability model Phi and its inverse."""

    name: str
    bounded: bool
    _cdf: callable = field(repr=False)
    _inv: callable = field(repr=False)

    def prob(self, delta):
        """Probability that i beats j given score difference delta = x_i - x_j."""
        return self._cdf(np.asarray(delta, dtype=np.float64))

    def inverse(self, pi_hat):
        """Score difference producing preference probability ``pi_hat``.

        Unbounded links diverge at 0 and 1; those inputs raise
        :class:`SaturationError` and the caller is expected to clip
        empirical frequencies first (see :func:`clip_empirical`).
        """
        p = np.asarray(pi_hat, dtype=np.float64)
        if np.any(p < 0.0) or np.any(p > 1.0):
            raise ValueError("probability outside [0, 1]")
        if not self.bounded and (np.any(p == 0.0) or np.any(p == 1.0)):
            raise SaturationError(f"{self.name} link saturates at probability 0 or 1")
        return self._inv(p)


_LINKS = {
    "uniform": Link("uniform", True, _uniform_cdf, _uniform_inv),
    "bradley-terry": Link("bradley-terry", False, expit, _bt_inv),
    "thurstone-mosteller": Link("thurstone-mosteller", False, _tm_cdf, _tm_inv),
    "angular": Link("angular", True, _angular_cdf, _angular_inv),
}

LINK_NAMES = tuple(_LINKS)


def get_link(name: str) -> Link:
    """Look a link up by its config name."""
    try:
        return _LINKS[name]
    except KeyError:
        raise ValueError(f"unknown link {name!r}; choose from {', '.join(LINK_NAMES)}") from None


def clip_empirical(pi_hat, count):
    """Continuity correction before inverting an unbounded link.

    Clips an empirical frequency estimated from ``count`` samples into
    [1/(2*count), 1 - 1/(2*count)].
    """
    count = np.asarray(count, dtype=np.float64)
    if np.any(count < 1):
        raise ValueError("sample count must be >= 1")
    eps = 1.0 / (2.0 * count)
    return np.clip(np.asarray(pi_hat, dtype=np.float64), eps, 1.0 - eps)


def sample_label(link: Link, x_star: np.ndarray, i: int, j: int, rng: np.random.Generator) -> int:
    """Draw a binary preference for pair (i, j) under ground-truth scores."""
    if i == j:
        raise ValueError("cannot compare an item with itself")
    p = link.prob(x_star[i] - x_star[j])
    return 1 if rng.random() < p else -1


def generate_ground_truth(n: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. uniform [0, 1] scores for ``n`` items."""
    if n < 2:
        raise ValueError(f"need at least two items, got n={n}")
    return rng.random(n)
