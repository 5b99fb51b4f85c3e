"""Instance generators shared by the property and acceptance suites."""

from __future__ import annotations

from math import comb

import numpy as np

from credset.core import DiscretePosterior, make_posterior


def binomial_posterior() -> DiscretePosterior:
    return make_posterior([str(k) for k in range(6)], [comb(5, k) for k in range(6)])


def random_posterior(rng: np.random.Generator, k: int | None = None) -> DiscretePosterior:
    """Dirichlet weights, or small integer weights (frequent ties) half the time."""
    k = int(rng.integers(2, 11)) if k is None else k
    if rng.random() < 0.5:
        w = rng.dirichlet(np.ones(k))
    else:
        w = rng.integers(0, 6, size=k).astype(float)
        if w.sum() == 0:
            w[0] = 1.0
    return make_posterior([f"c{i}" for i in range(k)], w)


def perturbed_competitor(rng, values, probs, moves: int = 2) -> np.ndarray:
    """Shift membership from an included label to another while keeping sum(v * p) fixed."""
    v = np.array(values, dtype=float)
    p = np.asarray(probs)
    live = p > 0
    for _ in range(moves):
        donors = np.flatnonzero((v > 0) & live)
        if donors.size == 0:
            break
        i = donors[rng.integers(donors.size)]
        open_ = (v < 1) & live
        open_[i] = False
        takers = np.flatnonzero(open_)
        if takers.size == 0:
            break
        outside = takers[v[takers] == 0]
        pool = outside if outside.size else takers
        j = pool[rng.integers(pool.size)]
        limit = min(v[i], (1.0 - v[j]) * p[j] / p[i])
        delta = rng.random() * limit
        v[i] -= delta
        v[j] += delta * p[i] / p[j]
    return np.clip(v, 0.0, 1.0, out=v)


def tied_boundary_instance(rng: np.random.Generator):
    """Posterior with >= 2 labels tied at the threshold and a level strictly inside the jump.

    Returns ``(posterior, alpha, boundary_indices)``.
    """
    m = int(rng.integers(2, 6))
    n_in = int(rng.integers(0, 4))
    n_out = int(rng.integers(0, 4))
    tie = 1.0
    weights = np.concatenate(
        [rng.uniform(1.5, 4.0, n_in), np.full(m, tie), rng.uniform(0.05, 0.7, n_out)]
    )
    order = rng.permutation(weights.size)
    weights = weights[order]
    post = make_posterior([f"c{i}" for i in range(weights.size)], weights)
    boundary = np.flatnonzero(weights == tie)
    kappa = post.probs[boundary[0]]
    above = float(post.probs[post.probs > kappa].sum())
    tied = float(post.probs[boundary].sum())
    alpha = 1.0 - (above + rng.uniform(0.05, 0.95) * tied)
    return post, alpha, boundary


def boundary_alternative(rng, values, probs, boundary) -> np.ndarray:
    """Non-constant boundary assignment with the same credible mass."""
    v = np.array(values, dtype=float)
    g = v[boundary]
    pb = np.asarray(probs)[boundary]
    d = rng.normal(size=boundary.size)
    d -= (d @ pb) / pb.sum()
    with np.errstate(divide="ignore", invalid="ignore"):
        up = np.where(d > 0, (1.0 - g) / d, np.inf)
        down = np.where(d < 0, -g / d, np.inf)
    tmax = float(min(up.min(), down.min()))
    v[boundary] = np.clip(g + rng.uniform(0.1, 1.0) * tmax * d, 0.0, 1.0)
    return v


def normal_grid(step: float, lo: float = -6.0, hi: float = 6.0):
    from credset.grid import GridPosterior

    n = int(round((hi - lo) / step))
    mid = lo + (np.arange(n) + 0.5) * step
    return GridPosterior(lo, hi, step, np.exp(-0.5 * mid**2) / np.sqrt(2.0 * np.pi))
