"""Brute-force references for the size-minimal credible set.

Nothing here touches the threshold search in :mod:`credset.core`; these
routines solve the underlying linear program

    minimize sum(phi)  subject to  sum(phi * p) = 1 - alpha,  0 <= phi <= 1

directly, either greedily (a fractional knapsack) or by enumerating its
vertices. They exist to check the threshold construction, not to replace it.
"""

from __future__ import annotations

import itertools
from typing import Iterator

from .core import CredibleLevel, DiscretePosterior

__all__ = ["minimal_size_oracle", "greedy_membership", "vertex_solutions"]


def _target(level) -> float:
    alpha = level.alpha if isinstance(level, CredibleLevel) else CredibleLevel(level).alpha
    return 1.0 - alpha


def greedy_membership(post: DiscretePosterior, level) -> list[float]:
    """Fractional-greedy optimum: fill the level with the heaviest labels first."""
    probs = [float(p) for p in post.probs]
    order = sorted(range(len(probs)), key=lambda i: (-probs[i], i))
    remaining = _target(level)
    phi = [0.0] * len(probs)
    for i in order:
        if remaining <= 0.0 or probs[i] <= 0.0:
            break
        if probs[i] <= remaining:
            phi[i] = 1.0
            remaining -= probs[i]
        else:
            phi[i] = remaining / probs[i]
            remaining = 0.0
    return phi


def minimal_size_oracle(post: DiscretePosterior, level) -> float:
    """Smallest possible ``sum(phi)`` over all exact-level membership functions."""
    return sum(greedy_membership(post, level))


def vertex_solutions(post: DiscretePosterior, level, *, tol: float = 1e-12) -> Iterator[list[float]]:
    """Yield every vertex of the feasible polytope (exponential; small K only).

    A vertex fixes all labels but at most one at 0 or 1; the free label takes
    whatever fraction closes the level constraint.
    """
    probs = [float(p) for p in post.probs]
    k = len(probs)
    target = _target(level)
    for ones in itertools.product((0.0, 1.0), repeat=k):
        filled = sum(o * p for o, p in zip(ones, probs))
        if abs(filled - target) <= tol:
            yield list(ones)
        for j in range(k):
            if ones[j] != 0.0 or probs[j] <= 0.0:
                continue
            frac = (target - filled) / probs[j]
            if tol < frac < 1.0 - tol:
                phi = list(ones)
                phi[j] = frac
                yield phi
