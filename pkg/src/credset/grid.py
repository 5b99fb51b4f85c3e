"""Credible sets for one-dimensional continuous posteriors on a uniform grid.

Each cell contributes ``density(midpoint) * step`` of mass, and the cells are
handed to :func:`credset.core.fair_ghpd` as a discrete posterior whose labels
are the cell indices (as strings). Where the density is strictly monotone
around the threshold the boundary shrinks with the step, and the interior
converges to the classical HPD region. A flat stretch at the threshold stays
on the boundary and shares one ``gamma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DiscretePosterior, LevelLike, Phi, fair_ghpd, make_posterior
from .errors import InputError, ModelError

__all__ = ["GridPosterior", "grid_posterior", "grid_ghpd", "grid_intervals", "region_mass"]

_MASS_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class GridPosterior:
    lo: float
    hi: float
    step: float
    density: np.ndarray

    def __post_init__(self) -> None:
        density = np.array(self.density, dtype=np.float64)
        density.setflags(write=False)
        object.__setattr__(self, "density", density)
        lo, hi, step = float(self.lo), float(self.hi), float(self.step)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "step", step)
        if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
            raise InputError("grid needs finite endpoints with hi > lo")
        if not (math.isfinite(step) and step > 0):
            raise InputError("grid step must be positive")
        if density.ndim != 1 or density.size < 2:
            raise InputError("degenerate grid: need at least 2 cells")
        if not np.all(np.isfinite(density)) or np.any(density < 0):
            raise InputError("density values must be finite and nonnegative")
        ncells = (hi - lo) / step
        if abs(ncells - density.size) > 1e-6 * max(1.0, density.size):
            raise InputError(f"(hi - lo) / step = {ncells!r} but {density.size} density values")
        total = step * math.fsum(density)
        if abs(total - 1.0) > _MASS_TOL:
            raise ModelError(f"step * sum(density) = {total!r}; expected 1 within {_MASS_TOL}")

    @property
    def midpoints(self) -> np.ndarray:
        return self.lo + (np.arange(self.density.size) + 0.5) * self.step

    def edges(self, i: int) -> tuple[float, float]:
        return self.lo + i * self.step, self.lo + (i + 1) * self.step


def grid_posterior(gp: GridPosterior) -> DiscretePosterior:
    """Midpoint-rule cell masses as a discrete posterior labelled ``"0"``, ``"1"``, ..."""
    return make_posterior([str(i) for i in range(gp.density.size)], gp.density * gp.step)


def grid_ghpd(gp: GridPosterior, level: LevelLike) -> Phi:
    """Fair generalized HPD set over the grid cells."""
    return fair_ghpd(grid_posterior(gp), level)


def grid_intervals(gp: GridPosterior, phi: Phi, region: str = "interior") -> list[tuple[float, float]]:
    """Union of cell intervals in ``region`` (interior, boundary or exterior), merged when adjacent."""
    if region not in ("interior", "boundary", "exterior"):
        raise InputError(f"unknown region {region!r}")
    cells = sorted(int(lab) for lab in getattr(phi, region))
    out: list[tuple[float, float]] = []
    start = prev = None
    for c in cells:
        if start is None:
            start = prev = c
        elif c == prev + 1:
            prev = c
        else:
            out.append((gp.edges(start)[0], gp.edges(prev)[1]))
            start = prev = c
    if start is not None:
        out.append((gp.edges(start)[0], gp.edges(prev)[1]))
    return out


def region_mass(post: DiscretePosterior, phi: Phi, region: str = "boundary") -> float:
    """Total posterior probability of the labels in one region of ``phi``."""
    members = set(getattr(phi, region))
    return math.fsum(p for lab, p in zip(post.labels, post.probs) if lab in members)
