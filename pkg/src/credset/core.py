"""Exact-level credible sets for discrete posteriors.

A generalized credible set assigns every label an inclusion probability in
[0, 1] whose posterior expectation is exactly ``1 - alpha``. The fair
generalized HPD set puts probability 1 on labels whose posterior mass is above
a threshold ``kappa``, 0 on labels below it, and one shared value ``gamma`` on
labels tied at the threshold. This is the smallest such set, and among the
smallest sets it has the least variance.

Masses are compared with a tie tolerance (:func:`tie_tolerance`), applied the
same way in :func:`rho`, :func:`compute_kappa_alpha` and :func:`fair_gamma`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import InputError, ModelError
from .rng import uniform

__all__ = [
    "TIE_RTOL",
    "NORMALIZATION_TOL",
    "DiscretePosterior",
    "CredibleLevel",
    "Phi",
    "tie_tolerance",
    "make_posterior",
    "rho",
    "rho_left",
    "compute_kappa_alpha",
    "fair_gamma",
    "fair_ghpd",
    "credible_mass",
    "phi_size",
    "phi_variance",
    "realize_membership",
    "realize_many",
    "validate_phi",
]

TIE_RTOL = 1e-9
NORMALIZATION_TOL = 1e-6
_SUM_TOL = 1e-9
_GAMMA_TOL = 1e-12
# relative slack when deciding whether a threshold group can absorb the level
_LEVEL_SLACK = 1e-13


def tie_tolerance(kappa: float) -> float:
    """Half-width of the band around ``kappa`` inside which masses count as equal."""
    return TIE_RTOL * max(1.0, float(kappa))


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DiscretePosterior:
    """Normalized posterior mass function over a finite, ordered label set.

    Build instances with :func:`make_posterior`; direct construction expects
    probabilities already summing to 1 within 1e-9.
    """

    labels: tuple[str, ...]
    probs: np.ndarray

    def __post_init__(self) -> None:
        labels = tuple(str(lab) for lab in self.labels)
        probs = _readonly(self.probs)
        if probs.ndim != 1 or len(labels) != probs.size:
            raise InputError("labels and probs must be 1-d and of equal length")
        if not labels:
            raise InputError("posterior needs at least one label")
        if len(set(labels)) != len(labels):
            raise InputError("labels must be pairwise distinct")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise InputError("probabilities must be finite and nonnegative")
        if abs(math.fsum(probs) - 1.0) > _SUM_TOL:
            raise ModelError(f"probabilities sum to {math.fsum(probs)!r}, not 1")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "probs", probs)

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiscretePosterior):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.probs, other.probs)

    def __hash__(self) -> int:
        return hash((self.labels, self.probs.tobytes()))

    def index(self, label: str) -> int:
        return self.labels.index(str(label))

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, (float(p) for p in self.probs)))


@dataclass(frozen=True)
class CredibleLevel:
    """Credible level ``1 - alpha`` with ``alpha`` strictly inside (0, 1)."""

    alpha: float

    def __post_init__(self) -> None:
        a = float(self.alpha)
        if not (0.0 < a < 1.0):
            raise InputError(f"alpha must lie strictly inside (0, 1), got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)

    @property
    def level(self) -> float:
        return 1.0 - self.alpha


LevelLike = Union[CredibleLevel, float]


def _alpha(level: LevelLike) -> float:
    if isinstance(level, CredibleLevel):
        return level.alpha
    return CredibleLevel(level).alpha


@dataclass(frozen=True, eq=False)
class Phi:
    """A fair generalized HPD credible set.

    Attributes:
        labels: label order, identical to the source posterior.
        values: inclusion probability per label, each one of 0, ``gamma``, 1.
        alpha: one minus the credible level.
        kappa: posterior-mass threshold.
        gamma: shared inclusion probability of labels tied at ``kappa``.
        interior: labels with mass above ``kappa`` (value 1).
        boundary: labels with mass equal to ``kappa`` (value ``gamma``).
        exterior: labels with mass below ``kappa`` (value 0).
    """

    labels: tuple[str, ...]
    values: np.ndarray
    alpha: float
    kappa: float
    gamma: float
    interior: tuple[str, ...]
    boundary: tuple[str, ...]
    exterior: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "values", _readonly(self.values))
        for name in ("interior", "boundary", "exterior"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        for name in ("alpha", "kappa", "gamma"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Phi):
            return NotImplemented
        return (
            self.labels == other.labels
            and np.array_equal(self.values, other.values)
            and (self.alpha, self.kappa, self.gamma) == (other.alpha, other.kappa, other.gamma)
            and (self.interior, self.boundary, self.exterior)
            == (other.interior, other.boundary, other.exterior)
        )

    def __len__(self) -> int:
        return len(self.labels)

    def value(self, label: str) -> float:
        return float(self.values[self.labels.index(str(label))])

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, (float(v) for v in self.values)))


def make_posterior(
    labels: Sequence, weights: Sequence[float], *, normalized: bool = False
) -> DiscretePosterior:
    """Normalize nonnegative weights into a :class:`DiscretePosterior`.

    With ``normalized=True`` the caller asserts the weights are already
    probabilities: a sum within 1e-6 of one is renormalized silently, anything
    further off raises :class:`ModelError`.
    """
    labels = [str(lab) for lab in labels]
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or len(labels) != w.size:
        raise InputError("labels and weights must be 1-d and of equal length")
    if w.size == 0:
        raise InputError("empty posterior")
    if len(set(labels)) != len(labels):
        raise InputError("duplicate labels")
    if not np.all(np.isfinite(w)):
        raise InputError("weights must be finite")
    if np.any(w < 0):
        raise InputError("weights must be nonnegative")
    total = math.fsum(w)
    if total <= 0:
        raise InputError("at least one weight must be positive")
    if normalized and abs(total - 1.0) > NORMALIZATION_TOL:
        raise ModelError(f"probabilities sum to {total!r}; expected 1 within {NORMALIZATION_TOL}")
    return DiscretePosterior(tuple(labels), w / total)


def _masks(probs: np.ndarray, kappa: float) -> tuple[np.ndarray, np.ndarray]:
    tol = tie_tolerance(kappa)
    above = probs > kappa + tol
    tied = (np.abs(probs - kappa) <= tol) & (probs > 0) & ~above
    return above, tied


def rho(post: DiscretePosterior, kappa: float) -> float:
    """Posterior probability of the labels whose mass exceeds ``kappa``."""
    above, _ = _masks(post.probs, kappa)
    return math.fsum(post.probs[above])


def rho_left(post: DiscretePosterior, kappa: float) -> float:
    """Left limit of :func:`rho` at ``kappa``: mass of labels at or above it."""
    above, tied = _masks(post.probs, kappa)
    return math.fsum(post.probs[above | tied])


def _split(probs: np.ndarray, kappa: float) -> tuple[float, float]:
    above, tied = _masks(probs, kappa)
    return math.fsum(probs[above]), math.fsum(probs[tied])


def _absorbs(probs: np.ndarray, kappa: float, target: float) -> bool:
    gt, eq = _split(probs, kappa)
    return target - gt <= eq * (1.0 + _LEVEL_SLACK)


def compute_kappa_alpha(post: DiscretePosterior, level: LevelLike) -> float:
    """Largest distinct positive mass ``v`` with ``P(mass >= v) >= 1 - alpha``.

    When ``1 - alpha`` lands exactly on a jump of :func:`rho`, several
    thresholds are admissible; the largest one is returned, so the tied group
    is then fully included (``gamma == 1``).
    """
    target = 1.0 - _alpha(level)
    p = post.probs
    vals = np.unique(p[p > 0])[::-1]
    # vectorized first pass from suffix sums, refined below with exact sums
    asc = np.sort(p)
    suffix = np.append(np.cumsum(asc[::-1])[::-1], 0.0)
    tol = TIE_RTOL * np.maximum(1.0, vals)
    ge = suffix[np.searchsorted(asc, vals - tol, side="left")]
    idx = int(np.argmax(ge >= target)) if np.any(ge >= target) else vals.size - 1
    while idx > 0 and _absorbs(p, vals[idx - 1], target):
        idx -= 1
    while idx < vals.size - 1 and not _absorbs(p, vals[idx], target):
        idx += 1
    return float(vals[idx])


def fair_gamma(post: DiscretePosterior, level: LevelLike, kappa: float) -> float:
    """Shared boundary inclusion probability that makes the level exact."""
    target = 1.0 - _alpha(level)
    gt, eq = _split(post.probs, kappa)
    if eq <= 0:
        if abs(target - gt) > _SUM_TOL:
            raise ModelError(f"kappa={kappa!r} is not a mass value and rho(kappa) != 1 - alpha")
        return 0.0
    gamma = (target - gt) / eq
    if gamma < -_GAMMA_TOL or gamma > 1.0 + _GAMMA_TOL:
        raise ModelError(f"gamma={gamma!r} outside [0, 1]; kappa={kappa!r} is inconsistent")
    return min(1.0, max(0.0, gamma))


def fair_ghpd(post: DiscretePosterior, level: LevelLike) -> Phi:
    """Fair generalized highest posterior density credible set of level ``1 - alpha``."""
    alpha = _alpha(level)
    kappa = compute_kappa_alpha(post, alpha)
    gamma = fair_gamma(post, alpha, kappa)
    above, tied = _masks(post.probs, kappa)
    values = np.where(above, 1.0, np.where(tied, gamma, 0.0))
    labels = np.array(post.labels, dtype=object)
    return Phi(
        labels=post.labels,
        values=values,
        alpha=alpha,
        kappa=kappa,
        gamma=gamma,
        interior=tuple(labels[above]),
        boundary=tuple(labels[tied]),
        exterior=tuple(labels[~(above | tied)]),
    )


def _values_for(phi: Phi | Sequence[float], post: DiscretePosterior | None = None) -> np.ndarray:
    if isinstance(phi, Phi):
        if post is not None and phi.labels != post.labels:
            raise InputError("phi and posterior have different label sets")
        return phi.values
    values = np.asarray(phi, dtype=np.float64)
    if post is not None and values.shape != post.probs.shape:
        raise InputError("membership values do not match the posterior's labels")
    return values


def credible_mass(phi: Phi | Sequence[float], post: DiscretePosterior) -> float:
    """Posterior expectation of the membership function."""
    return math.fsum(_values_for(phi, post) * post.probs)


def phi_size(phi: Phi | Sequence[float]) -> float:
    """Size under counting measure: the sum of the membership values."""
    return math.fsum(_values_for(phi))


def phi_variance(phi: Phi | Sequence[float], post: DiscretePosterior) -> float:
    """Posterior variance of the membership value, ``E[phi^2] - E[phi]^2``.

    Evaluated in centered form, which is algebraically identical and keeps
    small differences between competing sets resolvable.
    """
    v = _values_for(phi, post)
    mean = math.fsum(v * post.probs)
    return math.fsum(post.probs * (v - mean) ** 2)


def realize_membership(phi: Phi, rngseed: int) -> tuple[str, ...]:
    """One randomized credible set: label ``i`` is kept iff its coin lands heads.

    The coin for label ``i`` is ``uniform(rngseed, i) < phi.values[i]``.
    """
    u = uniform(rngseed, np.arange(len(phi)))
    return tuple(lab for lab, keep in zip(phi.labels, u < phi.values) if keep)


def realize_many(phi: Phi, seeds: Sequence[int] | np.ndarray) -> np.ndarray:
    """Membership indicators for many seeds at once, shape ``(len(seeds), len(phi))``.

    Row ``s`` equals the realization of :func:`realize_membership` with ``seeds[s]``.
    """
    seeds = np.asarray(seeds)
    u = uniform(seeds[:, None], np.arange(len(phi))[None, :])
    return u < phi.values[None, :]


def validate_phi(phi: Phi, post: DiscretePosterior | None = None, *, tol: float = _SUM_TOL) -> None:
    """Raise :class:`InputError` unless ``phi`` satisfies the structural invariants.

    With ``post`` given, also checks the mass ordering against ``kappa`` and
    that the credible mass equals ``1 - alpha``.
    """
    CredibleLevel(phi.alpha)
    if len(set(phi.labels)) != len(phi.labels):
        raise InputError("duplicate labels in phi")
    if phi.values.shape != (len(phi.labels),):
        raise InputError("phi values do not match labels")
    if not (0.0 <= phi.gamma <= 1.0):
        raise InputError(f"gamma={phi.gamma!r} outside [0, 1]")
    if not phi.kappa > 0:
        raise InputError("kappa must be positive")
    parts = phi.interior + phi.boundary + phi.exterior
    if sorted(parts) != sorted(phi.labels):
        raise InputError("interior, boundary and exterior do not partition the labels")
    expected = {lab: 1.0 for lab in phi.interior}
    expected.update({lab: phi.gamma for lab in phi.boundary})
    expected.update({lab: 0.0 for lab in phi.exterior})
    for lab, v in zip(phi.labels, phi.values):
        if v != expected[lab]:
            raise InputError(f"value {v!r} of label {lab!r} is inconsistent with its region")
    if post is None:
        return
    if post.labels != phi.labels:
        raise InputError("phi and posterior have different label sets")
    above, tied = _masks(post.probs, phi.kappa)
    labels = np.array(post.labels, dtype=object)
    if set(labels[above]) != set(phi.interior) or set(labels[tied]) != set(phi.boundary):
        raise InputError("regions disagree with posterior masses relative to kappa")
    mass = credible_mass(phi, post)
    if abs(mass - (1.0 - phi.alpha)) > tol:
        raise InputError(f"credible mass {mass!r} differs from 1 - alpha = {1.0 - phi.alpha!r}")
