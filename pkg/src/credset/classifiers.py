"""Quadratic discriminant analysis feeding the credible-set machinery.

Each class gets its own Gaussian (sample mean, sample covariance with an
``n - 1`` denominator) and a prior; posteriors follow from Bayes' rule and are
evaluated in log space. The simulator reproduces the three-class bivariate
normal design: means (5, 6), (4, 5), (6, 4), identity covariance, 10 draws per
class.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .core import DiscretePosterior, LevelLike, Phi, fair_ghpd
from .errors import InputError, ModelError
from .rng import standard_normal

__all__ = [
    "LabeledDataset",
    "GaussianClassModel",
    "QDAModel",
    "SimulationSpec",
    "fit_qda",
    "log_likelihoods",
    "posterior_at",
    "discriminant_scores",
    "predict",
    "classify_with_uncertainty",
    "simulate",
    "model_to_json",
    "model_from_json",
    "read_dataset_csv",
    "dataset_to_csv",
]

_LOG_2PI = math.log(2.0 * math.pi)
JITTER_SCALE = 1e-8


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    features: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        X = np.array(self.features, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        labels = tuple(str(lab) for lab in self.labels)
        if X.ndim != 2 or X.shape[0] < 1:
            raise InputError("features must be an n x d matrix with n >= 1")
        if X.shape[0] != len(labels):
            raise InputError(f"{X.shape[0]} feature rows but {len(labels)} labels")
        if not np.all(np.isfinite(X)):
            raise InputError("features must be finite")
        X.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def classes(self) -> tuple[str, ...]:
        """Distinct labels in order of first appearance."""
        return tuple(dict.fromkeys(self.labels))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabeledDataset):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.features, other.features)


def _cholesky_with_jitter(cov: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        return cov, np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        pass
    d = cov.shape[0]
    jittered = cov + np.eye(d) * (JITTER_SCALE * np.trace(cov) / d)
    try:
        return jittered, np.linalg.cholesky(jittered)
    except np.linalg.LinAlgError as exc:
        raise ModelError("covariance is not positive definite, even after jitter") from exc


@dataclass(frozen=True, eq=False)
class GaussianClassModel:
    """One class: Gaussian likelihood plus prior, with a cached Cholesky factor.

    If the covariance is not numerically positive definite, ``1e-8 * trace / d``
    is added to its diagonal once; the stored ``cov`` is the jittered matrix.
    """

    label: str
    mean: np.ndarray
    cov: np.ndarray
    prior: float
    chol: np.ndarray = field(init=False, repr=False)
    logdet: float = field(init=False)

    def __post_init__(self) -> None:
        mean = np.array(self.mean, dtype=np.float64).reshape(-1)
        cov = np.array(self.cov, dtype=np.float64).reshape(mean.size, mean.size)
        if not np.all(np.isfinite(cov)) or not np.all(np.isfinite(mean)):
            raise ModelError("class moments must be finite")
        if np.max(np.abs(cov - cov.T)) > 1e-10:
            raise ModelError(f"covariance of class {self.label!r} is not symmetric")
        if not (0.0 < float(self.prior) <= 1.0):
            raise InputError(f"prior of class {self.label!r} must lie in (0, 1]")
        cov, chol = _cholesky_with_jitter(cov)
        for arr in (mean, cov, chol):
            arr.setflags(write=False)
        object.__setattr__(self, "label", str(self.label))
        object.__setattr__(self, "prior", float(self.prior))
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "chol", chol)
        object.__setattr__(self, "logdet", float(2.0 * np.sum(np.log(np.diag(chol)))))

    @property
    def d(self) -> int:
        return self.mean.size

    def log_density(self, x: np.ndarray) -> float:
        """Log of the Gaussian likelihood at ``x``."""
        z = np.linalg.solve(self.chol, np.asarray(x, dtype=np.float64) - self.mean)
        return -0.5 * (self.d * _LOG_2PI + self.logdet + float(z @ z))


@dataclass(frozen=True)
class QDAModel:
    classes: tuple[GaussianClassModel, ...]

    def __post_init__(self) -> None:
        classes = tuple(self.classes)
        if len(classes) < 2:
            raise InputError("classification needs at least 2 classes")
        if len({c.label for c in classes}) != len(classes):
            raise InputError("duplicate class labels")
        if len({c.d for c in classes}) != 1:
            raise InputError("class models have different dimensions")
        total = math.fsum(c.prior for c in classes)
        if abs(total - 1.0) > 1e-12:
            raise ModelError(f"priors sum to {total!r}, not 1")
        object.__setattr__(self, "classes", classes)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.classes)

    @property
    def d(self) -> int:
        return self.classes[0].d


def _check_priors(priors: Mapping[str, float], classes: Sequence[str]) -> dict[str, float]:
    if set(priors) != set(classes):
        raise InputError(f"priors must name exactly the classes {list(classes)}")
    vals = {k: float(v) for k, v in priors.items()}
    if any(v <= 0 or v > 1 for v in vals.values()):
        raise InputError("priors must lie in (0, 1]")
    total = math.fsum(vals.values())
    if abs(total - 1.0) > 1e-9:
        raise InputError(f"priors sum to {total!r}; expected 1 within 1e-9")
    return {k: v / total for k, v in vals.items()}


def fit_qda(data: LabeledDataset, priors: Mapping[str, float] | None = None) -> QDAModel:
    """Fit one Gaussian per class; classes keep their order of first appearance.

    Priors default to class frequencies.

    Raises:
        InputError: fewer than 2 classes, a class with at most ``d`` samples,
            or bad explicit priors.
        ModelError: a covariance that stays singular after jitter.
    """
    classes = data.classes
    if len(classes) < 2:
        raise InputError("classification needs at least 2 classes")
    labels = np.array(data.labels, dtype=object)
    counts = {c: int(np.sum(labels == c)) for c in classes}
    short = [c for c, n in counts.items() if n < data.d + 1]
    if short:
        raise InputError(f"classes {short} have fewer than d + 1 = {data.d + 1} samples")
    if priors is None:
        prior = {c: counts[c] / data.n for c in classes}
        # frequencies can miss 1 by an ulp or two
        total = math.fsum(prior.values())
        prior = {c: p / total for c, p in prior.items()}
    else:
        prior = _check_priors(priors, classes)
    models = []
    for c in classes:
        Xc = data.features[labels == c]
        mean = Xc.mean(axis=0)
        cov = np.atleast_2d(np.cov(Xc, rowvar=False, ddof=1))
        models.append(GaussianClassModel(c, mean, (cov + cov.T) / 2.0, prior[c]))
    return QDAModel(tuple(models))


def _point(model: QDAModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != model.d:
        raise InputError(f"point has dimension {x.size}, model expects {model.d}")
    return x


def log_likelihoods(model: QDAModel, x) -> np.ndarray:
    x = _point(model, x)
    return np.array([c.log_density(x) for c in model.classes])


def posterior_at(model: QDAModel, x) -> DiscretePosterior:
    """Class posterior at ``x`` by Bayes' rule, with max-subtraction in log space."""
    logs = log_likelihoods(model, x) + np.log([c.prior for c in model.classes])
    w = np.exp(logs - logs.max())
    return DiscretePosterior(model.labels, w / w.sum())


def discriminant_scores(model: QDAModel, x) -> np.ndarray:
    """``log prior - log|S|/2 - (x - m)' S^-1 (x - m)/2`` per class, via solve and slogdet."""
    x = _point(model, x)
    scores = []
    for c in model.classes:
        r = x - c.mean
        _, logdet = np.linalg.slogdet(c.cov)
        scores.append(math.log(c.prior) - 0.5 * logdet - 0.5 * float(r @ np.linalg.solve(c.cov, r)))
    return np.array(scores)


def predict(model: QDAModel, x) -> str:
    """Class with the largest posterior; ties go to the earliest class."""
    post = posterior_at(model, x)
    return post.labels[int(np.argmax(post.probs))]


def classify_with_uncertainty(model: QDAModel, x, level: LevelLike) -> tuple[str, Phi]:
    post = posterior_at(model, x)
    return post.labels[int(np.argmax(post.probs))], fair_ghpd(post, level)


@dataclass(frozen=True, eq=False)
class SimulationSpec:
    """Gaussian mixture design: one mean per class and a covariance shared by all."""

    means: np.ndarray = field(default_factory=lambda: np.array([[5.0, 6.0], [4.0, 5.0], [6.0, 4.0]]))
    cov: np.ndarray = field(default_factory=lambda: np.eye(2))
    per_class: int = 10
    seed: int = 42
    labels: tuple[str, ...] = ("red", "green", "blue")

    def __post_init__(self) -> None:
        means = np.array(self.means, dtype=np.float64)
        if means.ndim != 2 or means.shape[0] < 2:
            raise InputError("need at least 2 class means")
        cov = np.array(self.cov, dtype=np.float64)
        if cov.shape != (means.shape[1], means.shape[1]):
            raise InputError("covariance shape does not match the mean dimension")
        if int(self.per_class) < 1:
            raise InputError("per_class must be at least 1")
        labels = tuple(str(lab) for lab in self.labels)
        if len(labels) != means.shape[0] or len(set(labels)) != len(labels):
            raise InputError("need one distinct label per class mean")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "per_class", int(self.per_class))
        object.__setattr__(self, "labels", labels)


def simulate(spec: SimulationSpec) -> LabeledDataset:
    """Draw ``per_class`` points per class, class by class.

    The standard normal for (class ``c``, sample ``i``, coordinate ``j``) is
    keyed by ``(seed, c, i, j)`` and mapped through the Cholesky factor of the
    shared covariance.
    """
    try:
        L = np.linalg.cholesky(spec.cov)
    except np.linalg.LinAlgError as exc:
        raise ModelError("simulation covariance is not positive definite") from exc
    if np.max(np.abs(spec.cov - spec.cov.T)) > 1e-10:
        raise ModelError("simulation covariance is not symmetric")
    n, d = spec.per_class, spec.means.shape[1]
    rows, labels = [], []
    for c, (label, mu) in enumerate(zip(spec.labels, spec.means)):
        z = standard_normal(spec.seed, c, np.arange(n)[:, None], np.arange(d)[None, :])
        rows.append(mu + z @ L.T)
        labels.extend([label] * n)
    return LabeledDataset(np.vstack(rows), tuple(labels))


def model_to_json(model: QDAModel) -> dict:
    return {
        "classes": [
            {"label": c.label, "mean": c.mean.tolist(), "cov": c.cov.tolist(), "prior": c.prior}
            for c in model.classes
        ]
    }


def model_from_json(obj) -> QDAModel:
    if not isinstance(obj, dict) or not isinstance(obj.get("classes"), list):
        raise InputError('model JSON needs a "classes" array')
    try:
        return QDAModel(
            tuple(
                GaussianClassModel(c["label"], c["mean"], c["cov"], c["prior"])
                for c in obj["classes"]
            )
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed model JSON: {exc}") from exc


def read_dataset_csv(path: str | Path) -> LabeledDataset:
    """Read ``f1,...,fd,label`` CSV."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise InputError(f"{path}: empty dataset")
    header = [h.strip() for h in rows[0]]
    d = len(header) - 1
    if d < 1 or header[-1] != "label" or header[:-1] != [f"f{i}" for i in range(1, d + 1)]:
        raise InputError(f"{path}: header must be f1,...,fd,label")
    feats, labels = [], []
    for n, row in enumerate(rows[1:], start=2):
        if len(row) != d + 1:
            raise InputError(f"{path}:{n}: expected {d + 1} fields, got {len(row)}")
        try:
            feats.append([float(v) for v in row[:-1]])
        except ValueError as exc:
            raise InputError(f"{path}:{n}: {exc}") from exc
        labels.append(row[-1].strip())
    if not feats:
        raise InputError(f"{path}: no data rows")
    return LabeledDataset(np.array(feats), tuple(labels))


def dataset_to_csv(data: LabeledDataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"f{i}" for i in range(1, data.d + 1)] + ["label"])
    for row, label in zip(data.features, data.labels):
        w.writerow(["%.17g" % v for v in row] + [label])
    return buf.getvalue()
