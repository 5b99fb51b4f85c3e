"""Reading and writing posteriors, grids and credible sets.

Floats are written with 17 significant digits so that every value survives a
round trip through text bit-for-bit.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .core import DiscretePosterior, Phi, credible_mass, make_posterior, phi_size
from .errors import InputError
from .grid import GridPosterior

__all__ = [
    "format_float",
    "dumps",
    "posterior_from_json",
    "read_posterior",
    "grid_from_json",
    "phi_to_json",
    "phi_from_json",
    "posterior_from_record",
    "loads",
]


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise InputError(f"cannot serialize non-finite number {x!r}")
    return "%.17g" % x


def dumps(obj: Any) -> str:
    """Compact JSON with 17-significant-digit floats and insertion-ordered keys."""
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, Mapping):
        items = (f"{json.dumps(str(k), ensure_ascii=False)}: {dumps(v)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from exc


def posterior_from_json(obj: Any, *, normalized: bool = True) -> DiscretePosterior:
    if not isinstance(obj, dict) or "labels" not in obj or "probs" not in obj:
        raise InputError('posterior JSON needs "labels" and "probs"')
    labels, probs = obj["labels"], obj["probs"]
    if not isinstance(labels, list) or not isinstance(probs, list):
        raise InputError('"labels" and "probs" must be arrays')
    try:
        weights = [float(p) for p in probs]
    except (TypeError, ValueError) as exc:
        raise InputError(f"non-numeric probability: {exc}") from exc
    return make_posterior(labels, weights, normalized=normalized)


def _posterior_from_csv(text: str, *, normalized: bool) -> DiscretePosterior:
    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if r]
    if not rows or [c.strip() for c in rows[0]] != ["label", "prob"]:
        raise InputError("posterior CSV needs the header 'label,prob'")
    labels, weights = [], []
    for n, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise InputError(f"line {n}: expected 2 fields, got {len(row)}")
        labels.append(row[0].strip())
        try:
            weights.append(float(row[1]))
        except ValueError as exc:
            raise InputError(f"line {n}: {exc}") from exc
    return make_posterior(labels, weights, normalized=normalized)


def read_posterior(path: str | Path, *, normalized: bool = True) -> DiscretePosterior:
    """Load a posterior from JSON (``labels``/``probs``) or CSV (``label,prob``)."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return posterior_from_json(_loads(text), normalized=normalized)
    return _posterior_from_csv(text, normalized=normalized)


def grid_from_json(obj: Any, **overrides: float | None) -> GridPosterior:
    """Build a :class:`GridPosterior`; non-None ``lo``/``hi``/``step`` overrides win."""
    if not isinstance(obj, dict) or "density" not in obj:
        raise InputError('grid JSON needs "density"')
    fields = {k: obj.get(k) for k in ("lo", "hi", "step")}
    fields.update({k: v for k, v in overrides.items() if v is not None})
    missing = [k for k, v in fields.items() if v is None]
    if missing:
        raise InputError(f"grid is missing {', '.join(missing)}")
    try:
        return GridPosterior(
            lo=float(fields["lo"]),
            hi=float(fields["hi"]),
            step=float(fields["step"]),
            density=np.asarray(obj["density"], dtype=np.float64),
        )
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed grid: {exc}") from exc


def phi_to_json(phi: Phi, post: DiscretePosterior | None = None, **extra: Any) -> dict[str, Any]:
    """Dictionary form of a credible set.

    ``credible_mass`` is included only when the source posterior is known;
    ``extra`` keys (prediction, posterior, intervals, ...) are appended last.
    """
    out: dict[str, Any] = {
        "alpha": phi.alpha,
        "kappa": phi.kappa,
        "gamma": phi.gamma,
        "phi": phi.as_dict(),
        "interior": list(phi.interior),
        "boundary": list(phi.boundary),
        "exterior": list(phi.exterior),
    }
    if post is not None:
        out["credible_mass"] = credible_mass(phi, post)
    out["size"] = phi_size(phi)
    out.update(extra)
    return out


def phi_from_json(obj: Any) -> Phi:
    """Rebuild a :class:`Phi`; raises :class:`InputError` on missing or mistyped fields."""
    if not isinstance(obj, dict):
        raise InputError("phi JSON must be an object")
    required = ("alpha", "kappa", "gamma", "phi", "interior", "boundary", "exterior")
    missing = [k for k in required if k not in obj]
    if missing:
        raise InputError(f"phi JSON is missing {', '.join(missing)}")
    values = obj["phi"]
    if not isinstance(values, dict):
        raise InputError('"phi" must map labels to values')
    try:
        return Phi(
            labels=tuple(values),
            values=np.array([float(v) for v in values.values()]),
            alpha=float(obj["alpha"]),
            kappa=float(obj["kappa"]),
            gamma=float(obj["gamma"]),
            interior=tuple(str(x) for x in obj["interior"]),
            boundary=tuple(str(x) for x in obj["boundary"]),
            exterior=tuple(str(x) for x in obj["exterior"]),
        )
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed phi JSON: {exc}") from exc


def posterior_from_record(obj: Mapping[str, Any]) -> DiscretePosterior | None:
    """Source posterior stored under ``"posterior"`` in a phi record, if any."""
    src = obj.get("posterior")
    if src is None:
        return None
    if not isinstance(src, dict):
        raise InputError('"posterior" must map labels to probabilities')
    return make_posterior(list(src), [float(v) for v in src.values()], normalized=True)


def loads(text: str) -> Any:
    return _loads(text)
