"""Command-line interface: ``credset compute|simulate|classify|wheel``.

Exit status is 0 on success, 2 for usage or input errors and 3 for numerical
or model failures. Outputs are staged next to their destination and only
moved into place once the whole command has succeeded.
"""

from __future__ import annotations

import argparse
import configparser
import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Any, Callable, TextIO

import numpy as np

from .classifiers import (
    SimulationSpec,
    dataset_to_csv,
    fit_qda,
    model_to_json,
    posterior_at,
    read_dataset_csv,
    simulate,
)
from .core import CredibleLevel, DiscretePosterior, fair_ghpd, validate_phi
from .errors import InputError, ModelError
from .grid import grid_ghpd, grid_intervals, grid_posterior, region_mass
from .serialize import (
    dumps,
    grid_from_json,
    loads,
    phi_from_json,
    phi_to_json,
    posterior_from_json,
    posterior_from_record,
    read_posterior,
)
from .wheelplot import build_wheel, render_panel, render_svg

log = logging.getLogger("credset")

EXIT_OK, EXIT_INPUT, EXIT_MODEL = 0, 2, 3

DEFAULTS: dict[str, Any] = {"alpha": 0.05, "seed": 42, "per_class": 10, "size": 256}


def _alpha_type(text: str) -> float:
    try:
        return CredibleLevel(float(text)).alpha
    except (ValueError, InputError):
        raise argparse.ArgumentTypeError(f"alpha must be a number strictly inside (0, 1), got {text!r}")


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _seed_type(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}")


def _priors_type(text: str) -> dict[str, float]:
    out = {}
    for item in text.split(","):
        label, sep, value = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"priors must look like 'a=0.5,b=0.5', got {text!r}")
        try:
            out[label.strip()] = float(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad prior value {value!r}")
    return out


CONVERTERS: dict[str, Callable[[str], Any]] = {
    "alpha": _alpha_type,
    "seed": _seed_type,
    "per_class": _positive_int,
    "size": _positive_int,
    "grid_lo": float,
    "grid_hi": float,
    "grid_step": float,
    "priors": _priors_type,
    "format": str,
    "input": str,
    "output": str,
    "train": str,
    "predicted": str,
}


class _Staged:
    """Collects output files in temporaries and renames them on commit."""

    def __init__(self) -> None:
        self._pending: list[tuple[str, Path]] = []

    def open(self, path: str | Path) -> TextIO:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
        self._pending.append((tmp, path))
        return os.fdopen(fd, "w", encoding="utf-8", newline="\n")

    def write(self, path: str | Path, text: str) -> None:
        with self.open(path) as fh:
            fh.write(text)

    def commit(self) -> None:
        for tmp, dest in self._pending:
            os.replace(tmp, dest)
        self._pending.clear()

    def discard(self) -> None:
        for tmp, _ in self._pending:
            try:
                os.unlink(tmp)
            except FileNotFoundError:
                pass
        self._pending.clear()


def _read_text(path: str | None) -> str:
    if not path:
        raise InputError("--input is required")
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _argmax_label(post: DiscretePosterior) -> str:
    return post.labels[int(np.argmax(post.probs))]


def _formats(cfg: argparse.Namespace, default: str) -> tuple[bool, bool]:
    fmt = cfg.format or default
    if fmt not in ("json", "svg", "both"):
        raise InputError(f"--format must be json, svg or both, got {fmt!r}")
    return fmt in ("json", "both"), fmt in ("svg", "both")


def _grid_overrides(cfg: argparse.Namespace) -> dict[str, float | None]:
    return {"lo": cfg.grid_lo, "hi": cfg.grid_hi, "step": cfg.grid_step}


def _fit(data, priors):
    """QDA fit; every fitting failure maps to the model-error exit status."""
    try:
        return fit_qda(data, priors)
    except InputError as exc:
        raise ModelError(f"QDA fit failed: {exc}") from exc


def cmd_compute(cfg: argparse.Namespace, out: _Staged) -> int:
    want_json, want_svg = _formats(cfg, "json")
    text = _read_text(cfg.input)
    grid_mode = any(v is not None for v in _grid_overrides(cfg).values())
    obj = loads(text) if text.lstrip()[:1] in ("{", "[") else None
    if isinstance(obj, list):
        obj = {"density": obj}
    if isinstance(obj, dict) and "density" in obj:
        grid_mode = True
    if grid_mode:
        if obj is None:
            raise InputError("grid mode needs a JSON density input")
        if want_svg:
            raise InputError("wheel output is not available for grid posteriors")
        gp = grid_from_json(obj, **_grid_overrides(cfg))
        post = grid_posterior(gp)
        phi = grid_ghpd(gp, cfg.alpha)
        record = phi_to_json(
            phi,
            post,
            grid={"lo": gp.lo, "hi": gp.hi, "step": gp.step},
            intervals=[list(iv) for iv in grid_intervals(gp, phi)],
            boundary_intervals=[list(iv) for iv in grid_intervals(gp, phi, "boundary")],
            boundary_mass=region_mass(post, phi),
        )
    else:
        if obj is not None:
            post = posterior_from_json(obj, normalized=not cfg.raw_weights)
        else:
            post = read_posterior(cfg.input, normalized=not cfg.raw_weights)
        phi = fair_ghpd(post, cfg.alpha)
        predicted = cfg.predicted or _argmax_label(post)
        record = phi_to_json(phi, post, prediction=predicted, posterior=post.as_dict())
    json_text = dumps(record) + "\n"

    if want_svg:
        if not cfg.output:
            raise InputError("--output is required for svg output")
        svg_path = Path(cfg.output)
        if want_json:
            svg_path = svg_path.with_suffix(".svg")
        wheel = build_wheel(predicted, phi, dashed_boundary=cfg.dashed)
        out.write(svg_path, render_svg(wheel, cfg.size))
    if want_json:
        if cfg.output:
            out.write(cfg.output, json_text)
        else:
            sys.stdout.write(json_text)
    return EXIT_OK


def _classify_rows(model, data, alpha: float, fh: TextIO | None, extra_fn):
    results = []
    for i, x in enumerate(data.features):
        post = posterior_at(model, x)
        predicted = _argmax_label(post)
        phi = fair_ghpd(post, alpha)
        results.append((predicted, phi))
        if fh is not None:
            rec = phi_to_json(
                phi, post, index=i, x=x.tolist(), prediction=predicted,
                posterior=post.as_dict(), **extra_fn(i),
            )
            fh.write(dumps(rec) + "\n")
    return results


def cmd_simulate(cfg: argparse.Namespace, out: _Staged) -> int:
    want_json, want_svg = _formats(cfg, "both")
    outdir = Path(cfg.output or ".")
    spec = SimulationSpec(per_class=cfg.per_class, seed=cfg.seed)
    data = simulate(spec)
    model = _fit(data, cfg.priors)
    out.write(outdir / "dataset.csv", dataset_to_csv(data))
    out.write(outdir / "model.json", dumps(model_to_json(model)) + "\n")
    fh = out.open(outdir / "phi.jsonl") if want_json else None
    try:
        results = _classify_rows(model, data, cfg.alpha, fh, lambda i: {"label": data.labels[i]})
    finally:
        if fh is not None:
            fh.close()
    if want_svg:
        points = [
            (x[0], x[1], build_wheel(pred, phi, dashed_boundary=cfg.dashed))
            for x, (pred, phi) in zip(data.features, results)
        ]
        out.write(outdir / "panel.svg", render_panel(points))
    log.info("simulated %d points into %s", data.n, outdir)
    return EXIT_OK


def cmd_classify(cfg: argparse.Namespace, out: _Staged) -> int:
    want_json, want_svg = _formats(cfg, "json")
    if not cfg.train:
        raise InputError("--train is required")
    if not cfg.input:
        raise InputError("--input is required")
    train = read_dataset_csv(cfg.train)
    test = read_dataset_csv(cfg.input)
    if train.d != test.d:
        raise InputError(f"training data has {train.d} features, test data has {test.d}")
    model = _fit(train, cfg.priors)
    outdir = Path(cfg.output or ".")
    out.write(outdir / "model.json", dumps(model_to_json(model)) + "\n")
    fh = out.open(outdir / "predictions.jsonl") if want_json else None
    try:
        results = _classify_rows(model, test, cfg.alpha, fh, lambda i: {"label": test.labels[i]})
    finally:
        if fh is not None:
            fh.close()
    if want_svg:
        for i, (pred, phi) in enumerate(results):
            wheel = build_wheel(pred, phi, dashed_boundary=cfg.dashed)
            out.write(outdir / "wheels" / f"row_{i:05d}.svg", render_svg(wheel, cfg.size))
    return EXIT_OK


def cmd_wheel(cfg: argparse.Namespace, out: _Staged) -> int:
    if not cfg.output:
        raise InputError("--output is required")
    obj = loads(_read_text(cfg.input))
    phi = phi_from_json(obj)
    post = posterior_from_record(obj)
    validate_phi(phi, post)
    predicted = cfg.predicted or obj.get("prediction")
    if predicted is None:
        predicted = _argmax_label(post) if post is not None else phi.labels[int(np.argmax(phi.values))]
    wheel = build_wheel(str(predicted), phi, dashed_boundary=cfg.dashed)
    out.write(cfg.output, render_svg(wheel, cfg.size))
    return EXIT_OK


COMMANDS = {
    "compute": cmd_compute,
    "simulate": cmd_simulate,
    "classify": cmd_classify,
    "wheel": cmd_wheel,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat 'key = value' file with default flag values")
    common.add_argument("--alpha", type=_alpha_type, help="one minus the credible level (default 0.05)")
    common.add_argument("--seed", type=_seed_type, help="64-bit seed (default 42)")
    common.add_argument("--input", help="input file")
    common.add_argument("--output", help="output file or directory")
    common.add_argument("--format", choices=("json", "svg", "both"))
    common.add_argument("--grid-lo", type=float)
    common.add_argument("--grid-hi", type=float)
    common.add_argument("--grid-step", type=float)
    common.add_argument("--per-class", type=_positive_int, help="samples per class (default 10)")
    common.add_argument("--priors", type=_priors_type, help="explicit priors, e.g. 'a=0.5,b=0.5'")
    common.add_argument("--predicted", help="hub label for wheel output")
    common.add_argument("--size", type=_positive_int, help="wheel SVG size in pixels (default 256)")
    common.add_argument("--dashed", action="store_true", help="dash boundary spokes")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="credset", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("compute", parents=[common], help="credible set for a posterior or grid density")
    p.add_argument("--raw-weights", action="store_true", help="normalize arbitrary nonnegative weights")
    sub.add_parser("simulate", parents=[common], help="three-class Gaussian simulation with wheel panel")
    c = sub.add_parser("classify", parents=[common], help="fit QDA on --train and classify --input")
    c.add_argument("--train", help="training dataset CSV")
    sub.add_parser("wheel", parents=[common], help="render a wheel SVG from a phi JSON record")
    return parser


def _apply_config(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    cfg_values: dict[str, str] = {}
    if args.config:
        cp = configparser.ConfigParser(interpolation=None)
        try:
            cp.read_string("[run]\n" + Path(args.config).read_text(encoding="utf-8"))
        except (OSError, configparser.Error) as exc:
            parser.error(f"cannot read config {args.config}: {exc}")
        cfg_values = {k.replace("-", "_"): v for k, v in cp["run"].items()}
    for key, raw in cfg_values.items():
        if key not in CONVERTERS:
            parser.error(f"unknown config key {key!r}")
        if getattr(args, key, None) is None:
            try:
                setattr(args, key, CONVERTERS[key](raw))
            except (argparse.ArgumentTypeError, ValueError) as exc:
                parser.error(f"config key {key}: {exc}")
    for key, value in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    for key in ("train", "raw_weights"):
        if not hasattr(args, key):
            setattr(args, key, None)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_config(parser, args)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    staged = _Staged()
    try:
        status = COMMANDS[args.command](args, staged)
        staged.commit()
        return status
    except InputError as exc:
        staged.discard()
        print(f"credset {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ModelError as exc:
        staged.discard()
        print(f"credset {args.command}: model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except BaseException:
        staged.discard()
        raise


if __name__ == "__main__":
    sys.exit(main())
