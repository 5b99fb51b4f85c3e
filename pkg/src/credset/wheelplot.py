"""Steering wheel plots: a hub colored by the predicted class, one spoke per
class whose length is that class's inclusion probability, and an outer rim
marking length 1.

Rendering is deterministic: coordinates are printed with 6 decimals, nothing
depends on time or platform, and the source credible set is embedded as JSON
inside an XML comment so it can be recovered from the file.
"""

from __future__ import annotations

import colorsys
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence
from xml.sax.saxutils import escape, quoteattr

from .core import Phi, validate_phi
from .errors import InputError
from .serialize import dumps, loads, phi_from_json, phi_to_json

__all__ = [
    "NAMED_COLORS",
    "DEFAULT_CYCLE",
    "HUB_FRACTION",
    "Palette",
    "Spoke",
    "WheelSpec",
    "build_wheel",
    "render_svg",
    "render_panel",
    "extract_phi",
]

NAMED_COLORS: dict[str, str] = {
    "red": "#ff0000",
    "green": "#008000",
    "blue": "#0000ff",
    "Spanish": "#ff0000",
    "French": "#008000",
    "German": "#0000ff",
    "Italian": "#000000",
    "British": "#ffa500",
    "American": "#800080",
}
DEFAULT_CYCLE: tuple[str, ...] = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#17becf",
)
HUB_FRACTION = 0.25
RIM_COLOR = "#9a9a9a"
META_TAG = "credset-phi"


def _extra_color(k: int) -> str:
    h = (k * 0.618033988749895) % 1.0
    r, g, b = colorsys.hls_to_rgb(h, 0.45, 0.75)
    return "#%02x%02x%02x" % (round(r * 255), round(g * 255), round(b * 255))


@dataclass(frozen=True)
class Palette:
    """Label-to-color map; colors must be distinct so the legend is unambiguous."""

    colors: Mapping[str, str]

    def __post_init__(self) -> None:
        colors = {str(k): str(v).lower() for k, v in dict(self.colors).items()}
        if len(set(colors.values())) != len(colors):
            raise InputError("palette assigns the same color to two labels")
        object.__setattr__(self, "colors", colors)

    @classmethod
    def default(cls, labels: Sequence[str]) -> "Palette":
        """Named colors where a label has one, then the fixed cycle in label order.

        Past eight labels, extra hues are spaced by the golden angle.
        """
        labels = list(dict.fromkeys(str(lab) for lab in labels))
        colors: dict[str, str] = {}
        for lab in labels:
            c = NAMED_COLORS.get(lab)
            if c is not None and c not in colors.values():
                colors[lab] = c
        spare = (c for c in DEFAULT_CYCLE if c not in colors.values())
        k = 0
        for lab in labels:
            if lab in colors:
                continue
            c = next(spare, None)
            while c is None or c in colors.values():
                c = _extra_color(k)
                k += 1
            colors[lab] = c
        return cls({lab: colors[lab] for lab in labels})

    def __getitem__(self, label: str) -> str:
        try:
            return self.colors[label]
        except KeyError:
            raise InputError(f"palette has no color for label {label!r}") from None


@dataclass(frozen=True)
class Spoke:
    label: str
    length: float
    color: str


@dataclass(frozen=True)
class WheelSpec:
    hub_label: str
    hub_color: str
    spokes: tuple[Spoke, ...]
    gamma: float
    phi: Phi = field(repr=False, compare=False)
    rim_radius: float = 1.0
    dashed_boundary: bool = False


def build_wheel(
    predicted: str,
    phi: Phi,
    palette: Palette | None = None,
    *,
    rim_radius: float = 1.0,
    dashed_boundary: bool = False,
) -> WheelSpec:
    """One spoke per label, in label order, with length equal to its membership value."""
    predicted = str(predicted)
    if predicted not in phi.labels:
        raise InputError(f"predicted label {predicted!r} is not among {list(phi.labels)}")
    if not any(v > 0 for v in phi.values):
        raise InputError("credible set has no positive membership; cannot draw a wheel")
    if not rim_radius > 0:
        raise InputError("rim radius must be positive")
    palette = palette or Palette.default(phi.labels)
    spokes = tuple(Spoke(lab, float(v), palette[lab]) for lab, v in zip(phi.labels, phi.values))
    return WheelSpec(
        hub_label=predicted,
        hub_color=palette[predicted],
        spokes=spokes,
        gamma=phi.gamma,
        phi=phi,
        rim_radius=float(rim_radius),
        dashed_boundary=dashed_boundary,
    )


def _f(x: float) -> str:
    s = "%.6f" % x
    return "0.000000" if s == "-0.000000" else s


def _meta_comment(phi: Phi, predicted: str) -> str:
    text = dumps(phi_to_json(phi, prediction=predicted))
    # "--" may not appear inside an XML comment; only string contents can hold it
    text = text.replace("--", "-\\u002d")
    return f"<!-- {META_TAG} {text} -->"


def _wheel_elements(w: WheelSpec, cx: float, cy: float, rim: float) -> list[str]:
    hub = HUB_FRACTION * rim
    width = max(1.0, 0.08 * rim)
    out = [
        f'<circle class="rim" cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(rim)}" fill="none" '
        f'stroke="{RIM_COLOR}" stroke-width="{_f(max(1.0, 0.03 * rim))}"/>'
    ]
    n = len(w.spokes)
    boundary = set(w.phi.boundary)
    for k, s in enumerate(w.spokes):
        if s.length <= 0:
            continue
        theta = 2.0 * math.pi * k / n
        dx, dy = math.sin(theta), -math.cos(theta)
        r_end = hub + s.length * (rim - hub)
        dash = ""
        if w.dashed_boundary and s.label in boundary and s.length < 1:
            dash = f' stroke-dasharray="{_f(2 * width)},{_f(width)}"'
        out.append(
            f"<line class=\"spoke\" data-label={quoteattr(s.label)} "
            f'x1="{_f(cx + hub * dx)}" y1="{_f(cy + hub * dy)}" '
            f'x2="{_f(cx + r_end * dx)}" y2="{_f(cy + r_end * dy)}" '
            f'stroke="{s.color}" stroke-width="{_f(width)}" stroke-linecap="round"{dash}/>'
        )
    out.append(
        f'<circle class="hub" data-label={quoteattr(w.hub_label)} cx="{_f(cx)}" cy="{_f(cy)}" '
        f'r="{_f(hub)}" fill="{w.hub_color}"/>'
    )
    return out


def _header(width: int, height: int) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
    ]


def render_svg(w: WheelSpec, size_px: int = 256) -> str:
    """Standalone SVG of one wheel; the rim fills 90% of the square canvas."""
    if int(size_px) != size_px or size_px < 32:
        raise InputError("size_px must be an integer of at least 32")
    size_px = int(size_px)
    c = size_px / 2.0
    lines = _header(size_px, size_px)
    lines.append(_meta_comment(w.phi, w.hub_label))
    lines.append(f"<title>{escape(w.hub_label)}</title>")
    lines.append('<g class="wheel">')
    lines.extend(_wheel_elements(w, c, c, 0.45 * size_px))
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _auto_bounds(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float, float, float]:
    def pad(lo: float, hi: float) -> tuple[float, float]:
        span = hi - lo
        if span <= 0:
            return lo - 1.0, hi + 1.0
        return lo - 0.08 * span, hi + 0.08 * span

    return (*pad(min(xs), max(xs)), *pad(min(ys), max(ys)))


def render_panel(
    points: Sequence[tuple[float, float, WheelSpec]],
    bounds: tuple[float, float, float, float] | None = None,
    *,
    width: int = 800,
    height: int = 800,
    wheel_px: float = 22.0,
) -> str:
    """Scatter of wheels placed at data coordinates.

    ``bounds`` is ``(xmin, xmax, ymin, ymax)`` in data units, computed from the
    points with 8% padding when omitted. Wheels are drawn in input order, so a
    later wheel sits on top of an earlier one at the same location. Each
    wheel's rim spans ``wheel_px * rim_radius`` pixels.
    """
    if not points:
        raise InputError("render_panel needs at least one point")
    xs = [float(p[0]) for p in points]
    ys = [float(p[1]) for p in points]
    if bounds is None:
        bounds = _auto_bounds(xs, ys)
    xmin, xmax, ymin, ymax = (float(b) for b in bounds)
    if not (xmax > xmin and ymax > ymin):
        raise InputError("bounds must satisfy xmin < xmax and ymin < ymax")
    margin = 2.0 * wheel_px
    sx = (width - 2 * margin) / (xmax - xmin)
    sy = (height - 2 * margin) / (ymax - ymin)
    lines = _header(width, height)
    lines.append(
        f'<rect class="frame" x="{_f(margin)}" y="{_f(margin)}" width="{_f(width - 2 * margin)}" '
        f'height="{_f(height - 2 * margin)}" fill="none" stroke="#cccccc" stroke-width="1.000000"/>'
    )
    for i, (x, y, w) in enumerate(zip(xs, ys, (p[2] for p in points))):
        px = margin + (x - xmin) * sx
        py = height - margin - (y - ymin) * sy
        lines.append(f'<g class="wheel" data-index="{i}">')
        lines.append(_meta_comment(w.phi, w.hub_label))
        lines.extend(_wheel_elements(w, px, py, wheel_px * w.rim_radius))
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def extract_phi(svg: str) -> list[Phi]:
    """Credible sets embedded in an SVG produced by this module, in document order."""
    marker = f"<!-- {META_TAG} "
    out = []
    pos = svg.find(marker)
    while pos >= 0:
        end = svg.index(" -->", pos)
        phi = phi_from_json(loads(svg[pos + len(marker) : end]))
        validate_phi(phi)
        out.append(phi)
        pos = svg.find(marker, end)
    return out
