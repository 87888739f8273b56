"""SVG and text pictures of the construction levels, and sweep CSV output.

All coordinates are exact values pushed through :func:`to_decimal`, so the
bytes produced depend on nothing but the inputs.
"""

from __future__ import annotations

import csv
import io
from bisect import bisect_right
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Optional

from .exactnum import QuadValue, to_decimal
from .geometry import MAX_DEPTH, DepthError, families, gap_census, level_cover
from .series import SeriesSpec

HIGHLIGHTS = ("none", "census", "families")
FORMATS = ("svg", "txt")
CSV_HEADER = ("q", "class", "outcome", "certificate", "steps")

_MARGIN = 10
_BAR = 12
_STEP = 20
_PLACES = 3


@dataclass(frozen=True)
class RenderSpec:
    depth: int
    width: Optional[int] = None  # pixels for svg, columns for txt
    height: Optional[int] = None
    highlight: str = "none"
    family: int = 1
    format: str = "svg"

    def __post_init__(self):
        if not 0 <= self.depth <= MAX_DEPTH:
            raise DepthError(f"depth {self.depth} outside 0..{MAX_DEPTH}")
        if self.highlight not in HIGHLIGHTS:
            raise ValueError(f"highlight must be one of {HIGHLIGHTS}")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")
        if self.family < 1:
            raise ValueError("family index starts at 1")
        if self.width is not None and self.width < 8:
            raise ValueError("width too small")

    @property
    def columns(self) -> int:
        return self.width or (81 if self.format == "txt" else 800)


def parse_highlight(text: str) -> tuple[str, int]:
    """Read ``none``, ``census``, ``families`` or ``families(n)``."""
    text = text.strip()
    if text.startswith("families(") and text.endswith(")"):
        return "families", int(text[len("families(") : -1])
    if text == "families":
        return "families", 1
    if text in HIGHLIGHTS:
        return text, 1
    raise ValueError(f"unknown highlight {text!r}")


def letters(i: int) -> str:
    """A, B, ..., Z, AA, AB, ..."""
    out = ""
    i += 1
    while i:
        i, rem = divmod(i - 1, 26)
        out = chr(65 + rem) + out
    return out


def _highlighted(s: SeriesSpec, spec: RenderSpec):
    if spec.highlight == "census":
        return [(None, g) for g in gap_census(level_cover(s, spec.depth))]
    if spec.highlight == "families":
        gaps = families(s, spec.family)[2]
        return [(letters(i), g.interval) for i, g in enumerate(gaps)]
    return []


def render_levels(s: SeriesSpec, spec: RenderSpec) -> bytes:
    covers = [level_cover(s, n).intervals for n in range(spec.depth + 1)]
    marks = _highlighted(s, spec)
    if spec.format == "txt":
        return _render_txt(s, spec, covers, marks)
    return _render_svg(s, spec, covers, marks)


# -- svg -------------------------------------------------------------------


def _dec(x) -> Decimal:
    return Decimal(to_decimal(x, _PLACES))


def _render_svg(s, spec, covers, marks) -> bytes:
    W = spec.columns
    r0 = s.remainder(0)
    scale = QuadValue(W - 2 * _MARGIN) / r0
    label_band = _STEP + _BAR if marks else 0
    H = spec.height or (2 * _MARGIN + _STEP * len(covers) + label_band)

    def x(v) -> Decimal:
        return _dec(scale * v + _MARGIN)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
    ]
    for level, ivs in enumerate(covers):
        y = _MARGIN + _STEP * level
        for iv in ivs:
            lo, hi = x(iv.lo), x(iv.hi)
            lines.append(
                f'<rect x="{lo}" y="{y}" width="{hi - lo}" height="{_BAR}" fill="#222222"/>'
            )
    if marks:
        y = _MARGIN + _STEP * len(covers)
        for label, g in marks:
            lo, hi = x(g.lo), x(g.hi)
            lines.append(
                f'<line x1="{lo}" y1="{y}" x2="{hi}" y2="{y}" stroke="#cc0000" stroke-width="2"/>'
            )
            if label:
                mid = (lo + hi) / 2
                lines.append(
                    f'<text x="{mid.quantize(Decimal("0.001"))}" y="{y + _BAR + 2}" '
                    f'font-size="10" text-anchor="middle">{label}</text>'
                )
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("ascii")


# -- text ------------------------------------------------------------------


def _render_txt(s, spec, covers, marks) -> bytes:
    cols = spec.columns
    r0 = s.remainder(0)
    centres = [r0 * Fraction(2 * c + 1, 2 * cols) for c in range(cols)]
    rows = []
    for ivs in covers:
        los = [iv.lo for iv in ivs]
        row = []
        for p in centres:
            i = bisect_right(los, p) - 1
            row.append("#" if i >= 0 and p <= ivs[i].hi else " ")
        rows.append("".join(row).rstrip())
    if marks:
        row = [" "] * cols
        for label, g in marks:
            mid = (g.lo + g.hi) / 2
            c = min(cols - 1, int(to_decimal(mid / r0 * cols, 1).split(".")[0]))
            for k, ch in enumerate(label or "^"):
                if c + k < cols:
                    row[c + k] = ch
        rows.append("".join(row).rstrip())
    return ("\n".join(rows) + "\n").encode("ascii")


# -- csv -------------------------------------------------------------------


def _field(row, name):
    if isinstance(row, dict):
        return row.get(name, "")
    return getattr(row, "cls" if name == "class" else name, "")


def emit_csv(rows: Iterable) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        q = _field(row, "q")
        w.writerow(
            [
                to_decimal(q, 12),
                _field(row, "class"),
                _field(row, "outcome") or "",
                _field(row, "certificate") or "",
                _field(row, "steps"),
            ]
        )
    return buf.getvalue().encode("ascii")
