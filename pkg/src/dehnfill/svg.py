"""Minimal SVG 1.1 writer for the figures.

Shapes are given in mathematical coordinates (y up); the writer flips y
and fits the viewBox to the content with a 5% margin.  Output is
deterministic: the only line that may change between releases is the
version comment.
"""

import json
import math
from xml.sax.saxutils import escape, quoteattr

from . import __version__

MARGIN = 0.05


def _num(x):
    return format(float(x), ".6g")


def _attrs(style):
    return "".join(f" {k.replace('_', '-')}={quoteattr(str(v))}" for k, v in sorted(style.items()))


class Figure:
    """Collects shapes, tracks the bounding box, renders one SVG document."""

    def __init__(self, title=""):
        self.title = title
        self.items = []
        self.metadata = {}
        self.xmin = self.ymin = math.inf
        self.xmax = self.ymax = -math.inf

    def _grow(self, x, y, pad=0.0):
        self.xmin = min(self.xmin, x - pad)
        self.xmax = max(self.xmax, x + pad)
        self.ymin = min(self.ymin, y - pad)
        self.ymax = max(self.ymax, y + pad)

    def circle(self, center, r, **style):
        center = complex(center)
        self._grow(center.real, center.imag, r)
        self.items.append(("circle", f'cx="{_num(center.real)}" cy="{_num(-center.imag)}" r="{_num(r)}"', style))

    def _points(self, pts):
        pts = [complex(p) for p in pts]
        for p in pts:
            self._grow(p.real, p.imag)
        return " ".join(f"{_num(p.real)},{_num(-p.imag)}" for p in pts)

    def polyline(self, pts, **style):
        style.setdefault("fill", "none")
        self.items.append(("polyline", f'points="{self._points(pts)}"', style))

    def polygon(self, pts, **style):
        self.items.append(("polygon", f'points="{self._points(pts)}"', style))

    def line(self, a, b, **style):
        a, b = complex(a), complex(b)
        self._grow(a.real, a.imag)
        self._grow(b.real, b.imag)
        geom = f'x1="{_num(a.real)}" y1="{_num(-a.imag)}" x2="{_num(b.real)}" y2="{_num(-b.imag)}"'
        self.items.append(("line", geom, style))

    def text(self, at, label, **style):
        at = complex(at)
        self._grow(at.real, at.imag)
        self.items.append(("text", f'x="{_num(at.real)}" y="{_num(-at.imag)}"', style, label))

    def render(self):
        if not self.items:
            self._grow(0.0, 0.0, 1.0)
        w = max(self.xmax - self.xmin, 1e-9)
        h = max(self.ymax - self.ymin, 1e-9)
        mx, my = MARGIN * w, MARGIN * h
        box = (self.xmin - mx, -self.ymax - my, w + 2 * mx, h + 2 * my)
        # font and stroke sizes scale with the figure
        unit = 0.002 * max(w, h)
        out = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f"<!-- dehnfill {__version__} -->",
            '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'viewBox="{" ".join(_num(v) for v in box)}" width="800" height="{_num(800 * box[3] / box[2])}">',
        ]
        if self.title:
            out.append(f"<title>{escape(self.title)}</title>")
        if self.metadata:
            out.append(f"<metadata>{escape(json.dumps(self.metadata, sort_keys=True))}</metadata>")
        out.append(f'<g stroke-width="{_num(unit)}" font-size="{_num(12 * unit)}">')
        for item in self.items:
            tag, geom, style = item[:3]
            if tag == "text":
                out.append(f"<text {geom}{_attrs(style)}>{escape(item[3])}</text>")
            else:
                out.append(f"<{tag} {geom}{_attrs(style)}/>")
        out.append("</g>")
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.render())
