"""Deterministic SVG figures: phase portrait, image domain and sign of Re p.

The SVG is written by hand so that the output depends only on the numbers
plotted. Coordinates are data coordinates (``y`` flipped), formatted with
six significant digits.
"""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .grid import GridSpec
from .hyperbolic import ModelDomain

POSITIVE, NEGATIVE, NEUTRAL = "#2166ac", "#b2182b", "#999999"


def _f(x: float) -> str:
    s = f"{float(x):.6g}"
    return "0" if s == "-0" else s


class SVG:
    def __init__(self, xmin, xmax, ymin, ymax, title: str, size: int = 480):
        self.box = (xmin, xmax, ymin, ymax)
        self.title = title
        self.size = size
        self.items: list[str] = []
        self.unit = max(xmax - xmin, ymax - ymin) / 400

    def line(self, x1, y1, x2, y2, stroke="#000", width=1.0, cls=None):
        c = f' class="{cls}"' if cls else ""
        self.items.append(f'<line{c} x1="{_f(x1)}" y1="{_f(-y1)}" x2="{_f(x2)}" y2="{_f(-y2)}" '
                          f'stroke="{stroke}" stroke-width="{_f(width * self.unit)}"/>')

    def circle(self, cx, cy, r, fill="none", stroke="none", width=1.0, cls=None):
        c = f' class="{cls}"' if cls else ""
        self.items.append(f'<circle{c} cx="{_f(cx)}" cy="{_f(-cy)}" r="{_f(r)}" fill="{fill}" '
                          f'stroke="{stroke}" stroke-width="{_f(width * self.unit)}"/>')

    def polyline(self, xs, ys, stroke="#000", width=1.0, cls=None):
        c = f' class="{cls}"' if cls else ""
        pts = " ".join(f"{_f(x)},{_f(-y)}" for x, y in zip(xs, ys))
        self.items.append(f'<polyline{c} points="{pts}" fill="none" stroke="{stroke}" '
                          f'stroke-width="{_f(width * self.unit)}"/>')

    def text(self, x, y, content, size=12.0):
        self.items.append(f'<text x="{_f(x)}" y="{_f(-y)}" font-size="{_f(size * self.unit)}" '
                          f'font-family="sans-serif">{escape(content)}</text>')

    def axes(self):
        xmin, xmax, ymin, ymax = self.box
        self.line(xmin, 0, xmax, 0, "#bbb", cls="axis")
        self.line(0, ymin, 0, ymax, "#bbb", cls="axis")

    def render(self) -> str:
        xmin, xmax, ymin, ymax = self.box
        pad = 0.05 * max(xmax - xmin, ymax - ymin)
        vb = f"{_f(xmin - pad)} {_f(-ymax - pad)} {_f(xmax - xmin + 2 * pad)} {_f(ymax - ymin + 2 * pad)}"
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.size}" '
                f'height="{self.size}" viewBox="{vb}">')
        return "\n".join([head, f"<title>{escape(self.title)}</title>", *self.items, "</svg>"]) + "\n"


def phase_portrait(orbits, dw_point: complex | None = None,
                   title: str = "phase portrait") -> str:
    """Orbit polylines in the unit disc with the Denjoy-Wolff point marked."""
    svg = SVG(-1, 1, -1, 1, title)
    svg.axes()
    svg.circle(0, 0, 1, stroke="#000", cls="unit-circle")
    for z in orbits:
        z = np.asarray(z, dtype=complex)
        svg.polyline(z.real, z.imag, "#1b7837", cls="orbit")
        svg.circle(z[0].real, z[0].imag, 3 * svg.unit, fill="#1b7837", cls="start")
    if dw_point is not None:
        svg.circle(dw_point.real, dw_point.imag, 6 * svg.unit, fill="#d95f02", cls="denjoy-wolff")
    return svg.render()


def _window(domain: ModelDomain | None):
    if domain is None or domain.kind == "plane":
        return -4.0, 4.0, -4.0, 4.0
    if domain.kind == "strip":
        r = domain.rho
        return 0.0, r, -2 * r, 2 * r
    if domain.kind == "right":
        return 0.0, 4.0, -4.0, 4.0
    return -4.0, 0.0, -4.0, 4.0


def image_domain(h, domain: ModelDomain | None, grid: GridSpec = GridSpec(24, 48, 0.98),
                 arrows: int = 12, title: str = "image domain") -> str:
    """Samples of ``h`` on a disc grid with arrows ``w -> w + i``.

    Only the vertical extent is clipped to the window, so the horizontal
    position of every point is exactly ``Re h``.
    """
    xmin, xmax, ymin, ymax = _window(domain)
    svg = SVG(xmin, xmax, ymin, ymax, title)
    svg.axes()
    if domain is not None and domain.kind == "strip":
        svg.line(domain.rho, ymin, domain.rho, ymax, "#bbb", cls="boundary")
    if h is None:
        svg.text(xmin, ymax, "no Koenigs function")
        return svg.render()
    with np.errstate(all="ignore"):
        w = h.evaluate_array(grid.points())
    w = w[np.isfinite(w) & (w.imag >= ymin) & (w.imag <= ymax)]
    if domain is None or domain.kind == "plane":
        w = w[(w.real >= xmin) & (w.real <= xmax)]
    for p in w:
        svg.circle(p.real, p.imag, 1.5 * svg.unit, fill="#5e3c99", cls="sample")
    step = (ymax - ymin) / 10
    if len(w):
        for p in w[:: max(1, len(w) // arrows)][:arrows]:
            if p.imag + step <= ymax:
                svg.line(p.real, p.imag, p.real, p.imag + step, "#e66101", cls="translation")
    return svg.render()


def re_p_signs(p, grid: GridSpec = GridSpec(24, 48, 0.98), tol: float = 1e-9,
               title: str = "sign of Re p") -> str:
    """Grid points coloured by the sign of ``Re p``."""
    svg = SVG(-1, 1, -1, 1, title)
    svg.circle(0, 0, 1, stroke="#000", cls="unit-circle")
    if p is None:
        svg.text(-1, 1, "no Berkson-Porta factor")
        return svg.render()
    z = grid.points()
    with np.errstate(all="ignore"):
        re = p.evaluate_array(z).real
    for zi, v in zip(z, re):
        color = POSITIVE if v > tol else NEGATIVE if v < -tol else NEUTRAL
        svg.circle(zi.real, zi.imag, 2 * svg.unit, fill=color, cls="cell")
    return svg.render()


def write(path: Path, text: str) -> Path:
    path = Path(path)
    path.write_text(text)
    return path
