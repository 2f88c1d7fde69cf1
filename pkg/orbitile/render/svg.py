"""SVG drawings of orbit windows in the horocyclic strip.

Cell (i, j) of a base window is drawn at x = c + e^d λ^-i P^i_j + S_i with
width e^d λ^-i |ω^i_j|_ν, on the horizontal line y = d − i log λ. SVG's
y axis points down, so the drawn y is −y · scale.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path

from lxml import etree

from orbitile.config import config
from orbitile.orbit.builder import RowPrefix, as_fraction, row_offsets
from orbitile.orbit.window import OrbitWindow
from orbitile.overlay.alphabet import project_alpha
from orbitile.substitution.core import distribution
from orbitile.util.exceptions import OrbitileError

logger = logging.getLogger(__name__)

SVG_NS = {
    None: 'http://www.w3.org/2000/svg',
    'xlink': 'http://www.w3.org/1999/xlink',
}


def svg_ns(tag: str) -> str:
    return '{%s}%s' % (SVG_NS[None], tag)


def floatystr(value: float) -> str:
    # fixed point without trailing zeros
    return ('%f' % value).rstrip('0').rstrip('.') or '0'


@dataclass(frozen=True)
class TileRect:
    label: object
    x: float
    y: float
    width: float
    height: float
    i: int
    j: int

    @property
    def right(self) -> float:
        return self.x + self.width


def _base_window(window: OrbitWindow) -> OrbitWindow:
    return project_alpha(window) if window.kind == 'overlay' else window


def tile_rects(window: OrbitWindow, c=0, d=0) -> list[TileRect]:
    """One rectangle per cell; the height of row i is log λ."""
    window = _base_window(window)
    if not window.rows or not any(window.rows):
        return []
    dist = distribution(window.system)
    lam = float(dist.lam)
    c, d = float(as_fraction(c)), as_fraction(d)
    offsets = [float(s) for s in row_offsets(window, dist, dist.lam, d)]
    e_d = math.exp(float(d))
    log_lam = math.log(lam)

    rects = []
    for row, shift in zip(window.rows, offsets):
        prefix = RowPrefix(row, dist)
        scale = e_d * lam ** (-row.i)
        for t, letter in enumerate(row.letters):
            left = c + scale * prefix.floats[t] + shift
            width = scale * (prefix.floats[t + 1] - prefix.floats[t])
            rects.append(TileRect(letter, left, float(d) - row.i * log_lam, width, log_lam, row.i, row.j_lo + t))
    return rects


def _close(a: float, b: float, rel: float) -> bool:
    return math.isclose(a, b, rel_tol=rel, abs_tol=rel)


def check_abutment(tiles: list[TileRect], window: OrbitWindow, rel: float = 1e-9) -> list:
    """Cells whose stored children do not exactly cover them, or rows with gaps."""
    window = _base_window(window)
    by_cell = {(t.i, t.j): t for t in tiles}
    failures = []
    for row in window.rows:
        for j in range(row.j_lo, row.j_hi - 1):
            left, right = by_cell[(row.i, j)], by_cell[(row.i, j + 1)]
            if not _close(left.right, right.x, rel):
                failures.append({'cell': [row.i, j], 'what': 'gap to right neighbour'})
        if row.i == window.i_hi:
            continue
        for j in range(*row.core):
            kids = window.children(row.i, j)
            if not kids:
                continue
            tile = by_cell[(row.i, j)]
            first, last = by_cell[(row.i + 1, kids.start)], by_cell[(row.i + 1, kids.stop - 1)]
            if not (_close(first.x, tile.x, rel) and _close(last.right, tile.right, rel)):
                failures.append({'cell': [row.i, j], 'what': 'children do not span the cell'})
    return failures


def _bounds(rects: list[TileRect]) -> tuple[float, float, float, float]:
    x_lo = min(r.x for r in rects)
    x_hi = max(r.right for r in rects)
    y_lo = min(r.y - r.height for r in rects)
    y_hi = max(r.y for r in rects)
    return x_lo, x_hi, y_lo, y_hi


def _draw(group, rects: list[TileRect], scale: float, style_of) -> None:
    for rect in rects:
        attrs = {
            'x': floatystr(rect.x * scale),
            'y': floatystr(-rect.y * scale),
            'width': floatystr(rect.width * scale),
            'height': floatystr(rect.height * scale),
            'style': style_of(rect),
        }
        node = etree.SubElement(group, svg_ns('rect'), attrs)
        etree.SubElement(node, svg_ns('title')).text = f'({rect.i}, {rect.j}) {rect.label}'


def render_tiling(
    window: OrbitWindow,
    c=0,
    d=0,
    style=None,
    overlay: OrbitWindow | None = None,
    overlay_c=None,
    overlay_d=None,
) -> etree._ElementTree:
    """The window as filled rectangles, with an optional stroke-only second tiling.

    The second tiling defaults to the offsets (c, −d), which puts it in the
    frame of the first one for an overlay pair.
    """
    style = style or config.get_render_params()
    rects = tile_rects(window, c, d)
    extra = []
    if overlay is not None:
        overlay_c = as_fraction(c) if overlay_c is None else overlay_c
        overlay_d = -as_fraction(d) if overlay_d is None else overlay_d
        extra = tile_rects(overlay, overlay_c, overlay_d)

    root = etree.Element(svg_ns('svg'), nsmap=SVG_NS)
    everything = rects + extra
    if everything:
        x_lo, x_hi, y_lo, y_hi = _bounds(everything)
        pad = 0.02 * max(x_hi - x_lo, y_hi - y_lo)
        x_lo, x_hi, y_lo, y_hi = x_lo - pad, x_hi + pad, y_lo - pad, y_hi + pad
    else:
        x_lo, x_hi, y_lo, y_hi = 0.0, 1.0, 0.0, 1.0
    s = style.scale
    width, height = (x_hi - x_lo) * s, (y_hi - y_lo) * s
    root.set('width', floatystr(width))
    root.set('height', floatystr(height))
    root.set('viewBox', ' '.join(floatystr(v) for v in (x_lo * s, -y_hi * s, width, height)))

    colors = style.fill_colors
    letters = {}
    for rect in rects:
        letters.setdefault(rect.label, len(letters))

    def primary(rect):
        fill = colors[letters[rect.label] % len(colors)]
        return f'fill:{fill};stroke:{style.stroke};stroke-width:{style.stroke_width}'

    def secondary(rect):
        return f'fill:none;stroke:{style.overlay_stroke};stroke-width:{style.stroke_width}'

    _draw(etree.SubElement(root, svg_ns('g'), {'id': 'tiling'}), rects, s, primary)
    if overlay is not None:
        _draw(etree.SubElement(root, svg_ns('g'), {'id': 'overlay'}), extra, s, secondary)
    logger.info('drew %d + %d tiles', len(rects), len(extra), extra={'msg_type': 'RENDER'})
    return etree.ElementTree(root)


def write_svg(tree: etree._ElementTree, path: str | Path | None = None) -> str:
    """Serialize ``tree``; also write it to ``path`` when given."""
    text = etree.tostring(tree, encoding='unicode', pretty_print=True)
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as err:
            raise OrbitileError(f'cannot write {path}: {err}') from err
    return text
