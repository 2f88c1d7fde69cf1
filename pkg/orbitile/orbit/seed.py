import logging
from typing import Callable

import numpy as np

from orbitile.orbit.window import OrbitWindow, Row, system_to_json
from orbitile.substitution.core import apply, require_valid, substitution_matrix
from orbitile.substitution.system import SubstitutionSystem
from orbitile.util.exceptions import NotExpansive, WindowTooNarrow

logger = logging.getLogger(__name__)

# (j_lo, letters) of an unclipped row -> global column range to keep
ColumnFilter = Callable[[int, tuple], tuple[int, int]]


def find_seed(sys_: SubstitutionSystem, max_power: int | None = None) -> tuple:
    """Smallest n, then first letter a, with a interior to σ^n(a).

    Returns ``(a, n, positions)`` where ``positions`` lists the interior
    occurrences of ``a`` in σ^n(a), leftmost first.
    """
    require_valid(sys_)
    max_power = max_power or 4 * sys_.size ** 2 + 4
    images = {a: (a,) for a in sys_.alphabet}
    for n in range(1, max_power + 1):
        images = {a: apply(sys_, images[a], 1) for a in sys_.alphabet}
        for a in sys_.alphabet:
            word = images[a]
            positions = [k for k in range(1, len(word) - 1) if word[k] == a]
            if positions:
                return a, n, positions
    raise NotExpansive(sys_.name)


def letter_counts(sys_: SubstitutionSystem, word) -> np.ndarray:
    counts = np.zeros(sys_.size, dtype=np.int64)
    for x in word:
        counts[sys_.index(x)] += 1
    return counts


def child_row(
    sys_: SubstitutionSystem,
    row: Row,
    keep: tuple[int, int] | ColumnFilter | None = None,
) -> tuple[Row, list]:
    """Row i+1 under σ and its parent map, optionally clipped to ``keep``.

    Column 0 of the new row is the first child of column 0 of ``row``.
    """
    matrix = substitution_matrix(sys_)
    origin = matrix @ np.asarray(row.origin, dtype=np.int64)
    base = int(origin.sum())

    images = [sys_.image(x) for x in row.letters]
    lengths = np.array([len(img) for img in images], dtype=np.int64)
    letters = tuple(x for img in images for x in img)
    parents = np.repeat(np.arange(row.j_lo, row.j_hi), lengths)

    lo, hi = base, base + len(letters)
    if callable(keep):
        keep = keep(base, letters)
    if keep is not None:
        lo, hi = max(keep[0], lo), min(keep[1], hi)
        if hi <= lo:
            raise WindowTooNarrow(f'row {row.i + 1} has no columns in {keep}')
    origin = origin + letter_counts(sys_, letters[:lo - base])
    child = Row(
        row.i + 1,
        lo,
        letters[lo - base:hi - base],
        (lo, hi),
        tuple(int(c) for c in origin),
    )
    return child, [int(p) for p in parents[lo - base:hi - base]]


def _complete_columns(sys_: SubstitutionSystem, row: Row, below: Row) -> tuple[int, int]:
    """Columns of ``row`` whose entire σ-image lies inside ``below``."""
    lengths = np.array([len(sys_.image(x)) for x in row.letters], dtype=np.int64)
    base = int((substitution_matrix(sys_) @ np.asarray(row.origin, dtype=np.int64)).sum())
    ends = np.cumsum(lengths) + base
    starts = ends - lengths
    inside = (starts >= below.j_lo) & (ends <= below.j_hi)
    columns = np.nonzero(inside)[0]
    if len(columns) == 0:
        return (row.j_lo, row.j_lo)
    return (row.j_lo + int(columns[0]), row.j_lo + int(columns[-1]) + 1)


def fixed_point_row(sys_: SubstitutionSystem, width: int, occurrence: int | None = None, i: int = 0):
    """Columns -width..width of a word fixed by σ^n through an interior occurrence.

    Returns the row and the seed description ``(a, n, k)``.
    """
    a, n, positions = find_seed(sys_)
    k = positions[occurrence or 0]
    word, anchor = apply(sys_, (a,), n), k
    while anchor < width or len(word) - anchor - 1 < width:
        prefix = apply(sys_, word[:anchor], n)
        word = apply(sys_, word, n)
        anchor = len(prefix) + k
    letters = tuple(word[anchor - width:anchor + width + 1])
    origin = -letter_counts(sys_, letters[:width])
    row = Row(i, -width, letters, (-width, width + 1), tuple(int(c) for c in origin))
    return row, (a, n, k)


def _assemble(sys_, rows, parents, seed, extra=None) -> OrbitWindow:
    for idx, row in enumerate(rows[:-1]):
        row.core = _complete_columns(sys_, row, rows[idx + 1])
    metadata = {
        'systems': {'a': system_to_json(sys_)},
        'seed': {'letter': str(seed[0]), 'power': seed[1], 'occurrence': seed[2]},
    }
    metadata.update(extra or {})
    return OrbitWindow(rows, parents, kind='base', system=sys_, metadata=metadata)


def seed_orbit(
    sys_: SubstitutionSystem,
    height: int,
    width_hint: int,
    top: int = 0,
    occurrence: int | None = None,
    full_rows: bool = False,
) -> OrbitWindow:
    """Window of an orbit through a letter fixed by a power of σ.

    The top row is a stretch of the σ^n-fixed word centred on the chosen
    interior occurrence of a, which sits at column 0; each lower row is σ of
    the row above. Rows are clipped to columns [-width_hint, width_hint]
    unless ``full_rows`` is set.
    """
    if height < 2:
        raise WindowTooNarrow('an orbit window needs at least two rows')
    top_row, seed = fixed_point_row(sys_, width_hint, occurrence, top)
    rows, parents = [top_row], []
    keep = None if full_rows else (-width_hint, width_hint + 1)
    for _ in range(height - 1):
        row, parent_map = child_row(sys_, rows[-1], keep)
        rows.append(row)
        parents.append(parent_map)

    logger.debug(
        'seeded %s at letter %s, power %d, occurrence %d: %d rows',
        sys_.name, seed[0], seed[1], seed[2], height,
        extra={'msg_type': 'ORBIT'},
    )
    return _assemble(sys_, rows, parents, seed)


def covering_orbit(
    sys_: SubstitutionSystem,
    height: int,
    weights: dict,
    rate: float,
    x_range: Callable[[int], tuple[float, float]],
    occurrence: int | None = None,
    top: int = 0,
) -> OrbitWindow:
    """Seeded window over rows top..top+height−1 whose row r keeps the cells meeting ``x_range(r)``.

    Cell (r, j) spans rate^-r times its signed weighted offset from column 0,
    so ``top`` may be negative. Ranges must shrink (weakly) from row to row so
    every kept cell has its parent kept.
    """
    weight_vec = np.array([weights[a] for a in sys_.alphabet], dtype=float)
    letter_weight = {a: weights[a] for a in sys_.alphabet}
    lo0, hi0 = x_range(top)
    width = int(np.ceil(max(abs(lo0), abs(hi0)) / (weight_vec.min() * rate ** -top))) + 2
    top_row, seed = fixed_point_row(sys_, width, occurrence, top)

    def clip_to(r: int, j_lo: int, letters: tuple, origin_x: float):
        lo, hi = x_range(r)
        widths = np.array([letter_weight[x] for x in letters]) * rate ** -r
        ends = origin_x + np.cumsum(widths)
        starts = ends - widths
        inside = np.nonzero((ends >= lo) & (starts <= hi))[0]
        if len(inside) == 0:
            raise WindowTooNarrow(f'row {r} does not meet {lo:.6g}..{hi:.6g}')
        return j_lo + int(inside[0]), j_lo + int(inside[-1]) + 1

    top_x = float(np.dot(top_row.origin, weight_vec)) * rate ** -top
    lo, hi = clip_to(top, top_row.j_lo, top_row.letters, top_x)
    origin = np.asarray(top_row.origin) + letter_counts(sys_, top_row.slice(top_row.j_lo, lo))
    rows = [Row(top, lo, top_row.slice(lo, hi), (lo, hi), tuple(int(c) for c in origin))]
    parents = []
    matrix = substitution_matrix(sys_)
    for r in range(top + 1, top + height):
        above = rows[-1]
        origin_x = float(np.dot(matrix @ np.asarray(above.origin), weight_vec)) * rate ** -r

        def keep(j_lo, letters, r=r, origin_x=origin_x):
            return clip_to(r, j_lo, letters, origin_x)

        row, parent_map = child_row(sys_, above, keep)
        rows.append(row)
        parents.append(parent_map)

    return _assemble(sys_, rows, parents, seed)
