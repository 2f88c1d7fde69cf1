"""Explicit overlay orbits.

Row i of the 𝒜-orbit is laid over row Δ_i of the ℬ-orbit, where
γ^Δ_i ≤ e^d λ^i < γ^(Δ_i+1). In that frame the left edge of cell (i, j)
sits at e^-d U^i_j + c with U^i_j = λ^-i |u^i(0…j)|_ν, and the ℬ-cell
(Δ, k) spans γ^-Δ [|v^Δ(0…k)|_η, |v^Δ(0…k+1)|_η]. ∇^i_j is the ℬ-cell
holding that edge. Every decision is an exact comparison; floats only
propose candidates.
"""

import logging
from fractions import Fraction

import numpy as np

from orbitile.config import config
from orbitile.orbit.seed import covering_orbit, letter_counts, seed_orbit
from orbitile.orbit.window import GeometryRow, OrbitWindow, Row, system_from_json, system_to_json
from orbitile.overlay.alphabet import OverlaySystem, compute_K, enumerate_alphabet
from orbitile.overlay.letter import OverlayLetter
from orbitile.substitution.adaptive_real import AdaptiveReal
from orbitile.substitution.core import Distribution
from orbitile.util.exceptions import (
    DegenerateOffset,
    OrbitileError,
    WindowTooNarrow,
    WindowValidationError,
)

logger = logging.getLogger(__name__)


def as_fraction(value) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(str(value))


def delta_sequence(
    lam: AdaptiveReal,
    gam: AdaptiveReal,
    d,
    i_lo: int,
    i_hi: int,
    K: int | None = None,
    reject_ties: bool | None = None,
) -> tuple[list[int], list[int]]:
    """Δ_i for i_lo..i_hi and δ_i = Δ_(i+1) − Δ_i for i_lo..i_hi−1."""
    d = as_fraction(d)
    if reject_ties is None:
        reject_ties = config.get_orbit_params().reject_row_ties
    K = K if K is not None else compute_K(lam, gam)
    e_d = AdaptiveReal.from_rational(d).exp()
    log_ratio = np.log(float(lam)) / np.log(float(gam))

    Deltas = []
    for i in range(i_lo, i_hi + 1):
        height = e_d * lam ** i
        Delta = int(np.floor((float(d) + i * np.log(float(lam))) / np.log(float(gam))))
        while True:
            low = (gam ** Delta).compare(height)
            if low > 0:
                Delta -= 1
                continue
            if (gam ** (Delta + 1)).compare(height) <= 0:
                Delta += 1
                continue
            break
        if low == 0 and reject_ties:
            raise DegenerateOffset(f'row {i}: γ^{Delta} = e^d λ^{i}')
        Deltas.append(Delta)

    deltas = [b - a for a, b in zip(Deltas, Deltas[1:])]
    for i, delta in zip(range(i_lo, i_hi), deltas):
        if delta not in (K - 1, K):
            raise OrbitileError(f'δ_{i} = {delta} is outside {{{K - 1}, {K}}}')
    logger.debug('Δ = %s (log λ / log γ ≈ %.6f)', Deltas, log_ratio)
    return Deltas, deltas


class RowPrefix:
    """Signed weighted offsets of the column boundaries of one row.

    Entry t is the boundary at column ``j_lo + t``; entry 0 comes from the
    row's origin counts, so column 0 need not be stored.
    """

    def __init__(self, row: Row, dist: Distribution):
        sys_ = dist.system
        self.row = row
        self.terms = [dist.weights[a] for a in sys_.alphabet]
        one_hot = np.zeros((len(row.letters), sys_.size), dtype=np.int64)
        for t, x in enumerate(row.letters):
            one_hot[t, sys_.index(x)] = 1
        start = np.asarray(row.origin, dtype=np.int64)[np.newaxis, :]
        self.counts = np.concatenate((start, start + np.cumsum(one_hot, axis=0)))
        weights = np.array([float(w) for w in self.terms])
        self.floats = self.counts @ weights

    @property
    def lo(self) -> int:
        return self.row.j_lo

    @property
    def hi(self) -> int:
        return self.row.j_hi

    def exact(self, j: int) -> AdaptiveReal:
        return AdaptiveReal.linear_combination(
            [int(c) for c in self.counts[j - self.lo]], self.terms
        )


class OverlayGeometry:
    """Offsets (c, d) of an 𝒜-window over a ℬ-window."""

    def __init__(self, ov: OverlaySystem, orbit_a: OrbitWindow, orbit_b: OrbitWindow, c, d, params=None):
        self.ov = ov
        self.orbit_a = orbit_a
        self.orbit_b = orbit_b
        self.c = as_fraction(c)
        self.d = as_fraction(d)
        self.params = params or config.get_orbit_params()
        for window in (orbit_a, orbit_b):
            for row in window.rows:
                if row.origin is None:
                    raise WindowTooNarrow(f'row {row.i} has no origin counts')

        self.Deltas, self.deltas = delta_sequence(
            ov.lam, ov.gam, self.d, orbit_a.i_lo, orbit_a.i_hi, ov.K, self.params.reject_row_ties
        )
        if self.Deltas[0] < orbit_b.i_lo or self.Deltas[-1] > orbit_b.i_hi:
            raise WindowTooNarrow(
                f'ℬ rows {orbit_b.i_lo}..{orbit_b.i_hi} do not cover Δ = {self.Deltas[0]}..{self.Deltas[-1]}'
            )
        self.e_minus_d = AdaptiveReal.from_rational(-self.d).exp()
        self._a_prefix = {}
        self._b_prefix = {}
        self._nabla = {}
        self._ties = 0

    def Delta(self, i: int) -> int:
        return self.Deltas[i - self.orbit_a.i_lo]

    def delta(self, i: int) -> int:
        return self.deltas[i - self.orbit_a.i_lo]

    def a_prefix(self, i: int) -> RowPrefix:
        if i not in self._a_prefix:
            self._a_prefix[i] = RowPrefix(self.orbit_a.row(i), self.ov.nu)
        return self._a_prefix[i]

    def b_prefix(self, r: int) -> RowPrefix:
        if r not in self._b_prefix:
            self._b_prefix[r] = RowPrefix(self.orbit_b.row(r), self.ov.eta)
        return self._b_prefix[r]

    def U(self, i: int, j: int) -> AdaptiveReal:
        return self.ov.lam ** (-i) * self.a_prefix(i).exact(j)

    def V(self, i: int, k: int) -> AdaptiveReal:
        Delta = self.Delta(i)
        return self.ov.gam ** (-Delta) * self.b_prefix(Delta).exact(k)

    def nabla_row(self, i: int) -> dict:
        """∇^i_j for every boundary j of 𝒜-row i that the ℬ-row covers."""
        if i in self._nabla:
            return self._nabla[i]
        lam, gam = self.ov.lam, self.ov.gam
        Delta = self.Delta(i)
        a, b = self.a_prefix(i), self.b_prefix(Delta)
        scale = self.e_minus_d * lam ** (-i) * gam ** Delta
        shift = AdaptiveReal.from_rational(self.c) * gam ** Delta

        approx = float(scale) * a.floats + float(shift)
        guesses = np.searchsorted(b.floats, approx, side='right') - 1 + b.lo
        result = {}
        for t, guess in enumerate(guesses):
            j = a.lo + t
            target = scale * a.exact(j) + shift
            nabla = self._certify(target, int(guess), b, (i, j))
            if nabla is not None:
                result[j] = nabla
        self._nabla[i] = result
        return result

    def _certify(self, target: AdaptiveReal, k: int, b: RowPrefix, where) -> int | None:
        """The k with Q_k ≤ target ≤ Q_(k+1) inside the stored row, or None."""
        for _ in range(len(b.floats) + 2):
            if k < b.lo or k + 1 > b.hi:
                return None
            below = b.exact(k).compare(target)
            if below > 0:
                k -= 1
                continue
            above = target.compare(b.exact(k + 1))
            if above > 0:
                k += 1
                continue
            if below == 0 or above == 0:
                self._ties += 1
                if not self.params.resolve_ties_leftward:
                    raise DegenerateOffset(f'cell {where}: e^-d U + c meets a ℬ-tile edge')
                k = k - 1 if below == 0 else k
                return k if k >= b.lo else None
            return k
        return None

    def first_descendant(self, r: int, k: int, steps: int) -> int | None:
        for step in range(steps):
            row = self.orbit_b.row(r + step)
            if not row.in_core(k) or r + step + 1 > self.orbit_b.i_hi:
                return None
            k = self.orbit_b.children(r + step, k).start
        return k


def build_overlay_orbit(
    ov: OverlaySystem,
    orbit_a: OrbitWindow,
    orbit_b: OrbitWindow,
    c,
    d,
    params=None,
) -> OrbitWindow:
    """Overlay window over rows i_lo..i_hi−1 of ``orbit_a``."""
    geom = OverlayGeometry(ov, orbit_a, orbit_b, c, d, params)
    i_lo, i_hi = orbit_a.i_lo, orbit_a.i_hi
    if i_hi - i_lo < 1:
        raise WindowTooNarrow('the 𝒜-window needs a row below the last overlay row')

    cells = {}
    for i in range(i_lo, i_hi):
        cells[i] = _row_letters(geom, i)
        if not cells[i]:
            raise WindowTooNarrow(f'overlay row {i} has no computable cells')

    rows, geometry = [], []
    for i in range(i_lo, i_hi):
        lo, hi = _longest_run(cells[i])
        a_row = orbit_a.row(i)
        origin = np.asarray(a_row.origin) + letter_counts(ov.sys_a, a_row.slice(a_row.j_lo, lo))
        letters = tuple(cells[i][j] for j in range(lo, hi))
        rows.append(Row(i, lo, letters, (lo, hi), tuple(int(x) for x in origin)))

        nablas = geom.nabla_row(i)
        Delta = geom.Delta(i)
        js = range(lo, hi + 1)
        geometry.append(
            GeometryRow(
                i,
                Delta,
                geom.delta(i),
                lo,
                [nablas[j] for j in js],
                [geom.U(i, j) for j in js],
                [geom.V(i, nablas[j]) for j in js],
                [geom.V(i, nablas[j] + 1) for j in js],
            )
        )

    parents = []
    for upper, lower in zip(rows, rows[1:]):
        parents.append([orbit_a.parent(lower.i, j) for j in range(lower.j_lo, lower.j_hi)])
        upper.core = _overlay_core(orbit_a, upper, lower)

    window = OrbitWindow(
        rows,
        parents,
        kind='overlay',
        system=ov,
        geometry=geometry,
        metadata={
            'systems': {'a': system_to_json(ov.sys_a), 'b': system_to_json(ov.sys_b)},
            'c': str(geom.c),
            'd': str(geom.d),
            'K': ov.K,
            'N': ov.N,
            'seeds': {
                'a': orbit_a.metadata.get('seed'),
                'b': orbit_b.metadata.get('seed'),
            },
            'row_offsets': _offsets_metadata(orbit_a, ov, geom.d, len(rows)),
            'ties_resolved': geom._ties,
        },
    )
    logger.info(
        'overlay orbit of %s over %s at c=%s d=%s: %d rows, %d cells',
        ov.sys_a.name, ov.sys_b.name, geom.c, geom.d, len(rows),
        sum(len(r) for r in rows),
        extra={'msg_type': 'ORBIT'},
    )
    return window


def _offsets_metadata(orbit_a: OrbitWindow, ov: OverlaySystem, d, count: int) -> list | None:
    """S_i of the first ``count`` rows as 50-digit strings; None when column 0 is clipped away."""
    try:
        offsets = row_offsets(orbit_a, ov.nu, ov.lam, d)
    except WindowTooNarrow:
        return None
    return [s.to_decimal(50) for s in offsets[:count]]


def _row_letters(geom: OverlayGeometry, i: int) -> dict:
    ov, orbit_a, orbit_b = geom.ov, geom.orbit_a, geom.orbit_b
    a_row = orbit_a.row(i)
    here, below = geom.nabla_row(i), geom.nabla_row(i + 1)
    Delta, delta = geom.Delta(i), geom.delta(i)
    b_here, b_below = orbit_b.row(Delta), orbit_b.row(Delta + delta)

    starts = {}

    def start(j):
        """(m_j, ∇^(i+1)_(n_j)) for the left boundary of cell j, or None."""
        if j not in starts:
            starts[j] = None
            if j in here and a_row.in_core(j) and j in a_row:
                m = geom.first_descendant(Delta, here[j], delta)
                n = orbit_a.children(i, j).start
                if m is not None and n in below:
                    starts[j] = (m, below[n])
        return starts[j]

    letters = {}
    for j in range(a_row.j_lo, a_row.j_hi):
        if j + 1 not in here or start(j) is None or start(j + 1) is None:
            continue
        (m, nabla_child), (m_next, nabla_child_next) = start(j), start(j + 1)
        if not (m <= nabla_child and m_next <= nabla_child_next):
            raise WindowValidationError(f'cell ({i}, {j}): children start before ς^δ(β₁)')
        if here[j] < b_here.j_lo or here[j + 1] > b_here.j_hi:
            continue
        if nabla_child_next > b_below.j_hi:
            continue
        letters[j] = OverlayLetter(
            a_row.at(j),
            b_here.slice(here[j], here[j + 1]),
            b_below.slice(m, nabla_child),
            b_below.slice(m_next, nabla_child_next),
            delta,
        )
    return letters


def _longest_run(cells: dict) -> tuple[int, int]:
    columns = sorted(cells)
    best, run_start = (columns[0], columns[0] + 1), columns[0]
    for prev, cur in zip(columns, columns[1:] + [None]):
        if cur != prev + 1:
            if prev + 1 - run_start > best[1] - best[0]:
                best = (run_start, prev + 1)
            run_start = cur
    return best


def _overlay_core(orbit_a: OrbitWindow, upper: Row, lower: Row) -> tuple[int, int]:
    a_row = orbit_a.row(upper.i)
    complete = [
        j
        for j in range(upper.j_lo, upper.j_hi)
        if a_row.in_core(j)
        and lower.j_lo <= orbit_a.children(upper.i, j).start
        and orbit_a.children(upper.i, j).stop <= lower.j_hi
    ]
    if not complete:
        return (upper.j_lo, upper.j_lo)
    return (complete[0], complete[-1] + 1)


def overlay_orbit(ov: OverlaySystem, rows: int, c=None, d=None, width: int | None = None) -> OrbitWindow:
    """Seed both systems wide enough and build ``rows`` overlay rows."""
    params = config.get_orbit_params()
    c = as_fraction(c if c is not None else params.default_c)
    d = as_fraction(d if d is not None else params.default_d)
    width = width or params.default_width

    orbit_a = seed_orbit(ov.sys_a, rows + 1, width)
    Deltas, _ = delta_sequence(ov.lam, ov.gam, d, 0, rows, ov.K, params.reject_row_ties)

    nu = {a: float(w) for a, w in ov.nu.weights.items()}
    eta = {b: float(w) for b, w in ov.eta.weights.items()}
    lam, gam = float(ov.lam), float(ov.gam)
    e_minus_d = float(np.exp(-float(d)))
    a_weights = np.array([nu[a] for a in ov.sys_a.alphabet])
    spans = []
    for row in orbit_a.rows:
        left = float(np.dot(row.origin, a_weights))
        right = left + sum(nu[x] for x in row.letters)
        scale = e_minus_d * lam ** -row.i
        spans.append((float(c) + scale * left, float(c) + scale * right))

    margin = 2 * max(eta.values())

    def x_range(r: int) -> tuple[float, float]:
        users = [i for i in range(rows) if Deltas[i + 1] >= r] or [rows - 1]
        lo, hi = spans[users[0]]
        pad = margin * gam ** -r
        return lo - pad, hi + pad

    # d < 0 puts Δ_0 above row 0 of the ℬ-orbit
    top = min(Deltas[0], 0)
    orbit_b = covering_orbit(ov.sys_b, Deltas[-1] + 1 - top, eta, gam, x_range, top=top)
    return build_overlay_orbit(ov, orbit_a, orbit_b, c, d, params)


def row_offsets(window: OrbitWindow, dist: Distribution, lam: AdaptiveReal, d=0) -> list:
    """S_i of each row: S_0 = 0, S_(i+1) = S_i − e^d λ^-(i+1) |u^(i+1)(0…n_i)|_ν.

    n_i is the first child of column 0 of row i.
    """
    e_d = AdaptiveReal.from_rational(as_fraction(d)).exp()
    offsets = [AdaptiveReal.from_int(0)]
    sys_ = dist.system
    for upper in window.rows[:-1]:
        if 0 not in upper:
            raise WindowTooNarrow(f'row {upper.i} does not contain column 0')
        n = window.children(upper.i, 0)
        if not n:
            raise WindowTooNarrow(f'column 0 of row {upper.i} has no stored children')
        lower = window.row(upper.i + 1)
        counts = np.asarray(lower.origin) + letter_counts(sys_, lower.slice(lower.j_lo, n.start))
        length = AdaptiveReal.linear_combination(
            [int(x) for x in counts], [dist.weights[a] for a in sys_.alphabet]
        )
        offsets.append(offsets[-1] - e_d * lam ** (-(upper.i + 1)) * length)
    return offsets


def restore_system(window: OrbitWindow) -> OrbitWindow:
    """Reattach the system of a window read back from JSON."""
    if window.system is not None:
        return window
    systems = window.metadata.get('systems', {})
    if 'a' not in systems:
        raise OrbitileError('window metadata names no system')
    sys_a = system_from_json(systems['a'])
    if window.kind == 'overlay':
        window.system = enumerate_alphabet(sys_a, system_from_json(systems['b']))
    else:
        window.system = sys_a
    return window
