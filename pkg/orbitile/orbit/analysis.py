import logging
from dataclasses import dataclass, field

import numpy as np

from orbitile.config import config
from orbitile.orbit.window import OrbitWindow, Row
from orbitile.overlay.alphabet import OverlaySystem
from orbitile.substitution.core import growth_rate, theta_bracket
from orbitile.util.exceptions import WindowTooNarrow

logger = logging.getLogger(__name__)


# vertical periods


def _codes(window: OrbitWindow) -> dict:
    table = {}
    return {
        row.i: np.array([table.setdefault(x, len(table)) for x in row.letters], dtype=np.int64)
        for row in window.rows
    }


def _shifts(upper: Row, lower: Row, codes: dict, min_overlap: float) -> dict:
    """Shifts t with lower[j + t] == upper[j] on an overlap of enough columns."""
    a, b = codes[upper.i], codes[lower.i]
    need = max(1, int(np.ceil(min_overlap * min(len(a), len(b)))))
    found = {}
    for t in range(lower.j_lo - upper.j_hi + need, lower.j_hi - upper.j_lo - need + 1):
        lo, hi = max(upper.j_lo, lower.j_lo - t), min(upper.j_hi, lower.j_hi - t)
        if hi - lo < need:
            continue
        if np.array_equal(a[lo - upper.j_lo:hi - upper.j_lo], b[lo + t - lower.j_lo:hi + t - lower.j_lo]):
            found[t] = (lo, hi)
    return found


def _parents_agree(window: OrbitWindow, i: int, pi: int, t_upper: int, t_lower: int) -> bool:
    """P_(i+π)(j + t_lower) = P_i(j) + t_upper wherever both rows hold j."""
    lower, shifted = window.row(i + 1), window.row(i + 1 + pi)
    lo, hi = max(lower.j_lo, shifted.j_lo - t_lower), min(lower.j_hi, shifted.j_hi - t_lower)
    if hi <= lo:
        return False
    ours = np.asarray(window.parent_map(i)[lo - lower.j_lo:hi - lower.j_lo])
    theirs = np.asarray(window.parent_map(i + pi)[lo + t_lower - shifted.j_lo:hi + t_lower - shifted.j_lo])
    return bool(np.array_equal(ours + t_upper, theirs))


def period_search(window: OrbitWindow, max_pi: int, min_overlap: float | None = None) -> list:
    """Vertical periods π ≤ max_pi supported by the whole window.

    Rows i and i+π must agree as labelled sequences under some horizontal
    shift t_i, and consecutive shifts must carry the parent maps onto each
    other. Returns ``(π, evidence)`` pairs; evidence lists one consistent
    chain of shifts with the overlaps that witnessed them.
    """
    if min_overlap is None:
        min_overlap = config.get_orbit_params().period_min_overlap
    codes = _codes(window)
    periods = []
    for pi in range(1, max_pi + 1):
        top = [i for i in range(window.i_lo, window.i_hi - pi + 1)]
        if len(top) < 2:
            break
        candidates = [_shifts(window.row(i), window.row(i + pi), codes, min_overlap) for i in top]
        # chains[k] maps a shift of row top[k] to the shift chosen for the row above
        chains = [{t: None for t in candidates[0]}]
        for k in range(1, len(top)):
            chains.append(
                {
                    t: prev
                    for t in candidates[k]
                    for prev in chains[-1]
                    if _parents_agree(window, top[k - 1], pi, prev, t)
                }
            )
            if not chains[-1]:
                break
        if chains[-1] and len(chains) == len(top):
            t = min(chains[-1])
            shifts = []
            for k in range(len(top) - 1, -1, -1):
                shifts.append({'i': top[k], 'shift': t, 'overlap': list(candidates[k][t])})
                t = chains[k][t]
            periods.append((pi, list(reversed(shifts))))
            logger.info('window admits vertical period %d', pi, extra={'msg_type': 'ORBIT'})
    return periods


# growth exponents


@dataclass
class GrowthReport:
    lam: float
    depths: list = field(default_factory=list)
    alpha_lengths: list = field(default_factory=list)
    beta_lengths: list = field(default_factory=list)
    slope_alpha: float | None = None
    slope_beta: float | None = None
    tolerance_alpha: float | None = None
    tolerance_beta: float | None = None
    C: int | None = None
    bound_violations: list = field(default_factory=list)
    periodic_rate: float | None = None

    @property
    def ok(self) -> bool:
        if self.bound_violations or self.slope_alpha is None:
            return False
        log_lam = float(np.log(self.lam))
        if abs(self.slope_alpha - log_lam) > self.tolerance_alpha:
            return False
        if self.slope_beta is not None and abs(self.slope_beta - log_lam) > self.tolerance_beta:
            return False
        return True

    def to_json(self) -> dict:
        doc = {k: v for k, v in self.__dict__.items()}
        doc['ok'] = self.ok
        return doc


def descendants(window: OrbitWindow, i: int, j: int):
    """Column ranges of the successive descendants of (i, j) inside the window."""
    span = range(j, j + 1)
    yield i, span
    for r in range(i, window.i_hi):
        row = window.row(r)
        if not all(row.in_core(k) for k in span):
            return
        span = range(window.children(r, span.start).start, window.children(r, span.stop - 1).stop)
        yield r + 1, span


def growth_exponent_check(window: OrbitWindow, pi: int | None = None, Delta: int | None = None) -> GrowthReport:
    """Growth of the descendants of the top centre cell against log λ.

    With a hypothetical period ``pi`` shifting the ℬ-rows by ``Delta`` the
    report also carries the rate Δ log γ / π that periodicity would force.
    """
    ov = window.system if isinstance(window.system, OverlaySystem) else None
    sys_a = ov.sys_a if ov else window.system
    top = window.rows[0]
    centre = top.j_lo + len(top) // 2
    lam = float(ov.lam) if ov else float(growth_rate(sys_a))
    theta = theta_bracket(sys_a).constant

    report = GrowthReport(lam)
    if ov:
        report.C = max(len(x.beta) for row in window.rows for x in row.letters)
        for row in window.rows:
            _check_bounds(report, row.i, row.letters)
        if pi is not None and Delta is not None:
            report.periodic_rate = Delta * float(np.log(float(ov.gam))) / pi

    for i, span in descendants(window, top.i, centre):
        row = window.row(i)
        cells = row.slice(span.start, span.stop)
        report.depths.append(i - top.i)
        report.alpha_lengths.append(len(cells))
        if ov:
            report.beta_lengths.append(sum(len(x.beta) for x in cells))
            _check_bounds(report, i, cells)

    depth = report.depths[-1]
    if depth < 1:
        raise WindowTooNarrow('the top centre cell has no descendants in the window')
    report.slope_alpha = float(np.log(report.alpha_lengths[-1])) / depth
    report.tolerance_alpha = float(np.log(theta)) / depth
    if ov:
        report.slope_beta = float(np.log(report.beta_lengths[-1])) / depth
        report.tolerance_beta = float(np.log(theta * report.C)) / depth
    logger.info(
        'descendants of (%d, %d) to depth %d: slope %.4f (log λ = %.4f)',
        top.i, centre, depth, report.slope_alpha, np.log(lam),
        extra={'msg_type': 'ORBIT'},
    )
    return report


def _check_bounds(report: GrowthReport, i: int, cells) -> None:
    beta = sum(len(x.beta) for x in cells)
    if not len(cells) <= beta <= report.C * len(cells):
        report.bound_violations.append({'i': i, 'length': len(cells), 'beta': beta})