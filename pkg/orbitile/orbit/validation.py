"""Independent re-validation of orbit windows.

Nothing here trusts the builder: parents, productions, adjacency and the
overlay geometry are all re-derived from the stored rows.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from orbitile.config import config
from orbitile.orbit.window import OrbitWindow
from orbitile.overlay.alphabet import (
    OverlaySystem,
    adjacent,
    concat_beta,
    production_defect,
    project_alpha,
    verify_property3,
)
from orbitile.substitution.adaptive_real import AdaptiveReal
from orbitile.substitution.core import apply, nu_length
from orbitile.substitution.system import word_str

logger = logging.getLogger(__name__)


@dataclass
class ValidationReport:
    kind: str
    checked: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, check: str, i: int, j: int | None, reason: str) -> None:
        self.failures.append({'check': check, 'i': i, 'j': j, 'reason': reason})

    def count(self, check: str, n: int = 1) -> None:
        self.checked[check] = self.checked.get(check, 0) + n

    def merge(self, other: 'ValidationReport', prefix: str) -> None:
        for check, n in other.checked.items():
            self.count(f'{prefix}.{check}', n)
        for failure in other.failures:
            self.failures.append(dict(failure, check=f"{prefix}.{failure['check']}"))

    def to_json(self) -> dict:
        return {'kind': self.kind, 'ok': self.ok, 'checked': self.checked, 'failures': self.failures}


def validate_window(window: OrbitWindow, system=None, equation_samples: int | None = None) -> ValidationReport:
    system = system if system is not None else window.system
    report = ValidationReport(window.kind)
    overlay = isinstance(system, OverlaySystem)

    for upper, lower in zip(window.rows, window.rows[1:]):
        parents = np.asarray(window.parent_map(upper.i))
        if len(parents) != len(lower):
            report.fail('parents', lower.i, None, f'{len(parents)} parents for {len(lower)} cells')
            continue
        report.count('parents')
        if len(parents) and np.any(np.diff(parents) < 0):
            report.fail('parents', lower.i, None, 'parent map is not monotone')
        if len(parents) and np.any(np.diff(parents) > 1):
            report.fail('parents', lower.i, None, 'parent map skips a column')

        for j in range(*upper.core):
            children = window.children(upper.i, j)
            report.count('production')
            if not children:
                report.fail('onto', upper.i, j, 'core column has no children')
                continue
            x, w = upper.at(j), lower.slice(children.start, children.stop)
            if overlay:
                defect = production_defect(system, x, w)
                if not verify_property3(system, (x,), w).ok:
                    report.fail('approx', upper.i, j, 'children are not ≈_N the ς^δ image')
            else:
                defect = None if apply(system, (x,), 1) == w else f'σ({x}) ≠ {word_str(w)}'
            if defect:
                report.fail('production', upper.i, j, defect)

    if overlay:
        _validate_overlay_rows(window, system, report)
        if window.geometry:
            _validate_geometry(window, system, report)
            samples = equation_samples if equation_samples is not None else config.equation_samples
            for i, j, k in check_useful_inequality(window, samples):
                report.fail('equation', i, j, f'window [{j}, {k}) breaks the η/ν length bracket')
            report.count('equation', samples)
        report.merge(validate_window(project_alpha(window), system.sys_a), 'alpha')

    level = logging.INFO if report.ok else logging.WARNING
    logger.log(
        level,
        '%s window rows %d..%d: %d checks, %d failures',
        window.kind, window.i_lo, window.i_hi, sum(report.checked.values()), len(report.failures),
        extra={'msg_type': 'ORBIT' if report.ok else 'WARNING'},
    )
    return report


def _validate_overlay_rows(window: OrbitWindow, ov: OverlaySystem, report: ValidationReport) -> None:
    for row in window.rows:
        deltas = {x.delta for x in row.letters}
        report.count('delta')
        if len(deltas) > 1:
            report.fail('delta', row.i, None, f'row mixes δ values {sorted(deltas)}')
        for j, (x, y) in enumerate(zip(row.letters, row.letters[1:]), start=row.j_lo):
            report.count('adjacent')
            if not adjacent(x, y):
                report.fail('adjacent', row.i, j, f'{x} does not precede {y}')
        for j, x in enumerate(row.letters, start=row.j_lo):
            report.count('alphabet')
            if x not in ov:
                report.fail('alphabet', row.i, j, f'{x} is not an overlay letter')


def _validate_geometry(window: OrbitWindow, ov: OverlaySystem, report: ValidationReport) -> None:
    c = Fraction(window.metadata.get('c', 0))
    d = Fraction(window.metadata.get('d', 0))
    e_minus_d = AdaptiveReal.from_rational(-d).exp()
    shift = AdaptiveReal.from_rational(c)
    for g in window.geometry:
        row = window.row(g.i)
        nabla = np.asarray(g.nabla)
        report.count('nabla')
        if np.any(np.diff(nabla) <= 0):
            report.fail('nabla', g.i, None, '∇ is not strictly increasing')
        for t, x in enumerate(row.letters):
            if len(x.beta) != nabla[t + 1] - nabla[t]:
                report.fail('nabla', g.i, row.j_lo + t, 'β does not span ∇_j … ∇_(j+1)')
        if not isinstance(g.U[0], AdaptiveReal):
            continue
        for t, (U, V, W) in enumerate(zip(g.U, g.V, g.W)):
            target = e_minus_d * U + shift
            report.count('bracket')
            if V > target or target > W:
                report.fail('bracket', g.i, g.nabla_lo + t, 'V ≤ e^-d U + c ≤ W fails')


def check_useful_inequality(window: OrbitWindow, samples: int, rng=None) -> list:
    """Sampled (i, j, k) with |v[∇_j+1, ∇_k)|_η ≤ |u[j, k)|_ν < γ|v[∇_j, ∇_k+1)|_η false.

    The ℬ-words are read off the β-labels, so k stays below the row's end.
    """
    ov = window.system
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    rows = [row for row in window.rows if len(row) >= 2]
    if not rows or samples <= 0:
        return []

    violations = []
    for _ in range(samples):
        row = rows[int(rng.integers(len(rows)))]
        j, k = sorted(int(v) for v in rng.choice(len(row), size=2, replace=False))
        cells = row.letters[j:k]
        beta = concat_beta(cells)
        inner = nu_length(ov.eta, beta[1:])
        outer = ov.gam * nu_length(ov.eta, beta + row.letters[k].beta[:1])
        length = nu_length(ov.nu, tuple(x.alpha for x in cells))
        if not (inner <= length and length < outer):
            violations.append((row.i, row.j_lo + j, row.j_lo + k))
    return violations
