"""Desk-scale pattern families for the {p,q} SFT and membership checking.

The family is collected from finitely many overlay windows, so a pattern
missing from it is reported as UNKNOWN; only a violation of a locally
checkable condition (decoration, row language, production) is a FAIL.
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from orbitile.config import config
from orbitile.graph.patch import GraphPatch, build_orbit_graph, reduce
from orbitile.graph.patterns import Pattern, PatternIndex, extract_pattern
from orbitile.orbit.builder import overlay_orbit
from orbitile.orbit.window import system_from_json, system_to_json
from orbitile.overlay.alphabet import OverlaySystem, adjacent, enumerate_alphabet, production_defect
from orbitile.substitution.core import Commensurate, incommensurate
from orbitile.substitution.system import SubstitutionSystem
from orbitile.surface.pq import decorate, decoration, horizontal_paths, pq_substitution, produced_path
from orbitile.util.exceptions import BadParameters, BoundaryVertex, DegenerateOffset, WindowTooNarrow

logger = logging.getLogger(__name__)

PASS, FAIL, UNKNOWN = 'PASS', 'FAIL', 'UNKNOWN'


@lru_cache(maxsize=None)
def combined_alphabet(p: int, q: int, sys_b: SubstitutionSystem) -> OverlaySystem:
    """𝒜_0: the overlay alphabet of the decorated {p,q} system over ℬ."""
    return enumerate_alphabet(decorate(pq_substitution(p, q)), sys_b)


@dataclass
class PatternFamily:
    p: int
    q: int
    sys_b: SubstitutionSystem
    patterns: PatternIndex = field(default_factory=PatternIndex)
    provenance: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.patterns)

    def __contains__(self, pattern: Pattern) -> bool:
        return pattern in self.patterns

    @property
    def sys_a(self) -> SubstitutionSystem:
        return pq_substitution(self.p, self.q)

    def to_json(self) -> dict:
        return {
            'p': self.p,
            'q': self.q,
            'system_b': system_to_json(self.sys_b),
            'under_approximation': True,
            'provenance': self.provenance,
            'patterns': [pattern.to_json() for pattern in self.patterns],
        }

    @classmethod
    def from_json(cls, doc: dict) -> 'PatternFamily':
        family = cls(doc['p'], doc['q'], system_from_json(doc['system_b']), provenance=doc.get('provenance', []))
        for item in doc['patterns']:
            family.patterns.add(Pattern.from_json(item))
        return family


def save_family(family: PatternFamily, path: str | Path) -> None:
    Path(path).write_text(json.dumps(family.to_json(), ensure_ascii=False, indent=4) + '\n')


def load_family(path: str | Path) -> PatternFamily:
    return PatternFamily.from_json(json.loads(Path(path).read_text()))


def pattern_defect(pattern: Pattern, ov: OverlaySystem, p: int, sys_: SubstitutionSystem) -> str | None:
    """The first locally checkable condition the pattern breaks, or None."""
    label_of = pattern.label
    for cycle in pattern.faces:
        found = horizontal_paths(cycle, label_of, p, sys_)
        if len(found) != 1:
            return f'face through {list(cycle[0])} has {len(found)} horizontal-type paths'

    for v in pattern.graph.nodes:
        if label_of(v) not in ov:
            return f'label at {list(v)} is not in the combined alphabet'

    v = pattern.basepoint
    decorated = decorate(sys_)
    produced = produced_path(pattern.faces, label_of, v, p, sys_)
    head = decoration(label_of(v))
    if head not in decorated.alphabet:
        return 'basepoint carries no decorated letter'
    if tuple(decoration(label_of(u)) for u in produced) != decorated.image(head):
        return 'produced vertices do not spell σ_#(v)'

    children = [label_of(u) for u in produced]
    if any(not adjacent(x, y) for x, y in zip(children, children[1:])):
        return 'produced row is not in the row language'
    defect = production_defect(ov, label_of(v), children)
    if defect:
        return f'production: {defect}'
    return None


def _offsets(count: int, seed: int) -> list:
    params = config.get_orbit_params()
    offsets = [(params.default_c, params.default_d)]
    rng = np.random.default_rng(seed)
    while len(offsets) < count:
        c = Fraction(int(rng.integers(1, 97)), 97)
        d = Fraction(int(rng.integers(0, 89)), 89)
        offsets.append((c, d))
    return offsets


def collect_pattern_family(
    p: int,
    q: int,
    sys_b: SubstitutionSystem,
    windows: int | list | None = None,
    rows: int | None = None,
    width: int | None = None,
    seed: int | None = None,
) -> PatternFamily:
    """Δ_v patterns of reduced 𝒜_0 orbit graphs over several offsets."""
    sys_a = pq_substitution(p, q)
    verdict = incommensurate(sys_a, sys_b, config.bound)
    if isinstance(verdict, Commensurate):
        raise BadParameters(p, q, f'growth rates are commensurate: {verdict}')

    rows = rows or config.family_rows
    width = width or config.family_width
    seed = config.seed if seed is None else seed
    windows = windows if windows is not None else config.family_windows
    offsets = _offsets(windows, seed) if isinstance(windows, int) else list(windows)
    ov = combined_alphabet(p, q, sys_b)

    family = PatternFamily(p, q, sys_b)
    for c, d in offsets:
        try:
            window = overlay_orbit(ov, rows, c, d, width)
        except (DegenerateOffset, WindowTooNarrow) as err:
            logger.warning('skipping offsets c=%s d=%s: %s', c, d, err)
            continue
        patch = reduce(build_orbit_graph(window))
        added = rejected = 0
        for v in sorted(patch.graph.nodes):
            try:
                pattern = extract_pattern(patch, v)
            except BoundaryVertex:
                continue
            defect = pattern_defect(pattern, ov, p, sys_a)
            if defect:
                rejected += 1
                logger.debug('pattern at %s rejected: %s', v, defect)
                continue
            added += family.patterns.add(pattern)
        family.provenance.append(
            {'c': str(c), 'd': str(d), 'rows': rows, 'width': width, 'added': added, 'rejected': rejected}
        )
        logger.info(
            'offsets c=%s d=%s: %d new patterns (%d in family)', c, d, added, len(family),
            extra={'msg_type': 'FAMILY'},
        )
    return family


@dataclass
class MembershipReport:
    results: list = field(default_factory=list)

    def counts(self) -> dict:
        tally = {PASS: 0, FAIL: 0, UNKNOWN: 0}
        for item in self.results:
            tally[item['status']] += 1
        return tally

    @property
    def ok(self) -> bool:
        return self.counts()[FAIL] == 0

    def status(self, v) -> str | None:
        for item in self.results:
            if tuple(item['vertex']) == tuple(v):
                return item['status']
        return None

    def to_json(self) -> dict:
        return {'ok': self.ok, 'counts': self.counts(), 'results': self.results}


def check_membership(patch: GraphPatch, family: PatternFamily, ov: OverlaySystem | None = None) -> MembershipReport:
    """PASS, FAIL or UNKNOWN for every vertex whose faces all lie in the patch."""
    ov = ov or combined_alphabet(family.p, family.q, family.sys_b)
    sys_a = family.sys_a
    report = MembershipReport()
    for v in sorted(patch.graph.nodes):
        try:
            pattern = extract_pattern(patch, v)
        except BoundaryVertex:
            continue
        defect = pattern_defect(pattern, ov, family.p, sys_a)
        if defect:
            status, reason = FAIL, defect
        elif pattern in family:
            status, reason = PASS, None
        else:
            status, reason = UNKNOWN, 'pattern not in the collected family'
        report.results.append({'vertex': list(v), 'status': status, 'reason': reason})
    logger.info('membership: %s', report.counts(), extra={'msg_type': 'FAMILY'})
    return report


def mutate_label(patch: GraphPatch, v, letter) -> GraphPatch:
    mutated = patch.copy()
    mutated.graph.nodes[v]['label'] = letter
    return mutated
