"""Finite windows of orbits.

A window stores rows ``i_lo .. i_hi`` of an orbit. Row ``i`` holds a word and
the global column index ``j_lo`` of its first letter; for every row but the
first, ``parents`` gives the global column of each letter's parent in the
row above. Columns whose whole production lies inside the window form the
row's ``core``; all production checks are made on cores only.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from orbitile.overlay.letter import OverlayLetter
from orbitile.substitution.system import SubstitutionSystem

logger = logging.getLogger(__name__)


@dataclass
class Row:
    i: int
    j_lo: int
    letters: tuple
    core: tuple[int, int]
    # signed letter counts (alphabet order) of the cells between column 0 and j_lo
    origin: tuple | None = None

    @property
    def j_hi(self) -> int:
        return self.j_lo + len(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __contains__(self, j: int) -> bool:
        return self.j_lo <= j < self.j_hi

    def at(self, j: int):
        return self.letters[j - self.j_lo]

    def slice(self, lo: int, hi: int) -> tuple:
        return self.letters[lo - self.j_lo:hi - self.j_lo]

    def in_core(self, j: int) -> bool:
        return self.core[0] <= j < self.core[1]


@dataclass
class GeometryRow:
    """Offsets of one overlay row; ``nabla[k]`` belongs to column ``nabla_lo + k``."""

    i: int
    Delta: int
    delta: int
    nabla_lo: int = 0
    nabla: list = field(default_factory=list)
    U: list = field(default_factory=list)
    V: list = field(default_factory=list)
    W: list = field(default_factory=list)


@dataclass
class OrbitWindow:
    rows: list
    parents: list
    kind: str = 'base'
    system: Any = None
    geometry: list | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def i_lo(self) -> int:
        return self.rows[0].i

    @property
    def i_hi(self) -> int:
        return self.rows[-1].i

    @property
    def height(self) -> int:
        return len(self.rows)

    def row(self, i: int) -> Row:
        return self.rows[i - self.i_lo]

    def letter(self, i: int, j: int):
        return self.row(i).at(j)

    def parent_map(self, i: int) -> list:
        """Parents (global columns of row ``i``) of the letters of row ``i + 1``."""
        return self.parents[i - self.i_lo]

    def parent(self, i: int, j: int) -> int:
        """Parent column of cell (i, j), which lies in row i − 1."""
        row = self.row(i)
        return self.parent_map(i - 1)[j - row.j_lo]

    def children(self, i: int, j: int) -> range:
        """Global columns of row ``i + 1`` whose parent is (i, j)."""
        below = self.row(i + 1)
        parents = np.asarray(self.parent_map(i))
        lo = int(np.searchsorted(parents, j, side='left'))
        hi = int(np.searchsorted(parents, j, side='right'))
        return range(below.j_lo + lo, below.j_lo + hi)

    def cells(self):
        for row in self.rows:
            for j in range(row.j_lo, row.j_hi):
                yield row.i, j


# JSON


def encode_letter(letter):
    if isinstance(letter, OverlayLetter):
        return {
            'alpha': encode_letter(letter.alpha),
            'beta': [encode_letter(x) for x in letter.beta],
            'p': [encode_letter(x) for x in letter.p],
            's': [encode_letter(x) for x in letter.s],
            'delta': letter.delta,
        }
    if isinstance(letter, tuple):
        return [encode_letter(x) for x in letter]
    return letter


def decode_letter(data):
    if isinstance(data, dict):
        return OverlayLetter(
            decode_letter(data['alpha']),
            tuple(decode_letter(x) for x in data['beta']),
            tuple(decode_letter(x) for x in data['p']),
            tuple(decode_letter(x) for x in data['s']),
            data['delta'],
        )
    if isinstance(data, list):
        return tuple(decode_letter(x) for x in data)
    return data


def system_to_json(sys_: SubstitutionSystem) -> dict:
    return {
        'name': sys_.name,
        'alphabet': [encode_letter(a) for a in sys_.alphabet],
        'rules': [[encode_letter(x) for x in sys_.image(a)] for a in sys_.alphabet],
    }


def system_from_json(data: dict) -> SubstitutionSystem:
    alphabet = tuple(decode_letter(a) for a in data['alphabet'])
    rules = {
        a: tuple(decode_letter(x) for x in image) for a, image in zip(alphabet, data['rules'])
    }
    return SubstitutionSystem(data['name'], alphabet, rules)


def _display(value) -> str:
    return value if isinstance(value, str) else value.to_decimal(50)


def window_to_json(window: OrbitWindow) -> dict:
    doc = {
        'kind': window.kind,
        'rows': [
            {
                'i': row.i,
                'j_lo': row.j_lo,
                'letters': [encode_letter(x) for x in row.letters],
                'core': list(row.core),
                'origin': None if row.origin is None else list(map(int, row.origin)),
            }
            for row in window.rows
        ],
        'parents': [list(map(int, p)) for p in window.parents],
        'geometry': None,
        'metadata': window.metadata,
    }
    if window.geometry:
        doc['geometry'] = [
            {
                'i': g.i,
                'Delta': g.Delta,
                'delta': g.delta,
                'nabla_lo': g.nabla_lo,
                'nabla': list(map(int, g.nabla)),
                'U': [_display(x) for x in g.U],
                'V': [_display(x) for x in g.V],
                'W': [_display(x) for x in g.W],
            }
            for g in window.geometry
        ]
    return doc


def window_from_json(doc: dict) -> OrbitWindow:
    rows = [
        Row(
            r['i'],
            r['j_lo'],
            tuple(decode_letter(x) for x in r['letters']),
            tuple(r['core']),
            None if r.get('origin') is None else tuple(r['origin']),
        )
        for r in doc['rows']
    ]
    geometry = None
    if doc.get('geometry'):
        geometry = [
            GeometryRow(
                g['i'], g['Delta'], g['delta'], g['nabla_lo'],
                list(g['nabla']), list(g['U']), list(g['V']), list(g['W']),
            )
            for g in doc['geometry']
        ]
    kind = doc.get('kind', 'base')
    metadata = doc.get('metadata', {})
    systems = metadata.get('systems', {})
    # overlay systems are re-enumerated by orbit.builder.restore_system
    system = system_from_json(systems['a']) if kind == 'base' and 'a' in systems else None
    return OrbitWindow(
        rows,
        [list(p) for p in doc['parents']],
        kind=kind,
        system=system,
        geometry=geometry,
        metadata=metadata,
    )


def dumps_window(window: OrbitWindow) -> str:
    return json.dumps(window_to_json(window), ensure_ascii=False, indent=4)


def loads_window(text: str) -> OrbitWindow:
    return window_from_json(json.loads(text))


def save_window(window: OrbitWindow, path: str | Path) -> None:
    Path(path).write_text(dumps_window(window) + '\n')


def load_window(path: str | Path) -> OrbitWindow:
    return loads_window(Path(path).read_text())
