"""Basepointed labelled patterns and label-preserving patch maps."""

import json
import logging
from dataclasses import dataclass, field

import networkx as nx
from networkx.algorithms import isomorphism

from orbitile.config import config
from orbitile.graph.patch import GraphPatch
from orbitile.orbit.window import decode_letter, encode_letter
from orbitile.util.exceptions import BoundaryVertex

logger = logging.getLogger(__name__)


def label_key(label) -> str:
    return json.dumps(encode_letter(label), sort_keys=True, ensure_ascii=False)


@dataclass
class Pattern:
    graph: nx.Graph
    basepoint: tuple
    # face cycles in the patch orientation
    faces: list = field(default_factory=list)

    def label(self, v):
        return self.graph.nodes[v]['label']

    def keyed(self) -> nx.Graph:
        keyed = nx.Graph(self.graph.edges)
        for v, label in self.graph.nodes(data='label'):
            marker = '*' if v == self.basepoint else ''
            keyed.add_node(v, key=marker + label_key(label))
        return keyed

    def wl_hash(self) -> str:
        return nx.weisfeiler_lehman_graph_hash(self.keyed(), node_attr='key', iterations=3)

    def isomorphic(self, other: 'Pattern') -> bool:
        """Labelled isomorphism fixing the basepoint."""
        matcher = isomorphism.GraphMatcher(
            self.keyed(), other.keyed(), node_match=isomorphism.categorical_node_match('key', None)
        )
        return matcher.is_isomorphic()

    def to_json(self) -> dict:
        return {
            'basepoint': list(self.basepoint),
            'vertices': [[list(v), encode_letter(label)] for v, label in sorted(self.graph.nodes(data='label'))],
            'edges': sorted([list(u), list(w)] for u, w in self.graph.edges),
            'faces': [[list(v) for v in cycle] for cycle in self.faces],
        }

    @classmethod
    def from_json(cls, doc: dict) -> 'Pattern':
        graph = nx.Graph()
        for v, label in doc['vertices']:
            graph.add_node(tuple(v), label=decode_letter(label))
        graph.add_edges_from((tuple(u), tuple(w)) for u, w in doc['edges'])
        faces = [tuple(tuple(v) for v in cycle) for cycle in doc.get('faces', [])]
        return cls(graph, tuple(doc['basepoint']), faces)


def extract_pattern(patch: GraphPatch, v, shape: str = 'faces') -> Pattern:
    """The union of the faces through ``v``, basepointed at ``v``."""
    if shape != 'faces':
        raise ValueError(f'unknown pattern shape {shape!r}')
    if v not in patch.graph or v in patch.incomplete:
        raise BoundaryVertex(v)
    around = [patch.faces[k] for k in patch.faces_at(v)]
    if len(around) != patch.graph.degree(v):
        raise BoundaryVertex(v)

    graph = nx.Graph()
    for face in around:
        cycle = face.cycle
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            graph.add_edge(a, b)
    for u in graph.nodes:
        graph.nodes[u]['label'] = patch.label(u)
    return Pattern(graph, v, [face.cycle for face in around])


class PatternIndex:
    """Patterns bucketed by Weisfeiler-Lehman hash, compared exactly inside a bucket."""

    def __init__(self):
        self._buckets: dict[str, list[Pattern]] = {}

    def __len__(self) -> int:
        return sum(len(b) for b in self._buckets.values())

    def __iter__(self):
        for bucket in self._buckets.values():
            yield from bucket

    def find(self, pattern: Pattern) -> Pattern | None:
        for other in self._buckets.get(pattern.wl_hash(), []):
            if pattern.isomorphic(other):
                return other
        return None

    def __contains__(self, pattern: Pattern) -> bool:
        return self.find(pattern) is not None

    def add(self, pattern: Pattern) -> bool:
        """Store ``pattern`` unless an isomorphic copy is already present."""
        if pattern in self:
            return False
        self._buckets.setdefault(pattern.wl_hash(), []).append(pattern)
        return True


# label-preserving maps between rows


def _children(patch: GraphPatch) -> dict:
    first = {}
    for v in patch.graph.nodes:
        parent = patch.parent(v)
        if parent is None:
            continue
        key = (v[0] - 1, parent)
        first[key] = min(first.get(key, v[1]), v[1])
    return first


def _row_shifts(patch: GraphPatch, first_child: dict, pi: int, t: int) -> dict | None:
    """Horizontal shift per row, carried down from the top row through first children."""
    rows = patch.rows
    shifts = {rows[0]: t}
    for i in rows[:-1]:
        if i + pi + 1 > rows[-1]:
            break
        refs = [
            j for (r, j) in first_child
            if r == i and (i + pi, j + shifts[i]) in first_child
        ]
        if not refs:
            return None
        j = min(refs)
        shifts[i + 1] = first_child[(i + pi, j + shifts[i])] - first_child[(i, j)]
    return shifts


def patch_periods(patch: GraphPatch, candidates=None, min_overlap: float | None = None) -> list:
    """Candidate maps (i, j) ↦ (i + π, j + t_i) that preserve labels and edges.

    ``candidates`` holds (π, t) pairs where t is the shift of the top row;
    shifts of lower rows follow the parent structure. Every returned map
    sends rows to rows by construction.
    """
    if min_overlap is None:
        min_overlap = config.get_orbit_params().period_min_overlap
    rows = patch.rows
    if candidates is None:
        width = min(len(patch.row(i)) for i in rows)
        candidates = [(pi, t) for pi in range(0, len(rows) // 2 + 1) for t in range(-width // 2, width // 2 + 1)]

    first_child = _children(patch)
    survivors = []
    for pi, t in candidates:
        shifts = _row_shifts(patch, first_child, pi, t)
        if shifts is None:
            continue
        domain = [v for v in patch.graph.nodes if v[0] in shifts and v[0] + pi <= rows[-1]]

        def image(v):
            return (v[0] + pi, v[1] + shifts[v[0]])

        overlap = [v for v in domain if image(v) in patch.graph]
        if not overlap or len(overlap) < min_overlap * len(domain):
            continue
        if any(patch.label(v) != patch.label(image(v)) for v in overlap):
            continue
        inside = set(overlap)
        if any(
            not patch.graph.has_edge(image(u), image(w))
            for u, w in patch.graph.edges
            if u in inside and w in inside
        ):
            continue
        survivors.append({'pi': pi, 'shift': t, 'row_shifts': shifts, 'checked': len(overlap)})
    logger.info(
        '%d of %d candidate maps preserve labels', len(survivors), len(candidates), extra={'msg_type': 'GRAPH'}
    )
    return survivors
