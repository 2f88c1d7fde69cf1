"""Orbit graphs of finite windows.

Vertices are the cells (i, j) of a window. Row edges join column-consecutive
cells, production edges join a cell to its parent. Faces lie between two
consecutive production edges of a row pair; a face is stored as its upper
and lower vertex runs, both left to right, and read as a cycle that runs
along the lower row left to right and back along the upper row.
"""

import json
import logging
from dataclasses import dataclass, field

import networkx as nx

from orbitile.orbit.window import OrbitWindow, decode_letter, encode_letter
from orbitile.overlay.letter import OverlayLetter

logger = logging.getLogger(__name__)

ROW = 'row'
PRODUCTION = 'production'


@dataclass(frozen=True)
class Face:
    upper: tuple
    lower: tuple

    @property
    def cycle(self) -> tuple:
        return self.lower + tuple(reversed(self.upper))

    @property
    def size(self) -> int:
        return len(self.upper) + len(self.lower)

    @property
    def kind(self) -> str:
        return {3: 'triangle', 4: 'quadrilateral'}.get(self.size, f'{self.size}-cycle')

    @property
    def row_pair(self) -> int:
        return self.upper[0][0]

    @property
    def upper_edge(self) -> frozenset | None:
        return frozenset(self.upper) if len(self.upper) == 2 else None

    @property
    def lower_edge(self) -> frozenset | None:
        return frozenset(self.lower) if len(self.lower) == 2 else None


@dataclass
class GraphPatch:
    graph: nx.Graph
    faces: list = field(default_factory=list)
    incomplete: set = field(default_factory=set)
    reduced: bool = False
    metadata: dict = field(default_factory=dict)

    def label(self, v):
        return self.graph.nodes[v]['label']

    def parent(self, v):
        return self.graph.nodes[v].get('parent')

    @property
    def rows(self) -> list:
        return sorted({i for i, _ in self.graph.nodes})

    def row(self, i: int) -> list:
        return sorted(v for v in self.graph.nodes if v[0] == i)

    def interior(self, radius: int = 0) -> set:
        """Vertices farther than ``radius`` from every incomplete vertex."""
        if not self.incomplete:
            return set(self.graph.nodes)
        near = nx.multi_source_dijkstra_path_length(self.graph, self.incomplete, cutoff=radius)
        return set(self.graph.nodes) - set(near)

    def faces_at(self, v) -> list:
        return [k for k, face in enumerate(self.faces) if v in face.upper or v in face.lower]

    def production_edges(self):
        return [(u, w) for u, w, kind in self.graph.edges(data='kind') if kind == PRODUCTION]

    def copy(self) -> 'GraphPatch':
        return GraphPatch(
            self.graph.copy(), list(self.faces), set(self.incomplete), self.reduced, dict(self.metadata)
        )


def build_orbit_graph(window: OrbitWindow) -> GraphPatch:
    graph = nx.Graph()
    for row in window.rows:
        for j in range(row.j_lo, row.j_hi):
            graph.add_node((row.i, j), label=row.at(j))
        for j in range(row.j_lo, row.j_hi - 1):
            graph.add_edge((row.i, j), (row.i, j + 1), kind=ROW)

    for upper, lower in zip(window.rows, window.rows[1:]):
        for j in range(lower.j_lo, lower.j_hi):
            parent = window.parent(lower.i, j)
            graph.nodes[(lower.i, j)]['parent'] = parent
            if parent in upper:
                graph.add_edge((upper.i, parent), (lower.i, j), kind=PRODUCTION)

    incomplete = set()
    for idx, row in enumerate(window.rows):
        for j in range(row.j_lo, row.j_hi):
            v = (row.i, j)
            if idx in (0, len(window.rows) - 1) or j in (row.j_lo, row.j_hi - 1):
                incomplete.add(v)
            elif not row.in_core(j) or window.parent(row.i, j) not in window.rows[idx - 1]:
                incomplete.add(v)

    patch = GraphPatch(graph, incomplete=incomplete, metadata={'kind': window.kind, **window.metadata})
    patch.faces = build_faces(patch)
    logger.debug(
        'orbit graph: %d vertices, %d edges, %d faces',
        graph.number_of_nodes(), graph.number_of_edges(), len(patch.faces),
        extra={'msg_type': 'GRAPH'},
    )
    return patch


def build_faces(patch: GraphPatch) -> list:
    """Faces between consecutive production edges of every row pair."""
    by_pair = {}
    for u, w in patch.production_edges():
        parent, child = (u, w) if u[0] < w[0] else (w, u)
        by_pair.setdefault(parent[0], []).append((child[1], parent[1]))

    faces = []
    for i in sorted(by_pair):
        edges = sorted(by_pair[i])
        for (k_a, j_a), (k_b, j_b) in zip(edges, edges[1:]):
            upper = tuple((i, j) for j in range(j_a, j_b + 1))
            lower = tuple((i + 1, k) for k in range(k_a, k_b + 1))
            if all(v in patch.graph for v in upper + lower):
                faces.append(Face(upper, lower))
    return faces


def base_letter(label):
    """Y/W class of a label: decorated letters carry it first, overlay letters in α."""
    if isinstance(label, OverlayLetter):
        label = label.alpha
    if isinstance(label, tuple):
        return label[0]
    return label


def reduce(patch: GraphPatch, mu=base_letter, removed: str = 'W') -> GraphPatch:
    """Drop the production edges into children that ``mu`` sends to ``removed``."""
    reduced = patch.copy()
    for u, w in patch.production_edges():
        child = u if u[0] > w[0] else w
        if mu(patch.label(child)) == removed:
            reduced.graph.remove_edge(u, w)
    reduced.reduced = True
    reduced.faces = build_faces(reduced)
    return reduced


# galleries and tallies


def galleries(patch: GraphPatch) -> list:
    """Maximal chains of quadrilaterals glued along row edges, top to bottom."""
    quads = [k for k, face in enumerate(patch.faces) if face.size == 4]
    by_upper = {patch.faces[k].upper_edge: k for k in quads}
    chain = nx.Graph()
    chain.add_nodes_from(quads)
    for k in quads:
        below = by_upper.get(patch.faces[k].lower_edge)
        if below is not None:
            chain.add_edge(k, below)
    return sorted(
        (sorted(component, key=lambda k: patch.faces[k].row_pair) for component in nx.connected_components(chain)),
        key=lambda g: (patch.faces[g[0]].row_pair, patch.faces[g[0]].upper[0][1]),
    )


def triangle_galleries(patch: GraphPatch, chains: list | None = None) -> dict:
    """Number of galleries meeting each triangle along its row edge."""
    chains = chains if chains is not None else galleries(patch)
    owner = {}
    for g, chain in enumerate(chains):
        for k in chain:
            owner.setdefault(patch.faces[k].upper_edge, set()).add(g)
            owner.setdefault(patch.faces[k].lower_edge, set()).add(g)
    return {
        k: len(owner.get(face.lower_edge, ()))
        for k, face in enumerate(patch.faces)
        if face.size == 3
    }


def face_tally(patch: GraphPatch) -> list:
    """Per row pair: faces against production edges minus contiguous child runs."""
    tallies = []
    for i in patch.rows[:-1]:
        children = sorted(
            max(u, w)[1] for u, w in patch.production_edges() if min(u[0], w[0]) == i
        )
        segments = sum(1 for a, b in zip([None] + children, children) if a is None or b != a + 1)
        faces = [f for f in patch.faces if f.row_pair == i]
        entry = {
            'i': i,
            'faces': len(faces),
            'production_edges': len(children),
            'segments': segments,
            'triangles': sum(f.size == 3 for f in faces),
            'quadrilaterals': sum(f.size == 4 for f in faces),
        }
        if patch.reduced:
            entry['ok'] = entry['faces'] == max(len(children) - 1, 0)
        else:
            entry['ok'] = (
                entry['faces'] == len(children) - segments
                and entry['triangles'] + entry['quadrilaterals'] == entry['faces']
            )
        tallies.append(entry)
    return tallies


@dataclass
class PQReport:
    p: int
    q: int
    vertices_checked: int = 0
    faces_checked: int = 0
    bad_vertices: list = field(default_factory=list)
    bad_faces: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.bad_vertices and not self.bad_faces and self.vertices_checked > 0

    def to_json(self) -> dict:
        return {**self.__dict__, 'ok': self.ok}


def check_pq(patch: GraphPatch, p: int, q: int) -> PQReport:
    """Degree q at complete vertices and p-cycles for faces made of complete vertices."""
    report = PQReport(p, q)
    interior = patch.interior(0)
    for v in sorted(interior):
        report.vertices_checked += 1
        if patch.graph.degree(v) != q:
            report.bad_vertices.append([*v, patch.graph.degree(v)])
    for face in patch.faces:
        if all(v in interior for v in face.cycle):
            report.faces_checked += 1
            if face.size != p:
                report.bad_faces.append({'cycle': [list(v) for v in face.cycle], 'size': face.size})
    logger.info(
        '{%d,%d} check: %d vertices, %d faces, %d violations',
        p, q, report.vertices_checked, report.faces_checked,
        len(report.bad_vertices) + len(report.bad_faces),
        extra={'msg_type': 'GRAPH'},
    )
    return report


# JSON


def patch_to_json(patch: GraphPatch) -> dict:
    return {
        'reduced': patch.reduced,
        'vertices': [
            {'i': v[0], 'j': v[1], 'label': encode_letter(patch.label(v)), 'parent': patch.parent(v)}
            for v in sorted(patch.graph.nodes)
        ],
        'edges': sorted([list(u), list(w), kind] for u, w, kind in patch.graph.edges(data='kind')),
        'faces': [{'upper': [list(v) for v in f.upper], 'lower': [list(v) for v in f.lower]} for f in patch.faces],
        'incomplete': sorted(list(v) for v in patch.incomplete),
        'metadata': patch.metadata,
    }


def patch_from_json(doc: dict) -> GraphPatch:
    graph = nx.Graph()
    for vertex in doc['vertices']:
        attrs = {'label': decode_letter(vertex['label'])}
        if vertex.get('parent') is not None:
            attrs['parent'] = vertex['parent']
        graph.add_node((vertex['i'], vertex['j']), **attrs)
    for u, w, kind in doc['edges']:
        graph.add_edge(tuple(u), tuple(w), kind=kind)
    faces = [
        Face(tuple(tuple(v) for v in f['upper']), tuple(tuple(v) for v in f['lower'])) for f in doc['faces']
    ]
    return GraphPatch(
        graph,
        faces,
        {tuple(v) for v in doc.get('incomplete', [])},
        doc.get('reduced', False),
        doc.get('metadata', {}),
    )


def dumps_patch(patch: GraphPatch) -> str:
    return json.dumps(patch_to_json(patch), ensure_ascii=False, indent=4)


def loads_patch(text: str) -> GraphPatch:
    return patch_from_json(json.loads(text))
