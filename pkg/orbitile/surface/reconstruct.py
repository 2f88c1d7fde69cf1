"""Recover rows, columns and parents of a reduced {p,q} patch from its labels.

Only the face cycles (in the patch orientation) and the decorated labels
are used; the (i, j) names of the vertices are treated as opaque.
"""

import logging
from dataclasses import dataclass, field

import networkx as nx

from orbitile.graph.patch import GraphPatch
from orbitile.surface.pq import horizontal_path
from orbitile.substitution.system import SubstitutionSystem
from orbitile.util.exceptions import BoundaryEdge, InconsistentCycle

logger = logging.getLogger(__name__)


class FaceReading:
    """Horizontal-type paths of every face of a patch, with an edge index."""

    def __init__(self, patch: GraphPatch, p: int, sys_: SubstitutionSystem):
        self.patch = patch
        self.p = p
        self.paths = []
        self.edge_faces = {}
        for k, face in enumerate(patch.faces):
            cycle = face.cycle
            path, before, after = horizontal_path(cycle, patch.label, p, sys_)
            self.paths.append((path, before, after))
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                self.edge_faces.setdefault(frozenset((a, b)), []).append(k)

    def path_edges(self, k: int) -> set:
        path = self.paths[k][0]
        return {frozenset(pair) for pair in zip(path, path[1:])}

    def vote(self, k: int, u, w) -> tuple[int, bool]:
        """dy of u → w as seen from face k, and whether the face decides it."""
        path = set(self.paths[k][0])
        if frozenset((u, w)) in self.path_edges(k):
            return 0, True
        if w in path and u not in path:
            return 1, True
        if u in path and w not in path:
            return -1, True
        return 0, False

    def producers(self, k: int) -> dict:
        path, before, after = self.paths[k]
        if len(path) == self.p - 1:
            return {v: before for v in path}
        return {**{v: before for v in path[:-1]}, path[-1]: after}

    def direction(self, u, w) -> tuple:
        """The horizontal edge {u, w} as (left, right)."""
        for k in self.edge_faces[frozenset((u, w))]:
            path = self.paths[k][0]
            if frozenset((u, w)) in self.path_edges(k):
                return (u, w) if path.index(u) < path.index(w) else (w, u)
        k = self.edge_faces[frozenset((u, w))][0]
        cycle = self.patch.faces[k].cycle
        nxt = cycle[(cycle.index(u) + 1) % len(cycle)]
        # edges off the path run right to left in the face orientation
        return (w, u) if nxt == w else (u, w)


def dy(patch: GraphPatch, edge, p: int, sys_: SubstitutionSystem, reading: FaceReading | None = None) -> int:
    """−1, 0 or +1 for the oriented edge ``(u, w)``; both faces through it must be in the patch."""
    u, w = edge
    reading = reading or FaceReading(patch, p, sys_)
    faces = reading.edge_faces.get(frozenset((u, w)), [])
    if len(faces) < 2:
        raise BoundaryEdge(edge)
    decided = {value for value, decisive in (reading.vote(k, u, w) for k in faces) if decisive}
    if len(decided) > 1:
        raise InconsistentCycle([u, w], f'faces disagree on dy: {sorted(decided)}')
    return decided.pop() if decided else 0


@dataclass
class Reconstruction:
    base: tuple
    y: dict = field(default_factory=dict)
    x: dict = field(default_factory=dict)
    parent: dict = field(default_factory=dict)
    P: dict = field(default_factory=dict)
    # vertices all of whose edges lie on two faces of the patch
    settled: set = field(default_factory=set)

    def to_json(self) -> dict:
        return {
            'base': list(self.base),
            'vertices': [
                {
                    'vertex': list(v),
                    'y': self.y[v],
                    'x': self.x.get(v),
                    'parent': list(self.parent[v]) if v in self.parent else None,
                    'P': self.P.get(v),
                }
                for v in sorted(self.y)
            ],
        }


def reconstruct_rows(patch: GraphPatch, p: int, sys_: SubstitutionSystem, base=None) -> Reconstruction:
    """y from summed dy, x along each horizontal line, P from the producers of every face."""
    reading = FaceReading(patch, p, sys_)
    inner = [tuple(sorted(e)) for e, faces in reading.edge_faces.items() if len(faces) >= 2]
    oriented = {}
    for u, w in inner:
        oriented[(u, w)] = dy(patch, (u, w), p, sys_, reading)
        oriented[(w, u)] = -oriented[(u, w)]

    for k, face in enumerate(patch.faces):
        cycle = face.cycle
        steps = list(zip(cycle, cycle[1:] + cycle[:1]))
        if all(step in oriented for step in steps) and sum(oriented[s] for s in steps) != 0:
            raise InconsistentCycle(list(cycle), 'dy does not sum to zero')

    skeleton = nx.Graph(inner)
    if base is None:
        interior = sorted(patch.interior(0) & set(skeleton.nodes))
        base = interior[len(interior) // 2] if interior else min(skeleton.nodes)
    recon = Reconstruction(base, {base: 0})
    recon.settled = {
        v for v in skeleton.nodes if v not in patch.incomplete and skeleton.degree(v) == patch.graph.degree(v)
    }
    for u, w in nx.bfs_edges(skeleton, base):
        recon.y[w] = recon.y[u] + oriented[(u, w)]
    for u, w in inner:
        if u in recon.y and recon.y[w] - recon.y[u] != oriented[(u, w)]:
            raise InconsistentCycle([u, w], 'y is not path independent')

    lines = nx.DiGraph()
    lines.add_nodes_from(recon.y)
    lines.add_edges_from(reading.direction(u, w) for u, w in inner if oriented[(u, w)] == 0 and u in recon.y)
    for component in nx.weakly_connected_components(lines):
        line = lines.subgraph(component)
        if any(d > 1 for _, d in line.in_degree()) or any(d > 1 for _, d in line.out_degree()):
            raise InconsistentCycle(sorted(component)[:4], 'horizontal line branches')
        starts = [v for v, d in line.in_degree() if d == 0]
        if len(starts) != 1:
            raise InconsistentCycle(sorted(component)[:4], 'horizontal line closes up')
        for x, v in enumerate(nx.dfs_preorder_nodes(line, starts[0])):
            recon.x[v] = x

    for k in range(len(patch.faces)):
        for v, producer in reading.producers(k).items():
            if recon.parent.setdefault(v, producer) != producer:
                raise InconsistentCycle([v, producer], 'vertex has two producers')
    recon.P = {v: recon.x[par] for v, par in recon.parent.items() if par in recon.x}
    logger.info(
        'reconstructed %d vertices on %d lines from base %s',
        len(recon.y), len(set(recon.y.values())), base,
        extra={'msg_type': 'GRAPH'},
    )
    return recon


def match_ground_truth(patch: GraphPatch, recon: Reconstruction, vertices=None) -> dict:
    """Compare a reconstruction with the (i, j) names and stored parents of the patch."""
    vertices = sorted(vertices if vertices is not None else recon.settled & set(recon.x))
    mismatches = []
    row_offset = {}
    y_offsets = {recon.y[v] - v[0] for v in vertices}
    for v in vertices:
        shift = row_offset.setdefault(v[0], recon.x[v] - v[1])
        if recon.x[v] - v[1] != shift:
            mismatches.append({'vertex': list(v), 'what': 'column'})
        truth = (v[0] - 1, patch.parent(v))
        if patch.parent(v) is not None and recon.parent.get(v) != truth:
            mismatches.append({'vertex': list(v), 'what': 'parent'})
    if len(y_offsets) > 1:
        mismatches.append({'vertex': None, 'what': 'rows'})
    return {'checked': len(vertices), 'ok': not mismatches and bool(vertices), 'mismatches': mismatches}
