"""The {p,q} substitution, its position-decorated copy and horizontal-type paths."""

import logging
import re
from functools import lru_cache

from orbitile.graph.patch import Face
from orbitile.orbit.seed import seed_orbit
from orbitile.orbit.window import OrbitWindow
from orbitile.overlay.letter import OverlayLetter
from orbitile.substitution.system import SubstitutionSystem, make_system
from orbitile.util.exceptions import BadParameters, InconsistentCycle

logger = logging.getLogger(__name__)

Y, W = 'Y', 'W'


@lru_cache(maxsize=None)
def pq_substitution(p: int, q: int) -> SubstitutionSystem:
    """σ(Y) = (Y W^(p-3))^(q-4) Y W^(p-4) and σ(W) = (Y W^(p-3))^(q-3) Y W^(p-4)."""
    if p < 5 or q < 5:
        raise BadParameters(p, q)
    block = (Y,) + (W,) * (p - 3)
    tail = (Y,) + (W,) * (p - 4)
    return make_system(f'pq_{p}_{q}', {Y: block * (q - 4) + tail, W: block * (q - 3) + tail})


@lru_cache(maxsize=None)
def decorate(sys_: SubstitutionSystem) -> SubstitutionSystem:
    """Letters (b, k) for every b at position k of some image; σ_#(a, i) spells σ(a) with positions."""
    letters = {(x, k) for a in sys_.alphabet for k, x in enumerate(sys_.image(a), start=1)}
    alphabet = tuple(sorted(letters, key=lambda bk: (bk[1], sys_.index(bk[0]))))
    rules = {
        (b, k): tuple((x, t) for t, x in enumerate(sys_.image(b), start=1)) for b, k in alphabet
    }
    return SubstitutionSystem(f'{sys_.name}#', alphabet, rules)


def decorated_window(p: int, q: int, rows: int, width: int) -> OrbitWindow:
    window = seed_orbit(decorate(pq_substitution(p, q)), rows, width)
    window.metadata['pq'] = [p, q]
    return window


def pq_of(metadata: dict) -> tuple[int, int] | None:
    """(p, q) recorded with a window or patch, else read off a ``pq_p_q`` system name."""
    if 'pq' in metadata:
        p, q = metadata['pq']
        return int(p), int(q)
    name = metadata.get('systems', {}).get('a', {}).get('name', '')
    match = re.fullmatch(r'pq_(\d+)_(\d+)#?', name)
    return (int(match[1]), int(match[2])) if match else None


def decoration(label) -> tuple:
    """The (base, position) part of a vertex label."""
    return label.alpha if isinstance(label, OverlayLetter) else label


def horizontal_type(seq, a, p: int, sys_: SubstitutionSystem, bases=None) -> bool:
    """Whether positions ``seq`` read a horizontal run produced by base letter ``a``.

    The positions are consecutive inside σ(a); a run of p−2 wraps from the
    last position of σ(a) to the first position of the next image on its
    final step, a run of p−1 does not wrap. Both ends sit on Y-positions.
    ``bases``, when given, must agree with the letters at those positions.
    """
    seq = list(seq)
    k = len(seq)
    if k not in (p - 1, p - 2) or a not in sys_.alphabet:
        return False
    image = sys_.image(a)
    size = len(image)
    wraps = k == p - 2
    inside = seq[:-1] if wraps else seq
    if not all(1 <= n <= size for n in inside):
        return False
    if any(m + 1 != n for m, n in zip(inside, inside[1:])):
        return False
    if wraps and not (inside[-1] == size and seq[-1] == 1):
        return False
    if image[seq[0] - 1] != Y or (not wraps and image[seq[-1] - 1] != Y):
        return False
    if bases is not None:
        expected = [image[n - 1] for n in inside] + ([Y] if wraps else [])
        if list(bases) != expected:
            return False
    return True


def horizontal_paths(cycle, label_of, p: int, sys_: SubstitutionSystem) -> list:
    """(start, length) of every horizontal-type path of an oriented face cycle."""
    n = len(cycle)
    found = []
    for start in range(n):
        producer = decoration(label_of(cycle[start - 1]))
        for k in (p - 1, p - 2):
            if k < 1 or k >= n:
                continue
            path = [decoration(label_of(cycle[(start + t) % n])) for t in range(k)]
            if horizontal_type([pos for _, pos in path], producer[0], p, sys_, [b for b, _ in path]):
                found.append((start, k))
    return found


def horizontal_path(cycle, label_of, p: int, sys_: SubstitutionSystem) -> tuple:
    """The unique horizontal-type path of a face as (path vertices, v_0, v_1)."""
    found = horizontal_paths(cycle, label_of, p, sys_)
    if len(found) != 1:
        raise InconsistentCycle(list(cycle), f'{len(found)} horizontal-type paths')
    start, k = found[0]
    n = len(cycle)
    path = tuple(cycle[(start + t) % n] for t in range(k))
    return path, cycle[start - 1], cycle[(start + k) % n]


def produced_by(cycle, label_of, p: int, sys_: SubstitutionSystem) -> dict:
    """Producer of every vertex on the face's horizontal-type path."""
    path, before, after = horizontal_path(cycle, label_of, p, sys_)
    if len(path) == p - 1:
        return {v: before for v in path}
    producers = {v: before for v in path[:-1]}
    producers[path[-1]] = after
    return producers


def produced_path(faces, label_of, v, p: int, sys_: SubstitutionSystem) -> tuple:
    """Vertices produced by ``v`` in the given faces, in order of position."""
    produced = set()
    for cycle in faces:
        cycle = cycle.cycle if isinstance(cycle, Face) else cycle
        if v not in cycle:
            continue
        for u, producer in produced_by(cycle, label_of, p, sys_).items():
            if producer == v:
                produced.add(u)
    return tuple(sorted(produced, key=lambda u: decoration(label_of(u))[1]))
