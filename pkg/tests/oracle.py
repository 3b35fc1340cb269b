"""Independent naive oracle used to derive expected values.

Deliberately shares nothing with the package engine: plain recursive DFS
over coordinate tuples, membership tested against the path list, no
occupancy grid, no pruning beyond self-avoidance itself.  Slow but
obviously correct; every frozen constant in the tests was computed here.
"""

from __future__ import annotations



def moves(d):
    return [
        tuple((1 if i == ax else 0) * s for i in range(d))
        for ax in range(d)
        for s in (1, -1)
    ]


def saws(n, d=2, start=None):
    """All self-avoiding walks of length n from start, as vertex tuples."""
    start = start or tuple(0 for _ in range(d))
    out = []
    path = [start]

    def rec():
        if len(path) == n + 1:
            out.append(tuple(path))
            return
        for mv in moves(d):
            nxt = tuple(a + b for a, b in zip(path[-1], mv))
            if nxt not in path:
                path.append(nxt)
                rec()
                path.pop()

    rec()
    return out


def lexkey(p):
    return tuple(reversed(p))


def translate_to_ne(verts):
    ne = max(verts, key=lexkey)
    return tuple(tuple(a - b for a, b in zip(v, ne)) for v in verts)


def ne_walks(n, d=2):
    """The NE-at-origin set: origin walks translated so their max vertex is 0."""
    return [translate_to_ne(v) for v in saws(n, d)]


def first_parts(n, d=2):
    """Walks from the origin whose lexicographic maximum is the origin."""
    zero = tuple(0 for _ in range(d))
    return [v for v in saws(n, d) if max(v, key=lexkey) == zero]


def closes(verts):
    return len(verts) >= 3 and manhattan(verts[-1], verts[0]) == 1


def manhattan(a, b):
    return sum(abs(x - y) for x, y in zip(a, b))


def polygon_edges(verts):
    """Edge set of a closing walk plus its missing edge, NE-normalized."""
    shifted = translate_to_ne(verts)
    cycle = list(shifted) + [shifted[0]]
    edges = set()
    for a, b in zip(cycle, cycle[1:]):
        edges.add((a, b) if a <= b else (b, a))
    return frozenset(edges)


def polygons(n, d=2):
    """All length-n polygons up to translation, as NE-normalized edge sets."""
    out = set()
    for verts in saws(n - 1, d):
        if closes(verts):
            out.add(polygon_edges(verts))
    return out


def closing_count(n, d=2):
    return sum(1 for v in saws(n, d) if closes(v))
