"""Lattice points, walks, polygons, orderings and the walk text codec.

Conventions used throughout the package:

* A point of Z^d is a plain tuple of d ints.
* Steps are signed 1-based axis indices: +1 means +e1, -2 means -e2, ...
* The lexicographic order on points compares coordinate d first, then
  d-1, down to coordinate 1.  For d=2 this is the "most north, then most
  east" rule; for d >= 3 it is the uniform generalization (a choice, see
  README: the ordering for d >= 3 is not canonical).
* The NE vertex of a walk is its lexicographically maximal visited vertex.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

from .exact import ExactProb  # noqa: F401  (re-exported: probabilities live here too)

Point = tuple[int, ...]
LatticePoint = Point  # public alias: a lattice point is a plain tuple of ints


class CodecError(ValueError):
    """Malformed walk text."""


def lex_key(p: Point) -> Point:
    """Sort key realizing the package's lexicographic order on points."""
    return tuple(reversed(p))


def lex_compare_points(u: Point, v: Point) -> int:
    """Total order on Z^d: -1, 0 or +1.  Coordinate d dominates, then d-1, ..."""
    if len(u) != len(v):
        raise ValueError(f"dimension mismatch: {len(u)} vs {len(v)}")
    ku, kv = lex_key(u), lex_key(v)
    return (ku > kv) - (ku < kv)


def unit(d: int, axis: int, sign: int = 1) -> Point:
    """The point sign*e_axis (axis is 1-based)."""
    return tuple(sign if i == axis - 1 else 0 for i in range(d))


def step_vector(d: int, step: int) -> Point:
    axis = abs(step)
    if not 1 <= axis <= d:
        raise ValueError(f"step {step} not a unit axis step in dimension {d}")
    return unit(d, axis, 1 if step > 0 else -1)


# Canonical step enumeration order: +e1, -e1, +e2, -e2, ...
def step_order(d: int) -> tuple[int, ...]:
    out = []
    for axis in range(1, d + 1):
        out.extend((axis, -axis))
    return tuple(out)


@dataclass(frozen=True)
class Walk:
    """A nearest-neighbour walk on Z^d: an origin plus a step sequence.

    Immutable value; two walks are equal iff they traverse the same
    vertices in the same order.  Walks need not be self-avoiding (a
    polygon's closed trace, for instance, revisits its start).
    """

    dimension: int
    origin: Point
    steps: tuple[int, ...] = ()

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if len(self.origin) != self.dimension:
            raise ValueError("origin has wrong dimension")
        for s in self.steps:
            if not 1 <= abs(s) <= self.dimension:
                raise ValueError(f"invalid step token {s} for dimension {self.dimension}")

    @cached_property
    def vertices(self) -> tuple[Point, ...]:
        out = [self.origin]
        cur = list(self.origin)
        for s in self.steps:
            axis = abs(s) - 1
            cur[axis] += 1 if s > 0 else -1
            out.append(tuple(cur))
        return tuple(out)

    def __len__(self) -> int:
        return len(self.steps)

    def __getitem__(self, i: int) -> Point:
        return self.vertices[i]

    @property
    def end(self) -> Point:
        return self.vertices[-1]

    @classmethod
    def from_vertices(cls, vertices: Iterable[Point]) -> "Walk":
        vs = [tuple(v) for v in vertices]
        if not vs:
            raise ValueError("a walk has at least one vertex")
        d = len(vs[0])
        steps = []
        for a, b in zip(vs, vs[1:]):
            diff = [y - x for x, y in zip(a, b)]
            nz = [i for i, c in enumerate(diff) if c != 0]
            if len(nz) != 1 or abs(diff[nz[0]]) != 1:
                raise ValueError(f"vertices {a} and {b} are not lattice neighbours")
            i = nz[0]
            steps.append((i + 1) if diff[i] > 0 else -(i + 1))
        return cls(d, vs[0], tuple(steps))

    def prefix(self, k: int) -> "Walk":
        if not 0 <= k <= len(self.steps):
            raise ValueError("prefix length out of range")
        return Walk(self.dimension, self.origin, self.steps[:k])

    def translate(self, offset: Point) -> "Walk":
        o = tuple(c + dc for c, dc in zip(self.origin, offset))
        return Walk(self.dimension, o, self.steps)


def is_self_avoiding(w: Walk) -> bool:
    vs = w.vertices
    return len(set(vs)) == len(vs)


def ne_vertex(w: Walk) -> Point:
    """The lexicographically maximal visited vertex."""
    return max(w.vertices, key=lex_key)


def reverse_walk(w: Walk) -> Walk:
    return Walk(w.dimension, w.end, tuple(-s for s in reversed(w.steps)))


def is_closing(w: Walk) -> bool:
    """True iff the endpoint neighbours the start and the length is >= 2.

    Lengths below 3 never close into a polygon; for a length-1 walk the
    endpoint adjacency is the walk's own edge and does not count.
    """
    if not is_self_avoiding(w):
        raise ValueError("closing is defined for self-avoiding walks only")
    if len(w) < 2:
        return False
    return sum(abs(a - b) for a, b in zip(w.end, w.origin)) == 1


def distinguished_axis(d: int) -> int:
    """Axis of the construction reflection: e2 when d=2, e1 otherwise."""
    return 2 if d == 2 else 1


def reflect_for_construction(w: Walk) -> Walk:
    """Reflect through the distinguished axis' zero hyperplane, then shift by
    the distinguished unit vector.  The input must start at the origin; the
    output starts at the unit vector."""
    if any(c != 0 for c in w.origin):
        raise ValueError("input walk must start at the origin")
    d = w.dimension
    ax = distinguished_axis(d)
    steps = tuple(-s if abs(s) == ax else s for s in w.steps)
    return Walk(d, unit(d, ax), steps)


# --- text codec ------------------------------------------------------------

_LETTER_STEPS = {"E": 1, "W": -1, "N": 2, "S": -2}
_STEP_LETTERS = {v: k for k, v in _LETTER_STEPS.items()}
_RECORD_RE = re.compile(r"^d=(\d+);origin=([^;]*);steps=(.*)$")


def parse_walk(text: str) -> Walk:
    """Parse one walk record: ``d=<int>;origin=<c1,...,cd>;steps=<tokens>``.

    Steps are either the letters E, W, N, S (d=2 only) or comma-separated
    signed axis indices like ``+1,-2`` (any d).
    """
    m = _RECORD_RE.match(text.strip())
    if not m:
        raise CodecError(f"malformed walk record: {text!r}")
    d = int(m.group(1))
    if d < 1:
        raise CodecError("dimension must be >= 1")
    try:
        origin = tuple(int(c) for c in m.group(2).split(",")) if m.group(2) else ()
    except ValueError as e:
        raise CodecError(f"bad origin in {text!r}") from e
    if len(origin) != d:
        raise CodecError(f"origin has {len(origin)} coordinates, expected {d}")
    raw = m.group(3).strip()
    steps: list[int] = []
    if raw:
        if all(ch in _LETTER_STEPS for ch in raw):
            if d != 2:
                raise CodecError("letter step tokens are defined for d=2 only")
            steps = [_LETTER_STEPS[ch] for ch in raw]
        else:
            for tok in raw.split(","):
                tok = tok.strip()
                if not re.fullmatch(r"[+-]?\d+", tok):
                    raise CodecError(f"invalid step token {tok!r}")
                s = int(tok)
                if not 1 <= abs(s) <= d:
                    raise CodecError(f"step token {tok!r} is not a unit axis step in d={d}")
                steps.append(s)
    return Walk(d, origin, tuple(steps))


def serialize_walk(w: Walk) -> str:
    """Canonical text form: letters for d=2, signed axis indices otherwise."""
    origin = ",".join(str(c) for c in w.origin)
    if w.dimension == 2:
        toks = "".join(_STEP_LETTERS[s] for s in w.steps)
    else:
        toks = ",".join(f"{s:+d}" for s in w.steps)
    return f"d={w.dimension};origin={origin};steps={toks}"


def parse_walks(text: str) -> list[Walk]:
    """Parse one record per line (blank lines ignored)."""
    return [parse_walk(line) for line in text.splitlines() if line.strip()]


# --- polygons ---------------------------------------------------------------

Edge = tuple[Point, Point]


def _edge(u: Point, v: Point) -> Edge:
    return (u, v) if u <= v else (v, u)


def walk_edges(w: Walk) -> list[Edge]:
    return [_edge(a, b) for a, b in zip(w.vertices, w.vertices[1:])]


@dataclass(frozen=True)
class Polygon:
    """A closed cycle of nearest-neighbour edges with its NE vertex at the origin.

    ``edges`` is a frozenset of unordered edges; the length is the edge
    count (always even, >= 4).  The canonical closed trace starts at the
    origin, moves first to the lex-larger of the origin's two cycle
    neighbours (-e1 for d=2) and returns at the end from the lex-smaller
    one (-e2 for d=2).
    """

    dimension: int
    edges: frozenset[Edge] = field(repr=False)

    def __post_init__(self):
        deg: dict[Point, list[Point]] = {}
        for u, v in self.edges:
            if len(u) != self.dimension or len(v) != self.dimension:
                raise ValueError("edge dimension mismatch")
            if sum(abs(a - b) for a, b in zip(u, v)) != 1:
                raise ValueError(f"not a nearest-neighbour edge: {u}-{v}")
            deg.setdefault(u, []).append(v)
            deg.setdefault(v, []).append(u)
        n = len(self.edges)
        if n < 4 or n % 2:
            raise ValueError(f"polygon length must be even and >= 4, got {n}")
        bad = [p for p, nb in deg.items() if len(nb) != 2]
        if bad:
            raise ValueError(f"vertex degree != 2 at {bad[:3]}")
        if len(deg) != n:
            raise ValueError("edge set is not a single cycle (vertex count mismatch)")
        ne = max(deg, key=lex_key)
        if any(c != 0 for c in ne):
            raise ValueError(f"NE vertex must be the origin, found {ne}")
        # single-cycle check: walk from the origin and count visited vertices
        start = ne
        prev, cur = None, start
        seen = 1
        while True:
            a, b = deg[cur]
            nxt = b if a == prev else a
            if nxt == start:
                break
            prev, cur = cur, nxt
            seen += 1
        if seen != len(deg):
            raise ValueError("edge set is not a single cycle")

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def length(self) -> int:
        return len(self.edges)

    @cached_property
    def vertex_set(self) -> frozenset[Point]:
        out: set[Point] = set()
        for u, v in self.edges:
            out.add(u)
            out.add(v)
        return frozenset(out)

    @cached_property
    def canonical_path(self) -> Walk:
        """Closed trace of length n with both endpoints at the origin."""
        nbrs: dict[Point, list[Point]] = {}
        for u, v in self.edges:
            nbrs.setdefault(u, []).append(v)
            nbrs.setdefault(v, []).append(u)
        origin = tuple(0 for _ in range(self.dimension))
        a, b = sorted(nbrs[origin], key=lex_key, reverse=True)
        verts = [origin, a]
        prev, cur = origin, a
        while cur != origin:
            x, y = nbrs[cur]
            nxt = y if x == prev else x
            verts.append(nxt)
            prev, cur = cur, nxt
        return Walk.from_vertices(verts)

    @classmethod
    def from_closing_walk(cls, w: Walk) -> "Polygon":
        """Close a closing walk with its missing edge and translate so the
        NE vertex of the resulting cycle is the origin."""
        if not is_closing(w):
            raise ValueError("walk does not close")
        ne = ne_vertex(w)
        shifted = w.translate(tuple(-c for c in ne))
        edges = set(walk_edges(shifted))
        edges.add(_edge(shifted.end, shifted.origin))
        return cls(w.dimension, frozenset(edges))

    @classmethod
    def from_closed_trace(cls, w: Walk) -> "Polygon":
        """Build a polygon from a closed trace (start vertex == end vertex)."""
        if w.origin != w.end or len(w) < 4:
            raise ValueError("not a closed trace")
        verts = w.vertices[:-1]
        if len(set(verts)) != len(verts):
            raise ValueError("trace revisits a vertex")
        ne = max(verts, key=lex_key)
        shifted = w.translate(tuple(-c for c in ne))
        return cls(w.dimension, frozenset(walk_edges(shifted)))


def polygon_of(w: Walk) -> Polygon:
    """The polygon traced by a closing walk (up to translation)."""
    return Polygon.from_closing_walk(w)


def iter_prefixes(w: Walk) -> Iterator[Walk]:
    for k in range(len(w) + 1):
        yield w.prefix(k)
