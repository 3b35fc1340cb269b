"""The two-part decomposition of walks, polygon traces and cyclic shifts.

A self-avoiding walk is split at its NE vertex into an ordered pair of
walks that emanate from that vertex and share no other vertex.  The first
part is the one whose vertex list is lexicographically the larger; since
both lists start at the NE vertex and the parts are otherwise disjoint,
this reduces to comparing the parts' first steps.

When the split happens at an endpoint one part is empty and the list rule
degenerates.  The tie is broken by the direction the walk leaves the NE
vertex: the non-empty part is the first part iff its first step is
lexicographically larger than the walk's return direction (for closing
walks, the far endpoint adjacent to the NE vertex; for open walks, the
largest admissible direction NE - e1 stands in).  This is the unique
convention under which the first-part-length histogram of closing walks
is exactly flat and the first-part law matches the polygon-prefix law;
see README for a worked discussion.
"""

from __future__ import annotations

from dataclasses import dataclass

from .counting import Constraint, check_guardrail, visit_saw_vertices
from .lattice import Point, Polygon, Walk, is_closing, is_self_avoiding, lex_key


def _minus_e1(p: Point) -> Point:
    return (p[0] - 1,) + p[1:]


def _split_rule(verts: tuple[Point, ...]) -> tuple[int, bool]:
    """-> (split index j, first part is the incoming segment).

    ``verts`` must be the vertex tuple of a self-avoiding walk.
    """
    n = len(verts) - 1
    ne = max(verts, key=lex_key)
    j = verts.index(ne)
    if n == 0:
        return 0, True
    if 0 < j < n:
        return j, lex_key(verts[j - 1]) > lex_key(verts[j + 1])
    closes = n >= 2 and sum(abs(a - b) for a, b in zip(verts[-1], verts[0])) == 1
    if j == 0:
        out_dir = verts[1]
        other = verts[n] if closes else _minus_e1(ne)
        if closes:
            first_is_full = lex_key(out_dir) > lex_key(other)
        else:
            first_is_full = out_dir == other
        # the incoming segment is the empty one; "first is incoming" iff first is empty
        return 0, not first_is_full
    # j == n
    out_dir = verts[n - 1]
    other = verts[0] if closes else _minus_e1(ne)
    if closes:
        first_is_full = lex_key(out_dir) > lex_key(other)
    else:
        first_is_full = out_dir == other
    return n, first_is_full


def first_part_length(verts: tuple[Point, ...]) -> int:
    """Length of the first part of a self-avoiding walk given as vertices."""
    j, first_incoming = _split_rule(verts)
    return j if first_incoming else len(verts) - 1 - j


def first_part_vertices(verts: tuple[Point, ...]) -> tuple[Point, ...]:
    """The first part as a vertex tuple starting at the NE vertex."""
    j, first_incoming = _split_rule(verts)
    return tuple(reversed(verts[: j + 1])) if first_incoming else verts[j:]


@dataclass(frozen=True)
class Decomposition:
    """Ordered pair of walks meeting at the NE vertex of the composed walk.

    ``first_is_incoming`` records which of the two parts the composed walk
    traverses first; without it the composed walk and its reversal could
    not be told apart when re-assembling.
    """

    first: Walk
    second: Walk
    meeting: Point
    first_is_incoming: bool = True


def decompose(w: Walk) -> Decomposition:
    """Split a self-avoiding walk at its NE vertex into (first, second)."""
    if not is_self_avoiding(w):
        raise ValueError("decompose is defined for self-avoiding walks")
    verts = w.vertices
    j, first_incoming = _split_rule(verts)
    incoming = Walk.from_vertices(tuple(reversed(verts[: j + 1])))
    outgoing = Walk.from_vertices(verts[j:])
    ne = verts[j]
    if first_incoming:
        return Decomposition(incoming, outgoing, ne, True)
    return Decomposition(outgoing, incoming, ne, False)


def compose(dec: Decomposition) -> Walk:
    """The unique walk whose decomposition is ``dec``.

    Raises ValueError when the pair violates the decomposition invariants
    (parts sharing a non-meeting vertex, a vertex above the meeting point,
    or an ordering inconsistent with the split rule).
    """
    first, second = dec.first, dec.second
    if first.origin != dec.meeting or second.origin != dec.meeting:
        raise ValueError("both parts must start at the meeting vertex")
    shared = set(first.vertices) & set(second.vertices)
    if shared != {dec.meeting}:
        raise ValueError(f"parts intersect away from the meeting vertex: {sorted(shared)[:3]}")
    key = lex_key(dec.meeting)
    if any(lex_key(v) > key for v in first.vertices + second.vertices):
        raise ValueError("a part climbs above the meeting vertex")
    if dec.first_is_incoming:
        verts = tuple(reversed(first.vertices)) + second.vertices[1:]
    else:
        verts = tuple(reversed(second.vertices)) + first.vertices[1:]
    w = Walk.from_vertices(verts)
    if decompose(w) != dec:
        raise ValueError("pair is not ordered according to the split rule")
    return w


def polygon_to_path(p: Polygon) -> Walk:
    """Canonical closed trace: starts at the origin, first step to the
    lex-larger cycle neighbour (-e1 for d=2), returns from the lex-smaller
    one (-e2 for d=2)."""
    return p.canonical_path


def cyclic_shift(w: Walk, j: int) -> Walk:
    """Rotate a closing walk: vertex i of the output is vertex (j+i) mod (n+1)
    of the input.  The output closes and traces the same polygon up to
    translation."""
    if not is_closing(w):
        raise ValueError("cyclic shifts are defined for closing walks")
    verts = w.vertices
    size = len(verts)
    j %= size
    shifted = tuple(verts[(j + i) % size] for i in range(size))
    return Walk.from_vertices(shifted)


def closing_first_length_histogram(
    n: int, d: int = 2, *, node_budget: int | None = None
) -> list[int]:
    """Histogram of the first-part length over closing walks with NE at the
    origin; all n+1 bins are equal (two closing traces per polygon per bin)."""
    if n % 2 == 0 or n < 3:
        raise ValueError("need odd n >= 3")
    check_guardrail(n, d, node_budget)
    bins = [0] * (n + 1)

    def see(verts: tuple[Point, ...]) -> None:
        if sum(abs(a - b) for a, b in zip(verts[-1], verts[0])) == 1:
            bins[first_part_length(verts)] += 1

    # first-part lengths are translation-invariant, so the origin-start
    # enumeration stands in for the NE-at-origin set
    visit_saw_vertices(n, d, Constraint.ORIGIN, see, budget=node_budget)
    return bins


__all__ = [
    "Decomposition",
    "decompose",
    "compose",
    "polygon_to_path",
    "cyclic_shift",
    "closing_first_length_histogram",
    "first_part_length",
    "first_part_vertices",
]
