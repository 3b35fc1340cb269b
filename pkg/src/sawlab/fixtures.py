"""Constructive pattern-bearing fixtures.

Uniformly sampled small polygons contain no pattern occurrences (a slot
needs a trace at least ~28 steps long), so test subjects are built
explicitly: rectangular circuits whose horizontal corridors carry
"notches" -- south, east, north detours whose east step is replaced by a
full pattern hanging below the corridor line.

The standard fixture is a two-corridor circuit.  Slots near the start of
the upper corridor land in S1, slots near the *end* of the lower corridor
land in S2, and slots near the start of the lower corridor sit in the
middle section (frozen under resampling).  The builder stretches the
connecting runs until the slot partition comes out exactly as requested.
"""

from __future__ import annotations

from .lattice import Point, Polygon, Walk
from .patterns import (
    PatternPair,
    canonical_pattern_pair,
    slot_partition,
    splice_kinds,
)

Kind = str  # "I" or "II"


def _pattern_vertices(pair: PatternPair, kind: Kind, base: Point) -> list[Point]:
    chi = pair.chi_one if kind == "I" else pair.chi_two
    return [tuple(a + b for a, b in zip(v, base)) for v in chi.vertices]


def _corridor_east(
    y: int, x_from: int, x_to: int, notches: dict[int, Kind], pair: PatternPair
) -> list[Point]:
    """Vertices of an eastbound corridor from (x_from, y) to (x_to, y); a
    notch at x dips south and hosts a full pattern in the cube below."""
    verts: list[Point] = [(x_from, y)]
    cur = x_from
    while cur < x_to:
        kind = notches.get(cur)
        if kind is not None:
            verts.extend(_pattern_vertices(pair, kind, (cur - 1, y - 4)))
            verts.append((cur + 1, y))
        else:
            verts.append((cur + 1, y))
        cur += 1
    return verts


def _vrange(x: int, y_from: int, y_to: int) -> list[Point]:
    step = 1 if y_to > y_from else -1
    return [(x, y) for y in range(y_from + step, y_to + step, step)]


def _hrange(y: int, x_from: int, x_to: int) -> list[Point]:
    step = 1 if x_to > x_from else -1
    return [(x, y) for x in range(x_from + step, x_to + step, step)]


def corridor_trace(
    s1_kinds: tuple[Kind, ...],
    s2_kinds: tuple[Kind, ...],
    mid_kinds: tuple[Kind, ...] = (),
    *,
    stretch: int = 0,
    width_pad: int = 0,
) -> Walk:
    """The closed trace of a two-corridor fixture (before auto-tuning)."""
    pair = canonical_pattern_pair(2)
    w_top = max(4 * len(s1_kinds), 4) + width_pad
    lower_span = 4 * (len(mid_kinds) + len(s2_kinds)) + 8
    w_bot = max(w_top + 2, lower_span) + stretch
    y_mid = 7  # fixed spine: the final climb must stay shorter than the segment window

    notches1 = {-w_top + 4 * i: k for i, k in enumerate(s1_kinds)}
    notches2 = {-w_bot + 4 * i: k for i, k in enumerate(mid_kinds)}
    first_s2 = -4 - 4 * (len(s2_kinds) - 1)
    for i, k in enumerate(s2_kinds):
        notches2[first_s2 + 4 * i] = k
    if s2_kinds and mid_kinds:
        last_mid = -w_bot + 4 * (len(mid_kinds) - 1)
        if first_s2 - last_mid < 4:
            raise ValueError("lower corridor too short for the requested slots")

    verts: list[Point] = [(0, 0)]
    verts += _hrange(0, 0, -w_top)                     # top run, west
    verts += _vrange(-w_top, 0, -2)                    # down to the upper corridor
    verts += _corridor_east(-2, -w_top, -1, notches1, pair)[1:]
    verts += _vrange(-1, -2, -y_mid)                   # down the spine
    verts += _hrange(-y_mid, -1, -w_bot)               # westbound crossover
    verts += _vrange(-w_bot, -y_mid, -y_mid - 2)
    verts += _corridor_east(-y_mid - 2, -w_bot, -1, notches2, pair)[1:]
    verts += _hrange(-y_mid - 2, -1, 0)
    verts += _vrange(0, -y_mid - 2, 0)                 # final climb to the origin
    return Walk.from_vertices(verts)


def corridor_polygon(
    s1_kinds: tuple[Kind, ...],
    s2_kinds: tuple[Kind, ...],
    mid_kinds: tuple[Kind, ...] = (),
    *,
    width_pad: int = 0,
    max_rounds: int = 400,
) -> Polygon:
    """A fixture polygon whose slot partition is exactly as requested:
    ``s1_kinds`` in S1 (trace order), ``s2_kinds`` in S2, ``mid_kinds``
    frozen in the middle.  The connector runs are stretched until the
    end-segment windows capture exactly the intended slots."""
    from .resampler import WindowUndefinedError, middle_window

    want_s1 = list(s1_kinds)
    want_s2 = list(s2_kinds)
    for stretch in range(0, 4 * max_rounds, 4):
        trace = corridor_trace(s1_kinds, s2_kinds, mid_kinds,
                               stretch=stretch, width_pad=width_pad)
        p = Polygon.from_closed_trace(trace)
        sm = slot_partition(p)
        if len(sm.slots) != len(s1_kinds) + len(s2_kinds) + len(mid_kinds):
            raise AssertionError("fixture scan found an unexpected slot set")
        got_s1 = [sm.slots[i].kind for i in sorted(sm.s1, key=lambda i: sm.slots[i].step)]
        got_s2 = [sm.slots[i].kind for i in sorted(sm.s2, key=lambda i: sm.slots[i].step)]
        in_sel = sm.s1 | sm.s2
        rest = [sm.slots[i].kind for i in range(len(sm.slots)) if i not in in_sel]
        if got_s1 != want_s1 or got_s2 != want_s2 or rest != list(mid_kinds):
            continue
        try:
            middle_window(p, sm)  # no slot may straddle a segment boundary
        except WindowUndefinedError:
            continue
        return p
    raise AssertionError("fixture auto-tuning did not converge")


def straight_splice_walk(kind: Kind, run: int = 6) -> Walk:
    """An open eastbound corridor with a single notch: exactly one occurrence
    of the requested pattern at the notch's east step."""
    pair = canonical_pattern_pair(2)
    x_notch = run // 2
    verts: list[Point] = [(0, 0)]
    verts += _hrange(0, 0, x_notch)
    verts += _pattern_vertices(pair, kind, (x_notch - 1, -4))
    verts.append((x_notch + 1, 0))
    verts += _hrange(0, x_notch + 1, x_notch + run)
    return Walk.from_vertices(verts)


def fixture_walk(p: Polygon) -> Walk:
    """The open walk obtained by dropping the final step of the canonical
    trace (self-avoiding, keeps every slot of the polygon)."""
    trace = p.canonical_path
    return trace.prefix(len(trace) - 1)


def one_swap_pairs(w: Walk) -> list[tuple[Walk, Walk]]:
    """For each slot of w, the pair (w, w with that one slot's type swapped)."""
    from .patterns import scan_patterns

    sm = scan_patterns(w)
    out = []
    for s in sm.slots:
        other = "II" if s.kind == "I" else "I"
        out.append((w, splice_kinds(w, [s], [other])))
    return out


def fixture_corpus(min_size: int = 50) -> list[Polygon]:
    """The standard corpus of constructed pattern-bearing polygons: at least
    ``min_size`` fixtures covering a range of slot counts, type mixtures,
    frozen middle slots and corridor paddings."""
    corpus: list[Polygon] = []
    singles = [("I",), ("II",)]
    doubles = [("I", "I"), ("I", "II"), ("II", "I"), ("II", "II")]
    for a in singles + doubles:
        for b in singles + doubles:
            corpus.append(corridor_polygon(a, b))
    for a in singles:
        for b in singles:
            for m in singles:
                corpus.append(corridor_polygon(a, b, m))
    for pad in (2, 6):
        for a, b in [(("I", "II"), ("II",)), (("II",), ("I", "II"))]:
            corpus.append(corridor_polygon(a, b, width_pad=pad))
    corpus.append(corridor_polygon(("I", "II", "II"), ("I", "I")))
    corpus.append(corridor_polygon(("II", "II"), ("I", "II", "I")))
    corpus.append(corridor_polygon(("I", "I", "I"), ("II", "II", "II")))
    corpus.append(corridor_polygon(("II", "I", "II"), ("II", "I", "I"), ("II",)))
    if len(corpus) < min_size:
        for pad in range(1, min_size - len(corpus) + 1):
            corpus.append(corridor_polygon(("I", "II"), ("II", "I"), width_pad=pad))
    return corpus


def good_shell_fixture() -> Polygon:
    """A fixture with a mixed selection in both segments, suitable for the
    resampling experiments (several members, non-trivial marginal)."""
    return corridor_polygon(("I", "II", "I"), ("II", "I", "II"))
