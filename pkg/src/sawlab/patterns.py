"""Local pattern machinery: the fixed type I/II pattern pair, occurrence and
slot detection, emptied polygons, the two end-segment slot families S1/S2,
local shells, and the shared-avoidance equivalence between shell members.

Patterns are two fixed self-avoiding walks confined to the cube [0,3]^d.
Both visit every boundary vertex of the cube and run from (1,3,1,...,1) to
(2,3,1,...,1); the second is two steps longer.  An occurrence of a pattern
in a walk is a translate (no rotations or reflections); its slot is the
hosting cube translate.  Because each pattern covers its cube's entire
boundary and walks are self-avoiding, the slots of a walk are pairwise
disjoint -- the scanner checks this instead of assuming it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .lattice import Point, Polygon, Walk, lex_key, unit

CUBE = 3  # patterns live in [0, CUBE]^d


class SlotOverlapError(ValueError):
    """Candidate occurrences with intersecting cubes (disjointness violated)."""


class ShellInstabilityError(ValueError):
    """Toggling slot contents changed the detected slot set."""


class SlotBudgetError(ValueError):
    """Too many slots to enumerate the local shell exactly."""


class PatternSearchError(RuntimeError):
    """No pattern pair found within the search budget (a defect: pairs exist
    in every dimension >= 2)."""


@dataclass(frozen=True)
class PatternPair:
    """The fixed pair of boundary-covering cube walks; the longer one (type
    II) exceeds the shorter (type I) by exactly two steps."""

    dimension: int
    chi_one: Walk
    chi_two: Walk


def pattern_start(d: int) -> Point:
    return tuple([1, CUBE] + [1] * (d - 2))


def pattern_end(d: int) -> Point:
    return tuple([2, CUBE] + [1] * (d - 2))


def cube_boundary(d: int) -> frozenset[Point]:
    cells = itertools.product(range(CUBE + 1), repeat=d)
    return frozenset(p for p in cells if any(c in (0, CUBE) for c in p))


def cube_interior(d: int) -> frozenset[Point]:
    return frozenset(
        p for p in itertools.product(range(1, CUBE), repeat=d)
    )


_CANONICAL_D2_ONE = (
    (1, 3), (0, 3), (0, 2), (0, 1), (0, 0), (1, 0),
    (2, 0), (3, 0), (3, 1), (3, 2), (3, 3), (2, 3),
)
_CANONICAL_D2_TWO = (
    (1, 3), (0, 3), (0, 2), (0, 1), (0, 0), (1, 0), (1, 1),
    (2, 1), (2, 0), (3, 0), (3, 1), (3, 2), (3, 3), (2, 3),
)

_PAIR_CACHE: dict[int, PatternPair] = {}


def validate_pattern_pair(pair: PatternPair) -> tuple[bool, list[str]]:
    """Check every pattern-pair invariant; violations are reported, not thrown."""
    d = pair.dimension
    problems: list[str] = []
    if d < 2:
        problems.append("dimension must be >= 2")
        return False, problems
    boundary = cube_boundary(d)
    for name, chi in (("type I", pair.chi_one), ("type II", pair.chi_two)):
        if chi.dimension != d:
            problems.append(f"{name}: wrong dimension")
            continue
        vs = chi.vertices
        if len(set(vs)) != len(vs):
            problems.append(f"{name}: not self-avoiding")
        if any(not all(0 <= c <= CUBE for c in v) for v in vs):
            problems.append(f"{name}: leaves the cube [0,{CUBE}]^{d}")
        if vs[0] != pattern_start(d):
            problems.append(f"{name}: wrong start {vs[0]}")
        if vs[-1] != pattern_end(d):
            problems.append(f"{name}: wrong end {vs[-1]}")
        missing = boundary - set(vs)
        if missing:
            problems.append(f"{name}: misses {len(missing)} boundary vertices")
    if len(pair.chi_two) != len(pair.chi_one) + 2:
        problems.append("length difference is not two")
    return not problems, problems


def _search_boundary_path(d: int, budget: int = 5_000_000) -> list[Point]:
    """Find a path through every boundary vertex of [0,CUBE]^d between the
    two pattern endpoints (fewest-onward-moves ordering, backtracking)."""
    boundary = cube_boundary(d)
    start, end = pattern_start(d), pattern_end(d)
    nbrs: dict[Point, list[Point]] = {}
    for p in boundary:
        ns = []
        for ax in range(d):
            for s in (1, -1):
                q = list(p)
                q[ax] += s
                q = tuple(q)
                if q in boundary:
                    ns.append(q)
        nbrs[p] = ns
    visited = {start}
    path = [start]
    nodes = 0

    def rec(pos: Point) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise PatternSearchError(f"search budget {budget} exhausted in d={d}")
        if len(path) == len(boundary):
            return pos == end
        cands = [
            q for q in nbrs[pos]
            if q not in visited and (q != end or len(path) == len(boundary) - 1)
        ]
        cands.sort(key=lambda q: sum(1 for r in nbrs[q] if r not in visited))
        for q in cands:
            visited.add(q)
            path.append(q)
            if rec(q):
                return True
            path.pop()
            visited.discard(q)
        return False

    if not rec(start):
        raise PatternSearchError(f"no boundary-covering path found in d={d}")
    return path


def _adjacent(a: Point, b: Point) -> bool:
    return sum(abs(x - y) for x, y in zip(a, b)) == 1


def canonical_pattern_pair(d: int = 2) -> PatternPair:
    """The package's fixed pattern pair: a stored pair for d=2, a pair found
    by bounded search (and cached) for d >= 3."""
    if d < 2:
        raise ValueError("patterns need dimension >= 2")
    pair = _PAIR_CACHE.get(d)
    if pair is not None:
        return pair
    if d == 2:
        pair = PatternPair(
            2,
            Walk.from_vertices(_CANONICAL_D2_ONE),
            Walk.from_vertices(_CANONICAL_D2_TWO),
        )
    else:
        verts = _search_boundary_path(d)
        interior = cube_interior(d)
        detour = None
        for i in range(len(verts) - 1):
            u, v = verts[i], verts[i + 1]
            for w1 in sorted(interior, key=lex_key):
                if not _adjacent(u, w1):
                    continue
                for w2 in sorted(interior, key=lex_key):
                    if w2 != w1 and _adjacent(w1, w2) and _adjacent(w2, v):
                        detour = (i, w1, w2)
                        break
                if detour:
                    break
            if detour:
                break
        if detour is None:
            raise PatternSearchError(f"no two-step interior detour found in d={d}")
        i, w1, w2 = detour
        longer = verts[: i + 1] + [w1, w2] + verts[i + 1 :]
        pair = PatternPair(d, Walk.from_vertices(verts), Walk.from_vertices(longer))
    ok, problems = validate_pattern_pair(pair)
    if not ok:
        raise PatternSearchError(f"constructed pair invalid: {problems}")
    _PAIR_CACHE[d] = pair
    return pair


# --- occurrence scanning -------------------------------------------------------


@dataclass(frozen=True)
class Slot:
    base: Point      # min corner of the hosting cube translate
    step: int        # occurrence step index along the scanned trace
    kind: str        # "I" or "II"


@dataclass(frozen=True)
class SlotMap:
    """Detected occurrences of the pattern pair along one walk or polygon
    trace, with the slot counts; S1/S2 and the N counts are populated by
    :func:`slot_partition` (a plain scan leaves them empty)."""

    dimension: int
    length: int                  # scanned trace length (n+1 for a polygon)
    slots: tuple[Slot, ...]
    s1: frozenset[int] = frozenset()
    s2: frozenset[int] = frozenset()
    empty_steps: tuple[int, ...] = ()  # per-slot occurrence step on the emptied trace
    n_one_s1: int = 0
    n_one_s2: int = 0
    n_two_s1: int = 0
    n_two_s2: int = 0
    phi: float | None = None
    good_shell: bool | None = None

    @property
    def t_one(self) -> int:
        return sum(1 for s in self.slots if s.kind == "I")

    @property
    def t_two(self) -> int:
        return sum(1 for s in self.slots if s.kind == "II")

    @property
    def n_one(self) -> int:
        return self.n_one_s1 + self.n_one_s2

    @property
    def n_two(self) -> int:
        return self.n_two_s1 + self.n_two_s2

    @property
    def empty_length(self) -> int:
        return self.length - 2 * self.t_two

    def to_json_dict(self) -> dict:
        return {
            "slots": [
                {
                    "base": list(s.base),
                    "step": s.step,
                    "type": s.kind,
                    "segment": ("S1" if i in self.s1 else "S2" if i in self.s2 else None),
                }
                for i, s in enumerate(self.slots)
            ],
            "counts": {
                "T_I": self.t_one,
                "T_II": self.t_two,
                "N_I": self.n_one,
                "N_II": self.n_two,
                "N_I1": self.n_one_s1,
                "N_I2": self.n_one_s2,
                "N_II1": self.n_two_s1,
                "N_II2": self.n_two_s2,
                "l_empty": self.empty_length,
            },
        }


def _trace_of(obj: Walk | Polygon) -> Walk:
    return obj.canonical_path if isinstance(obj, Polygon) else obj


def _cubes_disjoint(a: Point, b: Point) -> bool:
    return any(abs(x - y) >= CUBE + 1 for x, y in zip(a, b))


def _find_occurrences(trace: Walk, pair: PatternPair) -> list[Slot]:
    steps = trace.steps
    verts = trace.vertices
    start_off = pattern_start(trace.dimension)
    out: list[Slot] = []
    for kind, chi in (("I", pair.chi_one), ("II", pair.chi_two)):
        pat = chi.steps
        L = len(pat)
        for k in range(len(steps) - L + 1):
            if steps[k : k + L] == pat:
                base = tuple(a - b for a, b in zip(verts[k], start_off))
                out.append(Slot(base, k, kind))
    out.sort(key=lambda s: s.step)
    for a, b in itertools.combinations(out, 2):
        if not _cubes_disjoint(a.base, b.base):
            raise SlotOverlapError(f"slots at {a.base} and {b.base} intersect")
    return out


def scan_patterns(obj: Walk | Polygon) -> SlotMap:
    """All pattern occurrences along a walk (or a polygon's canonical trace).

    Matching is translation-only.  S1/S2 stay empty here; use
    :func:`slot_partition` for the full polygon bookkeeping.
    """
    trace = _trace_of(obj)
    pair = canonical_pattern_pair(trace.dimension)
    slots = _find_occurrences(trace, pair)
    return SlotMap(trace.dimension, len(trace), tuple(slots))


def _pattern_steps(d: int) -> dict[str, tuple[int, ...]]:
    pair = canonical_pattern_pair(d)
    return {"I": pair.chi_one.steps, "II": pair.chi_two.steps}


def splice_kinds(trace: Walk, slots: Sequence[Slot], kinds: Sequence[str]) -> Walk:
    """Rebuild a trace with each listed slot's pattern replaced by the given
    kind (slots must be in increasing step order)."""
    pat = _pattern_steps(trace.dimension)
    steps: list[int] = []
    pos = 0
    for slot, kind in zip(slots, kinds):
        if slot.step < pos:
            raise SlotOverlapError("occurrence step ranges overlap")
        steps.extend(trace.steps[pos : slot.step])
        steps.extend(pat[kind])
        pos = slot.step + len(pat[slot.kind])
    steps.extend(trace.steps[pos:])
    return Walk(trace.dimension, trace.origin, tuple(steps))


def empty_polygon(p: Polygon) -> tuple[Polygon, int]:
    """Replace every type-II occurrence by type I.  Returns the emptied
    polygon and the number of replacements; the emptied length is the
    original minus twice that count."""
    trace = p.canonical_path
    sm = scan_patterns(p)
    twos = [s for s in sm.slots if s.kind == "II"]
    if not twos:
        return p, 0
    new_trace = splice_kinds(trace, twos, ["I"] * len(twos))
    out = Polygon.from_closed_trace(new_trace)
    if max(new_trace.vertices, key=lex_key) != tuple(0 for _ in range(p.dimension)):
        raise ShellInstabilityError("emptying moved the NE vertex")
    return out, len(twos)


# --- S1/S2 partition -------------------------------------------------------------


def slot_partition(p: Polygon, phi: float | Fraction = 0.0) -> SlotMap:
    """Slots of a polygon with the S1/S2 end-segment split and all counts.

    S1 collects the slots lying inside the first floor((n+1)/10) steps of the
    emptied polygon's trace, S2 those inside the last floor((n+1)/10) steps.
    The good-shell flag records min(|S1|, |S2|, N_I, N_II) >= phi * (n+1).
    """
    n1 = len(p)
    sm = scan_patterns(p)
    trace = p.canonical_path
    pair = canonical_pattern_pair(p.dimension)
    len_one = len(pair.chi_one)
    empty_trace = splice_kinds(
        trace,
        [s for s in sm.slots if s.kind == "II"],
        ["I"] * sm.t_two,
    )
    empty_slots = _find_occurrences(empty_trace, pair)
    by_base = {s.base: s for s in empty_slots}
    if set(by_base) != {s.base for s in sm.slots} or any(
        s.kind != "I" for s in empty_slots
    ):
        raise ShellInstabilityError("slot set changed when emptying the polygon")
    l_empty = len(empty_trace)
    empty_steps = tuple(by_base[s.base].step for s in sm.slots)
    seg = n1 // 10
    s1 = frozenset(
        i for i, s in enumerate(sm.slots) if empty_steps[i] + len_one <= seg
    )
    s2 = frozenset(
        i for i, s in enumerate(sm.slots) if empty_steps[i] >= l_empty - seg
    )
    if s1 & s2:
        raise ShellInstabilityError("S1 and S2 intersect (polygon too short)")
    kinds = [s.kind for s in sm.slots]
    n_one_s1 = sum(1 for i in s1 if kinds[i] == "I")
    n_two_s1 = len(s1) - n_one_s1
    n_one_s2 = sum(1 for i in s2 if kinds[i] == "I")
    n_two_s2 = len(s2) - n_one_s2
    n_one = n_one_s1 + n_one_s2
    n_two = n_two_s1 + n_two_s2
    good = min(len(s1), len(s2), n_one, n_two) >= Fraction(phi) * n1
    return replace(
        sm,
        s1=s1,
        s2=s2,
        empty_steps=empty_steps,
        n_one_s1=n_one_s1,
        n_one_s2=n_one_s2,
        n_two_s1=n_two_s1,
        n_two_s2=n_two_s2,
        phi=float(phi),
        good_shell=good,
    )


# --- local shells -----------------------------------------------------------------


@dataclass(frozen=True)
class LocalShellKey:
    """Two polygons share a key iff one is obtained from the other by
    relocating the type-II patterns within the S1 u S2 slots."""

    empty_edges: frozenset
    selection_bases: tuple[Point, ...]   # S1 u S2 cube bases in empty-trace order
    two_count: int                       # type-II count within the selection
    frozen_slots: tuple[tuple[Point, str], ...]  # slots outside the selection


def selection_indices(sm: SlotMap) -> list[int]:
    """The S1 u S2 slot indices in trace order (the resampleable slots)."""
    return sorted(sm.s1 | sm.s2, key=lambda i: sm.slots[i].step)


_selection = selection_indices


def local_shell_key(p: Polygon, sm: SlotMap | None = None) -> LocalShellKey:
    sm = slot_partition(p) if sm is None else sm
    empty, _ = empty_polygon(p)
    sel = _selection(sm)
    sel_set = set(sel)
    return LocalShellKey(
        empty.edges,
        tuple(sm.slots[i].base for i in sel),
        sum(1 for i in sel if sm.slots[i].kind == "II"),
        tuple(
            (s.base, s.kind) for i, s in enumerate(sm.slots) if i not in sel_set
        ),
    )


def realize_member(p: Polygon, sm: SlotMap, two_positions: Iterable[int]) -> Polygon:
    """The local-shell member whose selection slots carry type II exactly at
    the given positions (indices into the S1-u-S2 selection, trace order)."""
    sel = _selection(sm)
    chosen = set(two_positions)
    if not chosen <= set(range(len(sel))):
        raise ValueError("type-II positions outside the selection")
    kinds = ["II" if pos in chosen else "I" for pos in range(len(sel))]
    trace = splice_kinds(p.canonical_path, [sm.slots[i] for i in sel], kinds)
    return Polygon.from_closed_trace(trace)


def local_shell_members(p: Polygon, *, max_slots: int = 20) -> list[Polygon]:
    """Every polygon in the local shell of p: all redistributions of its
    selection type-II patterns over the S1 u S2 slots.  Exactly
    C(|selection|, type-II count) members; each is validated to share the
    local shell key and the length."""
    sm = slot_partition(p)
    sel = _selection(sm)
    if len(sel) > max_slots:
        raise SlotBudgetError(f"{len(sel)} slots exceed the budget {max_slots}")
    j = sum(1 for i in sel if sm.slots[i].kind == "II")
    key = local_shell_key(p, sm)
    members = []
    for subset in itertools.combinations(range(len(sel)), j):
        member = realize_member(p, sm, subset)
        if len(member) != len(p):
            raise ShellInstabilityError("member length differs")
        if local_shell_key(member) != key:
            raise ShellInstabilityError("member key differs")
        members.append(member)
    return members


# --- walk shells and shared avoidance ------------------------------------------------


def walk_shell_key(w: Walk) -> tuple:
    """Walks share this key iff they differ only in slot pattern types."""
    sm = scan_patterns(w)
    emptied = splice_kinds(
        w, [s for s in sm.slots if s.kind == "II"], ["I"] * sm.t_two
    )
    return (w.origin, emptied.steps, tuple(s.base for s in sm.slots))


@dataclass(frozen=True)
class AvoidanceCheck:
    equivalent: bool
    witness: Walk | None  # an extension avoiding exactly one of the two walks

    def __bool__(self) -> bool:
        return self.equivalent


def avoidance_equivalence_check(
    gamma: Walk,
    gamma2: Walk,
    ext_len: int,
    *,
    require_same_shell: bool = True,
) -> AvoidanceCheck:
    """Exhaustively test that every self-avoiding extension from the common
    start avoids one walk iff it avoids the other ("avoids" = shares no
    vertex except the start).  Shell members always pass: a path can only
    reach a slot's interior through its boundary, which both members fill.
    """
    if gamma.origin != gamma2.origin:
        raise ValueError("walks must share their start vertex")
    if require_same_shell and walk_shell_key(gamma) != walk_shell_key(gamma2):
        raise ValueError("walks are not in the same shell")
    start = gamma.origin
    d = gamma.dimension
    block1 = set(gamma.vertices) - {start}
    block2 = set(gamma2.vertices) - {start}
    moves = [unit(d, ax, s) for ax in range(1, d + 1) for s in (1, -1)]
    witness: list[Walk | None] = [None]

    def rec(path: list[Point], seen: set[Point]) -> bool:
        v1 = not (seen & block1)
        v2 = not (seen & block2)
        if v1 != v2:
            witness[0] = Walk.from_vertices(tuple(path))
            return False
        if not v1 or len(path) - 1 == ext_len:
            return True  # both blocked (subsumed) or full length reached
        for mv in moves:
            q = tuple(a + b for a, b in zip(path[-1], mv))
            if q in seen or q == start:
                continue
            path.append(q)
            seen.add(q)
            ok = rec(path, seen)
            seen.discard(q)
            path.pop()
            if not ok:
                return False
        return True

    ok = rec([start], set())
    return AvoidanceCheck(ok, witness[0])
