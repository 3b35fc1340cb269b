"""Exact enumeration engine for self-avoiding walks and polygons.

The engine runs a pruned depth-first search over a packed occupancy grid.
Blocked cells (visited vertices, forbidden vertices, lexicographic
constraint violations and the out-of-range border) all live in one
bytearray, so the inner loop is a single indexed check per candidate step.
Visit order is deterministic: steps are tried in the canonical order
+e1, -e1, +e2, -e2, ...

Counting (no visitor) may be split at a fixed prefix depth into
independent subtree tasks executed by worker processes; the big-integer
partial counts are summed in task order, so results do not depend on
scheduling.  Visitors are always delivered serially.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .exact import ExactProb, exceeds_power
from .lattice import Point, Walk, lex_key, step_order, unit

DEFAULT_NODE_BUDGET = 10**10
DEFAULT_SPLIT_DEPTH = 6


class GuardrailError(RuntimeError):
    """Predicted search volume exceeds the configured node budget."""


class Constraint(str, Enum):
    ORIGIN = "origin"          # walks starting at the origin (the SAW_n set)
    NE_ORIGIN = "ne-origin"    # walks whose NE vertex sits at the origin
    FIRST_PART = "first-part"  # origin start *and* NE at the origin (possible first/second parts)


def node_budget(override: int | None = None) -> int:
    if override is not None:
        return override
    env = os.environ.get("SAWLAB_NODE_BUDGET")
    return int(env) if env else DEFAULT_NODE_BUDGET


def growth_base(d: int) -> float:
    if d == 2:
        return 2.7
    if d == 3:
        return 4.7
    return 2.0 * d - 1.0


def check_guardrail(n: int, d: int, budget: int | None = None) -> None:
    """Refuse exact enumeration whose predicted volume exceeds the budget."""
    limit = node_budget(budget)
    if n * math.log(growth_base(d)) > math.log(limit):
        raise GuardrailError(
            f"predicted search volume {growth_base(d)}^{n} exceeds node budget {limit} "
            f"(set SAWLAB_NODE_BUDGET to override)"
        )


# --- packed grid -------------------------------------------------------------


class _Grid:
    """Coordinates in [-radius, radius]^d packed into a flat index.

    Instances cache their decode table and base blocked masks; grids are
    shared through :func:`_get_grid`, so workers that process many subtree
    tasks build each mask once.
    """

    def __init__(self, d: int, radius: int):
        self.d = d
        self.radius = radius
        self.side = 2 * radius + 1
        self.strides = tuple(self.side**i for i in range(d))
        self.size = self.side**d
        self.center = sum(radius * s for s in self.strides)
        self.deltas = tuple(
            self.strides[abs(s) - 1] * (1 if s > 0 else -1) for s in step_order(d)
        )
        self._table: list[Point] | None = None
        self._blocked_base: dict[bool, bytes] = {}

    def pack(self, p: Point) -> int:
        r = self.radius
        return sum((c + r) * s for c, s in zip(p, self.strides))

    def unpack(self, idx: int) -> Point:
        side, r = self.side, self.radius
        coords = []
        for _ in range(self.d):
            coords.append(idx % side - r)
            idx //= side
        return tuple(coords)

    def unpack_table(self) -> list[Point]:
        if self._table is None:
            self._table = [self.unpack(i) for i in range(self.size)]
        return self._table

    def blocked(self, ne_prefix: bool) -> bytearray:
        """Fresh blocked mask: border cells, plus lexicographically positive
        cells when the walk must keep its NE vertex at the origin."""
        base = self._blocked_base.get(ne_prefix)
        if base is None:
            out = bytearray(self.size)
            r = self.radius
            zero = tuple(0 for _ in range(self.d))
            for idx, p in enumerate(self.unpack_table()):
                if any(abs(c) >= r for c in p):
                    out[idx] = 1
                elif ne_prefix and lex_key(p) > zero:
                    out[idx] = 1
            base = bytes(out)
            self._blocked_base[ne_prefix] = base
        return bytearray(base)


_GRID_CACHE: dict[tuple[int, int], _Grid] = {}


def _get_grid(d: int, radius: int) -> _Grid:
    grid = _GRID_CACHE.get((d, radius))
    if grid is None:
        grid = _Grid(d, radius)
        _GRID_CACHE[(d, radius)] = grid
    return grid


# --- counting kernels --------------------------------------------------------


def _count_from(blocked: bytearray, deltas: Sequence[int], start: int, n: int) -> int:
    def rec(pos: int, depth: int) -> int:
        if depth == 0:
            return 1
        total = 0
        for dm in deltas:
            q = pos + dm
            if not blocked[q]:
                blocked[q] = 1
                total += rec(q, depth - 1)
                blocked[q] = 0
        return total

    return rec(start, n)


def _count_from_closing(
    blocked: bytearray, deltas: Sequence[int], start: int, n: int, closeset: frozenset[int]
) -> tuple[int, int]:
    closing = [0]

    def rec(pos: int, depth: int) -> int:
        if depth == 0:
            if pos in closeset:
                closing[0] += 1
            return 1
        total = 0
        for dm in deltas:
            q = pos + dm
            if not blocked[q]:
                blocked[q] = 1
                total += rec(q, depth - 1)
                blocked[q] = 0
        return total

    total = rec(start, n)
    return total, closing[0]


def _visit_from(
    blocked: bytearray,
    deltas: Sequence[int],
    start: int,
    n: int,
    fn: Callable[[list[int]], None],
) -> int:
    """Call ``fn`` with the packed vertex path of every length-n walk."""
    path = [start]
    count = [0]

    def rec(pos: int, depth: int) -> None:
        if depth == 0:
            count[0] += 1
            fn(path)
            return
        for dm in deltas:
            q = pos + dm
            if not blocked[q]:
                blocked[q] = 1
                path.append(q)
                rec(q, depth - 1)
                path.pop()
                blocked[q] = 0

    rec(start, n)
    return count[0]


def _prepare(
    n: int,
    d: int,
    *,
    ne_prefix: bool = False,
    forbidden: Sequence[Point] = (),
    radius: int | None = None,
) -> tuple[_Grid, bytearray, int]:
    r = radius if radius is not None else n + 1
    grid = _get_grid(d, max(r, 2))
    blocked = grid.blocked(ne_prefix)
    for p in forbidden:
        blocked[grid.pack(p)] = 1
    start = grid.center
    blocked[start] = 1
    return grid, blocked, start


def _count_task(args) -> tuple[int, int]:
    """Worker: count completions of a fixed walk prefix."""
    n, d, ne_prefix, prefix, want_closing = args
    grid, blocked, start = _prepare(n, d, ne_prefix=ne_prefix)
    pos = start
    for p in prefix[1:]:
        pos = grid.pack(p)
        blocked[pos] = 1
    rem = n - (len(prefix) - 1)
    if want_closing:
        closeset = frozenset(start + dm for dm in grid.deltas)
        return _count_from_closing(blocked, grid.deltas, pos, rem, closeset)
    return _count_from(blocked, grid.deltas, pos, rem), 0


def _parallel_count(
    n: int, d: int, *, ne_prefix: bool, want_closing: bool, threads: int, split_depth: int
) -> tuple[int, int]:
    depth = min(split_depth, n - 1)
    grid, blocked, start = _prepare(depth, d, ne_prefix=ne_prefix)
    table = grid.unpack_table()
    prefixes: list[tuple[Point, ...]] = []
    _visit_from(
        blocked, grid.deltas, start, depth,
        lambda path: prefixes.append(tuple(table[i] for i in path)),
    )
    args = [(n, d, ne_prefix, pre, want_closing) for pre in prefixes]
    total = closing = 0
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for t, c in pool.map(_count_task, args, chunksize=max(1, len(args) // (8 * threads))):
            total += t
            closing += c
    return total, closing


# --- public enumeration API ----------------------------------------------------


def _constraint_flags(constraint: Constraint) -> tuple[bool, bool]:
    """-> (prune to NE-prefix walks during search, translate emissions to NE=0)."""
    c = Constraint(constraint)
    if c is Constraint.ORIGIN:
        return False, False
    if c is Constraint.NE_ORIGIN:
        return False, True
    return True, False


def visit_saw_vertices(
    n: int,
    d: int,
    constraint: Constraint,
    fn: Callable[[tuple[Point, ...]], None],
    *,
    budget: int | None = None,
) -> int:
    """Serialized delivery of every qualifying walk, as a tuple of vertices.

    For the NE-at-origin constraint the walks are emitted translated so
    their NE vertex is the origin; visit order is inherited from the
    origin-start enumeration and stays deterministic.
    """
    check_guardrail(n, d, budget)
    ne_prefix, translate = _constraint_flags(constraint)
    grid, blocked, start = _prepare(n, d, ne_prefix=ne_prefix)
    table = grid.unpack_table()
    if translate:
        def deliver(path: list[int]) -> None:
            verts = [table[i] for i in path]
            ne = max(verts, key=lex_key)
            fn(tuple(tuple(a - b for a, b in zip(v, ne)) for v in verts))
    else:
        def deliver(path: list[int]) -> None:
            fn(tuple(table[i] for i in path))
    return _visit_from(blocked, grid.deltas, start, n, deliver)


def enumerate_saw(
    n: int,
    d: int = 2,
    constraint: Constraint = Constraint.ORIGIN,
    visitor: Callable[[Walk], None] | None = None,
    *,
    node_budget: int | None = None,
    threads: int = 1,
    split_depth: int = DEFAULT_SPLIT_DEPTH,
) -> int:
    """Count (and optionally visit) the qualifying walks of length n.

    Counting runs in parallel worker processes when ``threads > 1``;
    visitors are always delivered serially, in deterministic order.
    """
    if n < 0:
        raise ValueError("length must be >= 0")
    check_guardrail(n, d, node_budget)
    if visitor is not None:
        def fn(verts: tuple[Point, ...]) -> None:
            visitor(Walk.from_vertices(verts))
        return visit_saw_vertices(n, d, constraint, fn, budget=node_budget)
    ne_prefix, _ = _constraint_flags(constraint)
    if threads > 1 and n > split_depth + 1:
        total, _ = _parallel_count(
            n, d, ne_prefix=ne_prefix, want_closing=False,
            threads=threads, split_depth=split_depth,
        )
        return total
    grid, blocked, start = _prepare(n, d, ne_prefix=ne_prefix)
    return _count_from(blocked, grid.deltas, start, n)


def count_walks_and_closing(
    n: int, d: int = 2, *, node_budget: int | None = None, threads: int = 1
) -> tuple[int, int]:
    """(c_n, number of closing walks among them), in one pass."""
    check_guardrail(n, d, node_budget)
    if threads > 1 and n > DEFAULT_SPLIT_DEPTH + 1:
        return _parallel_count(
            n, d, ne_prefix=False, want_closing=True,
            threads=threads, split_depth=DEFAULT_SPLIT_DEPTH,
        )
    grid, blocked, start = _prepare(n, d)
    closeset = frozenset(start + dm for dm in grid.deltas)
    return _count_from_closing(blocked, grid.deltas, start, n, closeset)


# --- polygons -------------------------------------------------------------------


def _polygon_search(
    n: int, d: int, on_trace: Callable[[tuple[Point, ...]], None] | None
) -> int:
    """DFS over canonical closed traces: origin start, first step to the
    lex-larger cycle neighbour -e_i, final arrival from the lex-smaller
    -e_j (i < j), every vertex lexicographically <= the origin."""
    total = 0
    for i in range(1, d + 1):
        for j in range(i + 1, d + 1):
            grid, blocked, start = _prepare(n, d, ne_prefix=True, radius=n)
            deltas = grid.deltas
            table = grid.unpack_table()
            tpoint = unit(d, j, -1)
            target = grid.pack(tpoint)
            v1 = grid.pack(unit(d, i, -1))
            mh = [sum(abs(a - b) for a, b in zip(p, tpoint)) for p in table]
            if (mh[v1] % 2) != ((n - 2) % 2):
                continue
            blocked[v1] = 1
            path = [start, v1]

            def rec(pos: int, remaining: int) -> int:
                count = 0
                for dm in deltas:
                    q = pos + dm
                    if q == target:
                        if remaining == 1:
                            count += 1
                            if on_trace is not None:
                                on_trace(tuple(table[k] for k in path) + (tpoint, table[start]))
                        continue
                    if blocked[q] or mh[q] > remaining - 1:
                        continue
                    blocked[q] = 1
                    path.append(q)
                    count += rec(q, remaining - 1)
                    path.pop()
                    blocked[q] = 0
                return count

            total += rec(v1, n - 2)
    return total


def count_polygons(n: int, d: int = 2, *, node_budget: int | None = None) -> int:
    """p_n: polygons of even length n >= 4, counted up to translation."""
    if n < 4 or n % 2:
        raise ValueError("polygon length must be even and >= 4")
    check_guardrail(n, d, node_budget)
    return _polygon_search(n, d, None)


def iter_polygon_traces(
    n: int, d: int = 2, *, node_budget: int | None = None
) -> Iterator[tuple[Point, ...]]:
    """Canonical closed traces (n+1 vertices, first == last == origin) of all
    polygons of length n, in deterministic order."""
    if n < 4 or n % 2:
        raise ValueError("polygon length must be even and >= 4")
    check_guardrail(n, d, node_budget)
    traces: list[tuple[Point, ...]] = []
    _polygon_search(n, d, traces.append)
    return iter(traces)


# --- closing probabilities --------------------------------------------------------


@dataclass(frozen=True)
class CountReport:
    """Walk and polygon counts at one odd length, with the closing probability
    computed two independent ways (they are equal for every odd n)."""

    n: int
    d: int
    c_n: int
    closing_count: int
    p_n1: int
    closing_direct: ExactProb
    closing_identity: ExactProb

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "c_n": str(self.c_n),
            "p_n1": str(self.p_n1),
            "closing": {
                "num": str(self.closing_direct.numerator),
                "den": str(self.closing_direct.denominator),
            },
        }


def closing_probabilities(
    n: int, d: int = 2, *, node_budget: int | None = None, threads: int = 1
) -> CountReport:
    """Closing probability of a uniform length-n walk, both by direct count
    and via the polygon identity 2(n+1) p_{n+1} / c_n."""
    if n < 3 or n % 2 == 0:
        raise ValueError("closing probabilities need odd n >= 3")
    c_n, closing = count_walks_and_closing(n, d, node_budget=node_budget, threads=threads)
    p_n1 = count_polygons(n + 1, d, node_budget=node_budget)
    return CountReport(
        n, d, c_n, closing, p_n1,
        closing_direct=ExactProb(closing, c_n),
        closing_identity=ExactProb(2 * (n + 1) * p_n1, c_n),
    )


# --- first parts and completions ---------------------------------------------------


def list_first_parts(
    ell: int, d: int = 2, *, node_budget: int | None = None
) -> list[tuple[Point, ...]]:
    """All walks of length ell with origin start and NE vertex at the origin,
    as vertex tuples, in deterministic order."""
    out: list[tuple[Point, ...]] = []
    visit_saw_vertices(ell, d, Constraint.FIRST_PART, out.append, budget=node_budget)
    return out


def count_completions(
    prefix: Sequence[Point], m: int, d: int = 2, *, node_budget: int | None = None
) -> tuple[int, int]:
    """Count second parts of length m compatible with a first-part prefix.

    The prefix is a vertex sequence starting at the origin with NE at the
    origin.  A compatible second part is a walk from the origin with NE at
    the origin, sharing only the origin with the prefix, whose first vertex
    is lexicographically below the prefix's (the part ordering rule).
    Returns (pair count, closing pair count); "closing" means the part's
    endpoint neighbours the prefix's far endpoint.  Each pair corresponds
    to exactly two walks of the composed length (a trace and its reversal).

    Requires len(prefix) >= 2 and m >= 1; degenerate splits are handled by
    callers through the full decomposition rule.
    """
    k = len(prefix) - 1
    if k < 1 or m < 1:
        raise ValueError("count_completions needs both parts non-empty")
    check_guardrail(m, d, node_budget)
    grid, blocked, start = _prepare(
        m, d, ne_prefix=True, radius=k + m + 1, forbidden=prefix[1:]
    )
    closeset = frozenset(grid.pack(prefix[-1]) + dm for dm in grid.deltas)
    bound = lex_key(prefix[1])
    total = closing = 0
    for dm in grid.deltas:
        q = start + dm
        if blocked[q] or lex_key(grid.unpack(q)) >= bound:
            continue
        blocked[q] = 1
        if m == 1:
            total += 1
            closing += 1 if q in closeset else 0
        else:
            t, c = _count_from_closing(blocked, grid.deltas, q, m - 1, closeset)
            total += t
            closing += c
        blocked[q] = 0
    return total, closing


def count_extensions(
    prefix: Sequence[Point], n: int, d: int = 2, *, node_budget: int | None = None
) -> int:
    """Walks of length n whose initial vertex sequence equals ``prefix``
    (no further constraint)."""
    k = len(prefix) - 1
    if not 0 <= k <= n:
        raise ValueError("prefix longer than the requested walks")
    check_guardrail(n - k, d, node_budget)
    grid, blocked, start = _prepare(n, d, radius=n + 1)
    offset = grid.pack(prefix[0]) - start
    pos = start
    for p in prefix:
        pos = grid.pack(p) - offset
        blocked[pos] = 1
    return _count_from(blocked, grid.deltas, pos, n - k)


@dataclass(frozen=True)
class FirstPartRow:
    walk: Walk
    completions: int   # walks of the full length whose first part is this walk
    closing: int       # how many of them close
    q: ExactProb       # conditional closing probability
    in_hphi: bool      # q exceeds the n**-alpha threshold


@dataclass(frozen=True)
class FirstPartTable:
    ell: int
    n: int
    d: int
    alpha: float
    rows: tuple[FirstPartRow, ...]

    def total_completions(self) -> int:
        return sum(r.completions for r in self.rows)

    def row_for(self, walk: Walk) -> FirstPartRow | None:
        for r in self.rows:
            if r.walk == walk:
                return r
        return None


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _make_row(walk: Walk, completions: int, closing: int, n: int, alpha) -> FirstPartRow:
    q = ExactProb(closing, completions)
    in_hphi = exceeds_power(q, n, -_as_fraction(alpha)) if n >= 1 else False
    return FirstPartRow(walk, completions, closing, q, in_hphi)


def first_part_table(
    ell: int, n: int, alpha, d: int = 2, *, node_budget: int | None = None
) -> FirstPartTable:
    """Every possible first part of length ell inside walks of length n with
    NE at the origin, with its exact conditional closing probability and its
    membership in the high-closing-probability set at threshold n**-alpha.

    Membership in the table is decided by the existence of at least one
    completion at this particular n.
    """
    if not 0 <= ell <= n:
        raise ValueError("need 0 <= ell <= n")
    check_guardrail(n, d, node_budget)
    m = n - ell
    rows: list[FirstPartRow] = []
    mult = 2 if n >= 1 else 1  # a composed trace and its reversal share the decomposition
    if ell == 0:
        from .two_part import decompose  # deferred import: two_part builds on this module

        pairs = closing_pairs = 0

        def see(verts: tuple[Point, ...]) -> None:
            nonlocal pairs, closing_pairs
            if len(decompose(Walk.from_vertices(verts)).first) == 0:
                pairs += 1
                if n >= 2 and sum(abs(a - b) for a, b in zip(verts[-1], verts[0])) == 1:
                    closing_pairs += 1

        visit_saw_vertices(n, d, Constraint.FIRST_PART, see, budget=node_budget)
        if pairs:
            origin_walk = Walk(d, tuple(0 for _ in range(d)))
            rows.append(_make_row(origin_walk, pairs * mult, closing_pairs * mult, n, alpha))
    elif m == 0:
        from .two_part import decompose

        for verts in list_first_parts(ell, d, node_budget=node_budget):
            w = Walk.from_vertices(verts)
            rev = Walk(d, verts[-1], tuple(-s for s in reversed(w.steps)))
            if decompose(rev).first.vertices == verts:
                closes = 1 if (n >= 2 and sum(abs(c) for c in verts[-1]) == 1) else 0
                rows.append(_make_row(w, mult, closes * mult, n, alpha))
    else:
        for verts in list_first_parts(ell, d, node_budget=node_budget):
            pairs, closing_pairs = count_completions(verts, m, d, node_budget=node_budget)
            if pairs == 0:
                continue
            rows.append(
                _make_row(Walk.from_vertices(verts), pairs * mult, closing_pairs * mult, n, alpha)
            )
    return FirstPartTable(ell, n, d, float(alpha), tuple(rows))


# --- growth diagnostics -------------------------------------------------------------


@dataclass(frozen=True)
class GrowthRow:
    n: int
    c_n: int
    root: float  # c_n ** (1/n)


@dataclass(frozen=True)
class GrowthReport:
    d: int
    rows: tuple[GrowthRow, ...]
    submultiplicative_ok: bool
    root_infimum: float
    hw_coefficient: float  # max_n log(c_n / mu_hat^n) / sqrt(n); diagnostic only

    @property
    def counts(self) -> dict[int, int]:
        return {r.n: r.c_n for r in self.rows}


def growth_report(
    n_max: int, d: int = 2, *, node_budget: int | None = None, threads: int = 1
) -> GrowthReport:
    """c_n for n <= n_max with submultiplicativity checks and growth-shape
    diagnostics (the latter reported, never asserted)."""
    if n_max < 1:
        raise ValueError("need n_max >= 1")
    check_guardrail(n_max, d, node_budget)
    counts = {0: 1}
    for n in range(1, n_max + 1):
        counts[n] = enumerate_saw(n, d, node_budget=node_budget, threads=threads)
    ok = all(
        counts[a + b] <= counts[a] * counts[b]
        for a in range(1, n_max)
        for b in range(1, n_max + 1 - a)
    )
    rows = tuple(GrowthRow(n, counts[n], counts[n] ** (1.0 / n)) for n in range(1, n_max + 1))
    mu_hat = min(r.root for r in rows)
    hw = max(math.log(r.c_n / mu_hat**r.n) / math.sqrt(r.n) for r in rows)
    return GrowthReport(d, rows, ok, mu_hat, hw)
