"""Self-contained invariant suites for the command line.

Each suite re-derives a slice of the package's contracts at a size capped
by ``nmax`` and reports one line per check.  The counting checks compare
the engine against an independent naive oracle (set-based DFS, no
occupancy grid, no pruning) maintained here precisely so the two code
paths share nothing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

from . import counting, fixtures, patterns, resampler, snake, two_part
from .lattice import (
    Point,
    Walk,
    is_closing,
    is_self_avoiding,
    lex_compare_points,
    ne_vertex,
    parse_walk,
    reflect_for_construction,
    reverse_walk,
    serialize_walk,
)


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    ok: bool
    detail: str = ""


def _naive_saws(n: int, d: int) -> Iterator[tuple[Point, ...]]:
    moves = [
        tuple((1 if i == ax else 0) * s for i in range(d))
        for ax in range(d)
        for s in (1, -1)
    ]
    path: list[Point] = [tuple(0 for _ in range(d))]

    def rec() -> Iterator[tuple[Point, ...]]:
        if len(path) == n + 1:
            yield tuple(path)
            return
        for mv in moves:
            nxt = tuple(a + b for a, b in zip(path[-1], mv))
            if nxt not in path:
                path.append(nxt)
                yield from rec()
                path.pop()

    return rec()


def _naive_polygons(n: int, d: int) -> set[frozenset]:
    out: set[frozenset] = set()
    for verts in _naive_saws(n - 1, d):
        if sum(abs(a - b) for a, b in zip(verts[-1], verts[0])) != 1:
            continue
        ne = max(verts, key=lambda p: tuple(reversed(p)))
        shifted = [tuple(a - b for a, b in zip(v, ne)) for v in verts]
        edges = set()
        for a, b in zip(shifted, shifted[1:] + [shifted[0]]):
            edges.add((a, b) if a <= b else (b, a))
        out.add(frozenset(edges))
    return out


def suite_lattice(nmax: int) -> list[CheckResult]:
    res = []
    pts = list(itertools.product(range(-3, 4), repeat=2))
    total_order = all(
        lex_compare_points(u, v) == -lex_compare_points(v, u) for u in pts for v in pts
    ) and all(
        not (lex_compare_points(u, v) < 0 and lex_compare_points(v, w) < 0)
        or lex_compare_points(u, w) < 0
        for u in pts
        for v in pts
        for w in pts
    )
    res.append(CheckResult("lattice", "lex order total on [-3,3]^2", total_order))
    ok = True
    for verts in _naive_saws(min(nmax, 5), 2):
        w = Walk.from_vertices(verts)
        r = reverse_walk(w)
        if reverse_walk(r) != w or set(r.vertices) != set(verts) or ne_vertex(r) != ne_vertex(w):
            ok = False
            break
    res.append(CheckResult("lattice", "reversal involution, vertex set, NE", ok))
    ok = True
    for verts in _naive_saws(4, 2):
        w = Walk.from_vertices(verts)
        refl = reflect_for_construction(w)
        if is_self_avoiding(refl) != is_self_avoiding(w):
            ok = False
        if all(v[1] <= 0 for v in verts) and not all(v[1] >= 1 for v in refl.vertices):
            ok = False
    res.append(CheckResult("lattice", "construction reflection properties", ok))
    samples = ["d=2;origin=0,0;steps=ENWS", "d=3;origin=1,-2,0;steps=+1,-3,+2"]
    ok = all(serialize_walk(parse_walk(s)) == s for s in samples)
    res.append(CheckResult("lattice", "codec round-trip on canonical text", ok))
    ok = True
    for verts in _naive_saws(3, 2):
        w = Walk.from_vertices(verts)
        if is_closing(w):
            try:
                from .lattice import Polygon

                Polygon.from_closing_walk(w)
            except ValueError:
                ok = False
    res.append(CheckResult("lattice", "closing walks close into polygons", ok))
    return res


def suite_counting(nmax: int, threads: int = 1) -> list[CheckResult]:
    res = []
    top = min(nmax, 8)
    ok = all(
        counting.enumerate_saw(n, 2) == sum(1 for _ in _naive_saws(n, 2))
        for n in range(top + 1)
    )
    res.append(CheckResult("counting", f"engine == naive oracle, d=2, n <= {top}", ok))
    ok = all(
        counting.enumerate_saw(n, 3) == sum(1 for _ in _naive_saws(n, 3))
        for n in range(min(nmax, 5) + 1)
    )
    res.append(CheckResult("counting", "engine == naive oracle, d=3", ok))
    top_p = min(nmax + 2, 10)
    ok = all(
        counting.count_polygons(n, 2) == len(_naive_polygons(n, 2))
        for n in range(4, top_p + 1, 2)
    )
    res.append(CheckResult("counting", f"polygon counts == oracle, n <= {top_p}", ok))
    ok = True
    for n in range(3, min(nmax + 1, 10), 2):
        rep = counting.closing_probabilities(n, 2, threads=threads)
        if rep.closing_direct != rep.closing_identity:
            ok = False
    res.append(CheckResult("counting", "closing identity (exact rational)", ok))
    n = min(nmax, 6)
    total = sum(
        counting.first_part_table(ell, n, 0.5).total_completions() for ell in range(n + 1)
    )
    res.append(
        CheckResult(
            "counting",
            f"first-part tables partition SAW^0_{n}",
            total == counting.enumerate_saw(n, 2),
            f"{total}",
        )
    )
    try:
        counting.enumerate_saw(100, 2)
        ok = False
    except counting.GuardrailError:
        ok = True
    res.append(CheckResult("counting", "guardrail rejects n=100", ok))
    return res


def suite_two_part(nmax: int) -> list[CheckResult]:
    res = []
    top = min(nmax, 6)
    ok = True
    for n in range(top + 1):
        for verts in _naive_saws(n, 2):
            w = Walk.from_vertices(verts)
            if two_part.compose(two_part.decompose(w)) != w:
                ok = False
    res.append(CheckResult("two-part", f"compose(decompose) == id on SAW_{top}", ok))
    ok = True
    for n in (3, 5):
        bins = two_part.closing_first_length_histogram(n, 2)
        if len(set(bins)) != 1:
            ok = False
    res.append(CheckResult("two-part", "closing first-length histogram flat (n=3,5)", ok))
    ok = True
    for verts in _naive_saws(min(nmax, 6), 2):
        ne = max(verts, key=lambda p: tuple(reversed(p)))
        shifted = tuple(tuple(a - b for a, b in zip(v, ne)) for v in verts)
        first = two_part.first_part_vertices(shifted)
        if len(first) > 1:
            if first[1] != (-1, 0) or any(v[1] > 0 for v in first):
                ok = False
            if any(v[1] == 0 and v[0] >= 0 for v in first[1:]):
                ok = False
    res.append(CheckResult("two-part", "first-part structural rules", ok))
    return res


def suite_patterns() -> list[CheckResult]:
    res = []
    pair = patterns.canonical_pattern_pair(2)
    ok, problems = patterns.validate_pattern_pair(pair)
    res.append(
        CheckResult(
            "patterns",
            "canonical pair valid (lengths 11/13)",
            ok and len(pair.chi_one) == 11 and len(pair.chi_two) == 13,
            ";".join(problems),
        )
    )
    w = fixtures.straight_splice_walk("II")
    sm = patterns.scan_patterns(w)
    res.append(
        CheckResult(
            "patterns",
            "spliced corridor has exactly one type-II occurrence",
            sm.t_two == 1 and sm.t_one == 0,
        )
    )
    corpus = [
        fixtures.corridor_polygon(("I",), ("II",)),
        fixtures.corridor_polygon(("II", "I"), ("I", "II")),
    ]
    ok = True
    for p in corpus:
        empty, t2 = patterns.empty_polygon(p)
        if len(p) != len(empty) + 2 * t2:
            ok = False
    res.append(CheckResult("patterns", "length identity |p| == |empty| + 2 T_II", ok))
    p = corpus[1]
    members = patterns.local_shell_members(p)
    sm = patterns.slot_partition(p)
    sel = patterns.selection_indices(sm)
    j = sum(1 for i in sel if sm.slots[i].kind == "II")
    import math

    res.append(
        CheckResult(
            "patterns",
            "local shell has C(|S1 u S2|, j) members",
            len(members) == math.comb(len(sel), j),
        )
    )
    gw = fixtures.fixture_walk(p)
    ok = all(
        patterns.avoidance_equivalence_check(a, b, 4).equivalent
        for a, b in fixtures.one_swap_pairs(gw)
    )
    res.append(CheckResult("patterns", "shared avoidance on one-swap pairs (ext 4)", ok))
    return res


def suite_resampler() -> list[CheckResult]:
    res = []
    ok = True
    for s1 in range(0, 9):
        for s2 in range(0, 9 - s1):
            for none in range(s1 + s2 + 1):
                tot = sum(
                    resampler.hypergeometric_pmf(s1, s2, none, k)
                    for k in resampler.hypergeometric_support(s1, s2, none)
                )
                if tot != 1:
                    ok = False
    res.append(CheckResult("resampler", "pmf sums to one (s1+s2 <= 8)", ok))
    g = resampler.gaussian_density
    ok = abs(g(0.25, 0.4, 0.6, 50) - g(-0.25, 0.4, 0.6, 50)) < 1e-15
    res.append(CheckResult("resampler", "gaussian density symmetric", ok))
    p = fixtures.corridor_polygon(("I", "II"), ("II", "I"))
    rep = resampler.equilibrium_and_pmf_test(p, samples=20_000, seed=20240901)
    res.append(
        CheckResult(
            "resampler",
            "equilibrium chi-square (2e4 draws)",
            rep.passed,
            f"member p={rep.members.p_value:.3f}, marginal p={rep.marginal.p_value:.3f}",
        )
    )
    ok = True
    for m in range(1, 9):
        mh = resampler.midpoint_histogram(m, 2)
        if mh.sup_times_sqrt_m > 1.0 + 1e-12:
            ok = False
    res.append(CheckResult("resampler", "midpoint sup * sqrt(m) <= 1 (m <= 8)", ok))
    return res


def suite_snake(nmax: int) -> list[CheckResult]:
    res = []
    sp = snake.method_constants(2, Fraction(3, 10), Fraction(1, 2), 0)
    res.append(
        CheckResult(
            "snake",
            "constants: c = 2^(1/45), K = 540",
            sp.k_exact == 540 and abs(sp.c_value - 2 ** (1 / 45)) < 1e-15,
        )
    )
    t = counting.first_part_table(2, 5, 0.5)
    ok = all(
        snake.conditional_closing_prob(r.walk, 2, 5, 2, 0.5) == (r.q, r.in_hphi)
        for r in t.rows
    )
    res.append(CheckResult("snake", "index-ell charm equals the table law", ok))
    rep = snake.bad_index_set_and_select_ell(7, 1.6, 0.5)
    res.append(
        CheckResult(
            "snake",
            "bad-length bound at n=7 (premise exact)",
            rep.premise_holds and rep.bound_holds,
            f"|Q|={len(rep.q_set)} <= {rep.cardinality_bound:.2f}",
        )
    )
    top = min(nmax, 7) if nmax >= 3 else 3
    if top % 2 == 0:
        top -= 1
    ok = all(
        snake.first_part_law_identity_check(n, ell)
        for n in range(3, top + 1, 2)
        for ell in range(n + 1)
    )
    res.append(CheckResult("snake", f"first-part law identity (n <= {top})", ok))
    phi = parse_walk("d=2;origin=0,0;steps=WS")
    fam = snake.reflected_walk_family(phi, 7)
    res.append(CheckResult("snake", "reflected family bound at n=7", fam.bound_holds))
    bt = snake.bootstrap_table(phi, 7, [0, 1, 2])
    res.append(
        CheckResult(
            "snake",
            "bootstrap table monotone, mass <= 2d",
            bt.monotone() and bt.closing_mass <= 4,
        )
    )
    return res


_SUITES: dict[str, Callable[..., list[CheckResult]]] = {
    "lattice": lambda nmax, threads: suite_lattice(nmax),
    "counting": lambda nmax, threads: suite_counting(nmax, threads),
    "two-part": lambda nmax, threads: suite_two_part(nmax),
    "patterns": lambda nmax, threads: suite_patterns(),
    "resampler": lambda nmax, threads: suite_resampler(),
    "snake": lambda nmax, threads: suite_snake(nmax),
}


def run_suite(suite: str = "all", nmax: int = 8, threads: int = 1) -> list[CheckResult]:
    if suite == "all":
        names = list(_SUITES)
    elif suite in _SUITES:
        names = [suite]
    else:
        raise ValueError(f"unknown suite {suite!r}; choose from all, {', '.join(_SUITES)}")
    out: list[CheckResult] = []
    for name in names:
        out.extend(_SUITES[name](nmax, threads))
    return out
