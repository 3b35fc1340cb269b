"""Uniform redistribution of type-II patterns over the end-segment slots.

The experiment takes a polygon, forgets which of its S1-u-S2 slots carry
type-II patterns, and redraws that subset uniformly.  The redraw preserves
the local shell (hence the polygon law restricted to a shell), and the
number of type-I patterns landing in S1 follows an exact hypergeometric
law whose central regime is Gaussian.

Randomness comes from a counter-based Philox generator keyed by the seed
with the draw index in the counter, so draws are reproducible and
independent of evaluation order: stream i of seed s is always the same.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from numpy.random import Generator, Philox
from scipy.stats import chi2

from .counting import Constraint, check_guardrail, visit_saw_vertices
from .exact import ExactProb
from .lattice import Point, Polygon
from .patterns import SlotMap, realize_member, selection_indices, slot_partition


class WindowUndefinedError(ValueError):
    """The guaranteed middle window does not cover the requested index (or a
    slot straddles a segment boundary, leaving the schedule ambiguous)."""


def _rng(seed: int, draw_index: int) -> Generator:
    return Generator(Philox(key=seed, counter=[0, 0, 0, draw_index]))


def sample_two_positions(k: int, j: int, seed: int, draw_index: int) -> tuple[int, ...]:
    """Uniform j-subset of range(k): the slots that receive type-II patterns."""
    if not 0 <= j <= k:
        raise ValueError("need 0 <= j <= k")
    if j == 0:
        return ()
    rng = _rng(seed, draw_index)
    return tuple(sorted(int(x) for x in rng.choice(k, size=j, replace=False)))


@dataclass(frozen=True)
class ResampleRecord:
    gamma_in: Polygon
    gamma_out: Polygon
    n_one_s1_before: int
    n_one_s1_after: int
    seed: int
    draw_index: int
    ell: int | None = None
    middle_index: int | None = None  # L with out[ell] == in[L], when defined


def resample_local_shell(
    p: Polygon, seed: int, *, draw_index: int = 0, ell: int | None = None
) -> ResampleRecord:
    """One uniform draw from the local shell of p (deterministic per seed and
    draw index).  When ``ell`` lies in the guaranteed middle window the
    record carries the index L at which the input polygon visits the same
    vertex the output visits at ell."""
    sm = slot_partition(p)
    sel = selection_indices(sm)
    k = len(sel)
    j = sum(1 for i in sel if sm.slots[i].kind == "II")
    subset = sample_two_positions(k, j, seed, draw_index)
    out = realize_member(p, sm, subset)
    pos_in_s1 = {pos for pos, i in enumerate(sel) if i in sm.s1}
    two_s1_after = sum(1 for pos in subset if pos in pos_in_s1)
    n11_before = sm.n_one_s1
    n11_after = len(sm.s1) - two_s1_after
    middle = None
    if ell is not None:
        lo, hi = middle_window(p, sm)
        if lo <= ell <= hi:
            middle = ell + 2 * (sm.n_two_s1 - two_s1_after)
            if out.canonical_path.vertices[ell] != p.canonical_path.vertices[middle]:
                raise AssertionError("middle-index bookkeeping mismatch")
    return ResampleRecord(p, out, n11_before, n11_after, seed, draw_index, ell, middle)


# --- exact conditional law -----------------------------------------------------


def hypergeometric_support(s1: int, s2: int, n_one: int) -> range:
    return range(max(0, n_one - s2), min(s1, n_one) + 1)


def hypergeometric_pmf(s1: int, s2: int, n_one: int, k: int) -> ExactProb:
    """P(exactly k of the n_one type-I patterns land in the s1 slots of S1)
    = C(s1,k) C(s2,n_one-k) / C(s1+s2,n_one), as an exact rational."""
    if s1 < 0 or s2 < 0 or not 0 <= n_one <= s1 + s2:
        raise ValueError("inadmissible slot counts")
    if not (0 <= k <= s1 and 0 <= n_one - k <= s2):
        raise ValueError(f"k={k} outside the support for ({s1},{s2},{n_one})")
    return ExactProb(
        math.comb(s1, k) * math.comb(s2, n_one - k), math.comb(s1 + s2, n_one)
    )


def gaussian_density(z: float, alpha: float, beta: float, m: int) -> float:
    """Asymptotic density of Z = N_I^1/(alpha beta m) - 1 for a good shell
    with |S1| = alpha m, N_I = beta m, |S1|+|S2| = m."""
    if not (0 < alpha < 1 and 0 < beta < 1):
        raise ValueError("alpha and beta must lie in (0, 1)")
    if m < 1:
        raise ValueError("m must be >= 1")
    a, b = alpha, beta
    var_term = a * b * (1 - a) * (1 - b)
    return math.exp(-a * b * m * z * z / (2 * (1 - a) * (1 - b))) / math.sqrt(
        2 * math.pi * var_term * m
    )


# --- middle-index bookkeeping ----------------------------------------------------


def middle_window(p: Polygon, sm: SlotMap | None = None) -> tuple[int, int]:
    """Index interval [lo, hi] on which every local-shell member is traversing
    the shared middle section.  A singleton shell is safe everywhere."""
    from .patterns import canonical_pattern_pair

    sm = slot_partition(p) if sm is None else sm
    sel = selection_indices(sm)
    sel_set = set(sel)
    j = sum(1 for i in sel if sm.slots[i].kind == "II")
    n = len(p) - 1
    if len(sel) == 0 or j == 0 or j == len(sel):
        return 0, n
    seg = len(p) // 10
    l_empty = sm.empty_length
    len_one = len(canonical_pattern_pair(p.dimension).chi_one)
    frozen_two = 0
    for i, s in enumerate(sm.slots):
        ke = sm.empty_steps[i]
        in_s1 = ke + len_one <= seg
        in_s2 = ke >= l_empty - seg
        in_mid = ke >= seg and ke + len_one <= l_empty - seg
        if not (in_s1 or in_s2 or in_mid):
            raise WindowUndefinedError(f"slot at {s.base} straddles a segment boundary")
        if i not in sel_set and in_mid and s.kind == "II":
            frozen_two += 1
    lo = seg + 2 * min(len(sm.s1), j)
    hi = (l_empty - seg) + 2 * (max(0, j - len(sm.s2)) + frozen_two)
    return max(lo, 0), min(hi, n)


@dataclass(frozen=True)
class MiddleReport:
    l_mid: int
    window: tuple[int, int]


def middle_index_and_window(p: Polygon, ell: int) -> MiddleReport:
    """The middle index (where the input polygon sits when the mean-typical
    member is at ell) and the window of indices safe for every member.

    The mean member carries floor(T_I |S1| / (|S1|+|S2|)) type-I patterns in
    S1, clamped into the feasible range when slots outside S1 u S2 make the
    literal mean unattainable.
    """
    n = len(p) - 1
    if not math.ceil(n / 4) <= ell <= (3 * n) // 4:
        raise ValueError(f"ell={ell} outside [ceil(n/4), floor(3n/4)] for n={n}")
    sm = slot_partition(p)
    sel = selection_indices(sm)
    k = len(sel)
    j = sum(1 for i in sel if sm.slots[i].kind == "II")
    window = middle_window(p, sm)
    if k == 0 or j == 0 or j == k:
        return MiddleReport(ell, window)
    s1, s2 = len(sm.s1), len(sm.s2)
    n_one_sel = k - j
    k_mean = (sm.t_one * s1) // (s1 + s2)
    k_mean = max(max(0, n_one_sel - s2), min(k_mean, min(s1, n_one_sel)))
    a_mean = s1 - k_mean  # type-II count in S1 for the mean member
    lo, hi = window
    if not lo <= ell <= hi:
        raise WindowUndefinedError(
            f"ell={ell} outside the guaranteed middle window {window}"
        )
    l_mid = ell + 2 * (sm.n_two_s1 - a_mean)
    return MiddleReport(l_mid, window)


# --- the equilibrium experiment ----------------------------------------------------


@dataclass(frozen=True)
class ChiSquare:
    statistic: float
    dof: int
    p_value: float
    counts: dict

    def to_json_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "dof": self.dof,
            "p_value": self.p_value,
            "counts": {str(k): v for k, v in sorted(self.counts.items())},
        }


@dataclass(frozen=True)
class ResampleTestReport:
    samples: int
    seed: int
    members: ChiSquare
    marginal: ChiSquare
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "members": self.members.to_json_dict(),
            "marginal": self.marginal.to_json_dict(),
            "passed": self.passed,
        }


def _chi_square(counts: dict, expected: dict) -> ChiSquare:
    dof = len(expected) - 1
    if dof <= 0:
        return ChiSquare(0.0, 0, 1.0, dict(counts))
    stat = sum(
        (counts.get(key, 0) - exp) ** 2 / exp for key, exp in expected.items()
    )
    return ChiSquare(stat, dof, float(chi2.sf(stat, dof)), dict(counts))


def equilibrium_and_pmf_test(
    p: Polygon, samples: int, seed: int, *, max_members: int = 200_000
) -> ResampleTestReport:
    """Sample the redistribution and verify (a) uniformity over the local
    shell members and (b) the exact hypergeometric marginal of the type-I
    count in S1, both by chi-square.  The exact member-count identity
    C(s1,a) C(s2,j-a) / C(k,j) = pmf(N_I^1) is asserted along the way."""
    sm = slot_partition(p)
    sel = selection_indices(sm)
    k = len(sel)
    j = sum(1 for i in sel if sm.slots[i].kind == "II")
    total_members = math.comb(k, j)
    if total_members > max_members:
        raise ValueError(f"{total_members} members exceed the test budget")
    s1, s2 = len(sm.s1), len(sm.s2)
    n_one_sel = k - j
    pos_in_s1 = {pos for pos, i in enumerate(sel) if i in sm.s1}

    member_counts: dict[tuple[int, ...], int] = {}
    marg_counts: dict[int, int] = {}
    for i in range(samples):
        subset = sample_two_positions(k, j, seed, i)
        member_counts[subset] = member_counts.get(subset, 0) + 1
        n11 = s1 - sum(1 for pos in subset if pos in pos_in_s1)
        marg_counts[n11] = marg_counts.get(n11, 0) + 1

    import itertools

    member_expected = {
        subset: samples / total_members
        for subset in itertools.combinations(range(k), j)
    }
    support = hypergeometric_support(s1, s2, n_one_sel)
    marg_expected = {}
    for n11 in support:
        pmf = hypergeometric_pmf(s1, s2, n_one_sel, n11)
        a = s1 - n11
        exact_members = math.comb(s1, a) * math.comb(s2, j - a)
        if Fraction(exact_members, total_members) != pmf:
            raise AssertionError("hypergeometric member-count identity violated")
        marg_expected[n11] = samples * pmf.numerator / pmf.denominator
    members = _chi_square(member_counts, member_expected)
    marginal = _chi_square(marg_counts, marg_expected)
    passed = members.p_value > 0.01 and marginal.p_value > 0.01
    return ResampleTestReport(samples, seed, members, marginal, passed)


# --- midpoint delocalization --------------------------------------------------------


@dataclass(frozen=True)
class MidpointReport:
    m: int
    d: int
    c_m: int
    distribution: dict[Point, ExactProb]
    sup: ExactProb
    sup_times_sqrt_m: float

    def to_csv_rows(self) -> list[tuple]:
        rows = []
        for point, prob in sorted(self.distribution.items()):
            rows.append(tuple(point) + (prob.numerator, prob.denominator))
        return rows


def midpoint_histogram(m: int, d: int = 2, *, node_budget: int | None = None) -> MidpointReport:
    """Exact law of the vertex at index floor(m/2) under the uniform law on
    length-m walks from the origin, with sup and sup * sqrt(m)."""
    if m < 1:
        raise ValueError("need m >= 1")
    check_guardrail(m, d, node_budget)
    mid = m // 2
    counts: dict[Point, int] = {}

    def see(verts: tuple[Point, ...]) -> None:
        v = verts[mid]
        counts[v] = counts.get(v, 0) + 1

    total = visit_saw_vertices(m, d, Constraint.ORIGIN, see, budget=node_budget)
    dist = {v: ExactProb(c, total) for v, c in counts.items()}
    sup = max(dist.values())
    return MidpointReport(m, d, total, dist, sup, float(sup) * math.sqrt(m))
