"""Charming indices, snake sets, the rare-bad-length bound, the
reflection construction and its bootstrap table, and the method constants.

A first-part prefix is charming at index k (for parameters alpha, n, ell)
when, among walks of length k + n - ell with NE at the origin whose first
part is the prefix's first k steps, the closing fraction exceeds
n**-alpha.  All of these fractions are exact rationals and the threshold
comparison is exact.  The extension length n - ell is shared across
indices; that is what lets one prefix host a whole snake of conditioned
events.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .counting import (
    Constraint,
    check_guardrail,
    count_completions,
    count_extensions,
    iter_polygon_traces,
    list_first_parts,
    visit_saw_vertices,
)
from .exact import ExactProb, at_least_power, cmp_fraction_to_power, exceeds_power
from .lattice import Point, Walk, lex_key, reflect_for_construction, reverse_walk
from .two_part import decompose, first_part_length, first_part_vertices


class NoCompletionsError(ValueError):
    """The conditioning event is empty: the prefix is not a possible first
    part at this extension length."""


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _require_first_part(prefix: Walk) -> None:
    if any(c != 0 for c in prefix.origin):
        raise ValueError("a first part starts at the origin")
    if any(lex_key(v) > lex_key(prefix.origin) for v in prefix.vertices):
        raise ValueError("a first part keeps its NE vertex at the origin")


# --- conditional closing probabilities -----------------------------------------


def completion_counts(
    gamma: Walk, k: int, n: int, ell: int, *, node_budget: int | None = None
) -> tuple[int, int]:
    """(completions, closing completions) for gamma's first k steps at the
    shared extension length n - ell; counts are per composed shape (the
    composed walk and its reversal are not double-counted)."""
    if n % 2 == 0 or n < 1:
        raise ValueError("n must be odd")
    if not 0 <= k <= len(gamma) or k > ell or ell > n:
        raise ValueError("need 0 <= k <= min(|gamma|, ell) and ell <= n")
    if (ell - k) % 2:
        raise ValueError("ell - k must be even (parity of closing lengths)")
    _require_first_part(gamma)
    prefix = gamma.prefix(k)
    m = n - ell
    check_guardrail(m, gamma.dimension, node_budget)
    if k >= 1 and m >= 1:
        return count_completions(prefix.vertices, m, gamma.dimension,
                                 node_budget=node_budget)
    if m == 0:
        rev = reverse_walk(prefix)
        if len(prefix) and decompose(rev).first.vertices == prefix.vertices:
            closes = 1 if (k >= 2 and sum(abs(c) for c in prefix.end) == 1) else 0
            return 1, closes
        return 0, 0
    # k == 0: the empty first part against any admissible second part
    counts = [0, 0]

    def see(verts: tuple[Point, ...]) -> None:
        if first_part_length(verts) == 0:
            counts[0] += 1
            if m >= 2 and sum(abs(a - b) for a, b in zip(verts[-1], verts[0])) == 1:
                counts[1] += 1

    visit_saw_vertices(m, gamma.dimension, Constraint.FIRST_PART, see,
                       budget=node_budget)
    return counts[0], counts[1]


def conditional_closing_prob(
    gamma: Walk, k: int, n: int, ell: int, alpha, *, node_budget: int | None = None
) -> tuple[ExactProb, bool]:
    """Exact closing probability of walks of length k + n - ell with NE at
    the origin, conditioned on their first part being gamma's first k steps,
    together with the charming flag (probability > n**-alpha, decided
    exactly).

    Raises :class:`NoCompletionsError` when no such walk exists.
    """
    total, closing = completion_counts(gamma, k, n, ell, node_budget=node_budget)
    if total == 0:
        raise NoCompletionsError(
            f"no walks of length {k + n - ell} have this length-{k} first part"
        )
    q = ExactProb(closing, total)
    return q, exceeds_power(q, n, -_as_fraction(alpha))


# --- snake parameters and profiles ------------------------------------------------


@dataclass(frozen=True)
class SnakeParams:
    """Exponent and index parameters with the derived method constants."""

    d: int
    alpha: Fraction
    beta: Fraction
    eta: Fraction
    n: int | None = None
    ell: int | None = None

    @property
    def delta(self) -> Fraction:
        return self.beta - self.eta - self.alpha

    @property
    def c_exponent(self) -> Fraction:
        return Fraction(1, 5 * (4 * self.d + 1))

    @property
    def c_value(self) -> float:
        return 2.0 ** float(self.c_exponent)

    @property
    def k_exact(self) -> int | None:
        """20(4d+1) log(4d)/log 2, exact when 4d is a power of two."""
        power = (4 * self.d).bit_length() - 1
        if 1 << power == 4 * self.d:
            return 20 * (4 * self.d + 1) * power
        return None

    @property
    def k_value(self) -> float:
        return 20 * (4 * self.d + 1) * math.log(4 * self.d) / math.log(2)

    @property
    def feasibility_threshold(self) -> float | None:
        """Smallest admissible n for the method's conclusion: K ** (1/delta);
        None when delta <= 0."""
        if self.delta <= 0:
            return None
        return self.k_value ** float(1 / self.delta)

    def bound(self, n: int) -> float:
        """The closing-probability bound 2(n+1) c**(-n**delta / 2)."""
        if self.delta <= 0:
            raise ValueError("the bound needs delta > 0")
        exponent = -(n ** float(self.delta)) / (2 * 5 * (4 * self.d + 1))
        return 2 * (n + 1) * 2.0**exponent

    def to_json_dict(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "eta": str(self.eta),
            "delta": str(self.delta),
            "c": self.c_value,
            "K": self.k_exact if self.k_exact is not None else self.k_value,
            "threshold_n": self.feasibility_threshold,
        }


def method_constants(d: int, alpha, beta, eta, n: int | None = None,
                     ell: int | None = None) -> SnakeParams:
    if d < 2:
        raise ValueError("dimension must be >= 2")
    alpha, beta, eta = _as_fraction(alpha), _as_fraction(beta), _as_fraction(eta)
    if not 0 <= eta < beta:
        raise ValueError("need 0 <= eta < beta")
    if n is not None and n % 2 == 0:
        raise ValueError("n must be odd")
    return SnakeParams(d, alpha, beta, eta, n, ell)


@dataclass(frozen=True)
class ProfileEntry:
    k: int
    completions: int           # 0 when the conditioning is empty
    q: ExactProb | None
    charming: bool


@dataclass(frozen=True)
class CharmingProfile:
    gamma: Walk
    params: SnakeParams
    entries: tuple[ProfileEntry, ...]
    admissible: int            # parity-admissible indices in the snake interval
    charming_count: int
    cs_member: bool            # charming_count >= n**(beta-eta) / 4, exactly
    n_set: tuple[int, ...] | None = None  # non-charming indices near the middle index

    def entry(self, k: int) -> ProfileEntry | None:
        for e in self.entries:
            if e.k == k:
                return e
        return None


def _charm_entry(gamma: Walk, k: int, n: int, ell: int, alpha,
                 node_budget: int | None) -> ProfileEntry:
    total, closing = completion_counts(gamma, k, n, ell, node_budget=node_budget)
    if total == 0:
        return ProfileEntry(k, 0, None, False)
    q = ExactProb(closing, total)
    return ProfileEntry(k, total, q, exceeds_power(q, n, -_as_fraction(alpha)))


def charming_profile(
    gamma: Walk,
    params: SnakeParams,
    *,
    l_mid: int | None = None,
    node_budget: int | None = None,
) -> CharmingProfile:
    """Charming flags for every parity-admissible index in the snake interval
    [ell - n**beta, ell] (clipped at 0), with the snake-set membership flag.

    With ``l_mid`` given, also collects the non-charming indices within the
    +-2 sqrt(n) (log n)**(1/4) window around it.
    """
    if params.n is None or params.ell is None:
        raise ValueError("params must fix n and ell")
    n, ell, alpha = params.n, params.ell, params.alpha
    k_lo = max(0, math.ceil(ell - float(n) ** float(params.beta)))
    entries = []
    for k in range(ell, k_lo - 1, -2):
        entries.append(_charm_entry(gamma, k, n, ell, alpha, node_budget))
    entries.reverse()
    admissible = len(entries)
    charming_count = sum(1 for e in entries if e.charming)
    cs_member = at_least_power(Fraction(4 * charming_count), n,
                               params.beta - params.eta)
    n_set = None
    if l_mid is not None:
        radius = math.floor(2 * math.sqrt(n) * math.log(n) ** 0.25)
        known = {e.k: e for e in entries}
        bad = []
        for j in range(max(0, l_mid - radius), min(ell, l_mid + radius) + 1):
            if (ell - j) % 2:
                continue
            e = known.get(j)
            if e is None:
                e = _charm_entry(gamma, j, n, ell, alpha, node_budget)
            if not e.charming:
                bad.append(j)
        n_set = tuple(bad)
    return CharmingProfile(gamma, params, tuple(entries), admissible,
                           charming_count, cs_member, n_set)


# --- rare bad first-part lengths and the choice of ell ---------------------------------------


@dataclass(frozen=True)
class BadIndexReport:
    n: int
    d: int
    alpha_prime: float
    delta_prime: float
    closing_probability: ExactProb
    premise_holds: bool        # closing probability >= n**-alpha'
    counts: tuple[tuple[int, int, int], ...]  # (i, walks with |first|=i, closing among them)
    q_set: tuple[int, ...]     # indices where walks outnumber closing by >= n**(a'+d')
    cardinality_bound: float   # 2 n**(1-delta')
    bound_holds: bool | None   # |Q| <= bound; asserted when the premise holds
    ell: int | None            # chosen index in [n/4, 3n/4] outside Q, if any


def bad_index_set_and_select_ell(
    n: int, alpha_prime, delta_prime, d: int = 2, *, node_budget: int | None = None
) -> BadIndexReport:
    """The set Q of first-part lengths whose walks outnumber their closing
    walks by a factor of at least n**(alpha'+delta'), and the smallest
    admissible index ell in [ceil(n/4), floor(3n/4)] outside Q.

    Whenever the closing probability is at least n**-alpha' (checked
    exactly), the cardinality of Q is asserted to be at most 2 n**(1-delta').
    """
    if n % 2 == 0 or n < 3:
        raise ValueError("need odd n >= 3")
    check_guardrail(n, d, node_budget)
    ap, dp = _as_fraction(alpha_prime), _as_fraction(delta_prime)
    walks = [0] * (n + 1)
    closing = [0] * (n + 1)
    total = [0, 0]

    def see(verts: tuple[Point, ...]) -> None:
        i = first_part_length(verts)
        walks[i] += 1
        total[0] += 1
        if sum(abs(a - b) for a, b in zip(verts[-1], verts[0])) == 1:
            closing[i] += 1
            total[1] += 1

    visit_saw_vertices(n, d, Constraint.ORIGIN, see, budget=node_budget)
    prob = ExactProb(total[1], total[0])
    premise = at_least_power(prob, n, -ap)
    q_set = tuple(
        i for i in range(n + 1)
        if closing[i] == 0 or at_least_power(Fraction(walks[i], closing[i]), n, ap + dp)
    )
    bound_holds = cmp_fraction_to_power(Fraction(len(q_set), 2), n, 1 - dp) <= 0
    if premise and not bound_holds:
        raise AssertionError("bad-index cardinality bound violated")
    ell = next(
        (i for i in range(math.ceil(n / 4), (3 * n) // 4 + 1) if i not in set(q_set)),
        None,
    )
    return BadIndexReport(
        n, d, float(ap), float(dp), prob, premise,
        tuple((i, walks[i], closing[i]) for i in range(n + 1)),
        q_set, 2 * float(n) ** float(1 - dp), bound_holds, ell,
    )


# --- the first-part law identity ------------------------------------------------------


def first_part_law_identity_check(
    n: int, ell: int, d: int = 2, *, node_budget: int | None = None
) -> bool:
    """Exact distributional identity: the first ell steps of a uniform
    polygon of length n+1 have the same law as the first part of a uniform
    closing walk with NE at the origin and first-part length ell."""
    if n % 2 == 0 or not 0 <= ell <= n:
        raise ValueError("need odd n and 0 <= ell <= n")
    check_guardrail(n, d, node_budget)
    poly_counts: dict[tuple[Point, ...], int] = {}
    poly_total = 0
    for trace in iter_polygon_traces(n + 1, d, node_budget=node_budget):
        prefix = trace[: ell + 1]
        poly_counts[prefix] = poly_counts.get(prefix, 0) + 1
        poly_total += 1
    walk_counts: dict[tuple[Point, ...], int] = {}
    walk_total = [0]

    def see(verts: tuple[Point, ...]) -> None:
        if sum(abs(a - b) for a, b in zip(verts[-1], verts[0])) != 1:
            return
        first = first_part_vertices(verts)
        if len(first) - 1 == ell:
            walk_counts[first] = walk_counts.get(first, 0) + 1
            walk_total[0] += 1

    visit_saw_vertices(n, d, Constraint.NE_ORIGIN, see, budget=node_budget)
    if poly_total == 0 or walk_total[0] == 0:
        return poly_total == 0 and walk_total[0] == 0  # both laws empty: vacuous
    law1 = {w: Fraction(c, poly_total) for w, c in poly_counts.items()}
    law2 = {w: Fraction(c, walk_total[0]) for w, c in walk_counts.items()}
    return law1 == law2


# --- the reflection construction -------------------------------------------------------


@dataclass(frozen=True)
class ReflectedFamily:
    phi: Walk
    n: int
    w_size: int                   # number of admissible second-part shapes
    distinct: tuple[Walk, ...]    # distinct truncated length-n walks
    bound_holds: bool             # 2d * len(distinct) >= w_size


def reflected_walk_family(
    phi: Walk, n: int, *, node_budget: int | None = None
) -> ReflectedFamily:
    """For every walk of length n - |phi| from the origin with NE at the
    origin, concatenate: the reversal of phi, the distinguished unit edge,
    and the reflected-translated walk.  Every concatenation is self-avoiding
    of length n+1; dropping the final edge leaves length-n walks following
    the reversal of phi, and at least |W| / 2d of them are distinct."""
    _require_first_part(phi)
    d = phi.dimension
    ell = len(phi)
    if ell > n:
        raise ValueError("phi longer than n")
    m = n - ell
    check_guardrail(m, d, node_budget)
    rev = reverse_walk(phi)
    seen: dict[tuple[Point, ...], None] = {}
    w_size = 0
    for verts in list_first_parts(m, d, node_budget=node_budget):
        w_size += 1
        reflected = reflect_for_construction(Walk.from_vertices(verts))
        full = rev.vertices + reflected.vertices
        if len(set(full)) != len(full):
            raise AssertionError("reflected concatenation failed self-avoidance")
        if len(full) - 1 != n + 1:
            raise AssertionError("reflected concatenation has the wrong length")
        seen.setdefault(full[:-1], None)
    distinct = tuple(Walk.from_vertices(v) for v in seen)
    bound = 2 * d * len(distinct) >= w_size
    if not bound:
        raise AssertionError("reflected family smaller than |W| / 2d")
    return ReflectedFamily(phi, n, w_size, distinct, bound)


# --- the bootstrap table ----------------------------------------------------------------


@dataclass(frozen=True)
class BootstrapRow:
    j: int
    avoid_count: int
    p_avoid: ExactProb
    close_given_avoid: ExactProb | None


@dataclass(frozen=True)
class BootstrapTable:
    phi: Walk
    n: int
    w_size: int
    rows: tuple[BootstrapRow, ...]
    closing_mass: Fraction        # sum of the unconditioned closing probabilities
    max_multiplicity: int         # how many closing events one walk can satisfy

    def monotone(self) -> bool:
        counts = [r.avoid_count for r in self.rows]
        return all(a >= b for a, b in zip(counts, counts[1:]))


def bootstrap_table(
    phi: Walk, n: int, indices, *, node_budget: int | None = None
) -> BootstrapTable:
    """Exact avoidance/closing table over the uniform second-part family.

    For each index j the avoidance event collects the walks sharing only the
    origin with phi's first j steps; the closing event collects those whose
    endpoint neighbours phi's j-th vertex.  The avoidance events are nested
    (decreasing), no walk lies in more than 2d closing events, and the total
    closing mass is at most 2d -- all asserted exactly.
    """
    _require_first_part(phi)
    d = phi.dimension
    ell = len(phi)
    js = list(indices)
    if js != sorted(set(js)) or any(not 0 <= j <= ell for j in js):
        raise ValueError("indices must be strictly increasing within [0, ell]")
    m = n - ell
    if m < 0:
        raise ValueError("phi longer than n")
    check_guardrail(m, d, node_budget)
    family = list_first_parts(m, d, node_budget=node_budget)
    w_size = len(family)
    phi_verts = phi.vertices
    prefix_sets = {j: set(phi_verts[1 : j + 1]) for j in js}
    avoid_sets: dict[int, list[int]] = {j: [] for j in js}
    multiplicity = [0] * w_size
    rows = []
    closing_mass = Fraction(0)
    prev: set[int] | None = None
    for j in js:
        block = prefix_sets[j]
        target = phi_verts[j]
        a_members = []
        c_count = 0
        ca_count = 0
        for idx, verts in enumerate(family):
            interior = verts[1:]
            avoids = not any(v in block for v in interior)
            closes = sum(abs(a - b) for a, b in zip(verts[-1], target)) == 1
            if closes:
                multiplicity[idx] += 1
                c_count += 1
            if avoids:
                a_members.append(idx)
                if closes:
                    ca_count += 1
        cur = set(a_members)
        if prev is not None and not cur <= prev:
            raise AssertionError("avoidance events are not nested")
        prev = cur
        avoid_sets[j] = a_members
        closing_mass += Fraction(c_count, w_size)
        rows.append(
            BootstrapRow(
                j,
                len(a_members),
                ExactProb(len(a_members), w_size),
                ExactProb(ca_count, len(a_members)) if a_members else None,
            )
        )
    max_mult = max(multiplicity, default=0)
    if max_mult > 2 * d:
        raise AssertionError("a walk lies in more than 2d closing events")
    if closing_mass > 2 * d:
        raise AssertionError("total closing mass above 2d")
    return BootstrapTable(phi, n, w_size, tuple(rows), closing_mass, max_mult)


# --- small conveniences -----------------------------------------------------------------


def chain_prefix_count(phi: Walk, n: int, *, node_budget: int | None = None) -> int:
    """Number of length-n walks from the origin whose first steps trace the
    reversal of phi (translated to start at the origin)."""
    rev = reverse_walk(phi)
    shift = tuple(-c for c in rev.origin)
    verts = tuple(tuple(a + b for a, b in zip(v, shift)) for v in rev.vertices)
    return count_extensions(verts, n, phi.dimension, node_budget=node_budget)


def origin_walk(d: int = 2) -> Walk:
    return Walk(d, tuple(0 for _ in range(d)))


__all__ = [
    "NoCompletionsError",
    "conditional_closing_prob",
    "SnakeParams",
    "method_constants",
    "ProfileEntry",
    "CharmingProfile",
    "charming_profile",
    "BadIndexReport",
    "bad_index_set_and_select_ell",
    "first_part_law_identity_check",
    "ReflectedFamily",
    "reflected_walk_family",
    "BootstrapRow",
    "BootstrapTable",
    "bootstrap_table",
    "chain_prefix_count",
    "origin_walk",
]
