"""The exact enumeration engine against the naive oracle and frozen values."""

from fractions import Fraction

import pytest

import oracle
from sawlab.counting import (
    Constraint,
    GuardrailError,
    closing_probabilities,
    count_extensions,
    count_polygons,
    count_walks_and_closing,
    enumerate_saw,
    first_part_table,
    growth_report,
    iter_polygon_traces,
    visit_saw_vertices,
)
from sawlab.lattice import Polygon, Walk

# frozen oracle outputs (tests/oracle.py)
C2 = [1, 4, 12, 36, 100, 284, 780, 2172, 5916, 16268, 44100]
C3 = [1, 6, 30, 150, 726, 3534, 16926, 81390]
P2 = {4: 1, 6: 2, 8: 7, 10: 28, 12: 124, 14: 588}
CLOSING = {3: Fraction(2, 9), 5: Fraction(6, 71), 7: Fraction(28, 543)}


class TestEnumerate:
    def test_frozen_counts(self):
        for n, c in enumerate(C2[:9]):
            assert enumerate_saw(n, 2) == c
        for n, c in enumerate(C3[:6]):
            assert enumerate_saw(n, 3) == c

    def test_empty_walk(self):
        for d in (2, 3, 4):
            assert enumerate_saw(0, d) == 1

    def test_examples(self):
        assert enumerate_saw(3, 2) == 36
        assert enumerate_saw(5, 2) == 284

    def test_walk_sets_match_oracle_origin(self):
        for n in (3, 5):
            got = []
            visit_saw_vertices(n, 2, Constraint.ORIGIN, got.append)
            assert sorted(got) == sorted(oracle.saws(n, 2))

    def test_walk_sets_match_oracle_ne_origin(self):
        for n in (3, 4):
            got = []
            visit_saw_vertices(n, 2, Constraint.NE_ORIGIN, got.append)
            assert sorted(got) == sorted(oracle.ne_walks(n, 2))

    def test_walk_sets_match_oracle_first_part(self):
        for n in (3, 4, 5):
            got = []
            visit_saw_vertices(n, 2, Constraint.FIRST_PART, got.append)
            assert sorted(got) == sorted(oracle.first_parts(n, 2))
        for n in (2, 3):
            got = []
            visit_saw_vertices(n, 3, Constraint.FIRST_PART, got.append)
            assert sorted(got) == sorted(oracle.first_parts(n, 3))

    def test_ne_origin_count_equals_origin_count(self):
        assert enumerate_saw(6, 2, Constraint.NE_ORIGIN) == C2[6]

    def test_visitor_gets_walks_in_deterministic_order(self):
        seen1, seen2 = [], []
        enumerate_saw(4, 2, visitor=seen1.append)
        enumerate_saw(4, 2, visitor=seen2.append)
        assert seen1 == seen2
        assert all(isinstance(w, Walk) for w in seen1)

    def test_parallel_matches_serial(self):
        assert enumerate_saw(12, 2, threads=2) == enumerate_saw(12, 2)

    def test_negative_length(self):
        with pytest.raises(ValueError):
            enumerate_saw(-1, 2)


class TestGuardrail:
    def test_rejects_infeasible(self):
        with pytest.raises(GuardrailError):
            enumerate_saw(100, 2)

    def test_budget_override_argument(self):
        with pytest.raises(GuardrailError):
            enumerate_saw(8, 2, node_budget=10)

    def test_budget_env_override(self, monkeypatch):
        monkeypatch.setenv("SAWLAB_NODE_BUDGET", "10")
        with pytest.raises(GuardrailError):
            enumerate_saw(8, 2)
        monkeypatch.setenv("SAWLAB_NODE_BUDGET", str(10**12))
        assert enumerate_saw(8, 2) == C2[8]


class TestPolygons:
    def test_examples(self):
        assert count_polygons(4, 2) == 1
        assert count_polygons(6, 2) == 2
        assert count_polygons(8, 2) == 7

    def test_frozen(self):
        for n, p in P2.items():
            if n <= 12:
                assert count_polygons(n, 2) == p

    def test_oracle_equivalence_via_traces(self):
        for n in (4, 6, 8, 10):
            got = set()
            for trace in iter_polygon_traces(n, 2):
                got.add(Polygon.from_closed_trace(Walk.from_vertices(trace)).edges)
            assert got == oracle.polygons(n, 2)

    def test_d3(self):
        assert count_polygons(4, 3) == len(oracle.polygons(4, 3))
        assert count_polygons(6, 3) == len(oracle.polygons(6, 3))

    def test_rejects_odd_or_tiny(self):
        with pytest.raises(ValueError):
            count_polygons(5, 2)
        with pytest.raises(ValueError):
            count_polygons(2, 2)


class TestClosingProbabilities:
    def test_spot_values(self):
        for n, q in CLOSING.items():
            rep = closing_probabilities(n, 2)
            assert rep.closing_direct == q
            assert rep.closing_identity == q

    def test_direct_count_matches_oracle(self):
        for n in (3, 5, 7):
            _, closing = count_walks_and_closing(n, 2)
            assert closing == oracle.closing_count(n, 2)

    def test_identity_exact_up_to_nine(self):
        for n in (3, 5, 7, 9):
            rep = closing_probabilities(n, 2)
            assert rep.closing_direct == rep.closing_identity
            assert rep.closing_identity == Fraction(2 * (n + 1) * rep.p_n1, rep.c_n)

    def test_json_schema(self):
        d = closing_probabilities(3, 2).to_json_dict()
        assert d == {
            "n": 3, "d": 2, "c_n": "36", "p_n1": "1",
            "closing": {"num": "2", "den": "9"},
        }

    def test_rejects_even(self):
        with pytest.raises(ValueError):
            closing_probabilities(4, 2)


class TestFirstPartTable:
    def test_frozen_small_table(self):
        t = first_part_table(2, 5, Fraction(1, 2))
        rows = {tuple(r.walk.steps): (r.completions, r.closing, r.q) for r in t.rows}
        assert rows == {
            (-1, -1): (14, 2, Fraction(1, 7)),   # west, west
            (-1, -2): (10, 2, Fraction(1, 5)),   # west, south
        }

    def test_partition_identity(self):
        # the first-part tables partition the NE-at-origin walks by |first part|
        for n in (4, 5, 6):
            total = sum(
                first_part_table(ell, n, 0.5).total_completions()
                for ell in range(n + 1)
            )
            assert total == C2[n]

    def test_membership_requires_a_completion(self):
        # a first part starting south has no completions at interior splits
        t = first_part_table(2, 6, 0.5)
        assert all(r.walk.steps[0] == -1 for r in t.rows)

    def test_ell_zero_degenerate(self):
        t = first_part_table(0, 5, 0.5)
        assert len(t.rows) == 1 and len(t.rows[0].walk) == 0

    def test_huge_alpha_keeps_only_positive_q(self):
        # threshold n**-alpha falls below every positive rational;
        # membership in the high set degenerates to q > 0
        t = first_part_table(2, 5, 100)
        assert all(r.in_hphi == (r.q > 0) for r in t.rows)

    def test_completion_counts_against_oracle(self):
        from sawlab.two_part import first_part_length

        for ell in range(6):
            t = first_part_table(ell, 5, 0.5)
            want = sum(
                1 for verts in oracle.ne_walks(5, 2) if first_part_length(verts) == ell
            )
            assert t.total_completions() == want


class TestExtensions:
    def test_count_extensions_against_oracle(self):
        prefix = ((0, 0), (1, 0))
        want = sum(1 for v in oracle.saws(4, 2) if v[1] == (1, 0))
        assert count_extensions(prefix, 4) == want

    def test_trivial_prefix(self):
        assert count_extensions([(0, 0)], 3) == C2[3]


class TestGrowth:
    def test_report(self):
        rep = growth_report(6, 2)
        assert rep.counts[1] == 4  # c_1 = 2d
        assert rep.submultiplicative_ok
        assert rep.counts[2] ** 2 >= rep.counts[4]  # 144 >= 100
        assert rep.root_infimum == min(r.root for r in rep.rows)
        assert rep.hw_coefficient >= 0.0

    def test_c1_is_2d(self):
        assert growth_report(2, 3).counts[1] == 6
