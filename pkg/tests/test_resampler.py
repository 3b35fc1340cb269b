"""Uniform pattern redistribution, its exact law, and midpoint spread."""

import math
from fractions import Fraction

import pytest

from sawlab.fixtures import corridor_polygon, good_shell_fixture
from sawlab.patterns import local_shell_key, local_shell_members, slot_partition
from sawlab.resampler import (
    equilibrium_and_pmf_test,
    gaussian_density,
    hypergeometric_pmf,
    hypergeometric_support,
    middle_index_and_window,
    middle_window,
    midpoint_histogram,
    resample_local_shell,
    sample_two_positions,
)


class TestHypergeometric:
    def test_example(self):
        assert hypergeometric_pmf(2, 2, 2, 1) == Fraction(2, 3)

    def test_nothing_to_place(self):
        assert hypergeometric_pmf(3, 4, 0, 0) == 1

    def test_sums_to_one_exactly(self):
        for s1 in range(13):
            for s2 in range(13 - s1):
                for n_one in range(s1 + s2 + 1):
                    total = sum(
                        hypergeometric_pmf(s1, s2, n_one, k)
                        for k in hypergeometric_support(s1, s2, n_one)
                    )
                    assert total == 1

    def test_inadmissible_arguments(self):
        with pytest.raises(ValueError):
            hypergeometric_pmf(2, 2, 2, 3)
        with pytest.raises(ValueError):
            hypergeometric_pmf(2, 2, 5, 1)
        with pytest.raises(ValueError):
            hypergeometric_pmf(-1, 2, 1, 0)

    def test_unimodal_with_mode_near_mean(self):
        for s1 in range(1, 13):
            for s2 in range(1, 13 - s1):
                for n_one in range(1, s1 + s2):
                    support = list(hypergeometric_support(s1, s2, n_one))
                    vals = [hypergeometric_pmf(s1, s2, n_one, k) for k in support]
                    mode = vals.index(max(vals))
                    assert all(a <= b for a, b in zip(vals[: mode + 1], vals[1 : mode + 1]))
                    assert all(a >= b for a, b in zip(vals[mode:], vals[mode + 1 :]))
                    mean = Fraction(n_one * s1, s1 + s2)
                    assert abs(support[mode] - mean) <= 1

    def test_tail_mass_monotone(self):
        for s1 in range(1, 13):
            for s2 in range(1, 13 - s1):
                for n_one in range(1, s1 + s2):
                    mean = Fraction(n_one * s1, s1 + s2)
                    support = list(hypergeometric_support(s1, s2, n_one))
                    masses = []
                    for t in range(len(support) + 1):
                        masses.append(
                            sum(
                                hypergeometric_pmf(s1, s2, n_one, k)
                                for k in support
                                if abs(k - mean) >= t
                            )
                        )
                    assert all(a >= b for a, b in zip(masses, masses[1:]))


class TestGaussian:
    def test_mode_value(self):
        assert gaussian_density(0.0, 0.5, 0.5, 100) == pytest.approx(
            1 / math.sqrt(2 * math.pi * 100 / 16), rel=1e-12
        )

    def test_symmetric(self):
        for z in (0.1, 0.37, 1.2):
            assert gaussian_density(z, 0.3, 0.6, 50) == gaussian_density(-z, 0.3, 0.6, 50)

    def test_domain(self):
        with pytest.raises(ValueError):
            gaussian_density(0.0, 0.0, 0.5, 10)
        with pytest.raises(ValueError):
            gaussian_density(0.0, 0.5, 1.0, 10)
        with pytest.raises(ValueError):
            gaussian_density(0.0, 0.5, 0.5, 0)

    def test_matches_pmf_at_mode_m_1e4(self):
        # the displayed form approximates the probability of each atom
        m = 10**4
        pmf = hypergeometric_pmf(m // 2, m // 2, m // 2, m // 4)
        dens = gaussian_density(0.0, 0.5, 0.5, m)
        assert abs(float(pmf) / dens - 1) < 0.05


class TestResample:
    def test_no_slots_identity(self):
        from sawlab.counting import iter_polygon_traces
        from sawlab.lattice import Polygon, Walk

        p = Polygon.from_closed_trace(Walk.from_vertices(next(iter_polygon_traces(8, 2))))
        rec = resample_local_shell(p, seed=5)
        assert rec.gamma_out == p

    def test_deterministic_per_seed(self):
        p = corridor_polygon(("I", "II"), ("II", "I"))
        a = resample_local_shell(p, seed=42, draw_index=9)
        b = resample_local_shell(p, seed=42, draw_index=9)
        assert a.gamma_out == b.gamma_out
        c = resample_local_shell(p, seed=43, draw_index=9)
        d = resample_local_shell(p, seed=42, draw_index=10)
        assert len({a.gamma_out, c.gamma_out, d.gamma_out}) >= 1  # streams independent

    def test_outputs_stay_in_the_shell(self, corpus):
        for p in corpus[:6]:
            key = local_shell_key(p)
            for i in range(4):
                rec = resample_local_shell(p, seed=1, draw_index=i)
                assert len(rec.gamma_out) == len(p)
                assert local_shell_key(rec.gamma_out) == key

    def test_three_slots_uniform_frequencies(self):
        # one type-II pattern over three slots: each member within 3 sigma of 1/3
        p = corridor_polygon(("II", "I"), ("I",))
        sm = slot_partition(p)
        draws = 30_000
        counts = {}
        for i in range(draws):
            subset = sample_two_positions(3, 1, 99, i)
            counts[subset] = counts.get(subset, 0) + 1
        sigma = math.sqrt(draws * (1 / 3) * (2 / 3))
        assert len(counts) == 3
        for c in counts.values():
            assert abs(c - draws / 3) <= 3 * sigma

    def test_preserves_totals(self):
        p = good_shell_fixture()
        sm = slot_partition(p)
        for i in range(5):
            rec = resample_local_shell(p, seed=3, draw_index=i)
            sm2 = slot_partition(rec.gamma_out)
            assert sm2.n_one == sm.n_one and sm2.n_two == sm.n_two
            assert sm2.empty_length == sm.empty_length


class TestMiddleIndex:
    def test_no_slots(self):
        from sawlab.counting import iter_polygon_traces
        from sawlab.lattice import Polygon, Walk

        p = Polygon.from_closed_trace(Walk.from_vertices(next(iter_polygon_traces(12, 2))))
        n = len(p) - 1
        rep = middle_index_and_window(p, n // 2)
        assert rep.l_mid == n // 2
        assert rep.window == (0, n)

    def test_one_swap_shifts_schedule_by_two(self):
        p = corridor_polygon(("II",), ("I",))
        sm = slot_partition(p)
        members = local_shell_members(p)
        assert len(members) == 2
        a, b = members
        lo, hi = middle_window(p, sm)
        # inside the window both members traverse the shared middle; moving
        # the type-II pattern into or out of S1 retards or advances every
        # middle visit by exactly two units
        va, vb = a.canonical_path.vertices, b.canonical_path.vertices
        shift = 2 * (slot_partition(b).n_two_s1 - slot_partition(a).n_two_s1)
        assert abs(shift) == 2
        n = len(p) - 1
        for j in range(lo, min(hi, n - abs(shift)) + 1):
            assert va[j] == vb[j + shift]

    def test_window_safe_for_every_member_exhaustively(self):
        # at every window index, every member sits on the input polygon's
        # own trajectory (it is traversing the shared middle section)
        for p in (corridor_polygon(("I", "II"), ("II",)), good_shell_fixture()):
            sm = slot_partition(p)
            lo, hi = middle_window(p, sm)
            assert lo <= hi
            on_input = set(p.canonical_path.vertices)
            for m in local_shell_members(p):
                verts = m.canonical_path.vertices
                for j in (lo, (lo + hi) // 2, hi):
                    assert verts[j] in on_input

    def test_window_covers_sqrt_band(self):
        p = good_shell_fixture()
        n = len(p) - 1
        ell = n // 2 if (n // 2) % 2 == 0 else n // 2 + 1
        rep = middle_index_and_window(p, ell)
        lo, hi = rep.window
        band = math.isqrt(n)
        assert lo <= ell - band and ell + band <= hi

    def test_ell_out_of_range(self):
        p = corridor_polygon(("I",), ("I",))
        with pytest.raises(ValueError):
            middle_index_and_window(p, 1)

    def test_record_l_defined_only_in_window(self):
        p = corridor_polygon(("I", "II"), ("II", "I"))
        n = len(p) - 1
        lo, hi = middle_window(p)
        inside = (lo + hi) // 2
        rec = resample_local_shell(p, seed=1, ell=inside)
        assert rec.middle_index is not None
        assert (
            rec.gamma_out.canonical_path.vertices[inside]
            == rec.gamma_in.canonical_path.vertices[rec.middle_index]
        )
        rec2 = resample_local_shell(p, seed=1, ell=max(0, lo - 1))
        assert rec2.middle_index is None


class TestEquilibrium:
    def test_exact_uniformity_by_complete_enumeration(self):
        # <= 5 selection slots: every member must be reachable and the
        # member-count identity ties the marginal to the exact pmf
        p = corridor_polygon(("I", "II"), ("II",))
        members = local_shell_members(p)
        seen = set()
        for i in range(2000):
            seen.add(resample_local_shell(p, seed=13, draw_index=i).gamma_out)
        assert seen == set(members)

    def test_chi_square_passes(self):
        p = corridor_polygon(("I", "II"), ("II", "I"))
        rep = equilibrium_and_pmf_test(p, samples=30_000, seed=777)
        assert rep.passed
        assert rep.members.p_value > 0.01 and rep.marginal.p_value > 0.01

    def test_degenerate_pass(self):
        p = corridor_polygon(("I",), ("I",))
        rep = equilibrium_and_pmf_test(p, samples=100, seed=1)
        assert rep.passed and rep.members.dof == 0

    def test_report_schema(self):
        p = corridor_polygon(("II",), ("I",))
        d = equilibrium_and_pmf_test(p, samples=500, seed=3).to_json_dict()
        assert set(d) == {"samples", "seed", "members", "marginal", "passed"}
        assert set(d["members"]) == {"statistic", "dof", "p_value", "counts"}


class TestMidpoint:
    def test_m1(self):
        rep = midpoint_histogram(1, 2)
        assert rep.sup == 1 and rep.distribution == {(0, 0): 1}

    def test_m2(self):
        rep = midpoint_histogram(2, 2)
        assert rep.sup == Fraction(1, 4)
        assert len(rep.distribution) == 4

    def test_sup_scaling_bound_small(self):
        for m in range(1, 11):
            assert midpoint_histogram(m, 2).sup_times_sqrt_m <= 1.0 + 1e-12

    def test_distribution_sums_to_one(self):
        rep = midpoint_histogram(6, 2)
        assert sum(rep.distribution.values()) == 1
