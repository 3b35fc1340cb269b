"""Two-part decomposition, polygon traces, cyclic shifts, the flat histogram."""

import pytest

import oracle
from sawlab.counting import count_polygons
from sawlab.lattice import Polygon, Walk, is_closing, lex_key
from sawlab.two_part import (
    Decomposition,
    closing_first_length_histogram,
    compose,
    cyclic_shift,
    decompose,
    first_part_length,
    first_part_vertices,
    polygon_to_path,
)


def walk(*verts):
    return Walk.from_vertices(verts)


class TestDecompose:
    def test_split_at_far_endpoint(self):
        # the walk meets its NE vertex at the end; the non-empty part heads
        # south-west (not towards NE - e1), so it is the *second* part --
        # the convention under which the closing histogram is exactly flat
        # and positive-length first parts always start with -e1
        w = walk((0, 0), (1, 0), (1, 1))
        dec = decompose(w)
        assert dec.meeting == (1, 1)
        assert len(dec.first) == 0
        assert dec.second.vertices == ((1, 1), (1, 0), (0, 0))
        assert compose(dec) == w

    def test_split_at_start_toward_largest_direction(self):
        # leaving the NE vertex towards NE - e1 makes the walk its own first part
        w = walk((0, 0), (-1, 0), (-1, -1))
        dec = decompose(w)
        assert dec.first.vertices == ((0, 0), (-1, 0), (-1, -1))
        assert len(dec.second) == 0
        assert compose(dec) == w

    def test_length_zero(self):
        dec = decompose(Walk(2, (3, 3)))
        assert len(dec.first) == 0 and len(dec.second) == 0
        assert dec.meeting == (3, 3)

    def test_first_part_structural_rules(self):
        # on walks with NE at the origin, any positive-length first part
        # starts with -e1, stays in y <= 0 and avoids N x {0} after step 0
        for n in range(1, 7):
            for verts in oracle.ne_walks(n, 2):
                first = first_part_vertices(verts)
                if len(first) > 1:
                    assert first[0] == (0, 0)
                    assert first[1] == (-1, 0)
                    assert all(v[1] <= 0 for v in first)
                    assert all(not (v[1] == 0 and v[0] >= 0) for v in first[1:])

    def test_parts_share_only_the_meeting_vertex(self):
        for verts in oracle.saws(6, 2):
            dec = decompose(Walk.from_vertices(verts))
            shared = set(dec.first.vertices) & set(dec.second.vertices)
            assert shared == {dec.meeting}

    def test_first_list_lex_largest(self):
        for verts in oracle.saws(5, 2):
            dec = decompose(Walk.from_vertices(verts))
            if len(dec.first) and len(dec.second):
                assert lex_key(dec.first.vertices[1]) > lex_key(dec.second.vertices[1])

    def test_rejects_self_intersecting(self):
        with pytest.raises(ValueError):
            decompose(walk((0, 0), (1, 0), (0, 0)))


class TestCompose:
    def test_roundtrip_saw5(self):
        for verts in oracle.saws(5, 2):
            w = Walk.from_vertices(verts)
            assert compose(decompose(w)) == w

    def test_decompose_of_compose_is_identity(self):
        for verts in oracle.saws(5, 2):
            dec = decompose(Walk.from_vertices(verts))
            assert decompose(compose(dec)) == dec

    def test_both_parts_empty(self):
        w = compose(decompose(Walk(2, (0, 0))))
        assert len(w) == 0

    def test_intersecting_parts_rejected(self):
        first = walk((0, 0), (-1, 0), (-1, -1))
        second = walk((0, 0), (0, -1), (-1, -1))
        with pytest.raises(ValueError, match="intersect"):
            compose(Decomposition(first, second, (0, 0)))

    def test_wrongly_ordered_pair_rejected(self):
        # swapping first and second violates the list rule
        first = walk((0, 0), (-1, 0))
        second = walk((0, 0), (0, -1))
        compose(Decomposition(first, second, (0, 0)))  # the valid order
        with pytest.raises(ValueError, match="split rule"):
            compose(Decomposition(second, first, (0, 0)))

    def test_part_above_meeting_rejected(self):
        first = walk((0, 0), (0, 1))
        with pytest.raises(ValueError):
            compose(Decomposition(first, Walk(2, (0, 0)), (0, 0)))


class TestPolygonPath:
    def test_unit_square(self):
        square = oracle.polygons(4, 2).pop()
        p = Polygon(2, square)
        assert polygon_to_path(p).vertices == (
            (0, 0), (-1, 0), (-1, -1), (0, -1), (0, 0)
        )

    def test_endpoint_convention_all_polygons(self):
        for n in (4, 6, 8):
            for edges in oracle.polygons(n, 2):
                path = polygon_to_path(Polygon(2, edges))
                assert path.vertices[1] == (-1, 0)
                assert path.vertices[-2] == (0, -1)

    def test_path_edges_reproduce_polygon(self):
        for edges in oracle.polygons(8, 2):
            p = Polygon(2, edges)
            rebuilt = Polygon.from_closed_trace(p.canonical_path)
            assert rebuilt.edges == p.edges


class TestCyclicShift:
    def test_square_shift(self):
        w = walk((0, 0), (1, 0), (1, 1), (0, 1))
        assert cyclic_shift(w, 1).vertices == ((1, 0), (1, 1), (0, 1), (0, 0))

    def test_full_cycle_is_identity(self):
        w = walk((0, 0), (1, 0), (1, 1), (0, 1))
        assert cyclic_shift(w, len(w) + 1) == w

    def test_shift_preserves_polygon(self):
        for verts in oracle.saws(5, 2):
            w = Walk.from_vertices(verts)
            if not is_closing(w):
                continue
            base = Polygon.from_closing_walk(w).edges
            for j in range(1, 6):
                shifted = cyclic_shift(w, j)
                assert is_closing(shifted)
                assert Polygon.from_closing_walk(shifted).edges == base

    def test_rejects_non_closing(self):
        with pytest.raises(ValueError):
            cyclic_shift(walk((0, 0), (1, 0)), 1)


class TestHistogram:
    def test_flat_n3_n5(self):
        assert closing_first_length_histogram(3, 2) == [2, 2, 2, 2]
        assert closing_first_length_histogram(5, 2) == [4] * 6

    def test_bins_count_two_traces_per_polygon(self):
        for n in (3, 5):
            bins = closing_first_length_histogram(n, 2)
            assert all(b == 2 * count_polygons(n + 1, 2) for b in bins)

    def test_sum_is_total_closing_count(self):
        bins = closing_first_length_histogram(5, 2)
        assert sum(bins) == oracle.closing_count(5, 2)

    def test_rejects_even(self):
        with pytest.raises(ValueError):
            closing_first_length_histogram(4, 2)


class TestFirstPartLengthHelpers:
    def test_length_matches_vertices(self):
        for verts in oracle.ne_walks(6, 2):
            assert first_part_length(verts) == len(first_part_vertices(verts)) - 1
