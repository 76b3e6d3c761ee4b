import itertools

import numpy as np
import pytest

from cubekappa import (
    build_complex,
    convex_hull,
    distance,
    gate,
    gate_pair_check,
    gen_ball_times_segment,
    gen_example42,
    gen_grid,
    gen_tree_ball,
    interval,
    is_convex,
    median,
    separating_set,
)
from cubekappa.core import count_consistent_orientations, hull_diameter_excess
from cubekappa.errors import (
    DisconnectedGraphError,
    DuplicateEdgeError,
    HalfspaceError,
    MedianViolationError,
    NotConvexError,
    UnknownVertexError,
)

from . import oracles


def gv(n, x, y):
    """Vertex id of (x, y) in gen_grid(n)."""
    return y * (n + 1) + x


def cube(dim):
    verts = list(itertools.product((0, 1), repeat=dim))
    edges = [(i, j) for i, j in itertools.combinations(range(len(verts)), 2)
             if sum(a != b for a, b in zip(verts[i], verts[j])) == 1]
    return build_complex(range(len(verts)), edges, 0)


SMALL = [
    lambda: gen_grid(3),
    lambda: gen_tree_ball(3, 3),
    lambda: gen_ball_times_segment(1, 2),
    lambda: gen_example42(2),
    lambda: cube(3),
]


class TestBuild:
    def test_grid_2x2(self, grid2):
        assert grid2.n_vertices == 9
        assert grid2.n_hyperplanes == 4
        assert grid2.dimension == 2

    def test_single_edge(self):
        cc = build_complex([0, 1], [(0, 1)], 0)
        assert cc.n_hyperplanes == 1 and cc.dimension == 1

    def test_path_of_three_edges(self):
        cc = build_complex(range(4), [(0, 1), (1, 2), (2, 3)], 0)
        sizes = sorted((h.minus.bit_count(), h.plus.bit_count()) for h in cc.hyperplanes)
        assert sizes == [(1, 3), (2, 2), (3, 1)]
        assert cc.dimension == 1

    def test_cube_dimension(self):
        assert cube(3).dimension == 3
        assert cube(4).n_hyperplanes == 4

    def test_minus_side_holds_basepoint(self, grid8):
        for h in grid8.hyperplanes:
            assert (h.minus >> grid8.basepoint) & 1
            assert h.minus | h.plus == grid8.all_vertices and not h.minus & h.plus
            assert h.carrier & h.minus and h.carrier & h.plus

    def test_disconnected(self):
        with pytest.raises(DisconnectedGraphError):
            build_complex(range(4), [(0, 1), (2, 3)], 0)

    def test_duplicate_edge(self):
        with pytest.raises(DuplicateEdgeError):
            build_complex(range(3), [(0, 1), (1, 2), (2, 1)], 0)

    def test_five_cycle_rejected(self):
        with pytest.raises(MedianViolationError):
            build_complex(range(5), [(i, (i + 1) % 5) for i in range(5)], 0)

    def test_six_cycle_rejected(self):
        # a partial cube but not median
        with pytest.raises(MedianViolationError):
            build_complex(range(6), [(i, (i + 1) % 6) for i in range(6)], 0)

    def test_cube_minus_vertex_rejected(self):
        verts = [v for v in itertools.product((0, 1), repeat=3) if v != (1, 1, 1)]
        edges = [(i, j) for i, j in itertools.combinations(range(7), 2)
                 if sum(a != b for a, b in zip(verts[i], verts[j])) == 1]
        with pytest.raises(MedianViolationError):
            build_complex(range(7), edges, 0)
        # sampled mode may miss it, the exhaustive count never does
        cc = build_complex(range(7), edges, 0, validate="none")
        assert count_consistent_orientations(cc, 7) == 8

    def test_k23_rejected(self):
        edges = [(a, b) for a in (0, 1) for b in (2, 3, 4)]
        with pytest.raises(MedianViolationError):
            build_complex(range(5), edges, 0)

    def test_halfspace_error_is_median_violation(self):
        assert issubclass(HalfspaceError, MedianViolationError)

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            build_complex([0, 2], [(0, 2)], 0)
        with pytest.raises(ValueError):
            build_complex(range(2), [(0, 1)], 5)
        with pytest.raises(ValueError):
            build_complex(range(2), [(0, 0), (0, 1)], 0)

    @pytest.mark.parametrize("make", SMALL)
    def test_hyperplanes_match_theta_classes(self, make):
        cc = make()
        w = oracles.Walls(cc.edges, cc.n_vertices, cc.basepoint)
        assert len(w.classes) == cc.n_hyperplanes
        for h in cc.hyperplanes:
            dual = {cc.edges[e] for e in h.dual_edges}
            i = w.index_of(dual)
            minus, plus = w.sides[i]
            assert cc.vertex_set(h.minus) == minus
            assert cc.vertex_set(h.plus) == plus
            assert cc.vertex_set(h.carrier) == w.carriers[i]

    @pytest.mark.parametrize("make", SMALL)
    def test_dimension_matches_largest_cube(self, make):
        cc = make()
        w = oracles.Walls(cc.edges, cc.n_vertices, cc.basepoint)
        best = 0
        for v in range(cc.n_vertices):
            at_v = [i for i, c in enumerate(w.classes) if any(v in e for e in c)]
            for size in range(len(at_v), 0, -1):
                if any(all(w.crosses(a, b) for a, b in itertools.combinations(sub, 2))
                       for sub in itertools.combinations(at_v, size)):
                    best = max(best, size)
                    break
        assert cc.dimension == best


class TestMetric:
    def test_grid_distance(self, grid8):
        assert distance(grid8, gv(8, 0, 0), gv(8, 2, 1)) == 3
        assert distance(grid8, 5, 5) == 0

    def test_tree_antipodal_leaves(self, f2ball2):
        d = oracles.all_distances(oracles.graph(f2ball2.edges))
        assert d.max() == 4
        leaves = np.argwhere(d == 4)[0]
        assert distance(f2ball2, *map(int, leaves)) == 4

    def test_unknown_vertex(self, grid2):
        with pytest.raises(UnknownVertexError):
            distance(grid2, 0, 99)
        with pytest.raises(UnknownVertexError):
            separating_set(grid2, -1, 0)

    def test_separating_set_grid(self, grid8):
        w = oracles.Walls(grid8.edges, grid8.n_vertices)
        got = separating_set(grid8, gv(8, 0, 0), gv(8, 2, 1))
        assert len(got) == 3
        expected = set()
        for i, (minus, plus) in enumerate(w.sides):
            if (gv(8, 0, 0) in plus) != (gv(8, 2, 1) in plus):
                expected.add(frozenset(w.classes[i]))
        assert {frozenset(grid8.edges[e] for e in grid8.hyperplanes[h].dual_edges) for h in got} == expected
        # two vertical walls and one horizontal one
        orient = [all(v - u == 1 for u, v in expected_cls) for expected_cls in expected]
        assert sorted(orient) == [False, True, True]

    def test_separating_set_trivial(self, grid2):
        assert separating_set(grid2, 4, 4) == frozenset()
        path = build_complex(range(4), [(0, 1), (1, 2), (2, 3)], 0)
        assert separating_set(path, 0, 3) == frozenset({0, 1, 2})

    @pytest.mark.parametrize("make", SMALL)
    def test_distance_equals_bfs(self, make):
        cc = make()
        d = oracles.all_distances(oracles.graph(cc.edges, cc.n_vertices))
        assert np.array_equal(cc.distance_matrix(), d)
        for x, y in itertools.combinations(range(0, cc.n_vertices, 3), 2):
            assert len(separating_set(cc, x, y)) == d[x, y]

    def test_interval(self, grid2):
        assert interval(grid2, 0, 8) == frozenset(range(9))
        assert interval(grid2, 0, 2) == frozenset({0, 1, 2})


class TestMedian:
    def test_repeated_argument(self, grid8):
        assert median(grid8, 7, 7, 30) == 7

    def test_grid_corner(self, grid8):
        assert median(grid8, gv(8, 0, 0), gv(8, 2, 0), gv(8, 0, 2)) == gv(8, 0, 0)

    def test_tripod(self):
        cc = build_complex(range(4), [(0, 1), (0, 2), (0, 3)], 0)
        assert median(cc, 1, 2, 3) == 0

    @pytest.mark.parametrize("make", SMALL)
    def test_matches_interval_intersection(self, make):
        cc = make()
        d = oracles.all_distances(oracles.graph(cc.edges, cc.n_vertices))
        rng = np.random.default_rng(1)
        for x, y, z in rng.integers(0, cc.n_vertices, size=(300, 3)).tolist():
            assert oracles.medians(d, x, y, z) == {median(cc, x, y, z)}


class TestConvexity:
    def test_hull_singleton(self, grid8):
        assert convex_hull(grid8, [17]) == frozenset({17})

    def test_hull_grid_square(self, grid8):
        hull = convex_hull(grid8, [gv(8, 0, 0), gv(8, 2, 2)])
        assert hull == frozenset(gv(8, x, y) for x in range(3) for y in range(3))

    def test_hull_tree_pair_is_geodesic(self, f2ball2):
        d = oracles.all_distances(oracles.graph(f2ball2.edges))
        a, b = map(int, np.argwhere(d == 4)[0])
        assert convex_hull(f2ball2, [a, b]) == frozenset(oracles.interval(d, a, b))

    @pytest.mark.parametrize("make", SMALL)
    def test_hull_matches_interval_closure(self, make):
        cc = make()
        d = oracles.all_distances(oracles.graph(cc.edges, cc.n_vertices))
        rng = np.random.default_rng(2)
        for _ in range(25):
            s = set(rng.integers(0, cc.n_vertices, size=3).tolist())
            assert convex_hull(cc, s) == frozenset(oracles.convex_hull(d, s))

    def test_is_convex(self, grid8):
        assert is_convex(grid8, [3])
        assert not is_convex(grid8, [gv(8, 0, 0), gv(8, 1, 0), gv(8, 0, 1)])
        for h in grid8.hyperplanes[:5]:
            assert is_convex(grid8, grid8.vertex_set(h.plus))
            assert is_convex(grid8, grid8.vertex_set(h.minus))

    def test_hull_idempotent_monotone(self, ex42_3):
        rng = np.random.default_rng(3)
        for _ in range(30):
            s = set(rng.integers(0, ex42_3.n_vertices, size=2).tolist())
            t = s | set(rng.integers(0, ex42_3.n_vertices, size=2).tolist())
            hs = convex_hull(ex42_3, s)
            assert convex_hull(ex42_3, hs) == hs
            assert hs <= convex_hull(ex42_3, t)

    def test_empty_hull_rejected(self, grid2):
        with pytest.raises(ValueError):
            convex_hull(grid2, [])

    @pytest.mark.parametrize("make", SMALL)
    def test_ball_hull_diameter(self, make):
        assert hull_diameter_excess(make(), 3) == []


class TestGate:
    def test_inside(self, grid8):
        column = [gv(8, 0, y) for y in range(9)]
        assert gate(grid8, column, gv(8, 0, 4)) == gv(8, 0, 4)

    def test_grid_column(self, grid8):
        column = [gv(8, 0, y) for y in range(9)]
        assert gate(grid8, column, gv(8, 3, 2)) == gv(8, 0, 2)

    def test_tree_branch(self):
        # spine 0-1-2-3 with a branch 1-4-5
        cc = build_complex(range(6), [(0, 1), (1, 2), (2, 3), (1, 4), (4, 5)], 0)
        assert gate(cc, [0, 1, 2, 3], 5) == 1

    def test_rejects_nonconvex_and_empty(self, grid8):
        with pytest.raises(NotConvexError):
            gate(grid8, [gv(8, 0, 0), gv(8, 2, 0)], gv(8, 1, 1))
        with pytest.raises(NotConvexError):
            gate(grid8, [], 0)

    @pytest.mark.parametrize("make", SMALL)
    def test_gate_is_unique_nearest(self, make):
        cc = make()
        d = oracles.all_distances(oracles.graph(cc.edges, cc.n_vertices))
        rng = np.random.default_rng(4)
        for _ in range(10):
            z = oracles.convex_hull(d, rng.integers(0, cc.n_vertices, size=2).tolist())
            for x in range(cc.n_vertices):
                near = oracles.nearest(d, z, x)
                assert near == [gate(cc, z, x)]
                sep = separating_set(cc, x, near[0])
                expected = {h for h in range(cc.n_hyperplanes)
                            if all(((cc.codes[x] ^ cc.codes[v]) >> h) & 1 for v in z)}
                assert sep == expected

    def test_pair_check_inside(self, grid8):
        z = [gv(8, x, y) for x in range(4) for y in range(4)]
        hs, ok = gate_pair_check(grid8, z, gv(8, 1, 1), gv(8, 3, 2))
        assert ok and hs == separating_set(grid8, gv(8, 1, 1), gv(8, 3, 2))

    def test_pair_check_grid_column(self, grid8):
        column = [gv(8, 0, y) for y in range(9)]
        hs, ok = gate_pair_check(grid8, column, gv(8, 3, 2), gv(8, 5, 7))
        assert ok
        assert hs == separating_set(grid8, gv(8, 0, 2), gv(8, 0, 7))
        assert len(hs) == 5

    def test_pair_check_tree_same_branch(self):
        cc = build_complex(range(6), [(0, 1), (1, 2), (2, 3), (1, 4), (4, 5)], 0)
        hs, ok = gate_pair_check(cc, [0, 1, 2, 3], 4, 5)
        assert ok and hs == frozenset()
