import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relcat._snf import HAS_NUMBA, numba_enabled, smith_normal_form
from relcat.catcore import ordinal_min
from relcat.homology import (
    _check_square_zero,
    chain_complex,
    component_count,
    cone_probe,
    homology,
    levelwise_probe,
    pi0,
    pi0_comparison,
    probe_level_map,
)
from relcat.nerve import (
    BisimplicialMap,
    TruncatedBisimplicialSet,
    classical_nerve,
    identity_bisimplicial_map,
    relative_nerve,
    validate_bisimplicial_map,
    validate_bisimplicial_set,
)
from relcat.reports import FAIL, INCONCLUSIVE, PASS
from relcat.simplicial import (
    SimplicialMap,
    disjoint_union,
    facet_complex_labels,
    from_facets,
    identity_map,
    nondegenerate,
    reverse,
    standard_simplex,
    standard_simplex_labels,
    truncate,
    validate_simplicial_map,
    validate_simplicial_set,
)

CIRCLE = from_facets([(0, 1), (0, 2), (1, 2)], 2)
TWO_POINTS = from_facets([(0,), (1,)], 1)

# six-vertex triangulation of the projective plane (vertices renumbered 0..5)
PROJECTIVE_PLANE_FACETS = [
    (0, 1, 2),
    (0, 2, 3),
    (0, 3, 4),
    (0, 1, 5),
    (0, 4, 5),
    (1, 2, 4),
    (1, 3, 4),
    (1, 3, 5),
    (2, 3, 5),
    (2, 4, 5),
]


def det_by_cofactors(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = 0
    sign = 1
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in rows[1:]]
        total += sign * rows[0][j] * det_by_cofactors(minor)
        sign = -sign
    return total


def rank_over_rationals(rows):
    mat = [[Fraction(v) for v in row] for row in rows]
    rank = 0
    cols = len(mat[0]) if mat else 0
    for j in range(cols):
        piv = next((i for i in range(rank, len(mat)) if mat[i][j]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = 1 / mat[rank][j]
        mat[rank] = [v * inv for v in mat[rank]]
        for i in range(len(mat)):
            if i != rank and mat[i][j]:
                factor = mat[i][j]
                mat[i] = [a - factor * b for a, b in zip(mat[i], mat[rank])]
        rank += 1
    return rank


small_matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(
            st.lists(st.integers(-9, 9), min_size=n, max_size=n),
            min_size=m,
            max_size=m,
        )
    )
)


class TestSmithNormalForm:
    def test_diagonal_input(self):
        assert smith_normal_form([[1, 0], [0, 2]]) == ((1, 2), 2)

    def test_pinned_example(self):
        assert smith_normal_form([[2, 4], [6, 8]]) == ((2, 4), 2)

    def test_zero_matrix(self):
        assert smith_normal_form([[0, 0], [0, 0], [0, 0]]) == ((), 0)

    def test_empty_matrix(self):
        assert smith_normal_form([]) == ((), 0)
        assert smith_normal_form([[], []]) == ((), 0)

    def test_ragged_rejected(self):
        with pytest.raises(ValueError):
            smith_normal_form([[1, 2], [3]])

    def test_single_entry(self):
        assert smith_normal_form([[-6]]) == ((6,), 1)

    def test_huge_entries_fall_back_to_exact_path(self):
        big = 1 << 40
        invs, rank = smith_normal_form([[big, 1], [1, 1]])
        assert rank == 2
        assert invs == (1, big - 1)

    @settings(max_examples=60, deadline=None)
    @given(small_matrices)
    def test_divisibility_chain_and_rank(self, rows):
        invs, rank = smith_normal_form(rows)
        assert len(invs) == rank
        assert all(v > 0 for v in invs)
        for a, b in zip(invs, invs[1:]):
            assert b % a == 0
        assert rank == rank_over_rationals(rows)

    @settings(max_examples=40, deadline=None)
    @given(
        st.integers(1, 3).flatmap(
            lambda n: st.lists(
                st.lists(st.integers(-6, 6), min_size=n, max_size=n),
                min_size=n,
                max_size=n,
            )
        )
    )
    def test_product_of_invariants_is_determinant(self, rows):
        det = det_by_cofactors(rows)
        invs, rank = smith_normal_form(rows)
        if det == 0:
            assert rank < len(rows)
        else:
            prod = 1
            for v in invs:
                prod *= v
            assert prod == abs(det)

    @pytest.mark.skipif(not HAS_NUMBA, reason="numba not installed")
    def test_both_backends_agree(self, monkeypatch):
        samples = [
            [[2, 4], [6, 8]],
            [[0, 3, 1], [2, 0, 4], [5, 5, 5]],
            [[12, 8], [4, 10], [6, 6]],
        ]
        fast = [smith_normal_form(m) for m in samples]
        monkeypatch.setenv("RELCAT_DISABLE_NUMBA", "1")
        assert not numba_enabled()
        slow = [smith_normal_form(m) for m in samples]
        assert fast == slow


class TestChainComplex:
    def test_circle_dimensions(self):
        cc = chain_complex(CIRCLE, 2)
        assert cc.dims == (3, 3, 0)
        # every edge has one head and one tail
        for col in range(3):
            column = [cc.boundaries[1][r][col] for r in range(3)]
            assert sorted(column) == [-1, 0, 1]

    def test_filled_triangle_boundary(self):
        X = standard_simplex(2, 2)
        labels = standard_simplex_labels(2, 2)
        cc = chain_complex(X, 2)
        assert cc.dims == (3, 3, 1)
        nd_edges = nondegenerate(X)[1]
        signs = {labels[1][e]: cc.boundaries[2][i][0] for i, e in enumerate(nd_edges)}
        assert signs == {(1, 2): 1, (0, 2): -1, (0, 1): 1}

    def test_degenerate_faces_vanish(self):
        # the interval's nondegenerate edge has two vertices; its degenerate
        # neighbours never appear as basis elements
        cc = chain_complex(standard_simplex(1, 2), 2)
        assert cc.dims == (2, 1, 0)

    def test_too_deep_rejected(self):
        with pytest.raises(ValueError):
            chain_complex(CIRCLE, 3)

    def test_square_zero_guard_trips_on_garbage(self):
        with pytest.raises(AssertionError):
            _check_square_zero(
                (1, 1, 1), ((), ((1,),), ((1,),)), "planted"
            )


class TestHomology:
    def test_simplices_are_acyclic(self):
        for n in range(3):
            prof = homology(standard_simplex(n, n + 1), n)
            assert prof.betti == (1,) + (0,) * n
            assert all(not t for t in prof.torsion)
            assert not prof.trivial  # a point is connected, not empty

    def test_circle(self):
        prof = homology(CIRCLE, 1)
        assert prof.betti == (1, 1)
        assert prof.torsion == ((), ())

    def test_sphere(self):
        sphere = from_facets(
            [f for f in itertools.combinations(range(4), 3)], 3
        )
        prof = homology(sphere, 2)
        assert prof.betti == (1, 0, 1)
        assert prof.torsion == ((), (), ())

    def test_projective_plane(self):
        X = from_facets(PROJECTIVE_PLANE_FACETS, 3)
        assert validate_simplicial_set(X).ok
        nd = nondegenerate(X)
        assert (len(nd[0]), len(nd[1]), len(nd[2])) == (6, 15, 10)
        prof = homology(X, 2)
        assert prof.betti == (1, 0, 0)
        assert prof.torsion == ((), (2,), ())

    def test_projective_plane_on_exact_path(self, monkeypatch):
        monkeypatch.setenv("RELCAT_DISABLE_NUMBA", "1")
        prof = homology(from_facets(PROJECTIVE_PLANE_FACETS, 3), 2)
        assert prof.betti == (1, 0, 0)
        assert prof.torsion == ((), (2,), ())

    def test_reverse_invariance_on_fixtures(self):
        for X, d in [
            (CIRCLE, 1),
            (from_facets(PROJECTIVE_PLANE_FACETS, 3), 2),
            (standard_simplex(2, 3), 2),
        ]:
            assert homology(reverse(X), d) == homology(X, d)

    def test_disjoint_union_adds_betti(self):
        both = disjoint_union([CIRCLE, truncate(standard_simplex(1, 2), 2)])
        prof = homology(both, 1)
        assert prof.betti == (2, 1)

    def test_too_deep_rejected(self):
        with pytest.raises(ValueError):
            homology(CIRCLE, 2)

    def test_str_is_readable(self):
        text = str(homology(from_facets(PROJECTIVE_PLANE_FACETS, 3), 2))
        assert "H_0=Z^1" in text and "torsion[2]" in text


@settings(max_examples=20, deadline=None)
@given(
    st.integers(2, 4),
    st.lists(
        st.sets(st.integers(0, 3), min_size=1, max_size=3), min_size=1, max_size=4
    ),
)
def test_random_complexes_reverse_invariance(n_vertices, raw_facets):
    facets = [tuple(sorted(f & set(range(n_vertices)))) for f in raw_facets]
    facets = [f for f in facets if f]
    if not facets:
        facets = [(0,)]
    X = from_facets(facets, 2)
    assert homology(reverse(X), 1) == homology(X, 1)
    probe = cone_probe(identity_map(X), 1)
    assert probe.trivial


class TestComponents:
    def test_two_points(self):
        assert pi0(TWO_POINTS) == (0, 1)
        assert component_count(TWO_POINTS) == 2

    def test_interval(self):
        assert pi0(standard_simplex(1, 1)) == (0, 0)

    def test_nerve_of_marked_ordinal_is_connected(self):
        nerve = classical_nerve(ordinal_min(2).underlying, 1)
        assert component_count(nerve) == 1

    def test_zero_truncation_is_discrete(self):
        assert pi0(truncate(CIRCLE, 0)) == (0, 1, 2)

    def test_representatives_are_least_members(self):
        # path 2 - 0 - 1 collapses to the single representative 0
        path = from_facets([(0, 2), (0, 1)], 1)
        assert set(pi0(path)) == {0}

    def test_union_is_additive(self):
        both = disjoint_union([CIRCLE, from_facets([(0,), (1,)], 2)])
        assert component_count(both) == 3

    def test_comparison_bijective(self):
        ok, detail = pi0_comparison(identity_map(TWO_POINTS))
        assert ok and "2 component" in detail

    def test_comparison_detects_merge(self):
        point = from_facets([(0,)], 1)
        collapse = SimplicialMap(TWO_POINTS, point, ((0, 0), (0, 0)))
        assert validate_simplicial_map(collapse).ok
        ok, detail = pi0_comparison(collapse)
        assert not ok and "merge" in detail

    def test_comparison_detects_miss(self):
        point = from_facets([(0,)], 1)
        include = SimplicialMap(point, TWO_POINTS, ((0,), (0,)))
        assert validate_simplicial_map(include).ok
        ok, detail = pi0_comparison(include)
        assert not ok and "missed" in detail


def vertex_inclusion(target, vertex, trunc):
    """The map from a point hitting ``vertex`` and its degeneracies."""
    point = from_facets([(0,)], trunc)
    levels = []
    cur = vertex
    for n in range(trunc + 1):
        levels.append((cur,))
        if n < trunc:
            cur = target.degeneracies[n][0][cur]
    f = SimplicialMap(point, target, tuple(levels))
    assert validate_simplicial_map(f).ok
    return f


class TestConeProbe:
    def test_identity_trivial(self):
        assert cone_probe(identity_map(standard_simplex(1, 2)), 1).trivial

    def test_identity_on_circle_trivial(self):
        assert cone_probe(identity_map(CIRCLE), 1).trivial

    def test_vertex_into_interval_trivial(self):
        f = vertex_inclusion(standard_simplex(1, 2), 0, 2)
        assert cone_probe(f, 1).trivial

    def test_vertex_into_two_points_obstructed(self):
        f = vertex_inclusion(truncate(TWO_POINTS, 1), 0, 1)
        probe = cone_probe(f, 0)
        assert not probe.trivial
        assert probe.profile.betti == (1,)
        assert "NONTRIVIAL" in str(probe)

    def test_boundary_into_disc_sees_relative_sphere(self):
        disc = standard_simplex(2, 3)
        ring = from_facets([(0, 1), (0, 2), (1, 2)], 3)
        disc_labels = standard_simplex_labels(2, 3)
        ring_labels = facet_complex_labels([(0, 1), (0, 2), (1, 2)], 3)
        levels = tuple(
            tuple(disc_labels[n].index(lab) for lab in ring_labels[n])
            for n in range(4)
        )
        include = SimplicialMap(ring, disc, levels)
        assert validate_simplicial_map(include).ok
        assert cone_probe(include, 1).trivial
        probe = cone_probe(include, 2)
        assert probe.profile.betti == (0, 0, 1)
        assert probe.profile.torsion == ((), (), ())

    def test_truncation_mismatch_rejected(self):
        f = SimplicialMap(truncate(CIRCLE, 1), CIRCLE, ((0, 1, 2), tuple(range(6))))
        with pytest.raises(ValueError):
            cone_probe(f, 0)

    def test_degree_too_deep_rejected(self):
        with pytest.raises(ValueError):
            cone_probe(identity_map(CIRCLE), 2)


def constant_rows(X, depth):
    """A bisimplicial set whose every row is ``X`` and outer maps are identity."""
    ident = tuple(tuple(range(X.sizes[p])) for p in range(X.trunc + 1))
    sizes = tuple(X.sizes for _ in range(depth + 1))
    outer_faces = [()]
    outer_degens = []
    for k in range(depth + 1):
        if k >= 1:
            outer_faces.append(tuple(tuple(ident[p] for _ in range(k + 1)) for p in range(X.trunc + 1)))
        if k < depth:
            outer_degens.append(tuple(tuple(ident[p] for _ in range(k + 1)) for p in range(X.trunc + 1)))
    outer_degens.append(())
    inner_faces = tuple(X.faces for _ in range(depth + 1))
    inner_degens = tuple(X.degeneracies for _ in range(depth + 1))
    B = TruncatedBisimplicialSet(
        depth,
        X.trunc,
        sizes,
        tuple(outer_faces),
        tuple(outer_degens),
        inner_faces,
        inner_degens,
    )
    assert validate_bisimplicial_set(B).ok
    return B


class TestLevelwiseProbe:
    def test_identity_on_relative_nerve_passes(self):
        B = relative_nerve(ordinal_min(1), 2, 2)
        probe = levelwise_probe(identity_bisimplicial_map(B), "outer", 1)
        assert probe.verdict == PASS
        assert [lv.verdict for lv in probe.levels] == [PASS, PASS, PASS]

    def test_inner_axis_smoke(self):
        B = relative_nerve(ordinal_min(1), 2, 2)
        probe = levelwise_probe(identity_bisimplicial_map(B), "inner", 1)
        assert probe.verdict == PASS

    def test_planted_failure_at_every_level(self):
        point_rows = constant_rows(from_facets([(0,)], 1), 1)
        double_rows = constant_rows(TWO_POINTS, 1)
        cells = tuple(((0,), (0,)) for _ in range(2))
        F = BisimplicialMap(point_rows, double_rows, cells)
        assert validate_bisimplicial_map(F).ok
        probe = levelwise_probe(F, "outer", 0)
        assert probe.verdict == FAIL
        assert probe.levels[0].verdict == FAIL
        assert "missed" in probe.levels[0].detail

    def test_degree_beyond_truncation_is_inconclusive(self):
        B = constant_rows(from_facets([(0,)], 1), 1)
        probe = levelwise_probe(identity_bisimplicial_map(B), "outer", 1)
        assert probe.verdict == INCONCLUSIVE
        assert "too shallow" in probe.levels[0].detail

    def test_bad_axis_rejected(self):
        B = constant_rows(from_facets([(0,)], 1), 1)
        with pytest.raises(ValueError):
            levelwise_probe(identity_bisimplicial_map(B), "diagonal", 0)

    def test_probe_level_map_wording(self):
        verdict, detail = probe_level_map(identity_map(CIRCLE), 1)
        assert verdict == PASS
        assert "trivial" in detail
