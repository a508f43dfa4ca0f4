import itertools

import pytest

from relcat.catcore import (
    Budget,
    Functor,
    RelativeCategory,
    chaotic_category,
    constant_functor,
    discrete_category,
    enumerate_functors,
    identity_functor,
    is_relative_functor,
    opposite,
    ordinal,
    ordinal_max,
    ordinal_min,
    product,
    validate_category,
)
from relcat.nerve import (
    BisimplicialMap,
    CategoryDiagram,
    bisimplicial_column,
    bisimplicial_row,
    chain_levels,
    check_last_vertex_natural,
    classical_nerve,
    classical_nerve_chains,
    identity_bisimplicial_map,
    last_vertex_map,
    nerve_levelwise,
    nerve_map,
    relative_nerve,
    relative_nerve_map,
    transpose_bisimplicial,
    validate_bisimplicial_map,
    validate_bisimplicial_set,
    validate_category_diagram,
    weq_chain_category,
    weq_chain_diagram,
)
from relcat.simplicial import (
    SimplicialMap,
    nondegenerate,
    product2,
    reverse,
    standard_simplex,
    standard_simplex_labels,
    validate_simplicial_map,
    validate_simplicial_set,
)


def constant_diagram(cat, K):
    ident = identity_functor(cat)
    faces = [()] + [tuple(ident for _ in range(k + 1)) for k in range(1, K + 1)]
    degens = [tuple(ident for _ in range(k + 1)) for k in range(K)] + [()]
    return CategoryDiagram(K, tuple(cat for _ in range(K + 1)), tuple(faces), tuple(degens))


class TestClassicalNerve:
    def test_interval_sizes(self):
        assert classical_nerve(ordinal(1), 2).sizes == (2, 3, 4)

    def test_point_sizes(self):
        assert classical_nerve(ordinal(0), 3).sizes == (1, 1, 1, 1)

    def test_nerve_of_triangle_is_standard_simplex(self):
        assert classical_nerve(ordinal(2), 2) == standard_simplex(2, 2)

    def test_valid_on_various_categories(self):
        for cat in (ordinal(2), chaotic_category(2), discrete_category(3)):
            assert validate_simplicial_set(classical_nerve(cat, 2)).ok

    def test_chaotic_sizes(self):
        assert classical_nerve(chaotic_category(2), 2).sizes == (2, 4, 8)

    def test_nondegenerate_counts(self):
        nd = nondegenerate(classical_nerve(ordinal(1), 2))
        assert tuple(map(len, nd)) == (2, 1, 0)

    def test_opposite_nerve_is_reverse(self):
        for cat in (ordinal(2), chaotic_category(2)):
            nc = classical_nerve_chains(cat, 2)
            nop = classical_nerve_chains(opposite(cat), 2)
            levels = []
            for q in range(3):
                level = tuple(
                    nop.index(q, (tuple(reversed(objs)), tuple(reversed(mors))))
                    for objs, mors in nc.chains[q]
                )
                assert sorted(level) == list(range(len(level)))
                levels.append(level)
            f = SimplicialMap(reverse(nc.space), nop.space, tuple(levels))
            assert validate_simplicial_map(f).ok

    def test_nerve_of_product_is_product_of_nerves(self):
        ca, cb = ordinal(1), chaotic_category(2)
        prod = product(ca, cb)
        np_chains = classical_nerve_chains(prod, 2)
        na = classical_nerve_chains(ca, 2)
        nb = classical_nerve_chains(cb, 2)
        target = product2(na.space, nb.space)
        mb, nbo = cb.n_morphisms, cb.n_objects
        levels = []
        for q in range(3):
            level = []
            for objs, mors in np_chains.chains[q]:
                ia = na.index(
                    q, (tuple(o // nbo for o in objs), tuple(m // mb for m in mors))
                )
                ib = nb.index(
                    q, (tuple(o % nbo for o in objs), tuple(m % mb for m in mors))
                )
                level.append(ia * nb.space.sizes[q] + ib)
            assert sorted(level) == list(range(len(level)))
            levels.append(tuple(level))
        f = SimplicialMap(np_chains.space, target, tuple(levels))
        assert validate_simplicial_map(f).ok

    def test_nerve_map_of_identity(self):
        cat = ordinal(2)
        f = nerve_map(identity_functor(cat), 2)
        assert f.levels == tuple(tuple(range(s)) for s in f.source.sizes)

    def test_nerve_map_valid(self):
        f = nerve_map(constant_functor(ordinal(2), ordinal(1), 1), 2)
        assert validate_simplicial_map(f).ok
        budget = Budget(10_000)
        for fun in enumerate_functors(ordinal(1), chaotic_category(2), budget):
            assert validate_simplicial_map(nerve_map(fun, 2)).ok


class TestBisimplicial:
    def test_constant_diagram_nerve(self):
        dia = constant_diagram(ordinal(1), 2)
        assert validate_category_diagram(dia).ok
        B = nerve_levelwise(dia, 2)
        assert validate_bisimplicial_set(B).ok
        for k in range(3):
            assert bisimplicial_row(B, k) == classical_nerve(ordinal(1), 2)

    def test_diagram_incoherence_detected(self):
        cat = discrete_category(2)
        ident = identity_functor(cat)
        swap = Functor(cat, cat, (1, 0), (1, 0))
        dia = CategoryDiagram(
            1,
            (cat, cat),
            ((), (ident, swap)),
            ((ident,), ()),
        )
        rep = validate_category_diagram(dia)
        assert "face-degen" in rep.kinds()

    def test_row_column_extraction(self):
        dia = constant_diagram(ordinal(1), 1)
        B = nerve_levelwise(dia, 2)
        row = bisimplicial_row(B, 1)
        col = bisimplicial_column(B, 2)
        assert validate_simplicial_set(row).ok
        assert validate_simplicial_set(col).ok
        assert row.sizes == (2, 3, 4)
        assert col.sizes == (4, 4)

    def test_transpose(self):
        dia = constant_diagram(ordinal(1), 1)
        B = nerve_levelwise(dia, 2)
        T = transpose_bisimplicial(B)
        assert validate_bisimplicial_set(T).ok
        assert T.sizes == tuple(zip(*B.sizes))
        TT = transpose_bisimplicial(T)
        for k in range(B.outer_trunc + 1):
            assert bisimplicial_row(TT, k) == bisimplicial_row(B, k)
        for p in range(B.inner_trunc + 1):
            assert bisimplicial_column(TT, p) == bisimplicial_column(B, p)

    def test_identity_bisimplicial_map(self):
        B = nerve_levelwise(constant_diagram(ordinal(1), 1), 1)
        assert validate_bisimplicial_map(identity_bisimplicial_map(B)).ok


class TestWeqChains:
    def test_level_zero_is_underlying(self):
        rel = ordinal_max(2)
        cat, cols, rungs = weq_chain_category(rel, 0)
        assert cat.n_objects == 3
        assert cat.n_morphisms == 6
        assert validate_category(cat).ok

    def test_marked_chains_only(self):
        rel = ordinal_min(1)
        cat, cols, rungs = weq_chain_category(rel, 1)
        # only identity chains: one per object
        assert cat.n_objects == 2
        assert cat.n_morphisms == 3
        assert validate_category(cat).ok

    def test_all_marked(self):
        rel = ordinal_max(1)
        cat, cols, rungs = weq_chain_category(rel, 1)
        assert cat.n_objects == 3
        assert validate_category(cat).ok

    def test_diagram_coherent(self):
        for rel in (ordinal_min(1), ordinal_max(1)):
            dia = weq_chain_diagram(rel, 2)
            assert validate_category_diagram(dia).ok


class TestRelativeNerve:
    def test_point(self):
        B = relative_nerve(ordinal_min(0), 2, 2)
        assert all(B.size(k, p) == 1 for k in range(3) for p in range(3))
        assert validate_bisimplicial_set(B).ok

    def test_minimal_interval(self):
        B = relative_nerve(ordinal_min(1), 1, 1)
        assert B.size(0, 0) == 2
        assert B.size(1, 0) == 3
        assert B.size(0, 1) == 2
        assert validate_bisimplicial_set(B).ok

    def test_maximal_interval(self):
        B = relative_nerve(ordinal_max(1), 1, 1)
        assert B.size(0, 1) == 3
        assert validate_bisimplicial_set(B).ok

    def test_chain_direction_row_counts(self):
        rel = ordinal_min(1)
        B = relative_nerve(rel, 2, 2)
        col = bisimplicial_column(B, 0)
        assert col.sizes == classical_nerve(rel.underlying, 2).sizes

    def test_agrees_with_raw_functor_enumeration(self):
        fixtures = [
            ordinal_min(1),
            ordinal_max(1),
            RelativeCategory(chaotic_category(2), frozenset(range(4))),
        ]
        for rel in fixtures:
            B = relative_nerve(rel, 1, 1)
            for p in range(2):
                for q in range(2):
                    grid = product(ordinal(p), ordinal(q))
                    mb = ordinal(q).n_morphisms
                    hat_ids = set(ordinal(p).identity)
                    weq = frozenset(
                        f * mb + g
                        for f in hat_ids
                        for g in range(mb)
                    )
                    grid_rel = RelativeCategory(grid, weq)
                    count = sum(
                        1
                        for fun in enumerate_functors(
                            grid, rel.underlying, Budget(1_000_000)
                        )
                        if is_relative_functor(fun, grid_rel, rel)
                    )
                    assert B.size(p, q) == count, (p, q)

    def test_functoriality_identity(self):
        rel = ordinal_max(1)
        f = relative_nerve_map(identity_functor(rel.underlying), rel, rel, 1, 1)
        assert validate_bisimplicial_map(f).ok
        assert f.cells == identity_bisimplicial_map(f.source).cells

    def test_functoriality_collapse(self):
        rel_x = ordinal_max(1)
        rel_y = ordinal_max(0)
        fun = constant_functor(rel_x.underlying, rel_y.underlying, 0)
        f = relative_nerve_map(fun, rel_x, rel_y, 1, 1)
        assert validate_bisimplicial_map(f).ok

    def test_functoriality_rejects_nonrelative(self):
        rel_x = ordinal_max(1)
        rel_y = ordinal_min(1)
        with pytest.raises(ValueError):
            relative_nerve_map(
                identity_functor(rel_x.underlying), rel_x, rel_y, 1, 1
            )


class TestLastVertex:
    def test_point_target(self):
        f = last_vertex_map(standard_simplex(0, 2), 2)
        assert validate_simplicial_map(f).ok
        assert all(v == 0 for level in f.levels for v in level)

    def test_object_level_values(self):
        X = standard_simplex(1, 2)
        labels = standard_simplex_labels(1, 2)
        f = last_vertex_map(X, 2)
        # nerve level 0 lists the objects (p, x) of the simplex category in
        # order: (0,0), (0,1), (1,0), (1,1), (1,2)
        edge_obj = 2 + labels[1].index((0, 1))
        assert f.levels[0][edge_obj] == labels[0].index((1,))

    def test_simplicial_on_interval(self):
        f = last_vertex_map(standard_simplex(1, 2), 2)
        assert validate_simplicial_map(f).ok

    def test_simplicial_on_facet_complex(self):
        from relcat.simplicial import from_facets

        X = from_facets([(0, 1), (1, 2), (0, 2)], 2)
        f = last_vertex_map(X, 2)
        assert validate_simplicial_map(f).ok
        f1 = last_vertex_map(X, 1)
        assert validate_simplicial_map(f1).ok

    def test_depth_guard(self):
        with pytest.raises(ValueError):
            last_vertex_map(standard_simplex(1, 1), 2)

    def test_natural_against_collapse(self):
        X = standard_simplex(1, 2)
        pt = standard_simplex(0, 2)
        h = SimplicialMap(
            X, pt, tuple((0,) * X.sizes[n] for n in range(3))
        )
        assert validate_simplicial_map(h).ok
        assert check_last_vertex_natural(h, 2).ok

    def test_natural_against_inclusion(self):
        from relcat.simplicial import from_facets, facet_complex_labels

        X = from_facets([(0, 1)], 2)
        Y = from_facets([(0, 1), (1, 2)], 2)
        xl = facet_complex_labels([(0, 1)], 2)
        yl = facet_complex_labels([(0, 1), (1, 2)], 2)
        levels = tuple(
            tuple(yl[n].index(lab) for lab in xl[n]) for n in range(3)
        )
        h = SimplicialMap(X, Y, levels)
        assert validate_simplicial_map(h).ok
        assert check_last_vertex_natural(h, 2).ok

    def test_nonsimplicial_map_rejected(self):
        # vertex swap without fixing edges: no functor of simplex categories
        X = standard_simplex(1, 1)
        bad = SimplicialMap(X, X, ((1, 0), (0, 1, 2)))
        with pytest.raises(ValueError):
            check_last_vertex_natural(bad, 1)
